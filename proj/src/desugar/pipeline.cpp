#include "b2y/desugar/desugar.hpp"

#include <chrono>

namespace b2y::desugar {

std::optional<Result> run(bpl::Program const& p, Options const& opt,
                          DiagnosticEngine& diags) {
    using Clock = std::chrono::steady_clock;
    bpl::Program cur = p;
    std::optional<sema::TypeInfo> info = sema::typecheck(cur, diags);
    if (!info) return std::nullopt;

    auto timed = [&](char const* name, auto&& fn) -> bool {
        auto t0 = Clock::now();
        bool ok = fn();
        if (opt.passTimer)
            opt.passTimer(name, std::chrono::duration<double, std::milli>(
                                    Clock::now() - t0)
                                    .count());
        return ok;
    };
    // Re-typecheck between passes: node-keyed tables go stale as soon as the
    // tree is rebuilt.
    auto step = [&](char const* name, auto&& pass) -> bool {
        return timed(name, [&] {
            auto next = pass();
            if (!next) return false;
            cur = std::move(*next);
            info = sema::typecheck(cur, diags);
            return info.has_value();
        });
    };

    if (!step("constants", [&] {
            return expandConstantConstraints(cur, *info, diags);
        }))
        return std::nullopt;
    if (!timed("type-quantifiers",
               [&] { return rejectTypeQuantifiers(cur, diags); }))
        return std::nullopt;
    if (!step("lambdas", [&] { return liftLambdas(cur, *info, diags); }))
        return std::nullopt;
    if (!step("call-forall",
              [&] { return expandCallForall(cur, *info, diags); }))
        return std::nullopt;
    if (!step("function-bodies",
              [&] { return axiomatizeFunctionBodies(cur, *info, diags); }))
        return std::nullopt;
    if (!step("goto-structuring",
              [&] { return structureGotos(cur, opt.gotoMode, diags); }))
        return std::nullopt;
    if (!step("monomorphization", [&] {
            return monomorphizeMaps(cur, *info, opt.monoCap, diags);
        }))
        return std::nullopt;
    return Result{std::move(cur), std::move(*info)};
}

} // namespace b2y::desugar
