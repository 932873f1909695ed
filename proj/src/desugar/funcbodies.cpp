#include "b2y/desugar/desugar.hpp"

namespace b2y::desugar {

using bpl::BinOp;
using bpl::Decl;
using bpl::DeclRef;
using bpl::Expr;
using bpl::ExprRef;

std::optional<bpl::Program> axiomatizeFunctionBodies(bpl::Program const& p,
                                                     sema::TypeInfo const& info,
                                                     DiagnosticEngine& diags) {
    (void)info;
    (void)diags;
    std::set<std::string> base = declaredNames(p);
    FreshNames progFresh(base);
    bpl::Program out;
    for (auto const& d : p.decls) {
        if (d->kind != Decl::Kind::FunctionDecl || !d->bodyExpr) {
            out.decls.push_back(d);
            continue;
        }
        auto copy = std::make_shared<Decl>(*d);
        copy->bodyExpr = nullptr;
        out.decls.push_back(std::move(copy));

        // Positional z-names; the body is rewritten so nested binders that
        // shadow a parameter keep their meaning.
        FreshNames zf(base);
        std::map<std::string, ExprRef> sub;
        std::vector<bpl::BoundVar> bound;
        std::vector<ExprRef> args;
        for (std::size_t i = 0; i < d->params.size(); ++i) {
            std::string z = zf.fresh("z" + std::to_string(i));
            bound.push_back({z, d->params[i].type, d->params[i].span});
            args.push_back(Expr::ident(z, d->params[i].span));
            if (!d->params[i].name.empty())
                sub[d->params[i].name] = args.back();
        }
        ExprRef body = substituteExpr(d->bodyExpr, sub, {}, progFresh);
        ExprRef eq = Expr::binary(
            BinOp::Eq, Expr::call(d->name, std::move(args), d->span),
            std::move(body), d->span);
        ExprRef ax = (bound.empty() && d->typeParams.empty())
                         ? std::move(eq)
                         : Expr::quant(Expr::QKind::Forall, d->typeParams,
                                       std::move(bound), {}, {},
                                       std::move(eq), d->span);
        auto axd = Decl::make(Decl::Kind::AxiomDecl);
        axd->expr = std::move(ax);
        axd->synth = Decl::Synth::FuncBody;
        axd->span = d->span;
        out.decls.push_back(std::move(axd));
    }
    return out;
}

} // namespace b2y::desugar
