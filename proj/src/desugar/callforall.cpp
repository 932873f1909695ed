#include "b2y/desugar/desugar.hpp"

namespace b2y::desugar {

using bpl::BinOp;
using bpl::Decl;
using bpl::DeclRef;
using bpl::Expr;
using bpl::ExprRef;
using bpl::Stmt;
using bpl::StmtRef;
using bpl::TypeRef;

namespace {

// The callee cannot write state, so its entry snapshot is the state at the
// assume: old() wrappers in its postconditions drop away.
ExprRef stripOld(ExprRef const& e) {
    return rewriteExpr(e, [](Expr const* orig, ExprRef rebuilt) {
        return orig->kind == Expr::Kind::Old ? rebuilt->a : rebuilt;
    });
}

struct Expander {
    sema::TypeInfo const& info;
    DiagnosticEngine& diags;
    FreshNames progFresh;
    bool bad = false;

    StmtRef expand(StmtRef const& s) {
        auto const& sig = info.procedures.at(s->callee);
        if (!sig.outs.empty()) {
            diags.error(s->span, "call forall on procedure '" + s->callee +
                                     "', which has out-parameters");
            bad = true;
            return s;
        }
        if (!sig.decl->modifies.empty()) {
            diags.error(s->span, "call forall on procedure '" + s->callee +
                                     "', which modifies global state");
            bad = true;
            return s;
        }

        sema::TypeSubst tsub;
        if (!sig.decl->typeParams.empty()) {
            auto const& ta = info.stmtCallTypeArgs.at(s.get());
            for (std::size_t i = 0; i < sig.decl->typeParams.size(); ++i)
                tsub.emplace(sig.decl->typeParams[i], ta[i]);
        }

        // Wildcard binders keep the formal's name unless that would capture
        // a name free in the instantiated formula.
        std::set<std::string> paramNames;
        for (auto const& pr : sig.decl->params) paramNames.insert(pr.name);
        std::set<std::string> avoid;
        auto clauseFree = [&](ExprRef const& ce) {
            for (auto const& n : freeIdents(ce))
                if (!paramNames.count(n)) avoid.insert(n);
        };
        for (auto const& c : sig.decl->preCl)
            if (!c.free) clauseFree(c.expr);
        for (auto const& c : sig.decl->postCl) clauseFree(c.expr);
        for (auto const& a : s->args)
            if (a)
                for (auto const& n : freeIdents(a)) avoid.insert(n);

        FreshNames wf(std::move(avoid));
        std::map<std::string, ExprRef> sub;
        std::vector<bpl::BoundVar> wild;
        for (std::size_t i = 0; i < s->args.size(); ++i) {
            std::string const& formal = sig.decl->params[i].name;
            if (s->args[i]) {
                sub[formal] = s->args[i];
                continue;
            }
            std::string n = wf.fresh(formal);
            TypeRef ty = substTypeSyntactic(sig.ins[i].type, tsub);
            wild.push_back({n, ty, s->span});
            sub[formal] = Expr::ident(n, s->span);
        }

        std::vector<ExprRef> ante, cons;
        for (auto const& c : sig.decl->preCl)
            if (!c.free)
                ante.push_back(substituteExpr(c.expr, sub, tsub, progFresh));
        for (auto const& c : sig.decl->postCl)
            cons.push_back(
                stripOld(substituteExpr(c.expr, sub, tsub, progFresh)));

        ExprRef body = Expr::andOf(std::move(cons));
        if (!ante.empty())
            body = Expr::binary(BinOp::Imp, Expr::andOf(std::move(ante)),
                                std::move(body), s->span);
        if (!wild.empty())
            body = Expr::quant(Expr::QKind::Forall, {}, std::move(wild), {},
                               {}, std::move(body), s->span);
        return Stmt::assumeStmt(std::move(body), s->attrs, s->span);
    }

    std::vector<StmtRef> rewriteBody(std::vector<StmtRef> const& body,
                                     bool& changed) {
        std::vector<StmtRef> out;
        out.reserve(body.size());
        for (auto const& s : body) {
            if (s->kind == Stmt::Kind::CallForall) {
                out.push_back(expand(s));
                changed = changed || out.back() != s;
                continue;
            }
            if (!s->body1.empty() || !s->body2.empty()) {
                bool sub = false;
                std::vector<StmtRef> b1 = rewriteBody(s->body1, sub);
                std::vector<StmtRef> b2 = rewriteBody(s->body2, sub);
                if (sub) {
                    auto n = std::make_shared<Stmt>(*s);
                    n->body1 = std::move(b1);
                    n->body2 = std::move(b2);
                    out.push_back(std::move(n));
                    changed = true;
                    continue;
                }
            }
            out.push_back(s);
        }
        return out;
    }
};

} // namespace

std::optional<bpl::Program> expandCallForall(bpl::Program const& p,
                                             sema::TypeInfo const& info,
                                             DiagnosticEngine& diags) {
    Expander ex{info, diags, FreshNames(p)};
    bpl::Program out;
    for (auto const& d : p.decls) {
        if (d->body.empty()) {
            out.decls.push_back(d);
            continue;
        }
        bool changed = false;
        std::vector<StmtRef> body = ex.rewriteBody(d->body, changed);
        if (!changed) {
            out.decls.push_back(d);
            continue;
        }
        auto copy = std::make_shared<Decl>(*d);
        copy->body = std::move(body);
        out.decls.push_back(std::move(copy));
    }
    if (ex.bad) return std::nullopt;
    return out;
}

} // namespace b2y::desugar
