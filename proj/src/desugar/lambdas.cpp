#include "b2y/desugar/desugar.hpp"

namespace b2y::desugar {

using bpl::Decl;
using bpl::DeclRef;
using bpl::Expr;
using bpl::ExprRef;
using bpl::Type;
using bpl::TypeRef;

namespace {

bool mentionsTypeVar(TypeRef const& t, std::string* which) {
    if (!t) return false;
    if (t->kind == Type::Kind::Var) {
        if (which) *which = t->name;
        return true;
    }
    for (auto const& a : t->ctorArgs)
        if (mentionsTypeVar(a, which)) return true;
    for (auto const& d : t->domain)
        if (mentionsTypeVar(d, which)) return true;
    return mentionsTypeVar(t->codomain, which);
}

// A lifted lambda becomes a top-level constant, so its body may only use its
// own bound variables and constants: anything tied to a scope or to mutable
// state has no meaning at the top level. Nested lambdas are validated by the
// enclosing walk and recorded in covered.
bool checkCapture(ExprRef const& e, sema::TypeInfo const& info,
                  std::set<std::string> inner,
                  std::set<Expr const*>& covered, DiagnosticEngine& diags) {
    if (!e) return true;
    if (e->kind == Expr::Kind::Old) {
        diags.error(e->span, "lambda body refers to the pre-state");
        return false;
    }
    if (e->kind == Expr::Kind::Ident) {
        if (inner.count(e->text)) return true;
        auto it = info.refs.find(e.get());
        if (it != info.refs.end() &&
            it->second.kind == sema::RefKind::Constant)
            return true;
        diags.error(e->span, "lambda captures '" + e->text +
                                 "'; only constants and its own bound "
                                 "variables may occur in the body");
        return false;
    }
    if (e->kind == Expr::Kind::Quant || e->kind == Expr::Kind::Lambda) {
        if (e->kind == Expr::Kind::Lambda) covered.insert(e.get());
        std::set<std::string> ext = inner;
        for (auto const& b : e->bound) ext.insert(b.name);
        if (!checkCapture(e->body, info, ext, covered, diags)) return false;
        for (auto const& g : e->triggers)
            for (auto const& t : g.exprs)
                if (!checkCapture(t, info, ext, covered, diags)) return false;
        return true;
    }
    bool ok = checkCapture(e->a, info, inner, covered, diags) &&
              checkCapture(e->b, info, inner, covered, diags) &&
              checkCapture(e->c, info, inner, covered, diags);
    for (auto const& i : e->items)
        ok = ok && checkCapture(i, info, inner, covered, diags);
    return ok;
}

} // namespace

std::optional<bpl::Program> liftLambdas(bpl::Program const& p,
                                        sema::TypeInfo const& info,
                                        DiagnosticEngine& diags) {
    bool bad = false;
    std::set<Expr const*> covered;
    forEachExpr(p, [&](ExprRef const& e) {
        if (e->kind != Expr::Kind::Lambda) return;
        if (!covered.count(e.get())) {
            std::set<std::string> inner;
            for (auto const& b : e->bound) inner.insert(b.name);
            if (!checkCapture(e->body, info, inner, covered, diags)) {
                bad = true;
                return;
            }
        }
        auto ty = info.exprTypes.find(e.get());
        std::string tv;
        if (ty != info.exprTypes.end() &&
            mentionsTypeVar(ty->second, &tv)) {
            diags.error(e->span, "lambda captures type parameter '" + tv +
                                     "' and cannot become a top-level "
                                     "constant");
            bad = true;
        }
    });
    if (bad) return std::nullopt;

    FreshNames fresh(p);
    int counter = 0;
    bpl::Program out;
    for (auto const& d : p.decls) {
        // Lifted declarations for lambdas found in this declaration; they go
        // right before it. Inner lambdas lift first, so an outer lambda's
        // axiom sees the inner one already replaced.
        std::vector<DeclRef> lifted;
        std::unordered_map<Expr const*, ExprRef> memo;
        auto rw = [&](ExprRef const& root) {
            auto hit = memo.find(root.get());
            if (hit != memo.end()) return hit->second;
            ExprRef res = rewriteExpr(
                root, [&](Expr const* orig, ExprRef rebuilt) {
                    if (orig->kind != Expr::Kind::Lambda) return rebuilt;
                    std::string name =
                        fresh.fresh("lmb" + std::to_string(counter++));
                    auto cd = Decl::make(Decl::Kind::ConstDecl);
                    cd->names = {name};
                    cd->nameSpans = {orig->span};
                    cd->type = info.exprTypes.at(orig);
                    cd->synth = Decl::Synth::Lambda;
                    cd->span = orig->span;
                    lifted.push_back(cd);

                    std::vector<ExprRef> ixs;
                    for (auto const& b : rebuilt->bound)
                        ixs.push_back(Expr::ident(b.name, b.span));
                    ExprRef sel = Expr::select(Expr::ident(name, orig->span),
                                               std::move(ixs), orig->span);
                    ExprRef eq = Expr::binary(bpl::BinOp::Eq, std::move(sel),
                                              rebuilt->body, orig->span);
                    auto ax = Decl::make(Decl::Kind::AxiomDecl);
                    ax->expr = Expr::quant(Expr::QKind::Forall, {},
                                           rebuilt->bound, {}, {},
                                           std::move(eq), orig->span);
                    ax->synth = Decl::Synth::Lambda;
                    ax->span = orig->span;
                    lifted.push_back(ax);
                    return Expr::ident(name, orig->span);
                });
            memo.emplace(root.get(), res);
            return res;
        };
        DeclRef nd = rewriteDeclExprs(d, rw);
        for (auto& l : lifted) out.decls.push_back(std::move(l));
        out.decls.push_back(std::move(nd));
    }
    return out;
}

} // namespace b2y::desugar
