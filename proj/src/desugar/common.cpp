#include "b2y/desugar/desugar.hpp"

namespace b2y::desugar {

using bpl::Decl;
using bpl::Expr;
using bpl::ExprRef;
using bpl::Stmt;
using bpl::StmtRef;

namespace {

void walkExpr(ExprRef const& e,
              std::function<void(ExprRef const&)> const& fn) {
    if (!e) return;
    fn(e);
    walkExpr(e->a, fn);
    walkExpr(e->b, fn);
    walkExpr(e->c, fn);
    for (auto const& i : e->items) walkExpr(i, fn);
    for (auto const& g : e->triggers)
        for (auto const& t : g.exprs) walkExpr(t, fn);
    walkExpr(e->body, fn);
}

void walkStmt(StmtRef const& s,
              std::function<void(StmtRef const&)> const& fn) {
    if (!s) return;
    fn(s);
    for (auto const& c : s->body1) walkStmt(c, fn);
    for (auto const& c : s->body2) walkStmt(c, fn);
}

void stmtExprs(StmtRef const& s,
               std::function<void(ExprRef const&)> const& fn) {
    if (!s) return;
    walkExpr(s->expr, fn);
    for (auto const& t : s->lhs)
        for (auto const& g : t.indexGroups)
            for (auto const& ix : g) walkExpr(ix, fn);
    for (auto const& r : s->rhs) walkExpr(r, fn);
    for (auto const& a : s->args) walkExpr(a, fn);
    for (auto const& inv : s->invariants) walkExpr(inv.expr, fn);
    for (auto const& c : s->body1) stmtExprs(c, fn);
    for (auto const& c : s->body2) stmtExprs(c, fn);
}

void collectBound(ExprRef const& e, std::set<std::string>& out) {
    walkExpr(e, [&](ExprRef const& x) {
        for (auto const& b : x->bound) out.insert(b.name);
    });
}

} // namespace

void forEachExpr(ExprRef const& e,
                 std::function<void(ExprRef const&)> const& fn) {
    walkExpr(e, fn);
}

void forEachExpr(bpl::Program const& p,
                 std::function<void(ExprRef const&)> const& fn) {
    for (auto const& d : p.decls) {
        walkExpr(d->expr, fn);
        walkExpr(d->bodyExpr, fn);
        for (auto const& v : d->vars) walkExpr(v.where, fn);
        for (auto const& pr : d->params) walkExpr(pr.where, fn);
        for (auto const& pr : d->outs) walkExpr(pr.where, fn);
        for (auto const& pr : d->locals) walkExpr(pr.where, fn);
        for (auto const& c : d->preCl) walkExpr(c.expr, fn);
        for (auto const& c : d->postCl) walkExpr(c.expr, fn);
        for (auto const& s : d->body) stmtExprs(s, fn);
    }
}

void forEachStmt(bpl::Program const& p,
                 std::function<void(StmtRef const&)> const& fn) {
    for (auto const& d : p.decls)
        for (auto const& s : d->body) walkStmt(s, fn);
}

std::set<std::string> declaredNames(bpl::Program const& p) {
    std::set<std::string> out;
    for (auto const& d : p.decls) {
        if (!d->name.empty()) out.insert(d->name);
        for (auto const& n : d->names) out.insert(n);
        for (auto const& v : d->vars) out.insert(v.name);
        for (auto const& pr : d->params) out.insert(pr.name);
        for (auto const& pr : d->outs) out.insert(pr.name);
        for (auto const& pr : d->locals) out.insert(pr.name);
        if (!d->result.name.empty()) out.insert(d->result.name);
        for (auto const& tp : d->typeParams) out.insert(tp);
        for (auto const& s : d->body)
            walkStmt(s, [&](StmtRef const& st) {
                if (st->kind == Stmt::Kind::Label) out.insert(st->label);
            });
        walkExpr(d->expr, [&](ExprRef const& e) {
            for (auto const& b : e->bound) out.insert(b.name);
        });
        collectBound(d->bodyExpr, out);
        for (auto const& v : d->vars) collectBound(v.where, out);
        for (auto const& pr : d->params) collectBound(pr.where, out);
        for (auto const& pr : d->outs) collectBound(pr.where, out);
        for (auto const& pr : d->locals) collectBound(pr.where, out);
        for (auto const& c : d->preCl) collectBound(c.expr, out);
        for (auto const& c : d->postCl) collectBound(c.expr, out);
        for (auto const& s : d->body)
            stmtExprs(s, [&](ExprRef const& e) {
                for (auto const& b : e->bound) out.insert(b.name);
            });
    }
    return out;
}

bpl::ExprRef rewriteExpr(
    ExprRef const& e,
    std::function<ExprRef(Expr const*, ExprRef)> const& fn) {
    if (!e) return e;
    ExprRef a = rewriteExpr(e->a, fn);
    ExprRef b = rewriteExpr(e->b, fn);
    ExprRef c = rewriteExpr(e->c, fn);
    ExprRef body = rewriteExpr(e->body, fn);
    bool changed =
        a != e->a || b != e->b || c != e->c || body != e->body;
    std::vector<ExprRef> items;
    items.reserve(e->items.size());
    for (auto const& i : e->items) {
        items.push_back(rewriteExpr(i, fn));
        changed = changed || items.back() != i;
    }
    std::vector<bpl::TriggerGroup> triggers = e->triggers;
    for (auto& g : triggers)
        for (auto& t : g.exprs) {
            ExprRef nt = rewriteExpr(t, fn);
            changed = changed || nt != t;
            t = std::move(nt);
        }
    ExprRef rebuilt = e;
    if (changed) {
        auto n = std::make_shared<Expr>(*e);
        n->a = std::move(a);
        n->b = std::move(b);
        n->c = std::move(c);
        n->body = std::move(body);
        n->items = std::move(items);
        n->triggers = std::move(triggers);
        rebuilt = n;
    }
    return fn(e.get(), rebuilt);
}

bpl::StmtRef
rewriteStmtExprs(StmtRef const& s,
                 std::function<ExprRef(ExprRef const&)> const& fn) {
    if (!s) return s;
    bool changed = false;
    auto one = [&](ExprRef const& e) {
        ExprRef n = e ? fn(e) : e;
        changed = changed || n != e;
        return n;
    };
    ExprRef expr = one(s->expr);
    std::vector<bpl::LhsTarget> lhs = s->lhs;
    for (auto& t : lhs)
        for (auto& g : t.indexGroups)
            for (auto& ix : g) ix = one(ix);
    std::vector<ExprRef> rhs = s->rhs;
    for (auto& r : rhs) r = one(r);
    std::vector<ExprRef> args = s->args;
    for (auto& a : args) a = one(a);
    std::vector<bpl::Invariant> invariants = s->invariants;
    for (auto& inv : invariants) inv.expr = one(inv.expr);
    std::vector<StmtRef> body1 = s->body1;
    for (auto& c : body1) {
        StmtRef n = rewriteStmtExprs(c, fn);
        changed = changed || n != c;
        c = std::move(n);
    }
    std::vector<StmtRef> body2 = s->body2;
    for (auto& c : body2) {
        StmtRef n = rewriteStmtExprs(c, fn);
        changed = changed || n != c;
        c = std::move(n);
    }
    if (!changed) return s;
    auto n = std::make_shared<Stmt>(*s);
    n->expr = std::move(expr);
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->args = std::move(args);
    n->invariants = std::move(invariants);
    n->body1 = std::move(body1);
    n->body2 = std::move(body2);
    return n;
}

bpl::DeclRef
rewriteDeclExprs(bpl::DeclRef const& d,
                 std::function<ExprRef(ExprRef const&)> const& fn) {
    if (!d) return d;
    bool changed = false;
    auto one = [&](ExprRef const& e) {
        ExprRef n = e ? fn(e) : e;
        changed = changed || n != e;
        return n;
    };
    auto copy = std::make_shared<Decl>(*d);
    copy->expr = one(copy->expr);
    copy->bodyExpr = one(copy->bodyExpr);
    for (auto& v : copy->vars) v.where = one(v.where);
    for (auto& p : copy->params) p.where = one(p.where);
    for (auto& p : copy->outs) p.where = one(p.where);
    for (auto& p : copy->locals) p.where = one(p.where);
    for (auto& c : copy->preCl) c.expr = one(c.expr);
    for (auto& c : copy->postCl) c.expr = one(c.expr);
    for (auto& s : copy->body) {
        StmtRef n = rewriteStmtExprs(s, fn);
        changed = changed || n != s;
        s = std::move(n);
    }
    return changed ? bpl::DeclRef(copy) : d;
}

namespace {

void freeIdentsRec(ExprRef const& e, std::set<std::string>& bound,
                   std::set<std::string>& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::Ident) {
        if (!bound.count(e->text)) out.insert(e->text);
        return;
    }
    if (e->kind == Expr::Kind::Quant || e->kind == Expr::Kind::Lambda) {
        std::set<std::string> inner = bound;
        for (auto const& bv : e->bound) inner.insert(bv.name);
        freeIdentsRec(e->body, inner, out);
        for (auto const& g : e->triggers)
            for (auto const& t : g.exprs) freeIdentsRec(t, inner, out);
        return;
    }
    freeIdentsRec(e->a, bound, out);
    freeIdentsRec(e->b, bound, out);
    freeIdentsRec(e->c, bound, out);
    for (auto const& i : e->items) freeIdentsRec(i, bound, out);
}

bpl::TypeRef substTypeRec(bpl::TypeRef const& t, sema::TypeSubst const& sub) {
    using bpl::Type;
    if (!t || sub.empty()) return t;
    switch (t->kind) {
    case Type::Kind::Int:
    case Type::Kind::Real:
    case Type::Kind::Bool:
    case Type::Kind::Bv:
        return t;
    case Type::Kind::Var: {
        auto it = sub.find(t->name);
        return it == sub.end() ? t : it->second;
    }
    case Type::Kind::Ctor: {
        if (t->ctorArgs.empty()) {
            auto it = sub.find(t->name);
            if (it != sub.end()) return it->second;
        }
        bool changed = false;
        std::vector<bpl::TypeRef> args;
        args.reserve(t->ctorArgs.size());
        for (auto const& a : t->ctorArgs) {
            args.push_back(substTypeRec(a, sub));
            changed = changed || args.back() != a;
        }
        if (!changed) return t;
        auto n = std::make_shared<Type>(*t);
        n->ctorArgs = std::move(args);
        return n;
    }
    case Type::Kind::Map: {
        sema::TypeSubst narrowed = sub;
        for (auto const& tp : t->typeParams) narrowed.erase(tp);
        bool changed = false;
        std::vector<bpl::TypeRef> dom;
        dom.reserve(t->domain.size());
        for (auto const& d : t->domain) {
            dom.push_back(substTypeRec(d, narrowed));
            changed = changed || dom.back() != d;
        }
        bpl::TypeRef cod = substTypeRec(t->codomain, narrowed);
        changed = changed || cod != t->codomain;
        if (!changed) return t;
        auto n = std::make_shared<Type>(*t);
        n->domain = std::move(dom);
        n->codomain = std::move(cod);
        return n;
    }
    }
    return t;
}

ExprRef substRec(ExprRef const& e, std::map<std::string, ExprRef> const& sub,
                 sema::TypeSubst const& tsub,
                 std::set<std::string> const& capturable, FreshNames& fresh) {
    if (!e) return e;
    if (e->kind == Expr::Kind::Ident) {
        auto it = sub.find(e->text);
        return it == sub.end() ? e : it->second;
    }
    if (e->kind == Expr::Kind::Quant || e->kind == Expr::Kind::Lambda) {
        sema::TypeSubst innerT = tsub;
        for (auto const& tp : e->typeParams) innerT.erase(tp);
        std::map<std::string, ExprRef> innerSub = sub;
        std::vector<bpl::BoundVar> bound = e->bound;
        bool changed = false;
        for (auto& bv : bound) {
            innerSub.erase(bv.name);
            if (capturable.count(bv.name)) {
                std::string nn = fresh.fresh(bv.name);
                innerSub[bv.name] = Expr::ident(nn, bv.span);
                bv.name = nn;
                changed = true;
            }
            bpl::TypeRef nt = substTypeRec(bv.type, innerT);
            changed = changed || nt != bv.type;
            bv.type = std::move(nt);
        }
        ExprRef body = substRec(e->body, innerSub, innerT, capturable, fresh);
        changed = changed || body != e->body;
        std::vector<bpl::TriggerGroup> triggers = e->triggers;
        for (auto& g : triggers)
            for (auto& t : g.exprs) {
                ExprRef nt = substRec(t, innerSub, innerT, capturable, fresh);
                changed = changed || nt != t;
                t = std::move(nt);
            }
        if (!changed) return e;
        auto n = std::make_shared<Expr>(*e);
        n->bound = std::move(bound);
        n->body = std::move(body);
        n->triggers = std::move(triggers);
        return n;
    }
    ExprRef a = substRec(e->a, sub, tsub, capturable, fresh);
    ExprRef b = substRec(e->b, sub, tsub, capturable, fresh);
    ExprRef c = substRec(e->c, sub, tsub, capturable, fresh);
    bool changed = a != e->a || b != e->b || c != e->c;
    std::vector<ExprRef> items;
    items.reserve(e->items.size());
    for (auto const& i : e->items) {
        items.push_back(substRec(i, sub, tsub, capturable, fresh));
        changed = changed || items.back() != i;
    }
    if (!changed) return e;
    auto n = std::make_shared<Expr>(*e);
    n->a = std::move(a);
    n->b = std::move(b);
    n->c = std::move(c);
    n->items = std::move(items);
    return n;
}

} // namespace

std::set<std::string> freeIdents(ExprRef const& e) {
    std::set<std::string> bound, out;
    freeIdentsRec(e, bound, out);
    return out;
}

bpl::TypeRef substTypeSyntactic(bpl::TypeRef const& t,
                                sema::TypeSubst const& tsub) {
    return substTypeRec(t, tsub);
}

bpl::ExprRef substituteExpr(ExprRef const& e,
                            std::map<std::string, ExprRef> const& sub,
                            sema::TypeSubst const& tsub, FreshNames& fresh) {
    std::set<std::string> capturable;
    for (auto const& [name, repl] : sub) {
        (void)name;
        for (auto const& f : freeIdents(repl)) capturable.insert(f);
    }
    return substRec(e, sub, tsub, capturable, fresh);
}

std::string FreshNames::fresh(std::string const& base) {
    if (used_.insert(base).second) return base;
    for (int i = 0;; ++i) {
        std::string cand = base + std::to_string(i);
        if (used_.insert(cand).second) return cand;
    }
}

} // namespace b2y::desugar
