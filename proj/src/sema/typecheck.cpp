#include "b2y/sema/typecheck.hpp"

#include <algorithm>
#include <memory>
#include <set>

namespace b2y::sema {

using bpl::BinOp;
using bpl::Decl;
using bpl::DeclRef;
using bpl::Expr;
using bpl::ExprRef;
using bpl::Param;
using bpl::Stmt;
using bpl::StmtRef;
using bpl::Type;
using bpl::TypeRef;
using bpl::UnOp;

bpl::TypeRef TypeInfo::normalize(bpl::TypeRef const& t) const {
    if (!t) return t;
    switch (t->kind) {
    case Type::Kind::Int:
    case Type::Kind::Real:
    case Type::Kind::Bool:
    case Type::Kind::Bv:
    case Type::Kind::Var:
        return t;
    case Type::Kind::Ctor: {
        std::vector<TypeRef> args;
        args.reserve(t->ctorArgs.size());
        for (auto const& a : t->ctorArgs) args.push_back(normalize(a));
        auto it = synonyms.find(t->name);
        if (it != synonyms.end()) {
            TypeSubst s;
            for (std::size_t i = 0;
                 i < it->second.params.size() && i < args.size(); ++i)
                s.emplace(it->second.params[i], args[i]);
            return normalize(substType(it->second.body, s));
        }
        return Type::ctor(t->name, std::move(args), t->span);
    }
    case Type::Kind::Map: {
        std::vector<TypeRef> dom;
        dom.reserve(t->domain.size());
        for (auto const& d : t->domain) dom.push_back(normalize(d));
        return Type::map(t->typeParams, std::move(dom), normalize(t->codomain),
                         t->span);
    }
    }
    return t;
}

bool TypeInfo::sameType(bpl::TypeRef const& a, bpl::TypeRef const& b) const {
    return typeKey(normalize(a)) == typeKey(normalize(b));
}

namespace {

// Solves metavariables introduced while checking one axiom, clause or
// statement. Metavariables left open at the end of the unit default to int.
class Unifier {
public:
    explicit Unifier(TypeInfo const& info) : info_(info) {}

    TypeRef fresh() { return Type::var("@" + std::to_string(next_++)); }

    TypeRef prune(TypeRef t) {
        while (isMetaVar(t)) {
            auto it = sol_.find(t->name);
            if (it == sol_.end()) return t;
            t = it->second;
        }
        return t;
    }

    bool occurs(std::string const& name, TypeRef const& t) {
        TypeRef p = prune(t);
        if (!p) return false;
        if (p->kind == Type::Kind::Var) return p->name == name;
        for (auto const& a : p->ctorArgs)
            if (occurs(name, a)) return true;
        for (auto const& d : p->domain)
            if (occurs(name, d)) return true;
        return p->codomain && occurs(name, p->codomain);
    }

    bool unify(TypeRef a, TypeRef b) {
        a = prune(a);
        b = prune(b);
        if (!a || !b) return true;
        if (isMetaVar(a) && isMetaVar(b) && a->name == b->name) return true;
        if (isMetaVar(a)) {
            if (occurs(a->name, b)) return false;
            sol_.emplace(a->name, b);
            return true;
        }
        if (isMetaVar(b)) {
            if (occurs(b->name, a)) return false;
            sol_.emplace(b->name, a);
            return true;
        }
        TypeRef an = info_.normalize(a);
        TypeRef bn = info_.normalize(b);
        if (an->kind != bn->kind) return false;
        switch (an->kind) {
        case Type::Kind::Int:
        case Type::Kind::Real:
        case Type::Kind::Bool:
            return true;
        case Type::Kind::Bv:
            return an->bvWidth == bn->bvWidth;
        case Type::Kind::Var:
            return an->name == bn->name;
        case Type::Kind::Ctor: {
            if (an->name != bn->name ||
                an->ctorArgs.size() != bn->ctorArgs.size())
                return false;
            for (std::size_t i = 0; i < an->ctorArgs.size(); ++i)
                if (!unify(an->ctorArgs[i], bn->ctorArgs[i])) return false;
            return true;
        }
        case Type::Kind::Map: {
            if (an->typeParams.size() != bn->typeParams.size() ||
                an->domain.size() != bn->domain.size())
                return false;
            // Rename both binder lists to one shared set of rigid names so
            // alpha-equivalent maps unify.
            TypeSubst sa, sb;
            for (std::size_t i = 0; i < an->typeParams.size(); ++i) {
                TypeRef r = Type::var("!u" + std::to_string(next_++));
                sa.emplace(an->typeParams[i], r);
                sb.emplace(bn->typeParams[i], r);
            }
            for (std::size_t i = 0; i < an->domain.size(); ++i)
                if (!unify(substType(an->domain[i], sa),
                           substType(bn->domain[i], sb)))
                    return false;
            return unify(substType(an->codomain, sa),
                         substType(bn->codomain, sb));
        }
        }
        return false;
    }

    TypeRef zonk(TypeRef const& t) { return walk(t, false); }

    // zonk, binding any still-open metavariable to int.
    TypeRef zonkDefault(TypeRef const& t) { return walk(t, true); }

private:
    TypeInfo const& info_;
    std::unordered_map<std::string, TypeRef> sol_;
    int next_ = 0;

    TypeRef walk(TypeRef const& t, bool defaulting) {
        if (!t) return t;
        TypeRef p = prune(t);
        if (isMetaVar(p)) {
            if (!defaulting) return p;
            sol_.emplace(p->name, Type::intType());
            return Type::intType();
        }
        switch (p->kind) {
        case Type::Kind::Int:
        case Type::Kind::Real:
        case Type::Kind::Bool:
        case Type::Kind::Bv:
        case Type::Kind::Var:
            return p;
        case Type::Kind::Ctor: {
            std::vector<TypeRef> args;
            args.reserve(p->ctorArgs.size());
            for (auto const& a : p->ctorArgs)
                args.push_back(walk(a, defaulting));
            return Type::ctor(p->name, std::move(args), p->span);
        }
        case Type::Kind::Map: {
            std::vector<TypeRef> dom;
            dom.reserve(p->domain.size());
            for (auto const& d : p->domain)
                dom.push_back(walk(d, defaulting));
            return Type::map(p->typeParams, std::move(dom),
                             walk(p->codomain, defaulting), p->span);
        }
        }
        return p;
    }
};

class Checker {
public:
    Checker(bpl::Program const& p, DiagnosticEngine& diags)
        : p_(p), diags_(diags) {}

    std::optional<TypeInfo> run() {
        std::size_t before = diags_.errorCount();
        registerTypes();
        resolveSynonyms();
        registerValues();
        if (diags_.errorCount() > before) return std::nullopt;
        checkBodies();
        if (diags_.errorCount() > before) return std::nullopt;
        return std::move(info_);
    }

private:
    bpl::Program const& p_;
    DiagnosticEngine& diags_;
    TypeInfo info_;
    std::unique_ptr<Unifier> uni_;

    // scope stacks, innermost last
    std::vector<std::map<std::string, Symbol>> valueScopes_;
    std::vector<std::set<std::string>> typeVarScopes_;
    bool allowOld_ = false;
    bool globalsAllowed_ = true;
    int loopDepth_ = 0;
    std::set<std::string> implLabels_;

    // entries touched in the current unit, finalized together
    std::vector<Expr const*> uExprs_;
    std::vector<Expr const*> uCalls_;
    std::vector<Expr const*> uInsts_;
    std::vector<Stmt const*> uStmtCalls_;
    std::vector<Stmt const*> uAssigns_;

    void error(SourceSpan span, std::string msg) {
        diags_.error(span, std::move(msg));
    }

    std::string show(TypeRef const& t) {
        return bpl::typeToString(uni_ ? uni_->zonk(t) : t);
    }

    // ---- units -----------------------------------------------------------

    void beginUnit() { uni_ = std::make_unique<Unifier>(info_); }

    void finalizeUnit() {
        for (auto const* e : uExprs_)
            info_.exprTypes[e] = uni_->zonkDefault(info_.exprTypes[e]);
        for (auto const* e : uCalls_)
            for (auto& t : info_.callTypeArgs[e]) t = uni_->zonkDefault(t);
        for (auto const* e : uInsts_)
            for (auto& t : info_.mapInst[e]) t = uni_->zonkDefault(t);
        for (auto const* s : uStmtCalls_)
            for (auto& t : info_.stmtCallTypeArgs[s]) t = uni_->zonkDefault(t);
        for (auto const* s : uAssigns_)
            for (auto& target : info_.assignInst[s])
                for (auto& group : target)
                    for (auto& t : group) t = uni_->zonkDefault(t);
        uExprs_.clear();
        uCalls_.clear();
        uInsts_.clear();
        uStmtCalls_.clear();
        uAssigns_.clear();
        uni_.reset();
    }

    void checkExprUnit(ExprRef const& e, TypeRef expected) {
        beginUnit();
        checkExpr(e, expected);
        finalizeUnit();
    }

    // ---- scope helpers ---------------------------------------------------

    Symbol const* lookup(std::string const& name) {
        for (auto it = valueScopes_.rbegin(); it != valueScopes_.rend();
             ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        auto g = info_.globals.find(name);
        if (g != info_.globals.end()) return &g->second;
        return nullptr;
    }

    bool typeVarInScope(std::string const& name) {
        for (auto it = typeVarScopes_.rbegin(); it != typeVarScopes_.rend();
             ++it)
            if (it->count(name)) return true;
        return false;
    }

    std::set<std::string> pushTypeParams(std::vector<std::string> const& ps,
                                         SourceSpan span) {
        std::set<std::string> scope;
        for (auto const& p : ps)
            if (!scope.insert(p).second)
                error(span, "duplicate type parameter '" + p + "'");
        typeVarScopes_.push_back(scope);
        return scope;
    }

    // ---- type resolution -------------------------------------------------

    // Rewrites in-scope type variable references from Ctor to Var and checks
    // constructor arities. Unknown names are reported once per occurrence.
    TypeRef resolveType(TypeRef const& t) {
        if (!t) return t;
        switch (t->kind) {
        case Type::Kind::Int:
        case Type::Kind::Real:
        case Type::Kind::Bool:
        case Type::Kind::Bv:
        case Type::Kind::Var:
            return t;
        case Type::Kind::Ctor: {
            if (typeVarInScope(t->name)) {
                if (!t->ctorArgs.empty())
                    error(t->span, "type parameter '" + t->name +
                                       "' cannot take arguments");
                return Type::var(t->name, t->span);
            }
            auto it = info_.typeDecls.find(t->name);
            if (it == info_.typeDecls.end()) {
                error(t->span, "unknown type '" + t->name + "'");
                return Type::ctor(t->name, {}, t->span);
            }
            std::size_t want = it->second->typeParams.size();
            if (t->ctorArgs.size() != want)
                error(t->span, "type '" + t->name + "' expects " +
                                   std::to_string(want) + " argument(s), got " +
                                   std::to_string(t->ctorArgs.size()));
            std::vector<TypeRef> args;
            args.reserve(t->ctorArgs.size());
            for (auto const& a : t->ctorArgs) args.push_back(resolveType(a));
            return Type::ctor(t->name, std::move(args), t->span);
        }
        case Type::Kind::Map: {
            auto scope = pushTypeParams(t->typeParams, t->span);
            std::vector<TypeRef> dom;
            dom.reserve(t->domain.size());
            for (auto const& d : t->domain) dom.push_back(resolveType(d));
            TypeRef cod = resolveType(t->codomain);
            typeVarScopes_.pop_back();
            return Type::map(t->typeParams, std::move(dom), std::move(cod),
                             t->span);
        }
        }
        return t;
    }

    // ---- registration ----------------------------------------------------

    void registerTypes() {
        for (auto const& d : p_.decls) {
            if (d->kind != Decl::Kind::TypeDecl) continue;
            if (!info_.typeDecls.emplace(d->name, d).second) {
                error(d->span, "redeclaration of type '" + d->name + "'");
                continue;
            }
            std::set<std::string> seen;
            for (auto const& p : d->typeParams)
                if (!seen.insert(p).second)
                    error(d->span, "duplicate type parameter '" + p + "'");
        }
    }

    void resolveSynonyms() {
        for (auto const& d : p_.decls) {
            if (d->kind != Decl::Kind::TypeDecl || !d->synonym) continue;
            pushTypeParams(d->typeParams, d->span);
            TypeRef body = resolveType(d->synonym);
            typeVarScopes_.pop_back();
            info_.synonyms[d->name] = {d->typeParams, body};
        }
        // Cycle detection over synonym heads.
        std::map<std::string, int> state;  // 0 unseen, 1 visiting, 2 done
        for (auto const& d : p_.decls) {
            if (d->kind != Decl::Kind::TypeDecl || !d->synonym) continue;
            if (visitSynonym(d->name, state)) {
                error(d->span,
                      "type synonym '" + d->name + "' is cyclic");
                info_.synonyms.erase(d->name);  // keep normalize terminating
            }
        }
    }

    bool visitSynonym(std::string const& name,
                      std::map<std::string, int>& state) {
        auto it = info_.synonyms.find(name);
        if (it == info_.synonyms.end()) return false;
        int& st = state[name];
        if (st == 1) return true;
        if (st == 2) return false;
        st = 1;
        bool cyc = synonymRefsCycle(it->second.body, state);
        st = 2;
        return cyc;
    }

    bool synonymRefsCycle(TypeRef const& t, std::map<std::string, int>& state) {
        if (!t) return false;
        if (t->kind == Type::Kind::Ctor) {
            if (visitSynonym(t->name, state)) return true;
            for (auto const& a : t->ctorArgs)
                if (synonymRefsCycle(a, state)) return true;
        } else if (t->kind == Type::Kind::Map) {
            for (auto const& d : t->domain)
                if (synonymRefsCycle(d, state)) return true;
            return synonymRefsCycle(t->codomain, state);
        }
        return false;
    }

    void declareValue(Symbol sym, SourceSpan span) {
        std::string name = sym.name;
        if (info_.functions.count(name) ||
            !info_.globals.emplace(name, std::move(sym)).second)
            error(span, "redeclaration of '" + name + "'");
    }

    void registerValues() {
        for (auto const& d : p_.decls) {
            switch (d->kind) {
            case Decl::Kind::ConstDecl: {
                TypeRef t = resolveType(d->type);
                for (std::size_t i = 0; i < d->names.size(); ++i)
                    declareValue({RefKind::Constant, d->names[i], t, nullptr,
                                  d.get()},
                                 i < d->nameSpans.size() ? d->nameSpans[i]
                                                         : d->span);
                break;
            }
            case Decl::Kind::VarDecl: {
                std::map<Type const*, TypeRef> resolved;
                for (auto const& v : d->vars) {
                    auto [it, fresh] =
                        resolved.emplace(v.type.get(), nullptr);
                    if (fresh) it->second = resolveType(v.type);
                    declareValue({RefKind::GlobalVar, v.name, it->second,
                                  v.where, d.get()},
                                 v.span);
                }
                break;
            }
            case Decl::Kind::FunctionDecl: {
                if (info_.globals.count(d->name) ||
                    !info_.functions.emplace(d->name, FuncSig{}).second) {
                    error(d->span, "redeclaration of '" + d->name + "'");
                    break;
                }
                pushTypeParams(d->typeParams, d->span);
                FuncSig sig;
                sig.decl = d;
                std::set<std::string> seen;
                for (auto const& p : d->params) {
                    sig.params.push_back(resolveType(p.type));
                    if (!seen.insert(p.name).second)
                        error(p.span, "duplicate parameter '" + p.name + "'");
                }
                sig.result = resolveType(d->result.type);
                typeVarScopes_.pop_back();
                info_.functions[d->name] = std::move(sig);
                break;
            }
            case Decl::Kind::ProcedureDecl: {
                if (!info_.procedures.emplace(d->name, ProcSig{}).second) {
                    error(d->span,
                          "redeclaration of procedure '" + d->name + "'");
                    break;
                }
                pushTypeParams(d->typeParams, d->span);
                ProcSig sig;
                sig.decl = d;
                std::set<std::string> seen;
                for (auto const& p : d->params) {
                    if (!seen.insert(p.name).second)
                        error(p.span, "duplicate parameter '" + p.name + "'");
                    sig.ins.push_back({RefKind::InParam, p.name,
                                       resolveType(p.type), p.where, d.get()});
                }
                for (auto const& p : d->outs) {
                    if (!seen.insert(p.name).second)
                        error(p.span, "duplicate parameter '" + p.name + "'");
                    sig.outs.push_back({RefKind::OutParam, p.name,
                                        resolveType(p.type), p.where,
                                        d.get()});
                }
                typeVarScopes_.pop_back();
                info_.procedures[d->name] = std::move(sig);
                break;
            }
            case Decl::Kind::Implementation:
                info_.implementations[d->name].push_back(d);
                break;
            default:
                break;
            }
        }
    }

    // ---- expression checking ---------------------------------------------

    TypeRef record(Expr const* e, TypeRef t, TypeRef const& expected) {
        if (expected && !uni_->unify(t, expected))
            error(e->span, "expected " + show(expected) + ", found " +
                               show(t));
        info_.exprTypes[e] = t;
        uExprs_.push_back(e);
        return t;
    }

    void requireNumeric(SourceSpan span, TypeRef const& t, char const* what) {
        TypeRef z = uni_->zonk(t);
        if (isMetaVar(z)) return;  // defaults to int later
        z = info_.normalize(z);
        if (z->kind != Type::Kind::Int && z->kind != Type::Kind::Real)
            error(span, std::string(what) + " needs int or real operands, "
                                            "found " + show(z));
    }

    TypeRef checkExpr(ExprRef const& e, TypeRef expected) {
        switch (e->kind) {
        case Expr::Kind::IntLit:
            return record(e.get(), Type::intType(), expected);
        case Expr::Kind::RealLit:
            return record(e.get(), Type::realType(), expected);
        case Expr::Kind::BoolLit:
            return record(e.get(), Type::boolType(), expected);
        case Expr::Kind::BvLit:
            return record(e.get(), Type::bv(e->bvWidth), expected);
        case Expr::Kind::StringLit:
            error(e->span, "string literals may only appear in attributes");
            return record(e.get(), Type::intType(), expected);
        case Expr::Kind::Star:
            error(e->span, "'*' can only be used as a whole guard");
            return record(e.get(), Type::boolType(), expected);
        case Expr::Kind::Ident: {
            Symbol const* sym = lookup(e->text);
            if (!sym) {
                if (info_.functions.count(e->text))
                    error(e->span, "function '" + e->text +
                                       "' must be applied to arguments");
                else
                    error(e->span, "unknown identifier '" + e->text + "'");
                return record(e.get(), uni_->fresh(), expected);
            }
            if (sym->kind == RefKind::GlobalVar && !globalsAllowed_)
                error(e->span, "global variable '" + e->text +
                                   "' cannot be mentioned here");
            info_.refs[e.get()] = *sym;
            return record(e.get(), sym->type, expected);
        }
        case Expr::Kind::Un:
            switch (e->un) {
            case UnOp::Neg: {
                TypeRef t = checkExpr(e->a, nullptr);
                requireNumeric(e->span, t, "unary minus");
                return record(e.get(), t, expected);
            }
            case UnOp::Not:
                checkExpr(e->a, Type::boolType());
                return record(e.get(), Type::boolType(), expected);
            case UnOp::ToInt:
                checkExpr(e->a, Type::realType());
                return record(e.get(), Type::intType(), expected);
            case UnOp::ToReal:
                checkExpr(e->a, Type::intType());
                return record(e.get(), Type::realType(), expected);
            }
            return record(e.get(), Type::intType(), expected);
        case Expr::Kind::Bin:
            return checkBin(e, expected);
        case Expr::Kind::Chain: {
            std::vector<TypeRef> ts;
            for (auto const& i : e->items) ts.push_back(checkExpr(i, nullptr));
            for (std::size_t i = 0; i + 1 < ts.size(); ++i)
                if (!uni_->unify(ts[i], ts[i + 1]))
                    error(e->span, "cannot compare " + show(ts[i]) + " with " +
                                       show(ts[i + 1]));
            if (!ts.empty())
                requireNumeric(e->span, ts[0], "comparison");
            return record(e.get(), Type::boolType(), expected);
        }
        case Expr::Kind::Select: {
            TypeRef res = checkIndexing(e, e->a, e->items, nullptr);
            return record(e.get(), res, expected);
        }
        case Expr::Kind::Update: {
            TypeRef base = nullptr;
            checkIndexing(e, e->a, e->items, &base);
            return record(e.get(), base, expected);
        }
        case Expr::Kind::Extract: {
            TypeRef t = uni_->zonk(checkExpr(e->a, nullptr));
            t = info_.normalize(t);
            int width = e->hi - e->lo;
            if (t->kind != Type::Kind::Bv) {
                error(e->span, "bit extraction needs a bitvector, found " +
                                   show(t));
            } else if (e->lo < 0 || e->hi < e->lo || e->hi > t->bvWidth) {
                error(e->span, "bit range [" + std::to_string(e->hi) + ":" +
                                   std::to_string(e->lo) +
                                   "] does not fit bv" +
                                   std::to_string(t->bvWidth));
            }
            return record(e.get(), Type::bv(width < 0 ? 0 : width), expected);
        }
        case Expr::Kind::Old: {
            if (!allowOld_)
                error(e->span, "old() is only allowed in postconditions, "
                               "loop invariants and implementation bodies");
            TypeRef t = checkExpr(e->a, nullptr);
            return record(e.get(), t, expected);
        }
        case Expr::Kind::Ite: {
            checkExpr(e->a, Type::boolType());
            TypeRef t1 = checkExpr(e->b, nullptr);
            TypeRef t2 = checkExpr(e->c, nullptr);
            if (!uni_->unify(t1, t2))
                error(e->span, "if-then-else branches have different types: " +
                                   show(t1) + " and " + show(t2));
            return record(e.get(), t1, expected);
        }
        case Expr::Kind::Quant: {
            pushTypeParams(e->typeParams, e->span);
            pushBound(e->bound, e->span);
            for (auto const& g : e->triggers)
                for (auto const& t : g.exprs) checkExpr(t, nullptr);
            checkExpr(e->body, Type::boolType());
            valueScopes_.pop_back();
            typeVarScopes_.pop_back();
            return record(e.get(), Type::boolType(), expected);
        }
        case Expr::Kind::Lambda: {
            pushBound(e->bound, e->span);
            TypeRef bodyT = checkExpr(e->body, nullptr);
            std::vector<TypeRef> dom;
            for (auto const& b : e->bound)
                dom.push_back(valueScopes_.back()[b.name].type);
            valueScopes_.pop_back();
            return record(e.get(), Type::map({}, std::move(dom), bodyT),
                          expected);
        }
        case Expr::Kind::Call: {
            auto it = info_.functions.find(e->text);
            if (it == info_.functions.end()) {
                if (info_.procedures.count(e->text))
                    error(e->span, "procedure '" + e->text +
                                       "' cannot be used in an expression; "
                                       "use a call statement");
                else
                    error(e->span, "unknown function '" + e->text + "'");
                for (auto const& a : e->items) checkExpr(a, nullptr);
                return record(e.get(), uni_->fresh(), expected);
            }
            FuncSig const& sig = it->second;
            if (e->items.size() != sig.params.size()) {
                error(e->span, "function '" + e->text + "' expects " +
                                   std::to_string(sig.params.size()) +
                                   " argument(s), got " +
                                   std::to_string(e->items.size()));
                for (auto const& a : e->items) checkExpr(a, nullptr);
                return record(e.get(), uni_->fresh(), expected);
            }
            TypeSubst s;
            std::vector<TypeRef> metas;
            for (auto const& tp : sig.decl->typeParams) {
                metas.push_back(uni_->fresh());
                s.emplace(tp, metas.back());
            }
            for (std::size_t i = 0; i < e->items.size(); ++i)
                checkExpr(e->items[i], substType(sig.params[i], s));
            if (!metas.empty()) {
                info_.callTypeArgs[e.get()] = metas;
                uCalls_.push_back(e.get());
            }
            return record(e.get(), substType(sig.result, s), expected);
        }
        }
        return record(e.get(), Type::intType(), expected);
    }

    TypeRef checkBin(ExprRef const& e, TypeRef const& expected) {
        BinOp op = e->ops[0];
        switch (op) {
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Mul: {
            TypeRef l = checkExpr(e->a, nullptr);
            TypeRef r = checkExpr(e->b, nullptr);
            if (!uni_->unify(l, r))
                error(e->span, "operands have different types: " + show(l) +
                                   " and " + show(r));
            requireNumeric(e->span, l, "arithmetic");
            return record(e.get(), l, expected);
        }
        case BinOp::IntDiv:
        case BinOp::Mod:
            checkExpr(e->a, Type::intType());
            checkExpr(e->b, Type::intType());
            return record(e.get(), Type::intType(), expected);
        case BinOp::RealDiv:
        case BinOp::Pow:
            checkExpr(e->a, Type::realType());
            checkExpr(e->b, Type::realType());
            return record(e.get(), Type::realType(), expected);
        case BinOp::And:
        case BinOp::Or:
        case BinOp::Imp:
        case BinOp::Iff:
            checkExpr(e->a, Type::boolType());
            checkExpr(e->b, Type::boolType());
            return record(e.get(), Type::boolType(), expected);
        case BinOp::Eq:
        case BinOp::Neq:
        case BinOp::Subtype: {
            TypeRef l = checkExpr(e->a, nullptr);
            TypeRef r = checkExpr(e->b, nullptr);
            if (!uni_->unify(l, r))
                error(e->span, "cannot compare " + show(l) + " with " +
                                   show(r));
            return record(e.get(), Type::boolType(), expected);
        }
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: {
            TypeRef l = checkExpr(e->a, nullptr);
            TypeRef r = checkExpr(e->b, nullptr);
            if (!uni_->unify(l, r))
                error(e->span, "cannot compare " + show(l) + " with " +
                                   show(r));
            requireNumeric(e->span, l, "comparison");
            return record(e.get(), Type::boolType(), expected);
        }
        case BinOp::Concat: {
            TypeRef l = info_.normalize(uni_->zonk(checkExpr(e->a, nullptr)));
            TypeRef r = info_.normalize(uni_->zonk(checkExpr(e->b, nullptr)));
            if (l->kind != Type::Kind::Bv || r->kind != Type::Kind::Bv) {
                error(e->span, "++ needs bitvector operands, found " +
                                   show(l) + " and " + show(r));
                return record(e.get(), Type::bv(0), expected);
            }
            return record(e.get(), Type::bv(l->bvWidth + r->bvWidth),
                          expected);
        }
        }
        return record(e.get(), Type::intType(), expected);
    }

    // Shared by Select and Update. For Update, *updateBase receives the
    // original base type and the new value is checked against the codomain.
    TypeRef checkIndexing(ExprRef const& e, ExprRef const& base,
                          std::vector<ExprRef> const& indices,
                          TypeRef* updateBase) {
        TypeRef bt = checkExpr(base, nullptr);
        if (updateBase) *updateBase = bt;
        TypeRef norm = info_.normalize(uni_->zonk(bt));
        if (isMetaVar(norm)) {
            // Base type still open: invent a monomorphic map shape.
            std::vector<TypeRef> dom;
            for (auto const& i : indices)
                dom.push_back(checkExpr(i, nullptr));
            TypeRef cod = uni_->fresh();
            uni_->unify(bt, Type::map({}, dom, cod));
            if (updateBase) checkExpr(e->b, cod);
            return cod;
        }
        if (norm->kind != Type::Kind::Map) {
            error(e->span, "indexing a non-map value of type " + show(bt));
            for (auto const& i : indices) checkExpr(i, nullptr);
            if (updateBase) checkExpr(e->b, nullptr);
            return uni_->fresh();
        }
        if (indices.size() != norm->domain.size())
            error(e->span, "map expects " +
                               std::to_string(norm->domain.size()) +
                               " index(es), got " +
                               std::to_string(indices.size()));
        TypeSubst s;
        std::vector<TypeRef> metas;
        for (auto const& tp : norm->typeParams) {
            metas.push_back(uni_->fresh());
            s.emplace(tp, metas.back());
        }
        for (std::size_t i = 0;
             i < indices.size() && i < norm->domain.size(); ++i)
            checkExpr(indices[i], substType(norm->domain[i], s));
        for (std::size_t i = norm->domain.size(); i < indices.size(); ++i)
            checkExpr(indices[i], nullptr);
        TypeRef cod = substType(norm->codomain, s);
        if (!metas.empty()) {
            info_.mapInst[e.get()] = metas;
            uInsts_.push_back(e.get());
        }
        if (updateBase) checkExpr(e->b, cod);
        return cod;
    }

    void pushBound(std::vector<bpl::BoundVar> const& bound, SourceSpan span) {
        std::map<std::string, Symbol> scope;
        for (auto const& b : bound) {
            TypeRef t = resolveType(b.type);
            if (!scope.emplace(b.name,
                               Symbol{RefKind::Bound, b.name, t, nullptr,
                                      nullptr})
                     .second)
                error(b.span.valid() ? b.span : span,
                      "duplicate bound variable '" + b.name + "'");
        }
        valueScopes_.push_back(std::move(scope));
    }

    // ---- statements ------------------------------------------------------

    Symbol const* resolveMutable(std::string const& name, SourceSpan span,
                                 char const* action) {
        Symbol const* sym = lookup(name);
        if (!sym) {
            error(span, "unknown identifier '" + name + "'");
            return nullptr;
        }
        switch (sym->kind) {
        case RefKind::GlobalVar:
        case RefKind::OutParam:
        case RefKind::Local:
            return sym;
        case RefKind::Constant:
            error(span, std::string("cannot ") + action + " constant '" +
                            name + "'");
            return nullptr;
        case RefKind::InParam:
            error(span, std::string("cannot ") + action + " in-parameter '" +
                            name + "'");
            return nullptr;
        case RefKind::Bound:
            error(span, std::string("cannot ") + action + " bound variable '" +
                            name + "'");
            return nullptr;
        }
        return nullptr;
    }

    void checkGuard(ExprRef const& g) {
        if (g->kind == Expr::Kind::Star) {
            beginUnit();
            info_.exprTypes[g.get()] = Type::boolType();
            finalizeUnit();
            return;
        }
        checkExprUnit(g, Type::boolType());
    }

    void checkStmt(StmtRef const& s) {
        switch (s->kind) {
        case Stmt::Kind::Assert:
        case Stmt::Kind::Assume:
            checkExprUnit(s->expr, Type::boolType());
            return;
        case Stmt::Kind::Assign:
            checkAssign(s);
            return;
        case Stmt::Kind::Havoc: {
            std::vector<Symbol> syms;
            for (std::size_t i = 0; i < s->names.size(); ++i) {
                SourceSpan span = i < s->nameSpans.size() ? s->nameSpans[i]
                                                          : s->span;
                Symbol const* sym =
                    resolveMutable(s->names[i], span, "havoc");
                syms.push_back(sym ? *sym : Symbol{});
            }
            info_.stmtNameRefs[s.get()] = std::move(syms);
            return;
        }
        case Stmt::Kind::Call:
            checkCall(s);
            return;
        case Stmt::Kind::CallForall:
            checkCallForall(s);
            return;
        case Stmt::Kind::If:
            checkGuard(s->expr);
            for (auto const& c : s->body1) checkStmt(c);
            for (auto const& c : s->body2) checkStmt(c);
            return;
        case Stmt::Kind::While: {
            checkGuard(s->expr);
            for (auto const& inv : s->invariants)
                checkExprUnit(inv.expr, Type::boolType());
            ++loopDepth_;
            for (auto const& c : s->body1) checkStmt(c);
            --loopDepth_;
            return;
        }
        case Stmt::Kind::Break:
            if (loopDepth_ == 0)
                error(s->span, "break outside of a loop");
            return;
        case Stmt::Kind::Return:
            return;
        case Stmt::Kind::Goto:
            for (auto const& l : s->names)
                if (!implLabels_.count(l))
                    error(s->span, "goto to undeclared label '" + l + "'");
            return;
        case Stmt::Kind::Label:
            return;
        }
    }

    void checkAssign(StmtRef const& s) {
        beginUnit();
        std::vector<Symbol> syms;
        std::vector<std::vector<std::vector<TypeRef>>> insts;
        bool anyInst = false;
        for (std::size_t i = 0; i < s->lhs.size(); ++i) {
            auto const& target = s->lhs[i];
            Symbol const* sym =
                resolveMutable(target.name, target.span, "assign to");
            syms.push_back(sym ? *sym : Symbol{});
            std::vector<std::vector<TypeRef>> groups;
            TypeRef cur = sym ? sym->type : uni_->fresh();
            for (auto const& group : target.indexGroups) {
                TypeRef norm = info_.normalize(uni_->zonk(cur));
                std::vector<TypeRef> metas;
                if (norm->kind != Type::Kind::Map) {
                    error(target.span, "indexing a non-map value of type " +
                                           show(cur));
                    for (auto const& ix : group) checkExpr(ix, nullptr);
                    cur = uni_->fresh();
                } else {
                    if (group.size() != norm->domain.size())
                        error(target.span,
                              "map expects " +
                                  std::to_string(norm->domain.size()) +
                                  " index(es), got " +
                                  std::to_string(group.size()));
                    TypeSubst sub;
                    for (auto const& tp : norm->typeParams) {
                        metas.push_back(uni_->fresh());
                        sub.emplace(tp, metas.back());
                    }
                    for (std::size_t k = 0;
                         k < group.size() && k < norm->domain.size(); ++k)
                        checkExpr(group[k], substType(norm->domain[k], sub));
                    cur = substType(norm->codomain, sub);
                }
                if (!metas.empty()) anyInst = true;
                groups.push_back(std::move(metas));
            }
            insts.push_back(std::move(groups));
            if (i < s->rhs.size()) checkExpr(s->rhs[i], cur);
        }
        info_.stmtNameRefs[s.get()] = std::move(syms);
        if (anyInst) {
            info_.assignInst[s.get()] = std::move(insts);
            uAssigns_.push_back(s.get());
        }
        finalizeUnit();
    }

    void checkCall(StmtRef const& s) {
        beginUnit();
        auto it = info_.procedures.find(s->callee);
        if (it == info_.procedures.end()) {
            if (info_.functions.count(s->callee))
                error(s->span, "'" + s->callee +
                                   "' is a function; apply it inside an "
                                   "expression instead of calling it");
            else
                error(s->span, "unknown procedure '" + s->callee + "'");
            for (auto const& a : s->args) checkExpr(a, nullptr);
            finalizeUnit();
            return;
        }
        ProcSig const& sig = it->second;
        if (s->args.size() != sig.ins.size())
            error(s->span, "procedure '" + s->callee + "' expects " +
                               std::to_string(sig.ins.size()) +
                               " argument(s), got " +
                               std::to_string(s->args.size()));
        if (s->names.size() != sig.outs.size())
            error(s->span, "procedure '" + s->callee + "' returns " +
                               std::to_string(sig.outs.size()) +
                               " value(s), got " +
                               std::to_string(s->names.size()) +
                               " output variable(s)");
        TypeSubst sub;
        std::vector<TypeRef> metas;
        for (auto const& tp : sig.decl->typeParams) {
            metas.push_back(uni_->fresh());
            sub.emplace(tp, metas.back());
        }
        for (std::size_t i = 0; i < s->args.size(); ++i) {
            TypeRef expect = i < sig.ins.size()
                                 ? substType(sig.ins[i].type, sub)
                                 : nullptr;
            checkExpr(s->args[i], expect);
        }
        std::vector<Symbol> outSyms;
        for (std::size_t i = 0; i < s->names.size(); ++i) {
            SourceSpan span =
                i < s->nameSpans.size() ? s->nameSpans[i] : s->span;
            Symbol const* sym =
                resolveMutable(s->names[i], span, "assign to");
            outSyms.push_back(sym ? *sym : Symbol{});
            if (sym && i < sig.outs.size() &&
                !uni_->unify(sym->type, substType(sig.outs[i].type, sub)))
                error(span, "output variable '" + s->names[i] + "' has type " +
                                show(sym->type) + " but '" + s->callee +
                                "' returns " + show(sig.outs[i].type));
        }
        info_.stmtNameRefs[s.get()] = std::move(outSyms);
        if (!metas.empty()) {
            info_.stmtCallTypeArgs[s.get()] = metas;
            uStmtCalls_.push_back(s.get());
        }
        finalizeUnit();
    }

    void checkCallForall(StmtRef const& s) {
        beginUnit();
        auto it = info_.procedures.find(s->callee);
        if (it == info_.procedures.end()) {
            error(s->span, "unknown procedure '" + s->callee + "'");
            for (auto const& a : s->args)
                if (a) checkExpr(a, nullptr);
            finalizeUnit();
            return;
        }
        ProcSig const& sig = it->second;
        if (s->args.size() != sig.ins.size())
            error(s->span, "procedure '" + s->callee + "' expects " +
                               std::to_string(sig.ins.size()) +
                               " argument(s), got " +
                               std::to_string(s->args.size()));
        TypeSubst sub;
        std::vector<TypeRef> metas;
        for (auto const& tp : sig.decl->typeParams) {
            metas.push_back(uni_->fresh());
            sub.emplace(tp, metas.back());
        }
        for (std::size_t i = 0; i < s->args.size(); ++i) {
            if (!s->args[i]) continue;  // wildcard
            TypeRef expect = i < sig.ins.size()
                                 ? substType(sig.ins[i].type, sub)
                                 : nullptr;
            checkExpr(s->args[i], expect);
        }
        if (!metas.empty()) {
            info_.stmtCallTypeArgs[s.get()] = metas;
            uStmtCalls_.push_back(s.get());
        }
        finalizeUnit();
    }

    // ---- declarations ----------------------------------------------------

    void collectLabels(std::vector<StmtRef> const& body) {
        for (auto const& s : body) {
            if (s->kind == Stmt::Kind::Label) {
                if (!implLabels_.insert(s->label).second)
                    error(s->span, "duplicate label '" + s->label + "'");
            }
            collectLabels(s->body1);
            collectLabels(s->body2);
        }
    }

    void checkBodies() {
        std::set<Expr const*> checkedWheres;
        for (auto const& d : p_.decls) {
            switch (d->kind) {
            case Decl::Kind::ConstDecl: {
                if (!d->order.present) break;
                TypeRef t = resolveType(d->type);
                for (auto const& par : d->order.parents) {
                    auto g = info_.globals.find(par.name);
                    if (g == info_.globals.end() ||
                        g->second.kind != RefKind::Constant)
                        error(par.span, "'" + par.name +
                                            "' in an extends clause is not a "
                                            "constant");
                    else if (!info_.sameType(g->second.type, t))
                        error(par.span,
                              "'" + par.name + "' has type " +
                                  bpl::typeToString(g->second.type) +
                                  " but the extended constant has type " +
                                  bpl::typeToString(t));
                }
                break;
            }
            case Decl::Kind::VarDecl:
                for (auto const& v : d->vars) {
                    if (!v.where || !checkedWheres.insert(v.where.get()).second)
                        continue;
                    checkExprUnit(v.where, Type::boolType());
                }
                break;
            case Decl::Kind::AxiomDecl: {
                globalsAllowed_ = false;
                checkExprUnit(d->expr, Type::boolType());
                globalsAllowed_ = true;
                break;
            }
            case Decl::Kind::FunctionDecl: {
                if (!d->bodyExpr) break;
                auto it = info_.functions.find(d->name);
                if (it == info_.functions.end()) break;
                FuncSig const& sig = it->second;
                pushTypeParams(d->typeParams, d->span);
                std::map<std::string, Symbol> scope;
                for (std::size_t i = 0;
                     i < d->params.size() && i < sig.params.size(); ++i)
                    scope.emplace(d->params[i].name,
                                  Symbol{RefKind::InParam, d->params[i].name,
                                         sig.params[i], nullptr, d.get()});
                valueScopes_.push_back(std::move(scope));
                globalsAllowed_ = false;
                checkExprUnit(d->bodyExpr, sig.result);
                globalsAllowed_ = true;
                valueScopes_.pop_back();
                typeVarScopes_.pop_back();
                break;
            }
            case Decl::Kind::ProcedureDecl:
                checkProcedureSpec(d);
                break;
            case Decl::Kind::Implementation:
                checkImplementation(d);
                break;
            default:
                break;
            }
        }
    }

    void checkProcedureSpec(DeclRef const& d) {
        auto it = info_.procedures.find(d->name);
        if (it == info_.procedures.end() || it->second.decl != d) return;
        ProcSig const& sig = it->second;
        pushTypeParams(d->typeParams, d->span);

        std::map<std::string, Symbol> ins;
        for (auto const& p : sig.ins) ins.emplace(p.name, p);
        std::map<std::string, Symbol> insOuts = ins;
        for (auto const& p : sig.outs) insOuts.emplace(p.name, p);

        // where clauses: in-parameters see only in-parameters and globals,
        // out-parameters see both parameter lists.
        std::set<Expr const*> seen;
        valueScopes_.push_back(ins);
        for (auto const& p : sig.ins)
            if (p.where && seen.insert(p.where.get()).second)
                checkExprUnit(p.where, Type::boolType());
        valueScopes_.pop_back();
        valueScopes_.push_back(insOuts);
        for (auto const& p : sig.outs)
            if (p.where && seen.insert(p.where.get()).second)
                checkExprUnit(p.where, Type::boolType());
        valueScopes_.pop_back();

        valueScopes_.push_back(ins);
        for (auto const& c : d->preCl) checkExprUnit(c.expr, Type::boolType());
        valueScopes_.pop_back();

        valueScopes_.push_back(insOuts);
        allowOld_ = true;
        for (auto const& c : d->postCl) checkExprUnit(c.expr, Type::boolType());
        allowOld_ = false;
        valueScopes_.pop_back();

        for (std::size_t i = 0; i < d->modifies.size(); ++i) {
            SourceSpan span = i < d->modifiesSpans.size() ? d->modifiesSpans[i]
                                                          : d->span;
            auto g = info_.globals.find(d->modifies[i]);
            if (g == info_.globals.end() ||
                g->second.kind != RefKind::GlobalVar)
                error(span, "'" + d->modifies[i] +
                                "' in modifies clause is not a global "
                                "variable");
        }
        typeVarScopes_.pop_back();
    }

    void checkImplementation(DeclRef const& d) {
        auto it = info_.procedures.find(d->name);
        if (it == info_.procedures.end()) {
            error(d->span, "implementation of undeclared procedure '" +
                               d->name + "'");
            return;
        }
        ProcSig const& sig = it->second;
        DeclRef const& proc = sig.decl;
        pushTypeParams(d->typeParams, d->span);

        if (d->typeParams.size() != proc->typeParams.size() ||
            d->params.size() != sig.ins.size() ||
            d->outs.size() != sig.outs.size()) {
            error(d->span, "implementation signature of '" + d->name +
                               "' does not match its declaration");
            typeVarScopes_.pop_back();
            return;
        }
        // Positional mapping of the declaration's type parameters.
        TypeSubst ren;
        for (std::size_t i = 0; i < proc->typeParams.size(); ++i)
            ren.emplace(proc->typeParams[i],
                        Type::var(d->typeParams[i]));

        std::map<std::string, Symbol> scope;
        auto addParam = [&](Param const& p, RefKind kind, TypeRef declT) {
            TypeRef t = resolveType(p.type);
            if (declT && !info_.sameType(t, substType(declT, ren)))
                error(p.span, "parameter '" + p.name + "' has type " +
                                  bpl::typeToString(t) +
                                  " but the declaration says " +
                                  bpl::typeToString(declT));
            if (!scope
                     .emplace(p.name, Symbol{kind, p.name, t, p.where,
                                             d.get()})
                     .second)
                error(p.span, "duplicate variable '" + p.name + "'");
        };
        for (std::size_t i = 0; i < d->params.size(); ++i)
            addParam(d->params[i], RefKind::InParam, sig.ins[i].type);
        for (std::size_t i = 0; i < d->outs.size(); ++i)
            addParam(d->outs[i], RefKind::OutParam, sig.outs[i].type);
        for (auto const& l : d->locals)
            addParam(l, RefKind::Local, nullptr);
        valueScopes_.push_back(std::move(scope));

        implLabels_.clear();
        collectLabels(d->body);

        // Local where clauses are single-state predicates over the full
        // implementation scope.
        std::set<Expr const*> seen;
        for (auto const& l : d->locals)
            if (l.where && seen.insert(l.where.get()).second)
                checkExprUnit(l.where, Type::boolType());

        allowOld_ = true;
        loopDepth_ = 0;
        for (auto const& s : d->body) checkStmt(s);
        allowOld_ = false;

        valueScopes_.pop_back();
        typeVarScopes_.pop_back();
    }
};

} // namespace

std::optional<TypeInfo> typecheck(bpl::Program const& p,
                                  DiagnosticEngine& diags) {
    return Checker(p, diags).run();
}

} // namespace b2y::sema
