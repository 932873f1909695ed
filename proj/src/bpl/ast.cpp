#include "b2y/bpl/ast.hpp"

#include <sstream>

namespace b2y::bpl {

namespace {

std::shared_ptr<Type> mkType(Type::Kind k, SourceSpan span) {
    auto t = std::make_shared<Type>();
    t->kind = k;
    t->span = span;
    return t;
}

std::shared_ptr<Expr> mkExpr(Expr::Kind k, SourceSpan span) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->span = span;
    return e;
}

std::shared_ptr<Stmt> mkStmt(Stmt::Kind k, SourceSpan span) {
    auto s = std::make_shared<Stmt>();
    s->kind = k;
    s->span = span;
    return s;
}

} // namespace

TypeRef Type::intType() {
    static TypeRef t = mkType(Kind::Int, {});
    return t;
}
TypeRef Type::realType() {
    static TypeRef t = mkType(Kind::Real, {});
    return t;
}
TypeRef Type::boolType() {
    static TypeRef t = mkType(Kind::Bool, {});
    return t;
}
TypeRef Type::bv(int width, SourceSpan span) {
    auto t = mkType(Kind::Bv, span);
    t->bvWidth = width;
    return t;
}
TypeRef Type::ctor(std::string name, std::vector<TypeRef> args,
                   SourceSpan span) {
    auto t = mkType(Kind::Ctor, span);
    t->name = std::move(name);
    t->ctorArgs = std::move(args);
    return t;
}
TypeRef Type::map(std::vector<std::string> typeParams,
                  std::vector<TypeRef> domain, TypeRef codomain,
                  SourceSpan span) {
    auto t = mkType(Kind::Map, span);
    t->typeParams = std::move(typeParams);
    t->domain = std::move(domain);
    t->codomain = std::move(codomain);
    return t;
}
TypeRef Type::var(std::string name, SourceSpan span) {
    auto t = mkType(Kind::Var, span);
    t->name = std::move(name);
    return t;
}

bool typeEqual(TypeRef const& a, TypeRef const& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Type::Kind::Int:
    case Type::Kind::Real:
    case Type::Kind::Bool:
        return true;
    case Type::Kind::Bv:
        return a->bvWidth == b->bvWidth;
    case Type::Kind::Var:
        return a->name == b->name;
    case Type::Kind::Ctor: {
        if (a->name != b->name || a->ctorArgs.size() != b->ctorArgs.size())
            return false;
        for (std::size_t i = 0; i < a->ctorArgs.size(); ++i)
            if (!typeEqual(a->ctorArgs[i], b->ctorArgs[i])) return false;
        return true;
    }
    case Type::Kind::Map: {
        if (a->typeParams != b->typeParams ||
            a->domain.size() != b->domain.size())
            return false;
        for (std::size_t i = 0; i < a->domain.size(); ++i)
            if (!typeEqual(a->domain[i], b->domain[i])) return false;
        return typeEqual(a->codomain, b->codomain);
    }
    }
    return false;
}

std::string typeToString(TypeRef const& t) {
    if (!t) return "<null>";
    std::ostringstream ss;
    switch (t->kind) {
    case Type::Kind::Int: ss << "int"; break;
    case Type::Kind::Real: ss << "real"; break;
    case Type::Kind::Bool: ss << "bool"; break;
    case Type::Kind::Bv: ss << "bv" << t->bvWidth; break;
    case Type::Kind::Var: ss << t->name; break;
    case Type::Kind::Ctor:
        ss << t->name;
        for (auto const& a : t->ctorArgs) {
            std::string s = typeToString(a);
            bool atom = a->kind != Type::Kind::Ctor || a->ctorArgs.empty();
            ss << ' ' << (atom ? s : "(" + s + ")");
        }
        break;
    case Type::Kind::Map:
        if (!t->typeParams.empty()) {
            ss << '<';
            for (std::size_t i = 0; i < t->typeParams.size(); ++i)
                ss << (i ? ", " : "") << t->typeParams[i];
            ss << '>';
        }
        ss << '[';
        for (std::size_t i = 0; i < t->domain.size(); ++i)
            ss << (i ? ", " : "") << typeToString(t->domain[i]);
        ss << ']' << typeToString(t->codomain);
        break;
    }
    return ss.str();
}

ExprRef Expr::intLit(std::string digits, SourceSpan span) {
    auto e = mkExpr(Kind::IntLit, span);
    e->text = std::move(digits);
    return e;
}
ExprRef Expr::realLit(std::string digits, SourceSpan span) {
    auto e = mkExpr(Kind::RealLit, span);
    e->text = std::move(digits);
    return e;
}
ExprRef Expr::boolLit(bool v, SourceSpan span) {
    auto e = mkExpr(Kind::BoolLit, span);
    e->bval = v;
    return e;
}
ExprRef Expr::bvLit(std::string digits, int width, SourceSpan span) {
    auto e = mkExpr(Kind::BvLit, span);
    e->text = std::move(digits);
    e->bvWidth = width;
    return e;
}
ExprRef Expr::stringLit(std::string s, SourceSpan span) {
    auto e = mkExpr(Kind::StringLit, span);
    e->text = std::move(s);
    return e;
}
ExprRef Expr::ident(std::string name, SourceSpan span) {
    auto e = mkExpr(Kind::Ident, span);
    e->text = std::move(name);
    return e;
}
ExprRef Expr::unary(UnOp op, ExprRef inner, SourceSpan span) {
    auto e = mkExpr(Kind::Un, span);
    e->un = op;
    e->a = std::move(inner);
    return e;
}
ExprRef Expr::binary(BinOp op, ExprRef lhs, ExprRef rhs, SourceSpan span) {
    auto e = mkExpr(Kind::Bin, span);
    e->ops = {op};
    e->a = std::move(lhs);
    e->b = std::move(rhs);
    return e;
}
ExprRef Expr::chain(std::vector<BinOp> ops, std::vector<ExprRef> operands,
                    SourceSpan span) {
    auto e = mkExpr(Kind::Chain, span);
    e->ops = std::move(ops);
    e->items = std::move(operands);
    return e;
}
ExprRef Expr::select(ExprRef base, std::vector<ExprRef> indices,
                     SourceSpan span) {
    auto e = mkExpr(Kind::Select, span);
    e->a = std::move(base);
    e->items = std::move(indices);
    return e;
}
ExprRef Expr::update(ExprRef base, std::vector<ExprRef> indices, ExprRef value,
                     SourceSpan span) {
    auto e = mkExpr(Kind::Update, span);
    e->a = std::move(base);
    e->items = std::move(indices);
    e->b = std::move(value);
    return e;
}
ExprRef Expr::extract(ExprRef base, int hi, int lo, SourceSpan span) {
    auto e = mkExpr(Kind::Extract, span);
    e->a = std::move(base);
    e->hi = hi;
    e->lo = lo;
    return e;
}
ExprRef Expr::old(ExprRef inner, SourceSpan span) {
    auto e = mkExpr(Kind::Old, span);
    e->a = std::move(inner);
    return e;
}
ExprRef Expr::quant(QKind q, std::vector<std::string> typeParams,
                    std::vector<BoundVar> bound,
                    std::vector<TriggerGroup> triggers, std::vector<Attr> attrs,
                    ExprRef body, SourceSpan span) {
    auto e = mkExpr(Kind::Quant, span);
    e->qkind = q;
    e->typeParams = std::move(typeParams);
    e->bound = std::move(bound);
    e->triggers = std::move(triggers);
    e->attrs = std::move(attrs);
    e->body = std::move(body);
    return e;
}
ExprRef Expr::lambda(std::vector<BoundVar> bound, ExprRef body,
                     SourceSpan span) {
    auto e = mkExpr(Kind::Lambda, span);
    e->bound = std::move(bound);
    e->body = std::move(body);
    return e;
}
ExprRef Expr::ite(ExprRef cond, ExprRef thenE, ExprRef elseE, SourceSpan span) {
    auto e = mkExpr(Kind::Ite, span);
    e->a = std::move(cond);
    e->b = std::move(thenE);
    e->c = std::move(elseE);
    return e;
}
ExprRef Expr::call(std::string callee, std::vector<ExprRef> args,
                   SourceSpan span) {
    auto e = mkExpr(Kind::Call, span);
    e->text = std::move(callee);
    e->items = std::move(args);
    return e;
}
ExprRef Expr::star(SourceSpan span) { return mkExpr(Kind::Star, span); }

ExprRef Expr::andOf(std::vector<ExprRef> conjuncts) {
    if (conjuncts.empty()) return boolLit(true);
    ExprRef acc = conjuncts[0];
    for (std::size_t i = 1; i < conjuncts.size(); ++i)
        acc = binary(BinOp::And, acc, conjuncts[i]);
    return acc;
}

namespace {

bool exprVecEqual(std::vector<ExprRef> const& a, std::vector<ExprRef> const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!exprEqual(a[i], b[i])) return false;
    return true;
}

bool boundEqual(std::vector<BoundVar> const& a, std::vector<BoundVar> const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].name != b[i].name || !typeEqual(a[i].type, b[i].type))
            return false;
    return true;
}

bool attrsEqual(std::vector<Attr> const& a, std::vector<Attr> const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].name != b[i].name || !exprVecEqual(a[i].args, b[i].args))
            return false;
    return true;
}

bool triggersEqual(std::vector<TriggerGroup> const& a,
                   std::vector<TriggerGroup> const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].negated != b[i].negated || !exprVecEqual(a[i].exprs, b[i].exprs))
            return false;
    return true;
}

} // namespace

bool exprEqual(ExprRef const& a, ExprRef const& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::RealLit:
    case Expr::Kind::StringLit:
    case Expr::Kind::Ident:
        return a->text == b->text;
    case Expr::Kind::BoolLit:
        return a->bval == b->bval;
    case Expr::Kind::BvLit:
        return a->text == b->text && a->bvWidth == b->bvWidth;
    case Expr::Kind::Un:
        return a->un == b->un && exprEqual(a->a, b->a);
    case Expr::Kind::Bin:
        return a->ops == b->ops && exprEqual(a->a, b->a) && exprEqual(a->b, b->b);
    case Expr::Kind::Chain:
        return a->ops == b->ops && exprVecEqual(a->items, b->items);
    case Expr::Kind::Select:
        return exprEqual(a->a, b->a) && exprVecEqual(a->items, b->items);
    case Expr::Kind::Update:
        return exprEqual(a->a, b->a) && exprVecEqual(a->items, b->items) &&
               exprEqual(a->b, b->b);
    case Expr::Kind::Extract:
        return a->hi == b->hi && a->lo == b->lo && exprEqual(a->a, b->a);
    case Expr::Kind::Old:
        return exprEqual(a->a, b->a);
    case Expr::Kind::Quant:
        return a->qkind == b->qkind && a->typeParams == b->typeParams &&
               boundEqual(a->bound, b->bound) &&
               triggersEqual(a->triggers, b->triggers) &&
               attrsEqual(a->attrs, b->attrs) && exprEqual(a->body, b->body);
    case Expr::Kind::Lambda:
        return boundEqual(a->bound, b->bound) && exprEqual(a->body, b->body);
    case Expr::Kind::Ite:
        return exprEqual(a->a, b->a) && exprEqual(a->b, b->b) &&
               exprEqual(a->c, b->c);
    case Expr::Kind::Call:
        return a->text == b->text && exprVecEqual(a->items, b->items);
    case Expr::Kind::Star:
        return true;
    }
    return false;
}

StmtRef Stmt::assertStmt(ExprRef e, std::vector<Attr> attrs, SourceSpan span) {
    auto s = mkStmt(Kind::Assert, span);
    s->expr = std::move(e);
    s->attrs = std::move(attrs);
    return s;
}
StmtRef Stmt::assumeStmt(ExprRef e, std::vector<Attr> attrs, SourceSpan span) {
    auto s = mkStmt(Kind::Assume, span);
    s->expr = std::move(e);
    s->attrs = std::move(attrs);
    return s;
}
StmtRef Stmt::assign(std::vector<LhsTarget> lhs, std::vector<ExprRef> rhs,
                     SourceSpan span) {
    auto s = mkStmt(Kind::Assign, span);
    s->lhs = std::move(lhs);
    s->rhs = std::move(rhs);
    return s;
}
StmtRef Stmt::havoc(std::vector<std::string> names,
                    std::vector<SourceSpan> nameSpans, SourceSpan span) {
    auto s = mkStmt(Kind::Havoc, span);
    s->names = std::move(names);
    s->nameSpans = std::move(nameSpans);
    return s;
}
StmtRef Stmt::call(std::vector<std::string> outs, std::string callee,
                   std::vector<ExprRef> ins, std::vector<Attr> attrs,
                   SourceSpan span) {
    auto s = mkStmt(Kind::Call, span);
    s->names = std::move(outs);
    s->callee = std::move(callee);
    s->args = std::move(ins);
    s->attrs = std::move(attrs);
    return s;
}
StmtRef Stmt::callForall(std::string callee, std::vector<ExprRef> args,
                         SourceSpan span) {
    auto s = mkStmt(Kind::CallForall, span);
    s->callee = std::move(callee);
    s->args = std::move(args);
    return s;
}
StmtRef Stmt::ifStmt(ExprRef guard, std::vector<StmtRef> thenBody,
                     std::vector<StmtRef> elseBody, bool hasElse,
                     SourceSpan span) {
    auto s = mkStmt(Kind::If, span);
    s->expr = std::move(guard);
    s->body1 = std::move(thenBody);
    s->body2 = std::move(elseBody);
    s->hasElse = hasElse;
    return s;
}
StmtRef Stmt::whileStmt(ExprRef guard, std::vector<Invariant> invariants,
                        std::vector<StmtRef> body, SourceSpan span) {
    auto s = mkStmt(Kind::While, span);
    s->expr = std::move(guard);
    s->invariants = std::move(invariants);
    s->body1 = std::move(body);
    return s;
}
StmtRef Stmt::breakStmt(SourceSpan span) { return mkStmt(Kind::Break, span); }
StmtRef Stmt::returnStmt(SourceSpan span) { return mkStmt(Kind::Return, span); }
StmtRef Stmt::gotoStmt(std::vector<std::string> labels, SourceSpan span) {
    auto s = mkStmt(Kind::Goto, span);
    s->names = std::move(labels);
    return s;
}
StmtRef Stmt::labelStmt(std::string name, SourceSpan span) {
    auto s = mkStmt(Kind::Label, span);
    s->label = std::move(name);
    return s;
}

namespace {

bool stmtVecEqual(std::vector<StmtRef> const& a, std::vector<StmtRef> const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!stmtEqual(a[i], b[i])) return false;
    return true;
}

bool invariantsEqual(std::vector<Invariant> const& a,
                     std::vector<Invariant> const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].free != b[i].free || !exprEqual(a[i].expr, b[i].expr) ||
            !attrsEqual(a[i].attrs, b[i].attrs))
            return false;
    return true;
}

bool lhsEqual(std::vector<LhsTarget> const& a, std::vector<LhsTarget> const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].name != b[i].name ||
            a[i].indexGroups.size() != b[i].indexGroups.size())
            return false;
        for (std::size_t g = 0; g < a[i].indexGroups.size(); ++g)
            if (!exprVecEqual(a[i].indexGroups[g], b[i].indexGroups[g]))
                return false;
    }
    return true;
}

} // namespace

bool stmtEqual(StmtRef const& a, StmtRef const& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Stmt::Kind::Assert:
    case Stmt::Kind::Assume:
        return exprEqual(a->expr, b->expr) && attrsEqual(a->attrs, b->attrs);
    case Stmt::Kind::Assign:
        return lhsEqual(a->lhs, b->lhs) && exprVecEqual(a->rhs, b->rhs);
    case Stmt::Kind::Havoc:
    case Stmt::Kind::Goto:
        return a->names == b->names;
    case Stmt::Kind::Call:
        return a->names == b->names && a->callee == b->callee &&
               exprVecEqual(a->args, b->args) && attrsEqual(a->attrs, b->attrs);
    case Stmt::Kind::CallForall:
        return a->callee == b->callee && exprVecEqual(a->args, b->args);
    case Stmt::Kind::If:
        return exprEqual(a->expr, b->expr) && stmtVecEqual(a->body1, b->body1) &&
               a->hasElse == b->hasElse && stmtVecEqual(a->body2, b->body2);
    case Stmt::Kind::While:
        return exprEqual(a->expr, b->expr) &&
               invariantsEqual(a->invariants, b->invariants) &&
               stmtVecEqual(a->body1, b->body1);
    case Stmt::Kind::Break:
    case Stmt::Kind::Return:
        return true;
    case Stmt::Kind::Label:
        return a->label == b->label;
    }
    return false;
}

namespace {

bool paramsEqual(std::vector<Param> const& a, std::vector<Param> const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].name != b[i].name || !typeEqual(a[i].type, b[i].type))
            return false;
        if ((a[i].where == nullptr) != (b[i].where == nullptr)) return false;
        if (a[i].where && !exprEqual(a[i].where, b[i].where)) return false;
    }
    return true;
}

bool specEqual(std::vector<SpecClause> const& a,
               std::vector<SpecClause> const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].free != b[i].free || !exprEqual(a[i].expr, b[i].expr) ||
            !attrsEqual(a[i].attrs, b[i].attrs))
            return false;
    return true;
}

} // namespace

bool declEqual(DeclRef const& a, DeclRef const& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || !attrsEqual(a->attrs, b->attrs)) return false;
    switch (a->kind) {
    case Decl::Kind::TypeDecl:
        return a->name == b->name && a->typeParams == b->typeParams &&
               a->finite == b->finite &&
               (a->synonym == nullptr) == (b->synonym == nullptr) &&
               (!a->synonym || typeEqual(a->synonym, b->synonym));
    case Decl::Kind::ConstDecl: {
        if (a->names != b->names || !typeEqual(a->type, b->type) ||
            a->unique != b->unique || a->order.present != b->order.present ||
            a->order.complete != b->order.complete)
            return false;
        if (a->order.parents.size() != b->order.parents.size()) return false;
        for (std::size_t i = 0; i < a->order.parents.size(); ++i)
            if (a->order.parents[i].name != b->order.parents[i].name ||
                a->order.parents[i].unique != b->order.parents[i].unique)
                return false;
        return true;
    }
    case Decl::Kind::VarDecl:
        return paramsEqual(a->vars, b->vars);
    case Decl::Kind::FunctionDecl:
        return a->name == b->name && a->typeParams == b->typeParams &&
               paramsEqual(a->params, b->params) &&
               typeEqual(a->result.type, b->result.type) &&
               a->result.name == b->result.name &&
               (a->bodyExpr == nullptr) == (b->bodyExpr == nullptr) &&
               (!a->bodyExpr || exprEqual(a->bodyExpr, b->bodyExpr));
    case Decl::Kind::AxiomDecl:
        return exprEqual(a->expr, b->expr) && a->nameHint == b->nameHint;
    case Decl::Kind::ProcedureDecl:
        return a->name == b->name && a->typeParams == b->typeParams &&
               paramsEqual(a->params, b->params) &&
               paramsEqual(a->outs, b->outs) && specEqual(a->preCl, b->preCl) &&
               specEqual(a->postCl, b->postCl) && a->modifies == b->modifies;
    case Decl::Kind::Implementation:
        return a->name == b->name && a->typeParams == b->typeParams &&
               paramsEqual(a->params, b->params) &&
               paramsEqual(a->outs, b->outs) &&
               paramsEqual(a->locals, b->locals) &&
               a->inlineBody == b->inlineBody && stmtVecEqual(a->body, b->body);
    }
    return false;
}

bool programEqual(Program const& a, Program const& b) {
    if (a.decls.size() != b.decls.size()) return false;
    for (std::size_t i = 0; i < a.decls.size(); ++i)
        if (!declEqual(a.decls[i], b.decls[i])) return false;
    return true;
}

} // namespace b2y::bpl
