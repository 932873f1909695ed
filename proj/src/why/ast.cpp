#include "b2y/why/ast.hpp"

namespace b2y::why {

WTypeRef WType::con(std::string name, std::vector<WTypeRef> args) {
    auto t = std::make_shared<WType>();
    t->kind = Kind::Con;
    t->name = std::move(name);
    t->args = std::move(args);
    return t;
}

WTypeRef WType::var(std::string name) {
    auto t = std::make_shared<WType>();
    t->kind = Kind::Var;
    t->name = std::move(name);
    return t;
}

WTypeRef WType::tuple(std::vector<WTypeRef> members) {
    auto t = std::make_shared<WType>();
    t->kind = Kind::Tuple;
    t->args = std::move(members);
    return t;
}

bool typeEqual(WTypeRef const& a, WTypeRef const& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->name != b->name ||
        a->args.size() != b->args.size())
        return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!typeEqual(a->args[i], b->args[i])) return false;
    return true;
}

std::string binSpelling(WBin op) {
    switch (op) {
    case WBin::Add: return "+";
    case WBin::Sub: return "-";
    case WBin::Mul: return "*";
    case WBin::AddR: return "+.";
    case WBin::SubR: return "-.";
    case WBin::MulR: return "*.";
    case WBin::DivR: return "/.";
    case WBin::And: return "/\\";
    case WBin::Or: return "\\/";
    case WBin::Imp: return "->";
    case WBin::Iff: return "<->";
    case WBin::Eq: return "=";
    case WBin::Neq: return "<>";
    case WBin::Lt: return "<";
    case WBin::Le: return "<=";
    case WBin::Gt: return ">";
    case WBin::Ge: return ">=";
    case WBin::LtR: return "<.";
    case WBin::LeR: return "<=.";
    case WBin::GtR: return ">.";
    case WBin::GeR: return ">=.";
    case WBin::Order: return "<:";
    }
    return "?";
}

namespace {

std::shared_ptr<WExpr> node(WExpr::Kind k, SourceSpan span) {
    auto e = std::make_shared<WExpr>();
    e->kind = k;
    e->span = span;
    return e;
}

} // namespace

WExprRef WExpr::intLit(std::string digits, SourceSpan span) {
    auto e = node(Kind::IntLit, span);
    e->text = std::move(digits);
    return e;
}

WExprRef WExpr::realLit(std::string digits, SourceSpan span) {
    // WhyML real literals require a decimal point; Boogie also admits forms
    // like "2e3" and "2.".
    std::string s = std::move(digits);
    auto epos = s.find_first_of("eE");
    std::string mant = epos == std::string::npos ? s : s.substr(0, epos);
    std::string expo = epos == std::string::npos ? "" : s.substr(epos);
    if (mant.find('.') == std::string::npos)
        mant += ".0";
    else if (mant.back() == '.')
        mant += "0";
    auto e = node(Kind::RealLit, span);
    e->text = mant + expo;
    return e;
}

WExprRef WExpr::boolLit(bool v, SourceSpan span) {
    auto e = node(Kind::BoolLit, span);
    e->bval = v;
    return e;
}

WExprRef WExpr::ident(std::string name, SourceSpan span) {
    auto e = node(Kind::Ident, span);
    e->text = std::move(name);
    return e;
}

WExprRef WExpr::contents(std::string name, SourceSpan span) {
    auto e = node(Kind::Contents, span);
    e->text = std::move(name);
    return e;
}

WExprRef WExpr::unary(WUn op, WExprRef e, SourceSpan span) {
    auto r = node(Kind::Un, span);
    r->un = op;
    r->a = std::move(e);
    return r;
}

WExprRef WExpr::binary(WBin op, WExprRef lhs, WExprRef rhs, SourceSpan span) {
    auto r = node(Kind::Bin, span);
    r->ops = {op};
    r->a = std::move(lhs);
    r->b = std::move(rhs);
    return r;
}

WExprRef WExpr::chain(std::vector<WBin> ops, std::vector<WExprRef> operands,
                      SourceSpan span) {
    auto r = node(Kind::Chain, span);
    r->ops = std::move(ops);
    r->items = std::move(operands);
    return r;
}

WExprRef WExpr::app(std::string callee, std::vector<WExprRef> args,
                    SourceSpan span) {
    auto r = node(Kind::App, span);
    r->text = std::move(callee);
    r->items = std::move(args);
    return r;
}

WExprRef WExpr::tuple(std::vector<WExprRef> members, SourceSpan span) {
    auto r = node(Kind::Tuple, span);
    r->items = std::move(members);
    return r;
}

WExprRef WExpr::any(WTypeRef type, SourceSpan span) {
    auto r = node(Kind::Any, span);
    r->type = std::move(type);
    return r;
}

WExprRef WExpr::old(WExprRef e, SourceSpan span) {
    auto r = node(Kind::Old, span);
    r->a = std::move(e);
    return r;
}

WExprRef WExpr::at(WExprRef e, std::string label, SourceSpan span) {
    auto r = node(Kind::At, span);
    r->a = std::move(e);
    r->label = std::move(label);
    return r;
}

WExprRef WExpr::ite(WExprRef cond, WExprRef thenE, WExprRef elseE,
                    SourceSpan span) {
    auto r = node(Kind::Ite, span);
    r->a = std::move(cond);
    r->b = std::move(thenE);
    r->c = std::move(elseE);
    return r;
}

WExprRef WExpr::quant(QKind q, std::vector<Binder> binders,
                      std::vector<std::vector<WExprRef>> triggers,
                      WExprRef body, SourceSpan span) {
    auto r = node(Kind::Quant, span);
    r->qkind = q;
    r->binders = std::move(binders);
    r->triggers = std::move(triggers);
    r->body = std::move(body);
    return r;
}

WExprRef WExpr::andOf(std::vector<WExprRef> conjuncts) {
    if (conjuncts.empty()) return trueLit();
    WExprRef acc = conjuncts[0];
    for (std::size_t i = 1; i < conjuncts.size(); ++i)
        acc = binary(WBin::And, acc, conjuncts[i]);
    return acc;
}

namespace {

std::shared_ptr<WStmt> snode(WStmt::Kind k, SourceSpan span) {
    auto s = std::make_shared<WStmt>();
    s->kind = k;
    s->span = span;
    return s;
}

} // namespace

WStmtRef WStmt::assign(std::string name, WExprRef rhs, SourceSpan span) {
    auto s = snode(Kind::Assign, span);
    s->name = std::move(name);
    s->expr = std::move(rhs);
    return s;
}

WStmtRef WStmt::letIn(std::vector<std::string> pattern, WExprRef init,
                      SourceSpan span) {
    auto s = snode(Kind::Let, span);
    s->names = std::move(pattern);
    s->expr = std::move(init);
    return s;
}

WStmtRef WStmt::eval(WExprRef e, SourceSpan span) {
    auto s = snode(Kind::Eval, span);
    s->expr = std::move(e);
    return s;
}

WStmtRef WStmt::result(WExprRef e, SourceSpan span) {
    auto s = snode(Kind::Result, span);
    s->expr = std::move(e);
    return s;
}

WStmtRef WStmt::assertStmt(WExprRef e, SourceSpan span) {
    auto s = snode(Kind::Assert, span);
    s->expr = std::move(e);
    return s;
}

WStmtRef WStmt::assumeStmt(WExprRef e, SourceSpan span) {
    auto s = snode(Kind::Assume, span);
    s->expr = std::move(e);
    return s;
}

WStmtRef WStmt::ifStmt(WExprRef guard, std::vector<WStmtRef> thenBody,
                       std::vector<WStmtRef> elseBody, bool hasElse,
                       SourceSpan span) {
    auto s = snode(Kind::If, span);
    s->expr = std::move(guard);
    s->body1 = std::move(thenBody);
    s->body2 = std::move(elseBody);
    s->hasElse = hasElse;
    return s;
}

WStmtRef WStmt::whileStmt(WExprRef guard, std::vector<WExprRef> invariants,
                          std::vector<WStmtRef> body, SourceSpan span) {
    auto s = snode(Kind::While, span);
    s->expr = std::move(guard);
    s->invariants = std::move(invariants);
    s->body1 = std::move(body);
    return s;
}

WStmtRef WStmt::tryWith(std::vector<WStmtRef> body, std::string exn,
                        std::vector<WStmtRef> handler, SourceSpan span) {
    auto s = snode(Kind::Try, span);
    s->body1 = std::move(body);
    s->name = std::move(exn);
    s->body2 = std::move(handler);
    return s;
}

WStmtRef WStmt::raise(std::string exn, SourceSpan span) {
    auto s = snode(Kind::Raise, span);
    s->name = std::move(exn);
    return s;
}

WStmtRef WStmt::labelMark(std::string name, SourceSpan span) {
    auto s = snode(Kind::Label, span);
    s->name = std::move(name);
    return s;
}

} // namespace b2y::why
