#pragma once

#include "b2y/basic.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

// WhyML abstract syntax, restricted to the forms the encoder emits. Nodes
// carry the span of the Boogie construct they came from, so validation
// failures point back at the input.

namespace b2y::why {

class WType;
using WTypeRef = std::shared_ptr<WType const>;

class WType {
public:
    enum class Kind { Con, Var, Tuple };

    Kind kind;
    std::string name;            // Con constructor / Var without the tick
    std::vector<WTypeRef> args;  // Con arguments / Tuple members

    static WTypeRef con(std::string name, std::vector<WTypeRef> args = {});
    static WTypeRef var(std::string name);
    static WTypeRef tuple(std::vector<WTypeRef> members);

    static WTypeRef intT() { return con("int"); }
    static WTypeRef realT() { return con("real"); }
    static WTypeRef boolT() { return con("bool"); }
    static WTypeRef unitT() { return tuple({}); }
};

bool typeEqual(WTypeRef const& a, WTypeRef const& b);

class WExpr;
using WExprRef = std::shared_ptr<WExpr const>;

enum class WUn { Neg, NegReal, Not };

// Infix operators with their WhyML spellings; dotted variants act on reals.
enum class WBin {
    Add, Sub, Mul,
    AddR, SubR, MulR, DivR,
    And, Or, Imp, Iff,
    Eq, Neq,
    Lt, Le, Gt, Ge,
    LtR, LeR, GtR, GeR,
    Order  // the declared partial-order predicate <:
};

std::string binSpelling(WBin op);

// One quantifier binder group: names sharing a type, as in "k, l: int".
struct Binder {
    std::vector<std::string> names;
    WTypeRef type;
    SourceSpan span;
};

class WExpr {
public:
    enum class Kind {
        IntLit, RealLit, BoolLit,
        Ident, Contents,
        Un, Bin, Chain,
        App, Tuple, Any,
        Old, At, Ite, Quant
    };
    enum class QKind { Forall, Exists };

    Kind kind;
    SourceSpan span;

    std::string text;   // literal digits / Ident name / App callee
    bool bval = false;  // BoolLit
    WUn un{};           // Un
    std::vector<WBin> ops;  // Bin: one entry; Chain: n entries
    WExprRef a, b, c;       // operands
    std::vector<WExprRef> items;  // App args / Tuple members / Chain operands
    WTypeRef type;                // Any
    std::string label;            // At

    QKind qkind{};                             // Quant
    std::vector<Binder> binders;               // Quant
    std::vector<std::vector<WExprRef>> triggers;  // Quant: groups of terms
    WExprRef body;                             // Quant

    static WExprRef intLit(std::string digits, SourceSpan span = {});
    // Normalizes the spelling so a decimal point is always present.
    static WExprRef realLit(std::string digits, SourceSpan span = {});
    static WExprRef boolLit(bool v, SourceSpan span = {});
    static WExprRef ident(std::string name, SourceSpan span = {});
    static WExprRef contents(std::string name, SourceSpan span = {});
    static WExprRef unary(WUn op, WExprRef e, SourceSpan span = {});
    static WExprRef binary(WBin op, WExprRef lhs, WExprRef rhs,
                           SourceSpan span = {});
    static WExprRef chain(std::vector<WBin> ops, std::vector<WExprRef> operands,
                          SourceSpan span = {});
    static WExprRef app(std::string callee, std::vector<WExprRef> args,
                        SourceSpan span = {});
    static WExprRef tuple(std::vector<WExprRef> members, SourceSpan span = {});
    static WExprRef any(WTypeRef type, SourceSpan span = {});
    static WExprRef old(WExprRef e, SourceSpan span = {});
    static WExprRef at(WExprRef e, std::string label, SourceSpan span = {});
    static WExprRef ite(WExprRef cond, WExprRef thenE, WExprRef elseE,
                        SourceSpan span = {});
    static WExprRef quant(QKind q, std::vector<Binder> binders,
                          std::vector<std::vector<WExprRef>> triggers,
                          WExprRef body, SourceSpan span = {});

    static WExprRef trueLit() { return boolLit(true); }
    // Conjunction of the given formulas; true when empty, sole item when one.
    static WExprRef andOf(std::vector<WExprRef> conjuncts);
};

class WStmt;
using WStmtRef = std::shared_ptr<WStmt const>;

class WStmt {
public:
    enum class Kind {
        Assign,  // name.contents <- expr
        Let,     // let name = expr in / let (n1, n2) = expr in
        Eval,    // expr;
        Result,  // expr  (no semicolon: the body's value)
        Assert, Assume,
        If, While, Try, Raise,
        Label    // 'name:
    };

    Kind kind;
    SourceSpan span;

    std::string name;                // Assign target / Raise exception / Label
    std::vector<std::string> names;  // Let pattern
    WExprRef expr;  // Assign rhs / Let init / Eval / Result / Assert /
                    // Assume / If and While guard
    std::vector<WExprRef> invariants;  // While
    std::vector<WStmtRef> body1;       // If then / While body / Try body
    std::vector<WStmtRef> body2;       // If else / Try handler
    bool hasElse = false;

    static WStmtRef assign(std::string name, WExprRef rhs,
                           SourceSpan span = {});
    static WStmtRef letIn(std::vector<std::string> pattern, WExprRef init,
                          SourceSpan span = {});
    static WStmtRef eval(WExprRef e, SourceSpan span = {});
    static WStmtRef result(WExprRef e, SourceSpan span = {});
    static WStmtRef assertStmt(WExprRef e, SourceSpan span = {});
    static WStmtRef assumeStmt(WExprRef e, SourceSpan span = {});
    static WStmtRef ifStmt(WExprRef guard, std::vector<WStmtRef> thenBody,
                           std::vector<WStmtRef> elseBody, bool hasElse,
                           SourceSpan span = {});
    static WStmtRef whileStmt(WExprRef guard, std::vector<WExprRef> invariants,
                              std::vector<WStmtRef> body, SourceSpan span = {});
    static WStmtRef tryWith(std::vector<WStmtRef> body, std::string exn,
                            std::vector<WStmtRef> handler,
                            SourceSpan span = {});
    static WStmtRef raise(std::string exn, SourceSpan span = {});
    static WStmtRef labelMark(std::string name, SourceSpan span = {});
};

struct WParam {
    std::string name;
    WTypeRef type;
    SourceSpan span;
};

// Postcondition binding the returned value(s): | u -> e or | (u, v) -> e.
struct ReturnsClause {
    std::vector<std::string> pattern;
    WExprRef expr;
};

// Contract clauses of a val declaration or let definition.
struct WSpec {
    std::vector<WExprRef> requiresCl;
    std::vector<WExprRef> ensuresCl;
    std::vector<ReturnsClause> returnsCl;
    std::vector<std::string> writesCl;
    std::vector<std::string> readsCl;
};

class WDecl;
using WDeclRef = std::shared_ptr<WDecl const>;

class WDecl {
public:
    enum class Kind {
        Type, Constant, Function, Predicate, Axiom, Exception, Val, Let
    };

    Kind kind;
    SourceSpan span;

    std::string name;  // operator names like <: are spelled without parens
    std::vector<std::string> tyParams;  // Type parameters, without ticks
    WTypeRef alias;    // Type: non-null = synonym definition
    WTypeRef type;     // Constant type / Val value declaration type
    std::vector<WParam> params;  // Function / Predicate / Val / Let
    WTypeRef result;             // Function result / Val / Let return type
    WExprRef def;                // Predicate body (null = uninterpreted) /
                                 // Axiom formula
    WSpec spec;                  // Val / Let
    std::vector<WStmtRef> body;  // Let
    bool unitParam = false;      // Val / Let: spell () for zero parameters

    static std::shared_ptr<WDecl> make(Kind k) {
        auto d = std::make_shared<WDecl>();
        d->kind = k;
        return d;
    }
};

// One emitted WhyML module. imports are theory paths in emission order; an
// entry containing " with " is printed as a clone instead of a use.
struct Program {
    std::string moduleName;
    std::vector<std::string> imports;
    std::vector<WDeclRef> decls;
};

} // namespace b2y::why
