#pragma once

#include "b2y/basic.hpp"

#include <memory>
#include <string>
#include <vector>

// Boogie abstract syntax. Nodes are built through the static factories and
// treated as immutable afterwards; passes rebuild instead of mutating, so
// subtrees can be shared freely across programs.

namespace b2y::bpl {

class Type;
using TypeRef = std::shared_ptr<Type const>;

class Type {
public:
    enum class Kind { Int, Real, Bool, Bv, Ctor, Map, Var };

    Kind kind;
    SourceSpan span;
    int bvWidth = 0;                      // Bv
    std::string name;                     // Ctor / Var
    std::vector<TypeRef> ctorArgs;        // Ctor
    std::vector<std::string> typeParams;  // Map: nonempty = polymorphic map
    std::vector<TypeRef> domain;          // Map
    TypeRef codomain;                     // Map

    static TypeRef intType();
    static TypeRef realType();
    static TypeRef boolType();
    static TypeRef bv(int width, SourceSpan span = {});
    static TypeRef ctor(std::string name, std::vector<TypeRef> args = {},
                        SourceSpan span = {});
    static TypeRef map(std::vector<std::string> typeParams,
                       std::vector<TypeRef> domain, TypeRef codomain,
                       SourceSpan span = {});
    static TypeRef var(std::string name, SourceSpan span = {});

    bool isMap() const { return kind == Kind::Map; }
    bool isPolyMap() const { return kind == Kind::Map && !typeParams.empty(); }
};

// Structural equality; spans ignored. Does not expand synonyms.
bool typeEqual(TypeRef const& a, TypeRef const& b);
std::string typeToString(TypeRef const& t);

class Expr;
using ExprRef = std::shared_ptr<Expr const>;

enum class UnOp { Neg, Not, ToInt, ToReal };
enum class BinOp {
    Add, Sub, Mul, IntDiv, Mod, RealDiv, Pow,
    And, Or, Imp, Iff,
    Eq, Neq, Lt, Le, Gt, Ge, Subtype, Concat
};

struct BoundVar {
    std::string name;
    TypeRef type;
    SourceSpan span;
};

struct TriggerGroup {
    std::vector<ExprRef> exprs;
    bool negated = false;  // {:nopats ...}
};

struct Attr {
    std::string name;
    std::vector<ExprRef> args;
    SourceSpan span;
};

class Expr {
public:
    enum class Kind {
        IntLit, RealLit, BoolLit, BvLit, StringLit,
        Ident, Un, Bin, Chain,
        Select, Update, Extract,
        Old, Quant, Lambda, Ite, Call, Star
    };
    enum class QKind { Forall, Exists };

    Kind kind;
    SourceSpan span;

    std::string text;      // literal digits / string / ident or callee name
    bool bval = false;     // BoolLit
    int bvWidth = 0;       // BvLit
    UnOp un{};             // Un
    std::vector<BinOp> ops;  // Bin: one entry; Chain: n entries
    ExprRef a, b, c;       // operands, see factories
    std::vector<ExprRef> items;  // Chain operands / indices / call args
    int hi = 0, lo = 0;    // Extract bit bounds

    QKind qkind{};                         // Quant
    std::vector<std::string> typeParams;   // Quant
    std::vector<BoundVar> bound;           // Quant / Lambda
    std::vector<TriggerGroup> triggers;    // Quant
    std::vector<Attr> attrs;               // Quant (non-trigger attributes)
    ExprRef body;                          // Quant / Lambda

    static ExprRef intLit(std::string digits, SourceSpan span = {});
    static ExprRef realLit(std::string digits, SourceSpan span = {});
    static ExprRef boolLit(bool v, SourceSpan span = {});
    static ExprRef bvLit(std::string digits, int width, SourceSpan span = {});
    static ExprRef stringLit(std::string s, SourceSpan span = {});
    static ExprRef ident(std::string name, SourceSpan span = {});
    static ExprRef unary(UnOp op, ExprRef e, SourceSpan span = {});
    static ExprRef binary(BinOp op, ExprRef lhs, ExprRef rhs,
                          SourceSpan span = {});
    static ExprRef chain(std::vector<BinOp> ops, std::vector<ExprRef> operands,
                         SourceSpan span = {});
    static ExprRef select(ExprRef base, std::vector<ExprRef> indices,
                          SourceSpan span = {});
    static ExprRef update(ExprRef base, std::vector<ExprRef> indices,
                          ExprRef value, SourceSpan span = {});
    static ExprRef extract(ExprRef base, int hi, int lo, SourceSpan span = {});
    static ExprRef old(ExprRef e, SourceSpan span = {});
    static ExprRef quant(QKind q, std::vector<std::string> typeParams,
                         std::vector<BoundVar> bound,
                         std::vector<TriggerGroup> triggers,
                         std::vector<Attr> attrs, ExprRef body,
                         SourceSpan span = {});
    static ExprRef lambda(std::vector<BoundVar> bound, ExprRef body,
                          SourceSpan span = {});
    static ExprRef ite(ExprRef cond, ExprRef thenE, ExprRef elseE,
                       SourceSpan span = {});
    static ExprRef call(std::string callee, std::vector<ExprRef> args,
                        SourceSpan span = {});
    static ExprRef star(SourceSpan span = {});

    // Convenience for synthesized formulas.
    static ExprRef andOf(std::vector<ExprRef> conjuncts);
};

bool exprEqual(ExprRef const& a, ExprRef const& b);

class Stmt;
using StmtRef = std::shared_ptr<Stmt const>;

struct Invariant {
    bool free = false;
    ExprRef expr;
    std::vector<Attr> attrs;
    SourceSpan span;
};

// Assignment target: base variable plus zero or more index groups,
// e.g. m[i, j][k] has groups {{i, j}, {k}}.
struct LhsTarget {
    std::string name;
    std::vector<std::vector<ExprRef>> indexGroups;
    SourceSpan span;
};

class Stmt {
public:
    enum class Kind {
        Assert, Assume, Assign, Havoc, Call, CallForall,
        If, While, Break, Return, Goto, Label
    };

    Kind kind;
    SourceSpan span;

    ExprRef expr;  // Assert/Assume condition; If/While guard (Star for *)
    std::vector<Attr> attrs;
    std::vector<LhsTarget> lhs;      // Assign
    std::vector<ExprRef> rhs;        // Assign sources
    std::vector<std::string> names;  // Havoc vars / Call outs / Goto labels
    std::vector<SourceSpan> nameSpans;
    std::string callee;              // Call / CallForall
    std::vector<ExprRef> args;       // Call ins; CallForall (null = wildcard)
    std::vector<Invariant> invariants;  // While
    std::vector<StmtRef> body1;  // If then / While body
    std::vector<StmtRef> body2;  // If else
    bool hasElse = false;
    std::string label;  // Label

    static StmtRef assertStmt(ExprRef e, std::vector<Attr> attrs = {},
                              SourceSpan span = {});
    static StmtRef assumeStmt(ExprRef e, std::vector<Attr> attrs = {},
                              SourceSpan span = {});
    static StmtRef assign(std::vector<LhsTarget> lhs, std::vector<ExprRef> rhs,
                          SourceSpan span = {});
    static StmtRef havoc(std::vector<std::string> names,
                         std::vector<SourceSpan> nameSpans = {},
                         SourceSpan span = {});
    static StmtRef call(std::vector<std::string> outs, std::string callee,
                        std::vector<ExprRef> ins, std::vector<Attr> attrs = {},
                        SourceSpan span = {});
    static StmtRef callForall(std::string callee, std::vector<ExprRef> args,
                              SourceSpan span = {});
    static StmtRef ifStmt(ExprRef guard, std::vector<StmtRef> thenBody,
                          std::vector<StmtRef> elseBody, bool hasElse,
                          SourceSpan span = {});
    static StmtRef whileStmt(ExprRef guard, std::vector<Invariant> invariants,
                             std::vector<StmtRef> body, SourceSpan span = {});
    static StmtRef breakStmt(SourceSpan span = {});
    static StmtRef returnStmt(SourceSpan span = {});
    static StmtRef gotoStmt(std::vector<std::string> labels,
                            SourceSpan span = {});
    static StmtRef labelStmt(std::string name, SourceSpan span = {});
};

bool stmtEqual(StmtRef const& a, StmtRef const& b);

struct Param {
    std::string name;
    TypeRef type;
    ExprRef where;  // null when absent
    SourceSpan span;
};

struct SpecClause {
    bool free = false;
    ExprRef expr;
    std::vector<Attr> attrs;
    SourceSpan span;
};

struct OrderParent {
    std::string name;
    bool unique = false;
    SourceSpan span;
};

struct OrderSpec {
    bool present = false;
    std::vector<OrderParent> parents;
    bool complete = false;
    bool legacy = false;  // written with <: instead of extends
    SourceSpan span;
};

class Decl;
using DeclRef = std::shared_ptr<Decl const>;

class Decl {
public:
    enum class Kind {
        TypeDecl, ConstDecl, VarDecl, FunctionDecl, AxiomDecl,
        ProcedureDecl, Implementation
    };
    // Provenance of synthesized axioms; drives idempotence of desugaring.
    enum class Synth {
        None, Unique, OrderGeneric, OrderDag, Lambda, FuncBody, CallForall
    };

    Kind kind;
    SourceSpan span;
    std::vector<Attr> attrs;

    std::string name;                     // TypeDecl/Function/Procedure/Impl
    std::vector<std::string> typeParams;  // TypeDecl/Function/Procedure/Impl
    TypeRef synonym;                      // TypeDecl: non-null = synonym
    bool finite = false;                  // TypeDecl (accepted, ignored)

    std::vector<std::string> names;  // ConstDecl
    std::vector<SourceSpan> nameSpans;
    TypeRef type;       // ConstDecl
    bool unique = false;
    OrderSpec order;

    std::vector<Param> vars;  // VarDecl (shared type/where ptr = one group)

    std::vector<Param> params;  // FunctionDecl args / Procedure ins
    Param result;               // FunctionDecl
    ExprRef bodyExpr;           // FunctionDecl body (null = uninterpreted)

    ExprRef expr;          // AxiomDecl
    std::string nameHint;  // AxiomDecl: fixed WhyML name, else numbered
    Synth synth = Synth::None;

    std::vector<Param> outs;              // Procedure / Implementation
    std::vector<SpecClause> preCl;        // Procedure requires
    std::vector<SpecClause> postCl;       // Procedure ensures
    std::vector<std::string> modifies;    // Procedure
    std::vector<SourceSpan> modifiesSpans;

    std::vector<Param> locals;   // Implementation
    std::vector<StmtRef> body;   // Implementation
    bool inlineBody = false;     // Implementation came from an inline body

    static std::shared_ptr<Decl> make(Kind k) {
        auto d = std::make_shared<Decl>();
        d->kind = k;
        return d;
    }
};

struct Program {
    std::vector<DeclRef> decls;
};

bool declEqual(DeclRef const& a, DeclRef const& b);
bool programEqual(Program const& a, Program const& b);

} // namespace b2y::bpl
