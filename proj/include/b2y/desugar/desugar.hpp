#pragma once

#include "b2y/basic.hpp"
#include "b2y/bpl/ast.hpp"
#include "b2y/sema/typecheck.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>

namespace b2y::desugar {

// What to do with gotos the structuring rules cannot remove.
enum class GotoMode { Structure, AssertFalse, Error };

struct Options {
    GotoMode gotoMode = GotoMode::Structure;
    int monoCap = 64;
    // Invoked after each pass with its name and wall time in milliseconds.
    std::function<void(std::string const&, double)> passTimer;
};

// Every identifier declared anywhere in the program: types, constants,
// variables, functions, procedures, parameters, locals, labels and bound
// variables. Fresh names must avoid all of them.
std::set<std::string> declaredNames(bpl::Program const& p);

// Hands out names colliding neither with the program nor with each other.
class FreshNames {
public:
    explicit FreshNames(bpl::Program const& p) : used_(declaredNames(p)) {}
    explicit FreshNames(std::set<std::string> used) : used_(std::move(used)) {}
    std::string fresh(std::string const& base);
    void reserve(std::string const& name) { used_.insert(name); }

private:
    std::set<std::string> used_;
};

// Pre-order walk over every expression in the program, including
// subexpressions, triggers, specs, wheres and statement operands.
// Attribute arguments are not visited (they carry no semantics).
void forEachExpr(bpl::Program const& p,
                 std::function<void(bpl::ExprRef const&)> const& fn);
void forEachExpr(bpl::ExprRef const& e,
                 std::function<void(bpl::ExprRef const&)> const& fn);

// Pre-order walk over every statement, including nested bodies.
void forEachStmt(bpl::Program const& p,
                 std::function<void(bpl::StmtRef const&)> const& fn);

// Post-order rewrite. fn sees the original node (for table lookups keyed on
// it) and the node with already-rewritten children; it returns the
// replacement. Unchanged subtrees keep their identity.
bpl::ExprRef
rewriteExpr(bpl::ExprRef const& e,
            std::function<bpl::ExprRef(bpl::Expr const*, bpl::ExprRef)> const&
                fn);

// Applies fn to every expression embedded in the statement (guards, targets,
// arguments, invariants), recursing into nested bodies. Clone-on-change.
bpl::StmtRef
rewriteStmtExprs(bpl::StmtRef const& s,
                 std::function<bpl::ExprRef(bpl::ExprRef const&)> const& fn);

// Same over every expression position of a declaration, including wheres,
// specs and the statement body.
bpl::DeclRef
rewriteDeclExprs(bpl::DeclRef const& d,
                 std::function<bpl::ExprRef(bpl::ExprRef const&)> const& fn);

// Names occurring free in e (not bound by any enclosing quantifier or
// lambda within e).
std::set<std::string> freeIdents(bpl::ExprRef const& e);

// Like sema::substType but also replaces argument-less type constructor
// references whose name is in the substitution: parsed programs spell type
// parameters that way.
bpl::TypeRef substTypeSyntactic(bpl::TypeRef const& t,
                                sema::TypeSubst const& tsub);

// Capture-avoiding simultaneous substitution of value identifiers and type
// parameters. Binders shadow; binders that would capture a free name of a
// substituted expression are renamed with fresh.
bpl::ExprRef substituteExpr(bpl::ExprRef const& e,
                            std::map<std::string, bpl::ExprRef> const& sub,
                            sema::TypeSubst const& tsub, FreshNames& fresh);

// The individual rewrites, in pipeline order. Each returns the rewritten
// program or nullopt after reporting errors. Inputs must be typechecked;
// the corresponding TypeInfo must describe exactly the given program.
std::optional<bpl::Program> expandConstantConstraints(bpl::Program const& p,
                                                      sema::TypeInfo const& info,
                                                      DiagnosticEngine& diags);

// Check-only: quantifiers with their own type parameters have no translation
// and are rejected unless synthesized by the constants pass.
bool rejectTypeQuantifiers(bpl::Program const& p, DiagnosticEngine& diags);

std::optional<bpl::Program> liftLambdas(bpl::Program const& p,
                                        sema::TypeInfo const& info,
                                        DiagnosticEngine& diags);

std::optional<bpl::Program> expandCallForall(bpl::Program const& p,
                                             sema::TypeInfo const& info,
                                             DiagnosticEngine& diags);

std::optional<bpl::Program> axiomatizeFunctionBodies(bpl::Program const& p,
                                                     sema::TypeInfo const& info,
                                                     DiagnosticEngine& diags);

std::optional<bpl::Program> structureGotos(bpl::Program const& p,
                                           GotoMode mode,
                                           DiagnosticEngine& diags);

std::optional<bpl::Program> monomorphizeMaps(bpl::Program const& p,
                                             sema::TypeInfo const& info,
                                             int cap, DiagnosticEngine& diags);

struct Result {
    bpl::Program program;
    sema::TypeInfo info;
};

// Runs all passes in order, re-typechecking after each tree reshape.
std::optional<Result> run(bpl::Program const& p, Options const& opt,
                          DiagnosticEngine& diags);

} // namespace b2y::desugar
