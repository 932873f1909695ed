#pragma once

#include "b2y/basic.hpp"
#include "b2y/bpl/ast.hpp"
#include "b2y/sema/types.hpp"

#include <optional>
#include <unordered_map>
#include <vector>

namespace b2y::sema {

enum class RefKind { Constant, GlobalVar, InParam, OutParam, Local, Bound };

// One resolved value binding. type is fully resolved: type-variable
// references are Var nodes and constructor arities have been checked.
struct Symbol {
    RefKind kind = RefKind::Bound;
    std::string name;
    bpl::TypeRef type;
    bpl::ExprRef where;               // null when declared without one
    bpl::Decl const* owner = nullptr; // declaring node, null for bound vars
};

struct FuncSig {
    bpl::DeclRef decl;
    std::vector<bpl::TypeRef> params;
    bpl::TypeRef result;
};

struct ProcSig {
    bpl::DeclRef decl;
    std::vector<Symbol> ins;
    std::vector<Symbol> outs;
};

// Result of checking one program. The per-node tables are keyed on AST node
// addresses and are only meaningful for the exact Program that was checked;
// rebuild the info after any pass that reshapes the tree.
struct TypeInfo {
    // Fully resolved type of every expression node (attribute arguments are
    // not typed). Never contains metavariables: anything a unification
    // left open has been defaulted to int.
    std::unordered_map<bpl::Expr const*, bpl::TypeRef> exprTypes;

    // Resolution of every identifier occurrence.
    std::unordered_map<bpl::Expr const*, Symbol> refs;

    // Function applications on polymorphic functions: the inferred type
    // arguments in declaration order.
    std::unordered_map<bpl::Expr const*, std::vector<bpl::TypeRef>>
        callTypeArgs;

    // Select/Update nodes over maps with their own binders: the inferred
    // instantiation of those binders.
    std::unordered_map<bpl::Expr const*, std::vector<bpl::TypeRef>> mapInst;

    // Call statements on polymorphic procedures: inferred type arguments.
    std::unordered_map<bpl::Stmt const*, std::vector<bpl::TypeRef>>
        stmtCallTypeArgs;

    // Name occurrences that are not expression nodes: assignment targets,
    // havoc'd variables and call output variables, in statement order.
    // Unresolved names leave a default-constructed Symbol in place.
    std::unordered_map<bpl::Stmt const*, std::vector<Symbol>> stmtNameRefs;

    // Indexed assignment targets: for each lhs target of the statement, the
    // binder instantiation per index group, outermost group first.
    std::unordered_map<bpl::Stmt const*,
                       std::vector<std::vector<std::vector<bpl::TypeRef>>>>
        assignInst;

    // Declaration tables.
    std::unordered_map<std::string, bpl::DeclRef> typeDecls;
    std::unordered_map<std::string, Symbol> globals; // constants + variables
    std::unordered_map<std::string, FuncSig> functions;
    std::unordered_map<std::string, ProcSig> procedures;
    std::unordered_map<std::string, std::vector<bpl::DeclRef>> implementations;

    // Resolved right-hand sides of type synonyms.
    struct Synonym {
        std::vector<std::string> params;
        bpl::TypeRef body;
    };
    std::unordered_map<std::string, Synonym> synonyms;

    // Expands type synonyms recursively; acyclic by construction.
    bpl::TypeRef normalize(bpl::TypeRef const& t) const;

    // Structural equality up to synonym expansion and binder renaming.
    bool sameType(bpl::TypeRef const& a, bpl::TypeRef const& b) const;
};

// Checks the whole program. Returns the collected info, or nullopt after
// reporting at least one error.
std::optional<TypeInfo> typecheck(bpl::Program const& p,
                                  DiagnosticEngine& diags);

} // namespace b2y::sema
