#pragma once

#include "b2y/bpl/ast.hpp"
#include "b2y/sema/typecheck.hpp"

#include <map>
#include <string>
#include <vector>

// Whole-program analysis of the actual types taken by items of polymorphic
// map type. An item is a constant, a global or local variable, a formal
// in/out parameter, or a bound variable. Every occurrence of such an item is
// classified as exactly one of: read, select, update, function argument,
// copy, indexed assignment, havoc (contributes nothing), call input, or call
// output. Select/update/assignment occurrences contribute the inferred
// binder instantiation; copies link both items and calls and function
// applications link the actual to the formal, with instance sets propagated
// to a fixpoint along those links; remaining bare reads contribute the
// map's own parametric shape.

namespace b2y::desugar {

// One instantiation of a polymorphic map's binders; args line up with the
// map's type parameters. Parametric instances contain Type::Var nodes;
// varOwner names the polymorphic procedure or function whose type
// parameters they are, or is empty when they belong to no single one.
struct MapInstance {
    std::vector<bpl::TypeRef> args;
    bool concrete = false;
    std::string varOwner;
};

// All items sharing one polymorphic map type. The key is the type synonym's
// name when the items were declared through one, otherwise the rendered
// type itself.
struct MapGroup {
    std::string key;
    std::string synonym;
    bpl::TypeRef definition; // normalized polymorphic map type
    // Union of the item sets, in item-registration order, deduplicated
    // modulo renaming of type variables.
    std::vector<MapInstance> types;
    // Parametric members before renaming, one per (owner, shape) pair;
    // drives replication of polymorphic procedures over instance components.
    std::vector<MapInstance> rawParametrics;
};

struct ActualTypes {
    // itemKey -> actual types of that item, insertion order, deduplicated.
    std::map<std::string, std::vector<MapInstance>> items;
    std::map<std::string, std::string> itemGroup; // itemKey -> group key
    std::vector<std::string> itemOrder;           // registration order
    std::vector<MapGroup> groups;                 // first-use order

    MapGroup const* group(std::string const& key) const;
    std::string dump() const; // one line per item: `key : {type, ...}`
};

// Deduplication key: the argument vector rendered with type variables
// renamed v0, v1, ... in first-occurrence order.
std::string instanceKey(std::vector<bpl::TypeRef> const& args);

// Item naming: globals and constants by name; parameters `owner.in<i>` /
// `owner.out<i>` so procedure and implementation formals coincide;
// implementation locals `owner.local.<name>`; bound variables
// `<bound>.<name>`.
std::string itemKeyOf(sema::Symbol const& sym);

// Group key of a declared type, or empty when it does not normalize to a
// polymorphic map.
std::string groupKeyForType(bpl::TypeRef const& declared,
                            sema::TypeInfo const& info);

ActualTypes computeActualTypes(bpl::Program const& p,
                               sema::TypeInfo const& info);

} // namespace b2y::desugar
