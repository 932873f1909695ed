#pragma once

#include "b2y/bpl/ast.hpp"

#include <map>
#include <set>
#include <string>

// Type-level utilities shared by the checker, the monomorphizer and the
// encoder. Metavariables are Var nodes whose name starts with '@' and
// canonical binder names start with '!'; neither character can appear in a
// source identifier, so they never collide with user type variables.

namespace b2y::sema {

// Ordered so that iteration (and thus any derived output) is deterministic.
using TypeSubst = std::map<std::string, bpl::TypeRef>;

bool isMetaVar(bpl::TypeRef const& t);

// Free type variables, outermost-first, without duplicates.
std::vector<std::string> freeTypeVars(bpl::TypeRef const& t);

// Capture-avoiding substitution of type variables. Map binders shadow
// entries of s and are renamed when a substituted value would be captured.
bpl::TypeRef substType(bpl::TypeRef const& t, TypeSubst const& s);

// Renames all map binders to !0, !1, ... in traversal order, leaving free
// variables intact. Alpha-equivalent types become structurally equal.
bpl::TypeRef canonType(bpl::TypeRef const& t);

// Rendering of canonType, used as a deduplication key. Callers normalize
// synonyms away first when synonym-transparent behaviour is wanted.
std::string typeKey(bpl::TypeRef const& t);

} // namespace b2y::sema
