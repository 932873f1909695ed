#pragma once

#include "b2y/why/ast.hpp"

#include <string>

namespace b2y::why {

// Deterministic renderer: the same AST always yields byte-identical text.
// Layout is fixed at two-space indentation steps with one declaration per
// paragraph, imports first.
std::string programToString(Program const& p);

std::string typeToString(WTypeRef const& t);
std::string exprToString(WExprRef const& e);

} // namespace b2y::why
