#pragma once

#include "b2y/basic.hpp"
#include "b2y/why/ast.hpp"

namespace b2y::why {

// Structural well-formedness of an emitted module: declaration before use,
// no shadowing, identifier syntax, and declaredness of every raised
// exception and referenced label. Reports through diags and returns the
// number of problems found; deep type correctness is left to external
// tools.
std::size_t validate(Program const& p, DiagnosticEngine& diags);

} // namespace b2y::why
