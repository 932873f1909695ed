#pragma once

#include "b2y/bpl/ast.hpp"

#include <iosfwd>
#include <string>

namespace b2y::bpl {

// Deterministic pretty-printer. Output re-parses to a structurally
// identical program (spans aside); that round trip is part of the test
// suite, so keep printer and parser in sync when the grammar grows.
void printProgram(std::ostream& os, Program const& p);
std::string programToString(Program const& p);

void printExpr(std::ostream& os, ExprRef const& e);
std::string exprToString(ExprRef const& e);

void printStmt(std::ostream& os, StmtRef const& s, int indent);
void printDecl(std::ostream& os, DeclRef const& d);

} // namespace b2y::bpl
