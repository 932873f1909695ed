#pragma once

#include "b2y/basic.hpp"
#include "b2y/bpl/ast.hpp"

#include <optional>
#include <string>

namespace b2y::bpl {

// Parses a whole compilation unit. Parse errors are reported through diags
// with recovery (sync to the next ';' or declaration keyword), so a single
// run surfaces several problems; returns nullopt when any error occurred.
// Never throws and never aborts on malformed input.
std::optional<Program> parseProgram(std::string const& source,
                                    std::string const& fileName,
                                    SourceManager& sm, DiagnosticEngine& diags);

// Same, reusing an already registered file id (used by tests).
std::optional<Program> parseProgramIn(std::string const& source, int fileId,
                                      DiagnosticEngine& diags);

} // namespace b2y::bpl
