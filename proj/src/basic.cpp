#include "b2y/basic.hpp"

#include <cstdlib>
#include <ostream>
#include <sstream>

namespace b2y {

namespace {

char const* severityName(Severity s) {
    switch (s) {
    case Severity::Note: return "note";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
    }
    return "error";
}

char const* severityColor(Severity s) {
    switch (s) {
    case Severity::Note: return "\033[36m";
    case Severity::Warning: return "\033[33m";
    case Severity::Error: return "\033[31m";
    }
    return "";
}

void renderOne(std::ostream& os, SourceManager const& sm, Severity sev,
               SourceSpan const& span, std::string const& msg, bool color) {
    if (span.valid())
        os << sm.fileName(span.file) << ':' << span.beginLine << ':'
           << span.beginCol << ": ";
    if (color)
        os << severityColor(sev) << severityName(sev) << "\033[0m";
    else
        os << severityName(sev);
    os << ": " << msg << '\n';
}

} // namespace

void DiagnosticEngine::render(std::ostream& os, bool color) const {
    for (auto const& d : diags_) {
        renderOne(os, sm_, d.severity, d.span, d.message, color);
        if (!d.relatedMessage.empty())
            renderOne(os, sm_, Severity::Note, d.related, d.relatedMessage,
                      color);
    }
}

std::string DiagnosticEngine::renderToString(bool color) const {
    std::ostringstream ss;
    render(ss, color);
    return ss.str();
}

bool colorEnabled(bool isTty) {
    char const* v = std::getenv("B2W_COLOR");
    if (v) {
        if (v[0] == '0' && v[1] == '\0') return false;
        return true;
    }
    return isTty;
}

} // namespace b2y
