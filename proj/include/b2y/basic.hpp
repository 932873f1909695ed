#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace b2y {

// Half-open region of a source file. file indexes a SourceManager entry;
// -1 marks synthesized nodes.
struct SourceSpan {
    int file = -1;
    int beginLine = 0, beginCol = 0;
    int endLine = 0, endCol = 0;

    bool valid() const { return file >= 0 && beginLine > 0; }

    // True when other lies within *this. Invalid spans contain nothing and
    // are contained by everything (synthesized children are always fine).
    bool contains(SourceSpan const& other) const {
        if (!valid() || !other.valid() || file != other.file)
            return !other.valid();
        if (other.beginLine < beginLine ||
            (other.beginLine == beginLine && other.beginCol < beginCol))
            return false;
        if (other.endLine > endLine ||
            (other.endLine == endLine && other.endCol > endCol))
            return false;
        return true;
    }

    static SourceSpan join(SourceSpan const& a, SourceSpan const& b) {
        if (!a.valid()) return b;
        if (!b.valid()) return a;
        SourceSpan s = a;
        if (b.beginLine < s.beginLine ||
            (b.beginLine == s.beginLine && b.beginCol < s.beginCol)) {
            s.beginLine = b.beginLine;
            s.beginCol = b.beginCol;
        }
        if (b.endLine > s.endLine ||
            (b.endLine == s.endLine && b.endCol > s.endCol)) {
            s.endLine = b.endLine;
            s.endCol = b.endCol;
        }
        return s;
    }
};

// Owns file names so spans stay small.
class SourceManager {
public:
    int addFile(std::string name) {
        files_.push_back(std::move(name));
        return int(files_.size()) - 1;
    }
    std::string const& fileName(int id) const {
        static const std::string unknown = "<unknown>";
        if (id < 0 || id >= int(files_.size())) return unknown;
        return files_[id];
    }

private:
    std::vector<std::string> files_;
};

enum class Severity { Note, Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Error;
    SourceSpan span;
    std::string message;
    // Secondary location, e.g. the earlier declaration in a shadowing report.
    SourceSpan related;
    std::string relatedMessage;
};

// Collects diagnostics across pipeline stages. Rendering follows the
// file:line:col: severity: message convention; color is controlled by the
// B2W_COLOR environment variable (0 disables, 1 forces, unset = tty check).
class DiagnosticEngine {
public:
    explicit DiagnosticEngine(SourceManager const& sm) : sm_(sm) {}

    void error(SourceSpan span, std::string msg) {
        diags_.push_back({Severity::Error, span, std::move(msg), {}, {}});
    }
    void warning(SourceSpan span, std::string msg) {
        diags_.push_back({Severity::Warning, span, std::move(msg), {}, {}});
    }
    void note(SourceSpan span, std::string msg) {
        diags_.push_back({Severity::Note, span, std::move(msg), {}, {}});
    }
    void add(Diagnostic d) { diags_.push_back(std::move(d)); }

    bool hasErrors() const {
        for (auto const& d : diags_)
            if (d.severity == Severity::Error) return true;
        return false;
    }
    bool hasWarnings() const {
        for (auto const& d : diags_)
            if (d.severity == Severity::Warning) return true;
        return false;
    }
    std::size_t errorCount() const {
        std::size_t n = 0;
        for (auto const& d : diags_)
            if (d.severity == Severity::Error) ++n;
        return n;
    }

    std::vector<Diagnostic> const& all() const { return diags_; }
    SourceManager const& sources() const { return sm_; }

    void render(std::ostream& os, bool color) const;
    std::string renderToString(bool color = false) const;

private:
    SourceManager const& sm_;
    std::vector<Diagnostic> diags_;
};

// Decides color usage from B2W_COLOR and stream kind.
bool colorEnabled(bool isTty);

} // namespace b2y
