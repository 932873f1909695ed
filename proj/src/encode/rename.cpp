#include "b2y/encode/rename.hpp"

#include <cctype>

namespace b2y::encode {

namespace {

// WhyML keywords and the identifiers brought in by the standard imports the
// encoder may emit. A program name equal to one of these is renamed.
char const* const kReserved[] = {
    "abstract", "alias", "any", "as", "assert", "assume", "at", "axiom",
    "begin", "break", "by", "check", "clone", "coinductive", "constant",
    "continue", "diverges", "do", "done", "downto", "else", "end",
    "ensures", "epsilon", "exception", "exists", "export", "false", "float",
    "for", "forall", "fun", "function", "ghost", "goal", "if", "import",
    "in", "inductive", "invariant", "label", "lemma", "let", "match",
    "meta", "module", "mutable", "not", "old", "partial", "predicate",
    "private", "pure", "raise", "raises", "range", "reads", "rec", "ref",
    "requires", "result", "return", "returns", "scope", "so", "then",
    "theory", "to", "true", "try", "type", "use", "val", "variant",
    "while", "with", "writes",
    // imported symbols
    "int", "real", "bool", "unit", "map", "contents", "get", "set", "div",
    "mod", "pow", "from_int", "truncate", "floor", "ceil", "andb", "orb",
    "notb", "xorb", "implb", "bv", "of_int", "to_uint", "size",
};

bool wordChar(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
}

} // namespace

std::string sanitizeIdent(std::string const& name, bool lowerFirst) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) out.push_back(wordChar(c) ? c : '_');
    if (out.empty()) out = "x";
    if (lowerFirst && std::isupper(static_cast<unsigned char>(out.front())))
        out.front() = static_cast<char>(
            std::tolower(static_cast<unsigned char>(out.front())));
    return out;
}

RenameMap::RenameMap() {
    for (char const* word : kReserved) used_.insert(word);
}

std::string RenameMap::unique(std::string base) {
    if (!used_.count(base)) {
        used_.insert(base);
        return base;
    }
    for (int k = 1;; ++k) {
        std::string candidate = base + "_" + std::to_string(k);
        if (!used_.count(candidate)) {
            used_.insert(candidate);
            return candidate;
        }
    }
}

std::string RenameMap::claim(std::string const& name) {
    return unique(name);
}

std::string RenameMap::declare(std::string const& boogie, Kind kind) {
    auto it = map_.find(boogie);
    if (it != map_.end()) return it->second;
    std::string why = unique(sanitizeIdent(boogie, kind != Kind::Logic));
    map_.emplace(boogie, why);
    table_.emplace_back(boogie, why);
    return why;
}

bool RenameMap::declared(std::string const& boogie) const {
    return map_.count(boogie) != 0;
}

std::string RenameMap::lookup(std::string const& boogie) const {
    auto it = map_.find(boogie);
    if (it != map_.end()) return it->second;
    return sanitizeIdent(boogie, false);
}

bool RenameMap::taken(std::string const& name) const {
    return used_.count(name) != 0;
}

void Scope::push() {
    frames_.emplace_back();
}

void Scope::pop() {
    for (auto const& [boogie, why] : frames_.back()) used_.erase(why);
    frames_.pop_back();
}

std::string Scope::bind(std::string const& boogie) {
    std::string base = sanitizeIdent(boogie, true);
    std::string candidate = base;
    for (int k = 1; top_.taken(candidate) || used_.count(candidate); ++k)
        candidate = base + "_" + std::to_string(k);
    used_.insert(candidate);
    frames_.back().emplace(boogie, candidate);
    return candidate;
}

std::string Scope::fresh(std::string const& base) {
    // Keyed under an unspellable Boogie name so pop releases it.
    std::string candidate = base;
    for (int k = 1; top_.taken(candidate) || used_.count(candidate); ++k)
        candidate = base + "_" + std::to_string(k);
    used_.insert(candidate);
    frames_.back().emplace("\n" + candidate, candidate);
    return candidate;
}

std::string Scope::resolve(std::string const& boogie) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
        auto hit = it->find(boogie);
        if (hit != it->end()) return hit->second;
    }
    return {};
}

} // namespace b2y::encode
