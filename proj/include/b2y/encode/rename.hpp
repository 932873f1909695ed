#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace b2y::encode {

// Rewrites a Boogie identifier into WhyML's identifier syntax. Characters
// outside [A-Za-z0-9_] become underscores; lowerFirst additionally forces a
// lowercase initial, as required for value and type identifiers.
std::string sanitizeIdent(std::string const& name, bool lowerFirst);

// Injective Boogie-to-WhyML renaming of module-level names. WhyML keywords
// are pre-reserved; support declarations claim their names before any
// program name is registered, so colliding user names move aside instead.
class RenameMap {
public:
    enum class Kind {
        Value,  // val and let definitions: forced lowercase initial
        Logic,  // constants, functions: case preserved
        Type    // forced lowercase initial
    };

    RenameMap();

    // Takes a WhyML name out of circulation without a Boogie counterpart.
    // Returns the name actually claimed (suffixed when already taken).
    std::string claim(std::string const& name);

    std::string declare(std::string const& boogie, Kind kind);
    bool declared(std::string const& boogie) const;
    // Falls back to the sanitized spelling for unregistered names.
    std::string lookup(std::string const& boogie) const;
    bool taken(std::string const& name) const;

    // boogie -> why pairs in registration order.
    std::vector<std::pair<std::string, std::string>> const& table() const {
        return table_;
    }

private:
    std::string unique(std::string base);

    std::map<std::string, std::string> map_;
    std::set<std::string> used_;
    std::vector<std::pair<std::string, std::string>> table_;
};

// Names bound within one declaration: parameters, locals, quantifier
// binders and synthesized temporaries. Binding avoids every module-level
// name and everything visible in enclosing frames, so emitted code never
// shadows.
class Scope {
public:
    explicit Scope(RenameMap const& top) : top_(top) { push(); }

    void push();
    void pop();
    std::string bind(std::string const& boogie);
    // A fresh name with no Boogie counterpart, in the current frame.
    std::string fresh(std::string const& base);
    // Innermost binding of the name; empty when unbound.
    std::string resolve(std::string const& boogie) const;

private:
    RenameMap const& top_;
    std::vector<std::map<std::string, std::string>> frames_;
    std::set<std::string> used_;
};

} // namespace b2y::encode
