#include "b2y/sema/types.hpp"

#include <algorithm>

namespace b2y::sema {

using bpl::Type;
using bpl::TypeRef;

bool isMetaVar(TypeRef const& t) {
    return t && t->kind == Type::Kind::Var && !t->name.empty() &&
           t->name[0] == '@';
}

namespace {

void freeVarsInto(TypeRef const& t, std::set<std::string>& bound,
                  std::vector<std::string>& out,
                  std::set<std::string>& seen) {
    if (!t) return;
    switch (t->kind) {
    case Type::Kind::Var:
        if (!bound.count(t->name) && seen.insert(t->name).second)
            out.push_back(t->name);
        return;
    case Type::Kind::Ctor:
        for (auto const& a : t->ctorArgs) freeVarsInto(a, bound, out, seen);
        return;
    case Type::Kind::Map: {
        std::vector<std::string> added;
        for (auto const& p : t->typeParams)
            if (bound.insert(p).second) added.push_back(p);
        for (auto const& d : t->domain) freeVarsInto(d, bound, out, seen);
        freeVarsInto(t->codomain, bound, out, seen);
        for (auto const& p : added) bound.erase(p);
        return;
    }
    default:
        return;
    }
}

} // namespace

std::vector<std::string> freeTypeVars(TypeRef const& t) {
    std::set<std::string> bound, seen;
    std::vector<std::string> out;
    freeVarsInto(t, bound, out, seen);
    return out;
}

TypeRef substType(TypeRef const& t, TypeSubst const& s) {
    if (!t || s.empty()) return t;
    switch (t->kind) {
    case Type::Kind::Int:
    case Type::Kind::Real:
    case Type::Kind::Bool:
    case Type::Kind::Bv:
        return t;
    case Type::Kind::Var: {
        auto it = s.find(t->name);
        return it != s.end() ? it->second : t;
    }
    case Type::Kind::Ctor: {
        std::vector<TypeRef> args;
        args.reserve(t->ctorArgs.size());
        bool changed = false;
        for (auto const& a : t->ctorArgs) {
            args.push_back(substType(a, s));
            changed = changed || args.back() != a;
        }
        if (!changed) return t;
        return Type::ctor(t->name, std::move(args), t->span);
    }
    case Type::Kind::Map: {
        // Binders shadow s; rename binders a substituted value would capture.
        TypeSubst inner;
        std::set<std::string> valueFrees;
        for (auto const& [k, v] : s) {
            if (std::find(t->typeParams.begin(), t->typeParams.end(), k) !=
                t->typeParams.end())
                continue;
            inner.emplace(k, v);
            for (auto const& f : freeTypeVars(v)) valueFrees.insert(f);
        }
        std::vector<std::string> params = t->typeParams;
        for (auto& p : params) {
            if (!valueFrees.count(p)) continue;
            std::string renamed = p;
            int k = 0;
            while (valueFrees.count(renamed) || inner.count(renamed))
                renamed = p + "!" + std::to_string(k++);
            inner.emplace(p, Type::var(renamed));
            p = renamed;
        }
        if (inner.empty() && params == t->typeParams) return t;
        std::vector<TypeRef> dom;
        dom.reserve(t->domain.size());
        for (auto const& d : t->domain) dom.push_back(substType(d, inner));
        return Type::map(std::move(params), std::move(dom),
                         substType(t->codomain, inner), t->span);
    }
    }
    return t;
}

namespace {

TypeRef canonWalk(TypeRef const& t, TypeSubst const& env, int& counter) {
    if (!t) return t;
    switch (t->kind) {
    case Type::Kind::Int:
    case Type::Kind::Real:
    case Type::Kind::Bool:
    case Type::Kind::Bv:
        return t;
    case Type::Kind::Var: {
        auto it = env.find(t->name);
        return it != env.end() ? it->second : t;
    }
    case Type::Kind::Ctor: {
        std::vector<TypeRef> args;
        args.reserve(t->ctorArgs.size());
        for (auto const& a : t->ctorArgs)
            args.push_back(canonWalk(a, env, counter));
        return Type::ctor(t->name, std::move(args));
    }
    case Type::Kind::Map: {
        TypeSubst inner = env;
        std::vector<std::string> params;
        params.reserve(t->typeParams.size());
        for (auto const& p : t->typeParams) {
            std::string fresh = "!" + std::to_string(counter++);
            inner[p] = Type::var(fresh);
            params.push_back(fresh);
        }
        std::vector<TypeRef> dom;
        dom.reserve(t->domain.size());
        for (auto const& d : t->domain)
            dom.push_back(canonWalk(d, inner, counter));
        return Type::map(std::move(params), std::move(dom),
                         canonWalk(t->codomain, inner, counter));
    }
    }
    return t;
}

} // namespace

TypeRef canonType(TypeRef const& t) {
    TypeSubst env;
    int counter = 0;
    return canonWalk(t, env, counter);
}

std::string typeKey(TypeRef const& t) { return bpl::typeToString(canonType(t)); }

} // namespace b2y::sema
