#include "b2y/desugar/actuals.hpp"
#include "b2y/desugar/desugar.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

// Eliminates polymorphic map types. Every group of items sharing one
// polymorphic map type is replicated over the concrete instances the whole
// program applies it at, plus one instance over fresh uninterpreted types
// covering the generic uses. Items become one variant per instance;
// functions and procedures taking such items as parameters are replicated
// over the cross product of their parameters' instances; polymorphic
// declarations whose type parameters are pinned by map components get one
// variant per instance with the parameters substituted away. Occurrences
// rewrite to the variant picked by the inferred instantiation; a bare item
// occurrence stands for the tuple of all its variants, and tuple-valued
// positions (copies, equalities, call arguments, formulas) distribute
// pointwise.

namespace b2y::desugar {

namespace bpl = b2y::bpl;
using bpl::Decl;
using bpl::DeclRef;
using bpl::Expr;
using bpl::ExprRef;
using bpl::Param;
using bpl::Stmt;
using bpl::StmtRef;
using bpl::Type;
using bpl::TypeRef;

namespace {

bool typeConcrete(TypeRef const& t) { return sema::freeTypeVars(t).empty(); }

bool vecConcrete(std::vector<TypeRef> const& v) {
    for (auto const& t : v)
        if (!typeConcrete(t)) return false;
    return true;
}

std::string tagOf(TypeRef const& t) {
    if (!t) return "t";
    switch (t->kind) {
    case Type::Kind::Int: return "int";
    case Type::Kind::Real: return "real";
    case Type::Kind::Bool: return "bool";
    case Type::Kind::Bv: return "bv" + std::to_string(t->bvWidth);
    case Type::Kind::Var: return t->name;
    case Type::Kind::Ctor: {
        std::string s = t->name;
        for (auto const& a : t->ctorArgs) s += "_" + tagOf(a);
        return s;
    }
    case Type::Kind::Map: return "map" + std::to_string(t->domain.size());
    }
    return "t";
}

std::string tagOfArgs(std::vector<TypeRef> const& args) {
    std::string s;
    for (auto const& a : args) {
        if (!s.empty()) s += "_";
        s += tagOf(a);
    }
    return s;
}

// Structural match of a pattern whose variables in pvars bind; other Vars
// must match by name.
bool matchTy(TypeRef const& pat, TypeRef const& val,
             std::set<std::string> const& pvars, sema::TypeSubst& out) {
    if (!pat || !val) return pat == val;
    if (pat->kind == Type::Kind::Var && pvars.count(pat->name)) {
        auto it = out.find(pat->name);
        if (it != out.end()) return bpl::typeEqual(it->second, val);
        out.emplace(pat->name, val);
        return true;
    }
    if (pat->kind != val->kind) return false;
    switch (pat->kind) {
    case Type::Kind::Int:
    case Type::Kind::Real:
    case Type::Kind::Bool: return true;
    case Type::Kind::Bv: return pat->bvWidth == val->bvWidth;
    case Type::Kind::Var: return pat->name == val->name;
    case Type::Kind::Ctor: {
        if (pat->name != val->name ||
            pat->ctorArgs.size() != val->ctorArgs.size())
            return false;
        for (std::size_t i = 0; i < pat->ctorArgs.size(); ++i)
            if (!matchTy(pat->ctorArgs[i], val->ctorArgs[i], pvars, out))
                return false;
        return true;
    }
    case Type::Kind::Map: {
        if (!pat->typeParams.empty() || !val->typeParams.empty())
            return false; // binders do not occur in instance components
        if (pat->domain.size() != val->domain.size()) return false;
        for (std::size_t i = 0; i < pat->domain.size(); ++i)
            if (!matchTy(pat->domain[i], val->domain[i], pvars, out))
                return false;
        return matchTy(pat->codomain, val->codomain, pvars, out);
    }
    }
    return false;
}

ExprRef orOf(std::vector<ExprRef> disjuncts) {
    if (disjuncts.empty()) return Expr::boolLit(false);
    ExprRef acc = disjuncts[0];
    for (std::size_t i = 1; i < disjuncts.size(); ++i)
        acc = Expr::binary(bpl::BinOp::Or, acc, disjuncts[i]);
    return acc;
}

struct Member {
    std::vector<TypeRef> args;
    std::string tag;
    std::string canon;   // instanceKey(args)
    TypeRef full;        // monomorphic map type
    TypeRef declType;    // synonym variant when the group has one
};

struct GInfo {
    MapGroup const* g = nullptr;
    std::vector<std::string> freshTypes;
    std::vector<Member> members;

    int memberOf(std::string const& canon) const {
        for (std::size_t j = 0; j < members.size(); ++j)
            if (members[j].canon == canon) return int(j);
        return -1;
    }
};

// One replica of a planned function, procedure or implementation.
struct Variant {
    std::string name;
    sema::TypeSubst tp;               // pinned type parameters
    std::map<std::string, int> axis;  // formal item key -> member index
};

struct Plan {
    bool ruleD = false;
    // Expanded formals in declaration order (parameter-replication plans).
    std::vector<std::pair<std::string, GInfo const*>> axes;
    GInfo const* axisGroup = nullptr; // rule D: the pinning group
    std::vector<Variant> variants;
};

struct ItemExp {
    GInfo const* gi = nullptr;
    std::vector<std::string> names; // aligned with gi->members
};

// Tuple-valued rewrite result. width > 1 means the parts line up with
// gi->members; width 1 with member >= 0 is a single known variant.
struct RV {
    std::vector<ExprRef> parts;
    GInfo const* gi = nullptr;
    int member = -1;
    bool changed = false;

    std::size_t width() const { return parts.size(); }
    ExprRef const& one() const { return parts[0]; }
};

struct Ctx {
    sema::TypeSubst tp;
    std::map<std::string, std::pair<GInfo const*, int>> axis;
};

struct Mono {
    bpl::Program const& p;
    sema::TypeInfo const& info;
    int cap;
    DiagnosticEngine& diags;

    ActualTypes act;
    std::set<std::string> taken;
    std::map<std::string, GInfo> groups;        // group key -> info
    std::map<std::string, Plan> plans;          // decl name -> plan
    std::map<std::string, ItemExp> expanded;    // item key -> variants
    // Per function: substitutions mapping an axiom's quantified type
    // variables onto the function's type parameters, one per type-generic
    // axiom applying it. Generic axioms carry function-body occurrences, so
    // parametric instances under them belong to the applied function.
    std::map<std::string, std::vector<sema::TypeSubst>> axiomLinks;
    bool failed = false;

    Mono(bpl::Program const& prog, sema::TypeInfo const& ti, int capN,
         DiagnosticEngine& d)
        : p(prog), info(ti), cap(capN), diags(d) {}

    void fail(SourceSpan span, std::string msg) {
        diags.error(span, std::move(msg));
        failed = true;
    }

    std::string mint(std::string const& want) {
        if (taken.insert(want).second) return want;
        for (int i = 0;; ++i) {
            std::string w = want + "_k" + std::to_string(i);
            if (taken.insert(w).second) return w;
        }
    }

    GInfo const* groupOf(std::string const& itemKey) const {
        auto it = act.itemGroup.find(itemKey);
        if (it == act.itemGroup.end()) return nullptr;
        auto g = groups.find(it->second);
        return g == groups.end() ? nullptr : &g->second;
    }

    std::string itemKeyAt(Expr const* e) const {
        auto it = info.refs.find(e);
        if (it == info.refs.end()) return "";
        return itemKeyOf(it->second);
    }

    // ----- setup ---------------------------------------------------------

    void addMember(GInfo& gi, std::vector<TypeRef> args) {
        Member m;
        m.tag = tagOfArgs(args);
        m.canon = instanceKey(args);
        auto const& def = gi.g->definition;
        sema::TypeSubst sub;
        for (std::size_t k = 0; k < def->typeParams.size(); ++k)
            sub.emplace(def->typeParams[k], args[k]);
        m.full = sema::substType(Type::map({}, def->domain, def->codomain), sub);
        m.args = std::move(args);
        gi.members.push_back(std::move(m));
    }

    void setupGroups() {
        for (auto const& g : act.groups) {
            GInfo gi;
            gi.g = &g;
            for (std::size_t k = 0; k < g.definition->typeParams.size(); ++k)
                gi.freshTypes.push_back(mint(k == 0 ? "a" : "a" + std::to_string(k)));
            for (auto const& inst : g.types)
                if (inst.concrete) addMember(gi, inst.args);
            std::vector<TypeRef> fresh;
            for (auto const& n : gi.freshTypes) fresh.push_back(Type::ctor(n));
            addMember(gi, std::move(fresh));
            if (int(gi.members.size()) > cap) {
                fail({}, "map type '" + g.key + "' takes " +
                             std::to_string(gi.members.size()) +
                             " instances, exceeding the variant cap of " +
                             std::to_string(cap));
                return;
            }
            if (!g.synonym.empty())
                for (auto& m : gi.members)
                    m.declType = Type::ctor(mint(g.synonym + "_" + m.tag));
            else
                for (auto& m : gi.members) m.declType = m.full;
            groups.emplace(g.key, std::move(gi));
        }
    }

    void expandItem(std::string const& key, std::string const& base,
                    GInfo const* gi) {
        ItemExp ex;
        ex.gi = gi;
        for (auto const& m : gi->members) ex.names.push_back(mint(base + "_" + m.tag));
        expanded[key] = std::move(ex);
    }

    void setupItems() {
        for (auto const& d : p.decls) {
            if (d->kind == Decl::Kind::ConstDecl) {
                for (auto const& n : d->names)
                    if (auto const* gi = groupOf(n)) expandItem(n, n, gi);
            } else if (d->kind == Decl::Kind::VarDecl) {
                for (auto const& v : d->vars)
                    if (auto const* gi = groupOf(v.name)) expandItem(v.name, v.name, gi);
            }
        }
    }

    // ----- plans ---------------------------------------------------------

    std::vector<TypeRef> rawComponents(TypeRef const& def,
                                       std::vector<TypeRef> const& args) {
        sema::TypeSubst sub;
        for (std::size_t k = 0; k < def->typeParams.size(); ++k)
            sub.emplace(def->typeParams[k], args[k]);
        TypeRef full =
            sema::substType(Type::map({}, def->domain, def->codomain), sub);
        std::vector<TypeRef> comps = full->domain;
        comps.push_back(full->codomain);
        return comps;
    }

    void planDecl(DeclRef const& d) {
        bool isFn = d->kind == Decl::Kind::FunctionDecl;
        std::vector<std::pair<std::string, GInfo const*>> axes;
        for (std::size_t i = 0; i < d->params.size(); ++i) {
            std::string key = d->name + ".in" + std::to_string(i);
            if (auto const* gi = groupOf(key)) axes.emplace_back(key, gi);
        }
        if (!isFn)
            for (std::size_t i = 0; i < d->outs.size(); ++i) {
                std::string key = d->name + ".out" + std::to_string(i);
                if (auto const* gi = groupOf(key)) axes.emplace_back(key, gi);
            }
        if (isFn && d->result.type &&
            !groupKeyForType(d->result.type, info).empty()) {
            fail(d->span, "function '" + d->name +
                              "' returns a polymorphic map; its result cannot "
                              "be replicated");
            return;
        }
        if (!axes.empty()) {
            if (!d->typeParams.empty()) {
                fail(d->span,
                     "'" + d->name +
                         "' mixes type parameters with polymorphic map "
                         "parameters; this combination is not supported");
                return;
            }
            long long count = 1;
            for (auto const& [key, gi] : axes) {
                (void)key;
                count *= (long long)gi->members.size();
                if (count > cap) {
                    fail(d->span, "replicating '" + d->name + "' needs more than " +
                                      std::to_string(cap) +
                                      " variants; raise the variant cap or "
                                      "reduce the map instances");
                    return;
                }
            }
            Plan plan;
            plan.axes = axes;
            std::vector<std::size_t> choice(axes.size(), 0);
            for (;;) {
                Variant v;
                std::string name = d->name;
                for (std::size_t i = 0; i < axes.size(); ++i) {
                    v.axis[axes[i].first] = int(choice[i]);
                    name += "_" + axes[i].second->members[choice[i]].tag;
                }
                v.name = mint(name);
                plan.variants.push_back(std::move(v));
                std::size_t i = axes.size();
                while (i > 0) {
                    --i;
                    if (++choice[i] < axes[i].second->members.size()) break;
                    choice[i] = 0;
                    if (i == 0) { i = axes.size() + 1; break; }
                }
                if (i == axes.size() + 1) break;
            }
            plans.emplace(d->name, std::move(plan));
            return;
        }
        if (d->typeParams.empty()) return;
        // A type parameter used as a component of a parametric instance of
        // some group pins the parameter to that component of each member.
        std::set<std::string> pvars(d->typeParams.begin(), d->typeParams.end());
        sema::TypeSubst toVar;
        for (auto const& tp : d->typeParams) toVar.emplace(tp, Type::var(tp));
        for (auto const& g : act.groups) {
            auto const& gi = groups.at(g.key);
            for (auto const& raw : g.rawParametrics) {
                std::vector<TypeRef> rawArgs;
                if (raw.varOwner == d->name) {
                    rawArgs = raw.args;
                } else if (raw.varOwner.empty()) {
                    auto lk = axiomLinks.find(d->name);
                    if (lk == axiomLinks.end()) continue;
                    std::set<std::string> vs;
                    for (auto const& a : raw.args)
                        for (auto const& v : sema::freeTypeVars(a))
                            vs.insert(v);
                    for (auto const& sub : lk->second) {
                        bool all = true;
                        for (auto const& v : vs)
                            if (!sub.count(v)) { all = false; break; }
                        if (!all) continue;
                        for (auto const& a : raw.args)
                            rawArgs.push_back(substTypeSyntactic(a, sub));
                        break;
                    }
                    if (rawArgs.empty()) continue;
                } else {
                    continue;
                }
                auto rawComps = rawComponents(g.definition, rawArgs);
                std::vector<Param const*> formals;
                for (auto const& prm : d->params) formals.push_back(&prm);
                for (auto const& prm : d->outs) formals.push_back(&prm);
                if (isFn && d->result.type) formals.push_back(&d->result);
                for (auto const* f : formals) {
                    TypeRef fn =
                        info.normalize(substTypeSyntactic(f->type, toVar));
                    for (auto const& comp : rawComps) {
                        if (!bpl::typeEqual(fn, comp)) continue;
                        Plan plan;
                        plan.ruleD = true;
                        plan.axisGroup = &gi;
                        for (auto const& m : gi.members) {
                            auto memberComps = rawComponents(g.definition, m.args);
                            sema::TypeSubst sub;
                            bool ok = true;
                            for (std::size_t ci = 0; ci < rawComps.size(); ++ci)
                                if (!matchTy(rawComps[ci], memberComps[ci], pvars,
                                             sub)) {
                                    ok = false;
                                    break;
                                }
                            if (!ok) {
                                diags.note(d->span,
                                           "'" + d->name + "' has no variant at " +
                                               m.tag +
                                               ": the instance does not fit the "
                                               "parameter pattern");
                                continue;
                            }
                            Variant v;
                            v.name = mint(d->name + "_" + m.tag);
                            v.tp = std::move(sub);
                            plan.variants.push_back(std::move(v));
                        }
                        if (int(plan.variants.size()) > cap) {
                            fail(d->span, "replicating '" + d->name +
                                              "' needs more than " +
                                              std::to_string(cap) + " variants");
                            return;
                        }
                        if (!plan.variants.empty())
                            plans.emplace(d->name, std::move(plan));
                        return;
                    }
                }
            }
        }
    }

    void setupAxiomLinks() {
        for (auto const& d : p.decls) {
            if (d->kind != Decl::Kind::AxiomDecl || !d->expr) continue;
            ExprRef root = d->expr;
            if (root->kind != Expr::Kind::Quant || root->typeParams.empty())
                continue;
            std::set<std::string> tp(root->typeParams.begin(),
                                     root->typeParams.end());
            forEachExpr(root, [&](ExprRef const& e) {
                if (e->kind != Expr::Kind::Call) return;
                auto fn = info.functions.find(e->text);
                if (fn == info.functions.end() ||
                    fn->second.decl->typeParams.empty())
                    return;
                auto ta = info.callTypeArgs.find(e.get());
                if (ta == info.callTypeArgs.end()) return;
                sema::TypeSubst sub;
                for (std::size_t i = 0; i < ta->second.size(); ++i) {
                    TypeRef const& t = ta->second[i];
                    if (!t || t->kind != Type::Kind::Var || !tp.count(t->name))
                        return;
                    if (!sub.emplace(t->name,
                                     Type::var(fn->second.decl->typeParams[i]))
                             .second)
                        return; // repeated variable, not a plain renaming
                }
                axiomLinks[e->text].push_back(std::move(sub));
            });
        }
    }

    void setupPlans() {
        setupAxiomLinks();
        for (auto const& d : p.decls)
            if (d->kind == Decl::Kind::FunctionDecl ||
                d->kind == Decl::Kind::ProcedureDecl) {
                planDecl(d);
                if (failed) return;
            }
    }

    // ----- expressions ---------------------------------------------------

    std::vector<TypeRef> pinVec(std::vector<TypeRef> const& v, Ctx const& cx) {
        std::vector<TypeRef> out;
        out.reserve(v.size());
        for (auto const& t : v) out.push_back(substTypeSyntactic(t, cx.tp));
        return out;
    }

    // A selection through a formal fixed to one variant must use the
    // variant's own instance; other instances have no meaning there.
    bool axisConsistent(Expr const* node, RV const& base, Ctx const& cx) {
        if (!base.gi || base.member < 0) return true;
        auto mi = info.mapInst.find(node);
        if (mi == info.mapInst.end()) return true;
        auto vec = pinVec(mi->second, cx);
        if (!vecConcrete(vec)) return true;
        int j = base.gi->memberOf(instanceKey(vec));
        if (j < 0 || j == base.member) return true;
        fail(node->span,
             "a map parameter fixed to instance " +
                 base.gi->members[std::size_t(base.member)].tag +
                 " is used at instance " + base.gi->members[std::size_t(j)].tag +
                 "; the program cannot be replicated");
        return false;
    }

    RV plain(ExprRef e, bool changed) {
        RV r;
        r.parts.push_back(std::move(e));
        r.changed = changed;
        return r;
    }

    // Rewrites one child expected to stay single-valued.
    ExprRef single(ExprRef const& e, Ctx const& cx, bool& changed) {
        RV r = rewrite(e, cx);
        if (r.width() != 1) {
            fail(e->span, "a polymorphic map value cannot be used here; it "
                          "stands for several variants");
            return e;
        }
        changed = changed || r.changed;
        return r.one();
    }

    RV rewrite(ExprRef const& e, Ctx const& cx) {
        switch (e->kind) {
        case Expr::Kind::IntLit:
        case Expr::Kind::RealLit:
        case Expr::Kind::BoolLit:
        case Expr::Kind::BvLit:
        case Expr::Kind::StringLit:
        case Expr::Kind::Star: return plain(e, false);
        case Expr::Kind::Ident: {
            std::string key = itemKeyAt(e.get());
            if (key.empty()) return plain(e, false);
            auto ax = cx.axis.find(key);
            if (ax != cx.axis.end()) {
                RV r = plain(e, false);
                r.gi = ax->second.first;
                r.member = ax->second.second;
                return r;
            }
            auto ex = expanded.find(key);
            if (ex != expanded.end()) {
                RV r;
                r.gi = ex->second.gi;
                r.changed = true;
                for (auto const& n : ex->second.names)
                    r.parts.push_back(Expr::ident(n, e->span));
                return r;
            }
            return plain(e, false);
        }
        case Expr::Kind::Un: {
            bool ch = false;
            ExprRef a = single(e->a, cx, ch);
            return plain(ch ? Expr::unary(e->un, a, e->span) : e, ch);
        }
        case Expr::Kind::Bin: {
            bpl::BinOp op = e->ops[0];
            RV l = rewrite(e->a, cx);
            RV r = rewrite(e->b, cx);
            bool ch = l.changed || r.changed;
            if (op == bpl::BinOp::Eq || op == bpl::BinOp::Neq) {
                if (l.width() > 1 || r.width() > 1) {
                    if (l.width() != r.width()) {
                        fail(e->span,
                             "comparison of polymorphic map values with "
                             "different variant expansions");
                        return plain(e, false);
                    }
                    std::vector<ExprRef> cmps;
                    for (std::size_t j = 0; j < l.width(); ++j)
                        cmps.push_back(Expr::binary(op, l.parts[j], r.parts[j],
                                                    e->span));
                    RV out;
                    out.changed = true;
                    out.parts.push_back(op == bpl::BinOp::Eq
                                            ? Expr::andOf(cmps)
                                            : orOf(cmps));
                    return out;
                }
            }
            if (l.width() != 1 || r.width() != 1) {
                fail(e->span, "a polymorphic map value cannot be used as an "
                              "operand here");
                return plain(e, false);
            }
            return plain(ch ? Expr::binary(op, l.one(), r.one(), e->span) : e,
                         ch);
        }
        case Expr::Kind::Chain: {
            bool ch = false;
            std::vector<ExprRef> items;
            for (auto const& it : e->items) items.push_back(single(it, cx, ch));
            return plain(ch ? Expr::chain(e->ops, items, e->span) : e, ch);
        }
        case Expr::Kind::Select: {
            RV b = rewrite(e->a, cx);
            bool ch = b.changed;
            std::vector<ExprRef> idx;
            for (auto const& it : e->items) idx.push_back(single(it, cx, ch));
            if (b.width() == 1) {
                if (!axisConsistent(e.get(), b, cx)) return plain(e, false);
                return plain(ch ? Expr::select(b.one(), idx, e->span) : e, ch);
            }
            auto mi = info.mapInst.find(e.get());
            if (mi == info.mapInst.end()) {
                fail(e->span, "missing instantiation for a polymorphic map "
                              "selection");
                return plain(e, false);
            }
            auto vec = pinVec(mi->second, cx);
            if (!vecConcrete(vec)) {
                fail(e->span, "selection on a polymorphic map at a parametric "
                              "instance; no variant applies");
                return plain(e, false);
            }
            int j = b.gi->memberOf(instanceKey(vec));
            if (j < 0) {
                fail(e->span, "selection instance not covered by any variant");
                return plain(e, false);
            }
            RV out;
            out.changed = true;
            out.gi = b.gi;
            out.member = j;
            out.parts.push_back(Expr::select(b.parts[j], idx, e->span));
            return out;
        }
        case Expr::Kind::Update: {
            RV b = rewrite(e->a, cx);
            bool ch = b.changed;
            std::vector<ExprRef> idx;
            for (auto const& it : e->items) idx.push_back(single(it, cx, ch));
            ExprRef val = single(e->b, cx, ch);
            if (b.width() == 1) {
                if (!axisConsistent(e.get(), b, cx)) return plain(e, false);
                return plain(ch ? Expr::update(b.one(), idx, val, e->span) : e,
                             ch);
            }
            auto mi = info.mapInst.find(e.get());
            if (mi == info.mapInst.end()) {
                fail(e->span,
                     "missing instantiation for a polymorphic map update");
                return plain(e, false);
            }
            auto vec = pinVec(mi->second, cx);
            if (!vecConcrete(vec)) {
                fail(e->span, "update of a polymorphic map at a parametric "
                              "instance; no variant applies");
                return plain(e, false);
            }
            int j = b.gi->memberOf(instanceKey(vec));
            if (j < 0) {
                fail(e->span, "update instance not covered by any variant");
                return plain(e, false);
            }
            RV out;
            out.changed = true;
            out.gi = b.gi;
            for (std::size_t k = 0; k < b.width(); ++k)
                out.parts.push_back(int(k) == j
                                        ? Expr::update(b.parts[k], idx, val,
                                                       e->span)
                                        : b.parts[k]);
            return out;
        }
        case Expr::Kind::Extract: {
            bool ch = false;
            ExprRef a = single(e->a, cx, ch);
            return plain(ch ? Expr::extract(a, e->hi, e->lo, e->span) : e, ch);
        }
        case Expr::Kind::Old: {
            RV r = rewrite(e->a, cx);
            if (!r.changed) return plain(e, false);
            RV out;
            out.gi = r.gi;
            out.member = r.member;
            out.changed = true;
            for (auto const& part : r.parts)
                out.parts.push_back(Expr::old(part, e->span));
            return out;
        }
        case Expr::Kind::Ite: {
            bool ch = false;
            ExprRef c = single(e->a, cx, ch);
            ExprRef t = single(e->b, cx, ch);
            ExprRef f = single(e->c, cx, ch);
            return plain(ch ? Expr::ite(c, t, f, e->span) : e, ch);
        }
        case Expr::Kind::Call: return rewriteApp(e, cx);
        case Expr::Kind::Quant: return rewriteQuant(e, cx);
        case Expr::Kind::Lambda: {
            // Lambdas are lifted before this pass; a remaining one may not
            // involve polymorphic maps.
            bool ch = false;
            ExprRef body = single(e->body, cx, ch);
            return plain(ch ? Expr::lambda(e->bound, body, e->span) : e, ch);
        }
        }
        return plain(e, false);
    }

    RV rewriteApp(ExprRef const& e, Ctx const& cx) {
        auto pl = plans.find(e->text);
        if (pl == plans.end()) {
            bool ch = false;
            std::vector<ExprRef> args;
            for (auto const& a : e->items) args.push_back(single(a, cx, ch));
            return plain(ch ? Expr::call(e->text, args, e->span) : e, ch);
        }
        Plan const& plan = pl->second;
        if (plan.ruleD) {
            auto ta = info.callTypeArgs.find(e.get());
            if (ta == info.callTypeArgs.end()) {
                fail(e->span, "missing type arguments for a replicated "
                              "function application");
                return plain(e, false);
            }
            auto vals = pinVec(ta->second, cx);
            int pick = pickRuleD(plan, e->text, vals, e->span);
            if (pick < 0) return plain(e, false);
            bool ch = false;
            std::vector<ExprRef> args;
            for (auto const& a : e->items) args.push_back(single(a, cx, ch));
            return plain(Expr::call(plan.variants[pick].name, args, e->span),
                         true);
        }
        // Parameter-replicated callee: fix each expanded formal from the
        // matching actual; full-tuple actuals expand the application.
        std::vector<RV> args;
        for (auto const& a : e->items) args.push_back(rewrite(a, cx));
        std::vector<int> choice(plan.axes.size(), -1);
        std::vector<bool> spread(plan.axes.size(), false);
        GInfo const* spreadGi = nullptr;
        for (std::size_t x = 0; x < plan.axes.size(); ++x) {
            std::string const& key = plan.axes[x].first;
            GInfo const* gi = plan.axes[x].second;
            std::size_t i = argIndexOf(key);
            if (i >= args.size()) {
                fail(e->span, "argument count does not match '" + e->text + "'");
                return plain(e, false);
            }
            RV const& av = args[i];
            if (av.width() == gi->members.size() && av.gi == gi) {
                spread[x] = true;
                if (spreadGi && spreadGi != gi) {
                    fail(e->span, "arguments of '" + e->text +
                                      "' expand over different map types; no "
                                      "single variant applies");
                    return plain(e, false);
                }
                spreadGi = gi;
            } else if (av.width() == 1 && av.member >= 0 && av.gi == gi) {
                choice[x] = av.member;
            } else {
                fail(e->span, "cannot determine the map instance of an "
                              "argument of '" + e->text + "'");
                return plain(e, false);
            }
        }
        auto buildOne = [&](int j) {
            std::vector<std::size_t> ch(plan.axes.size());
            for (std::size_t x = 0; x < plan.axes.size(); ++x)
                ch[x] = spread[x] ? std::size_t(j) : std::size_t(choice[x]);
            std::vector<ExprRef> as;
            for (std::size_t i = 0; i < args.size(); ++i) {
                RV const& av = args[i];
                as.push_back(av.width() == 1 ? av.one() : av.parts[std::size_t(j)]);
            }
            return Expr::call(variantName(plan, ch), as, e->span);
        };
        if (!spreadGi) {
            std::vector<std::size_t> ch(plan.axes.size());
            for (std::size_t x = 0; x < plan.axes.size(); ++x)
                ch[x] = std::size_t(choice[x]);
            std::vector<ExprRef> as;
            for (auto const& av : args) as.push_back(av.one());
            return plain(Expr::call(variantName(plan, ch), as, e->span), true);
        }
        RV out;
        out.changed = true;
        out.gi = spreadGi;
        for (std::size_t j = 0; j < spreadGi->members.size(); ++j)
            out.parts.push_back(buildOne(int(j)));
        return out;
    }

    // in<i>/out<i> suffix of a formal's item key.
    static std::size_t argIndexOf(std::string const& key) {
        auto pos = key.rfind(".in");
        if (pos != std::string::npos)
            return std::size_t(std::stoul(key.substr(pos + 3)));
        pos = key.rfind(".out");
        return std::size_t(std::stoul(key.substr(pos + 4)));
    }

    std::string variantName(Plan const& plan,
                            std::vector<std::size_t> const& choice) const {
        std::size_t idx = 0;
        for (std::size_t x = 0; x < plan.axes.size(); ++x)
            idx = idx * plan.axes[x].second->members.size() + choice[x];
        return plan.variants[idx].name;
    }

    int pickRuleD(Plan const& plan, std::string const& callee,
                  std::vector<TypeRef> const& typeArgs, SourceSpan span) {
        if (!vecConcrete(typeArgs)) {
            fail(span, "call of '" + callee +
                           "' at a parametric type instance; no variant "
                           "applies");
            return -1;
        }
        std::vector<std::string> const* tps = nullptr;
        if (auto it = info.functions.find(callee); it != info.functions.end())
            tps = &it->second.decl->typeParams;
        else if (auto pt = info.procedures.find(callee);
                 pt != info.procedures.end())
            tps = &pt->second.decl->typeParams;
        if (!tps) return -1;
        for (std::size_t v = 0; v < plan.variants.size(); ++v) {
            bool ok = true;
            for (auto const& [name, ty] : plan.variants[v].tp) {
                auto at = std::find(tps->begin(), tps->end(), name);
                std::size_t i = std::size_t(at - tps->begin());
                if (i >= typeArgs.size() || !bpl::typeEqual(ty, typeArgs[i])) {
                    ok = false;
                    break;
                }
            }
            if (ok) return int(v);
        }
        fail(span, "no variant of '" + callee + "' matches the type instance");
        return -1;
    }

    RV rewriteQuant(ExprRef const& e, Ctx const& cx) {
        bool ch = false;
        std::vector<bpl::BoundVar> bound;
        std::vector<std::pair<std::string, bool>> saved; // key, hadEntry
        std::vector<ItemExp> savedVals;
        for (auto const& b : e->bound) {
            TypeRef bt = substTypeSyntactic(b.type, cx.tp);
            std::string gk = groupKeyForType(bt, info);
            auto gIt = gk.empty() ? groups.end() : groups.find(gk);
            if (gIt == groups.end()) {
                if (bt != b.type) ch = true;
                bound.push_back({b.name, bt, b.span});
                continue;
            }
            GInfo const& gi = gIt->second;
            ch = true;
            ItemExp ex;
            ex.gi = &gi;
            for (auto const& m : gi.members) {
                std::string vn = mint(b.name + "_" + m.tag);
                ex.names.push_back(vn);
                bound.push_back({vn, m.declType, b.span});
            }
            std::string key = "<bound>." + b.name;
            auto old = expanded.find(key);
            saved.emplace_back(key, old != expanded.end());
            savedVals.push_back(old != expanded.end() ? old->second : ItemExp{});
            expanded[key] = std::move(ex);
        }
        RV body = rewrite(e->body, cx);
        ExprRef newBody;
        if (body.width() > 1) {
            newBody = Expr::andOf(body.parts);
            ch = true;
        } else {
            newBody = body.one();
            ch = ch || body.changed;
        }
        std::vector<bpl::TriggerGroup> trig;
        for (auto const& tg : e->triggers) {
            bpl::TriggerGroup ng;
            ng.negated = tg.negated;
            bool dropped = false;
            for (auto const& te : tg.exprs) {
                RV tv = rewrite(te, cx);
                if (tv.width() != 1) {
                    diags.note(te->span, "trigger dropped: it expands to "
                                         "several map variants");
                    dropped = true;
                    break;
                }
                ch = ch || tv.changed;
                ng.exprs.push_back(tv.one());
            }
            if (!dropped) trig.push_back(std::move(ng));
        }
        if (trig.size() != e->triggers.size()) ch = true;
        for (std::size_t i = saved.size(); i > 0; --i) {
            auto const& [key, had] = saved[i - 1];
            if (had)
                expanded[key] = savedVals[i - 1];
            else
                expanded.erase(key);
        }
        if (!ch) return plain(e, false);
        return plain(Expr::quant(e->qkind, e->typeParams, bound, trig,
                                 e->attrs, newBody, e->span),
                     true);
    }

    // ----- statements ----------------------------------------------------

    ExprRef formula(ExprRef const& e, Ctx const& cx, bool& changed) {
        RV r = rewrite(e, cx);
        if (r.width() > 1) {
            changed = true;
            return Expr::andOf(r.parts);
        }
        changed = changed || r.changed;
        return r.one();
    }

    std::vector<std::string> expandName(std::string const& name, Ctx const& cx,
                                        bool& changed) {
        std::string key = name;
        auto ex = expanded.find(key);
        if (ex != expanded.end()) {
            changed = true;
            return ex->second.names;
        }
        (void)cx;
        return {name};
    }

    void rewriteStmt(StmtRef const& s, Ctx const& cx,
                     std::vector<StmtRef>& out) {
        switch (s->kind) {
        case Stmt::Kind::Assert: {
            bool ch = false;
            ExprRef e = formula(s->expr, cx, ch);
            out.push_back(ch ? Stmt::assertStmt(e, s->attrs, s->span) : s);
            return;
        }
        case Stmt::Kind::Assume: {
            bool ch = false;
            ExprRef e = formula(s->expr, cx, ch);
            out.push_back(ch ? Stmt::assumeStmt(e, s->attrs, s->span) : s);
            return;
        }
        case Stmt::Kind::Assign: return rewriteAssign(s, cx, out);
        case Stmt::Kind::Havoc: {
            auto nr = info.stmtNameRefs.find(s.get());
            bool ch = false;
            std::vector<std::string> names;
            for (std::size_t i = 0; i < s->names.size(); ++i) {
                std::string key =
                    nr != info.stmtNameRefs.end() && i < nr->second.size()
                        ? itemKeyOf(nr->second[i])
                        : s->names[i];
                auto ex = key.empty() ? expanded.end() : expanded.find(key);
                if (ex != expanded.end()) {
                    ch = true;
                    for (auto const& v : ex->second.names) names.push_back(v);
                } else {
                    names.push_back(s->names[i]);
                }
            }
            out.push_back(ch ? Stmt::havoc(names, {}, s->span) : s);
            return;
        }
        case Stmt::Kind::Call: return rewriteCall(s, cx, out);
        case Stmt::Kind::CallForall: {
            bool ch = false;
            std::vector<ExprRef> args;
            for (auto const& a : s->args) {
                if (!a) {
                    args.push_back(a);
                    continue;
                }
                RV r = rewrite(a, cx);
                if (r.width() != 1) {
                    fail(a->span, "a polymorphic map value cannot be passed "
                                  "to call forall");
                    args.push_back(a);
                    continue;
                }
                ch = ch || r.changed;
                args.push_back(r.one());
            }
            out.push_back(ch ? Stmt::callForall(s->callee, args, s->span) : s);
            return;
        }
        case Stmt::Kind::If: {
            bool ch = false;
            ExprRef g = s->expr && s->expr->kind != Expr::Kind::Star
                            ? single(s->expr, cx, ch)
                            : s->expr;
            std::vector<StmtRef> thenB, elseB;
            for (auto const& t : s->body1) rewriteStmt(t, cx, thenB);
            for (auto const& t : s->body2) rewriteStmt(t, cx, elseB);
            bool same = !ch && thenB.size() == s->body1.size() &&
                        elseB.size() == s->body2.size();
            if (same)
                for (std::size_t i = 0; i < thenB.size(); ++i)
                    if (thenB[i] != s->body1[i]) { same = false; break; }
            if (same)
                for (std::size_t i = 0; i < elseB.size(); ++i)
                    if (elseB[i] != s->body2[i]) { same = false; break; }
            out.push_back(same ? s
                               : Stmt::ifStmt(g, thenB, elseB, s->hasElse,
                                              s->span));
            return;
        }
        case Stmt::Kind::While: {
            bool ch = false;
            ExprRef g = s->expr && s->expr->kind != Expr::Kind::Star
                            ? single(s->expr, cx, ch)
                            : s->expr;
            std::vector<bpl::Invariant> invs;
            for (auto const& inv : s->invariants) {
                bpl::Invariant ni = inv;
                ni.expr = formula(inv.expr, cx, ch);
                if (ni.expr != inv.expr) ch = true;
                invs.push_back(std::move(ni));
            }
            std::vector<StmtRef> body;
            for (auto const& t : s->body1) rewriteStmt(t, cx, body);
            bool same = !ch && body.size() == s->body1.size();
            if (same)
                for (std::size_t i = 0; i < body.size(); ++i)
                    if (body[i] != s->body1[i]) { same = false; break; }
            out.push_back(same ? s : Stmt::whileStmt(g, invs, body, s->span));
            return;
        }
        case Stmt::Kind::Break:
        case Stmt::Kind::Return:
        case Stmt::Kind::Goto:
        case Stmt::Kind::Label: out.push_back(s); return;
        }
    }

    void rewriteAssign(StmtRef const& s, Ctx const& cx,
                       std::vector<StmtRef>& out) {
        auto nr = info.stmtNameRefs.find(s.get());
        auto ai = info.assignInst.find(s.get());
        struct PairOut {
            std::vector<bpl::LhsTarget> lhs;
            std::vector<ExprRef> rhs;
        };
        std::vector<PairOut> pairs;
        bool ch = false;
        for (std::size_t i = 0; i < s->lhs.size(); ++i) {
            bpl::LhsTarget const& t = s->lhs[i];
            std::string key;
            if (nr != info.stmtNameRefs.end() && i < nr->second.size())
                key = itemKeyOf(nr->second[i]);
            auto ax = cx.axis.find(key);
            auto ex = key.empty() ? expanded.end() : expanded.find(key);
            PairOut po;
            if (!t.indexGroups.empty()) {
                std::vector<std::vector<ExprRef>> idx;
                for (auto const& grp : t.indexGroups) {
                    std::vector<ExprRef> g;
                    for (auto const& ie : grp) g.push_back(single(ie, cx, ch));
                    idx.push_back(std::move(g));
                }
                ExprRef rhs = single(s->rhs[i], cx, ch);
                std::string name = t.name;
                if (ex != expanded.end() || ax != cx.axis.end()) {
                    GInfo const* gi = ex != expanded.end() ? ex->second.gi
                                                           : ax->second.first;
                    std::vector<TypeRef> vec;
                    if (ai != info.assignInst.end() && i < ai->second.size() &&
                        !ai->second[i].empty())
                        vec = pinVec(ai->second[i][0], cx);
                    if (!vecConcrete(vec) || vec.empty()) {
                        fail(t.span, "assignment through '" + t.name +
                                         "' at a parametric instance; no "
                                         "variant applies");
                        return;
                    }
                    int j = gi->memberOf(instanceKey(vec));
                    if (j < 0) {
                        fail(t.span, "assignment instance not covered by any "
                                     "variant of '" + t.name + "'");
                        return;
                    }
                    if (ax != cx.axis.end()) {
                        if (j != ax->second.second) {
                            fail(t.span,
                                 "'" + t.name + "' is used at instance " +
                                     gi->members[std::size_t(j)].tag +
                                     " inside the variant for " +
                                     gi->members[std::size_t(ax->second.second)]
                                         .tag +
                                     "; the program cannot be replicated");
                            return;
                        }
                    } else {
                        name = ex->second.names[std::size_t(j)];
                    }
                    ch = true;
                }
                po.lhs.push_back({name, idx, t.span});
                po.rhs.push_back(rhs);
                pairs.push_back(std::move(po));
                continue;
            }
            RV rv = rewrite(s->rhs[i], cx);
            if (ex != expanded.end()) {
                GInfo const* gi = ex->second.gi;
                ch = true;
                if (rv.width() == gi->members.size() && rv.gi == gi) {
                    for (std::size_t j = 0; j < rv.width(); ++j) {
                        ExprRef self = Expr::ident(ex->second.names[j]);
                        if (bpl::exprEqual(self, rv.parts[j])) continue;
                        po.lhs.push_back({ex->second.names[j], {}, t.span});
                        po.rhs.push_back(rv.parts[j]);
                    }
                } else if (rv.width() == 1 && rv.member >= 0 && rv.gi == gi) {
                    po.lhs.push_back(
                        {ex->second.names[std::size_t(rv.member)], {}, t.span});
                    po.rhs.push_back(rv.one());
                } else {
                    fail(t.span, "cannot align the right-hand side with the "
                                 "variants of '" + t.name + "'");
                    return;
                }
            } else if (ax != cx.axis.end()) {
                ch = ch || rv.changed;
                ExprRef rhs;
                if (rv.width() == 1)
                    rhs = rv.one();
                else if (rv.gi == ax->second.first) {
                    rhs = rv.parts[std::size_t(ax->second.second)];
                    ch = true;
                } else {
                    fail(t.span, "cannot align the right-hand side with '" +
                                     t.name + "'");
                    return;
                }
                po.lhs.push_back({t.name, {}, t.span});
                po.rhs.push_back(rhs);
            } else {
                if (rv.width() != 1) {
                    fail(t.span, "a polymorphic map value cannot be assigned "
                                 "to '" + t.name + "'");
                    return;
                }
                ch = ch || rv.changed;
                po.lhs.push_back({t.name, {}, t.span});
                po.rhs.push_back(rv.one());
            }
            pairs.push_back(std::move(po));
        }
        if (!ch) {
            out.push_back(s);
            return;
        }
        bool split = false;
        for (auto const& po : pairs)
            if (po.lhs.size() != 1) split = true;
        if (!split) {
            std::vector<bpl::LhsTarget> lhs;
            std::vector<ExprRef> rhs;
            for (auto& po : pairs) {
                lhs.push_back(std::move(po.lhs[0]));
                rhs.push_back(std::move(po.rhs[0]));
            }
            out.push_back(Stmt::assign(lhs, rhs, s->span));
            return;
        }
        if (s->lhs.size() > 1)
            diags.note(s->span, "parallel assignment serialized while "
                                "expanding map variants");
        for (auto& po : pairs)
            for (std::size_t j = 0; j < po.lhs.size(); ++j)
                out.push_back(Stmt::assign({po.lhs[j]}, {po.rhs[j]}, s->span));
    }

    void rewriteCall(StmtRef const& s, Ctx const& cx,
                     std::vector<StmtRef>& out) {
        auto pl = plans.find(s->callee);
        auto nr = info.stmtNameRefs.find(s.get());
        if (pl == plans.end()) {
            bool ch = false;
            std::vector<ExprRef> args;
            for (auto const& a : s->args) args.push_back(single(a, cx, ch));
            out.push_back(ch ? Stmt::call(s->names, s->callee, args, s->attrs,
                                          s->span)
                             : s);
            return;
        }
        Plan const& plan = pl->second;
        if (plan.ruleD) {
            auto ta = info.stmtCallTypeArgs.find(s.get());
            std::vector<TypeRef> vals;
            if (ta != info.stmtCallTypeArgs.end()) vals = pinVec(ta->second, cx);
            int pick = pickRuleD(plan, s->callee, vals, s->span);
            if (pick < 0) return;
            bool ch = false;
            std::vector<ExprRef> args;
            for (auto const& a : s->args) args.push_back(single(a, cx, ch));
            out.push_back(Stmt::call(s->names, plan.variants[pick].name, args,
                                     s->attrs, s->span));
            return;
        }
        std::vector<RV> args;
        for (auto const& a : s->args) args.push_back(rewrite(a, cx));
        // Out actuals: expanded ones contribute their name tuple.
        struct OutActual {
            std::vector<std::string> names; // width 1 or member count
            GInfo const* gi = nullptr;
            int member = -1;
        };
        std::vector<OutActual> outs;
        for (std::size_t i = 0; i < s->names.size(); ++i) {
            OutActual oa;
            std::string key;
            if (nr != info.stmtNameRefs.end() && i < nr->second.size())
                key = itemKeyOf(nr->second[i]);
            auto ax = cx.axis.find(key);
            auto ex = key.empty() ? expanded.end() : expanded.find(key);
            if (ex != expanded.end()) {
                oa.names = ex->second.names;
                oa.gi = ex->second.gi;
            } else if (ax != cx.axis.end()) {
                oa.names = {s->names[i]};
                oa.gi = ax->second.first;
                oa.member = ax->second.second;
            } else {
                oa.names = {s->names[i]};
            }
            outs.push_back(std::move(oa));
        }
        std::vector<int> choice(plan.axes.size(), -1);
        std::vector<bool> spread(plan.axes.size(), false);
        GInfo const* spreadGi = nullptr;
        for (std::size_t x = 0; x < plan.axes.size(); ++x) {
            std::string const& key = plan.axes[x].first;
            GInfo const* gi = plan.axes[x].second;
            bool isOut = key.find(".out") != std::string::npos;
            std::size_t i = argIndexOf(key);
            bool sp = false;
            int fix = -1;
            if (!isOut) {
                if (i >= args.size()) {
                    fail(s->span, "argument count does not match '" +
                                      s->callee + "'");
                    return;
                }
                RV const& av = args[i];
                if (av.width() == gi->members.size() && av.gi == gi)
                    sp = true;
                else if (av.width() == 1 && av.member >= 0 && av.gi == gi)
                    fix = av.member;
            } else {
                if (i >= outs.size()) {
                    fail(s->span, "output count does not match '" + s->callee +
                                      "'");
                    return;
                }
                OutActual const& oa = outs[i];
                if (oa.names.size() == gi->members.size() && oa.gi == gi)
                    sp = true;
                else if (oa.names.size() == 1 && oa.member >= 0 && oa.gi == gi)
                    fix = oa.member;
            }
            if (sp) {
                spread[x] = true;
                if (spreadGi && spreadGi != gi) {
                    fail(s->span, "arguments of '" + s->callee +
                                      "' expand over different map types; the "
                                      "call cannot be replicated");
                    return;
                }
                spreadGi = gi;
            } else if (fix >= 0) {
                choice[x] = fix;
            } else {
                fail(s->span, "cannot determine the map instance of a "
                              "parameter of '" + s->callee + "'");
                return;
            }
        }
        auto buildOne = [&](int j) {
            std::vector<std::size_t> chv(plan.axes.size());
            for (std::size_t x = 0; x < plan.axes.size(); ++x)
                chv[x] = spread[x] ? std::size_t(j) : std::size_t(choice[x]);
            std::vector<ExprRef> as;
            for (auto const& av : args)
                as.push_back(av.width() == 1 ? av.one()
                                             : av.parts[std::size_t(j)]);
            std::vector<std::string> ns;
            for (auto const& oa : outs)
                ns.push_back(oa.names.size() == 1 ? oa.names[0]
                                                  : oa.names[std::size_t(j)]);
            return Stmt::call(ns, variantName(plan, chv), as, s->attrs,
                              s->span);
        };
        if (!spreadGi) {
            out.push_back(buildOne(0));
            return;
        }
        for (std::size_t j = 0; j < spreadGi->members.size(); ++j)
            out.push_back(buildOne(int(j)));
    }

    // ----- declarations --------------------------------------------------

    TypeRef pinType(TypeRef const& t, Ctx const& cx) {
        return substTypeSyntactic(t, cx.tp);
    }

    std::vector<std::string> dropPinned(std::vector<std::string> const& tps,
                                        sema::TypeSubst const& tp) {
        std::vector<std::string> out;
        for (auto const& t : tps)
            if (!tp.count(t)) out.push_back(t);
        return out;
    }

    void emitFreshTypes(GInfo const& gi, std::vector<DeclRef>& out) {
        for (auto const& n : gi.freshTypes) {
            auto td = Decl::make(Decl::Kind::TypeDecl);
            td->name = n;
            out.push_back(std::move(td));
        }
    }

    void emitMemberTypes(GInfo const& gi, std::vector<DeclRef>& out) {
        for (auto const& m : gi.members) {
            auto td = Decl::make(Decl::Kind::TypeDecl);
            td->name = m.declType->name;
            td->synonym = m.full;
            out.push_back(std::move(td));
        }
    }

    void emitConst(DeclRef const& d, std::vector<DeclRef>& out) {
        GInfo const* gi = d->names.empty() ? nullptr : groupOf(d->names[0]);
        if (!gi) {
            out.push_back(rewriteLeafDecl(d));
            return;
        }
        if (d->order.present) {
            fail(d->span, "ordered constants of polymorphic map type are not "
                          "supported");
            return;
        }
        for (std::size_t j = 0; j < gi->members.size(); ++j) {
            auto nd = Decl::make(Decl::Kind::ConstDecl);
            nd->attrs = d->attrs;
            nd->unique = d->unique;
            nd->type = gi->members[j].declType;
            for (auto const& n : d->names) {
                nd->names.push_back(expanded.at(n).names[j]);
                nd->nameSpans.push_back(d->span);
            }
            out.push_back(std::move(nd));
        }
    }

    void emitVar(DeclRef const& d, std::vector<DeclRef>& out) {
        bool any = false;
        for (auto const& v : d->vars)
            if (expanded.count(v.name)) any = true;
        if (!any) {
            out.push_back(rewriteLeafDecl(d));
            return;
        }
        auto nd = Decl::make(Decl::Kind::VarDecl);
        nd->attrs = d->attrs;
        Ctx cx;
        for (auto const& v : d->vars) {
            auto ex = expanded.find(v.name);
            if (ex == expanded.end()) {
                bool ch = false;
                ExprRef wh = v.where ? formula(v.where, cx, ch) : nullptr;
                nd->vars.push_back({v.name, v.type, wh, v.span});
                continue;
            }
            if (v.where) {
                fail(v.span, "a where clause on a polymorphic map variable "
                             "is not supported");
                return;
            }
            GInfo const* gi = ex->second.gi;
            for (std::size_t j = 0; j < gi->members.size(); ++j)
                nd->vars.push_back(
                    {ex->second.names[j], gi->members[j].declType, nullptr,
                     v.span});
        }
        out.push_back(std::move(nd));
    }

    // Declarations without a plan still mention expanded items in their
    // expression positions.
    DeclRef rewriteLeafDecl(DeclRef const& d) {
        Ctx cx;
        return rewriteDeclExprs(d, [&](ExprRef const& e) {
            bool ch = false;
            ExprRef r = formula(e, cx, ch);
            return ch ? r : e;
        });
    }

    void emitAxiom(DeclRef const& d, std::vector<DeclRef>& out) {
        ExprRef root = d->expr;
        if (root && root->kind == Expr::Kind::Quant &&
            !root->typeParams.empty()) {
            // Type-generic axiom: replicate it alongside a replicated
            // polymorphic function it constrains.
            Plan const* plan = nullptr;
            Expr const* callNode = nullptr;
            std::string callee;
            forEachExpr(root, [&](ExprRef const& e) {
                if (plan || e->kind != Expr::Kind::Call) return;
                auto it = plans.find(e->text);
                if (it != plans.end() && it->second.ruleD) {
                    plan = &it->second;
                    callNode = e.get();
                    callee = e->text;
                }
            });
            if (plan) {
                auto ta = info.callTypeArgs.find(callNode);
                std::vector<std::string> const* tps = nullptr;
                if (auto f = info.functions.find(callee);
                    f != info.functions.end())
                    tps = &f->second.decl->typeParams;
                if (ta == info.callTypeArgs.end() || !tps) {
                    fail(d->span, "cannot align a type-generic axiom with the "
                                  "variants of '" + callee + "'");
                    return;
                }
                std::set<std::string> pvars(root->typeParams.begin(),
                                            root->typeParams.end());
                for (auto const& v : plan->variants) {
                    sema::TypeSubst sub;
                    bool ok = true;
                    for (auto const& [name, ty] : v.tp) {
                        auto at = std::find(tps->begin(), tps->end(), name);
                        std::size_t i = std::size_t(at - tps->begin());
                        if (i >= ta->second.size() ||
                            !matchTy(ta->second[i], ty, pvars, sub)) {
                            ok = false;
                            break;
                        }
                    }
                    if (!ok) continue;
                    Ctx cx;
                    cx.tp = sub;
                    RV body = rewrite(root, cx);
                    if (body.width() != 1) {
                        fail(d->span, "a type-generic axiom expanded to "
                                      "several map variants");
                        return;
                    }
                    ExprRef ne = body.one();
                    if (ne->kind == Expr::Kind::Quant) {
                        auto keep = dropPinned(ne->typeParams, sub);
                        if (keep.size() != ne->typeParams.size())
                            ne = Expr::quant(ne->qkind, keep, ne->bound,
                                             ne->triggers, ne->attrs, ne->body,
                                             ne->span);
                    }
                    auto nd = Decl::make(Decl::Kind::AxiomDecl);
                    nd->attrs = d->attrs;
                    nd->expr = ne;
                    nd->synth = d->synth;
                    if (!d->nameHint.empty()) {
                        std::string suffix;
                        for (auto const& [name, ty] : sub) {
                            (void)name;
                            suffix += (suffix.empty() ? "" : "_") + tagOf(ty);
                        }
                        nd->nameHint = d->nameHint + "_" + suffix;
                    }
                    out.push_back(std::move(nd));
                }
                return;
            }
        }
        out.push_back(rewriteLeafDecl(d));
    }

    void emitFunction(DeclRef const& d, std::vector<DeclRef>& out) {
        auto pl = plans.find(d->name);
        if (pl == plans.end()) {
            out.push_back(rewriteLeafDecl(d));
            return;
        }
        Plan const& plan = pl->second;
        for (auto const& v : plan.variants) {
            Ctx cx;
            cx.tp = v.tp;
            for (auto const& [key, j] : v.axis) {
                GInfo const* gi = nullptr;
                for (auto const& ax : plan.axes)
                    if (ax.first == key) gi = ax.second;
                cx.axis.emplace(key, std::make_pair(gi, j));
            }
            auto nd = Decl::make(Decl::Kind::FunctionDecl);
            nd->attrs = d->attrs;
            nd->name = v.name;
            nd->typeParams = dropPinned(d->typeParams, v.tp);
            for (std::size_t i = 0; i < d->params.size(); ++i) {
                Param const& prm = d->params[i];
                std::string key = d->name + ".in" + std::to_string(i);
                auto ax = cx.axis.find(key);
                TypeRef ty = ax != cx.axis.end()
                                 ? ax->second.first
                                       ->members[std::size_t(ax->second.second)]
                                       .declType
                                 : pinType(prm.type, cx);
                nd->params.push_back({prm.name, ty, nullptr, prm.span});
            }
            nd->result = {d->result.name, pinType(d->result.type, cx), nullptr,
                          d->result.span};
            if (d->bodyExpr) {
                bool ch = false;
                nd->bodyExpr = single(d->bodyExpr, cx, ch);
            }
            out.push_back(std::move(nd));
        }
    }

    void emitProcedure(DeclRef const& d, std::vector<DeclRef>& out) {
        auto pl = plans.find(d->name);
        if (pl == plans.end()) {
            // No replication, but the modifies clause and the specs still
            // mention expanded items.
            Plan dummy;
            Variant v;
            v.name = d->name;
            out.push_back(procVariant(d, dummy, v, {}));
            return;
        }
        Plan const& plan = pl->second;
        for (auto const& v : plan.variants)
            out.push_back(procVariant(d, plan, v, v.tp));
    }

    DeclRef procVariant(DeclRef const& d, Plan const& plan, Variant const& v,
                        sema::TypeSubst const& tp) {
        Ctx cx;
        cx.tp = tp;
        for (auto const& [key, j] : v.axis) {
            GInfo const* gi = nullptr;
            for (auto const& ax : plan.axes)
                if (ax.first == key) gi = ax.second;
            cx.axis.emplace(key, std::make_pair(gi, j));
        }
        auto nd = Decl::make(d->kind);
        nd->attrs = d->attrs;
        nd->name = v.name;
        nd->typeParams = dropPinned(d->typeParams, tp);
        bool wch = false;
        auto doParam = [&](Param const& prm, std::string const& key) {
            auto ax = cx.axis.find(key);
            TypeRef ty = ax != cx.axis.end()
                             ? ax->second.first
                                   ->members[std::size_t(ax->second.second)]
                                   .declType
                             : pinType(prm.type, cx);
            ExprRef wh = prm.where ? formula(prm.where, cx, wch) : nullptr;
            return Param{prm.name, ty, wh, prm.span};
        };
        for (std::size_t i = 0; i < d->params.size(); ++i)
            nd->params.push_back(
                doParam(d->params[i], d->name + ".in" + std::to_string(i)));
        for (std::size_t i = 0; i < d->outs.size(); ++i)
            nd->outs.push_back(
                doParam(d->outs[i], d->name + ".out" + std::to_string(i)));
        for (auto const& cl : d->preCl) {
            bpl::SpecClause nc = cl;
            bool ch = false;
            nc.expr = formula(cl.expr, cx, ch);
            nd->preCl.push_back(std::move(nc));
        }
        for (auto const& cl : d->postCl) {
            bpl::SpecClause nc = cl;
            bool ch = false;
            nc.expr = formula(cl.expr, cx, ch);
            nd->postCl.push_back(std::move(nc));
        }
        for (auto const& m : d->modifies) {
            bool ch = false;
            for (auto& n : expandName(m, cx, ch)) {
                nd->modifies.push_back(n);
                nd->modifiesSpans.push_back(d->span);
            }
        }
        if (d->kind == Decl::Kind::Implementation) {
            std::vector<std::pair<std::string, bool>> saved;
            std::vector<ItemExp> savedVals;
            for (auto const& lv : d->locals) {
                std::string key = d->name + ".local." + lv.name;
                auto const* gi = groupOf(key);
                if (!gi) {
                    nd->locals.push_back(
                        {lv.name, pinType(lv.type, cx),
                         lv.where ? formula(lv.where, cx, wch) : nullptr,
                         lv.span});
                    continue;
                }
                if (lv.where) {
                    fail(lv.span, "a where clause on a polymorphic map "
                                  "variable is not supported");
                    continue;
                }
                auto old = expanded.find(key);
                saved.emplace_back(key, old != expanded.end());
                savedVals.push_back(old != expanded.end() ? old->second
                                                          : ItemExp{});
                ItemExp ex;
                ex.gi = gi;
                for (auto const& mem : gi->members) {
                    std::string vn = mint(lv.name + "_" + mem.tag);
                    ex.names.push_back(vn);
                    nd->locals.push_back({vn, mem.declType, nullptr, lv.span});
                }
                expanded[key] = std::move(ex);
            }
            for (auto const& st : d->body) rewriteStmt(st, cx, nd->body);
            nd->inlineBody = d->inlineBody;
            for (std::size_t i = saved.size(); i > 0; --i) {
                auto const& [key, had] = saved[i - 1];
                if (had)
                    expanded[key] = savedVals[i - 1];
                else
                    expanded.erase(key);
            }
        }
        return nd;
    }

    void emitImplementation(DeclRef const& d, std::vector<DeclRef>& out) {
        auto pl = plans.find(d->name);
        if (pl == plans.end()) {
            // Locals of polymorphic map type still need expansion.
            auto proc = info.procedures.find(d->name);
            Plan dummy;
            Variant v;
            v.name = d->name;
            (void)proc;
            out.push_back(procVariant(d, dummy, v, {}));
            return;
        }
        Plan const& plan = pl->second;
        DeclRef proc;
        if (auto it = info.procedures.find(d->name); it != info.procedures.end())
            proc = it->second.decl;
        for (auto const& v : plan.variants) {
            sema::TypeSubst tp;
            if (proc)
                for (std::size_t i = 0;
                     i < proc->typeParams.size() && i < d->typeParams.size();
                     ++i) {
                    auto it = v.tp.find(proc->typeParams[i]);
                    if (it != v.tp.end())
                        tp.emplace(d->typeParams[i], it->second);
                }
            else
                tp = v.tp;
            out.push_back(procVariant(d, plan, v, tp));
        }
    }

    std::optional<bpl::Program> run() {
        act = computeActualTypes(p, info);
        bpl::Program out;
        if (act.groups.empty()) {
            out.decls = p.decls;
            return out;
        }
        taken = declaredNames(p);
        setupGroups();
        if (failed) return std::nullopt;
        setupItems();
        setupPlans();
        if (failed) return std::nullopt;
        // Groups without a synonym have no declaration site; their fresh
        // types and variants go first.
        for (auto const& g : act.groups) {
            if (!g.synonym.empty()) continue;
            auto const& gi = groups.at(g.key);
            emitFreshTypes(gi, out.decls);
        }
        for (auto const& d : p.decls) {
            switch (d->kind) {
            case Decl::Kind::TypeDecl: {
                auto git = groups.find(d->name);
                if (git != groups.end() && !git->second.g->synonym.empty()) {
                    emitFreshTypes(git->second, out.decls);
                    emitMemberTypes(git->second, out.decls);
                } else {
                    out.decls.push_back(d);
                }
                break;
            }
            case Decl::Kind::ConstDecl: emitConst(d, out.decls); break;
            case Decl::Kind::VarDecl: emitVar(d, out.decls); break;
            case Decl::Kind::AxiomDecl: emitAxiom(d, out.decls); break;
            case Decl::Kind::FunctionDecl: emitFunction(d, out.decls); break;
            case Decl::Kind::ProcedureDecl: emitProcedure(d, out.decls); break;
            case Decl::Kind::Implementation:
                emitImplementation(d, out.decls);
                break;
            }
            if (failed) return std::nullopt;
        }
        if (failed) return std::nullopt;
        return out;
    }
};

} // namespace

std::optional<bpl::Program> monomorphizeMaps(bpl::Program const& p,
                                             sema::TypeInfo const& info,
                                             int cap, DiagnosticEngine& diags) {
    Mono m(p, info, cap, diags);
    return m.run();
}

} // namespace b2y::desugar
