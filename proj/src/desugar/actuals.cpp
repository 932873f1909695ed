#include "b2y/desugar/actuals.hpp"

#include "b2y/bpl/printer.hpp"
#include "b2y/desugar/desugar.hpp"
#include "b2y/sema/types.hpp"

#include <deque>
#include <set>

namespace b2y::desugar {

using bpl::Decl;
using bpl::DeclRef;
using bpl::Expr;
using bpl::ExprRef;
using bpl::Stmt;
using bpl::StmtRef;
using bpl::TypeRef;

namespace {

bool isPolyMap(TypeRef const& t) {
    return t && t->kind == bpl::Type::Kind::Map && !t->typeParams.empty();
}

TypeRef renameVars(TypeRef const& t, std::map<std::string, std::string>& ren,
                   int& next) {
    if (!t) return t;
    switch (t->kind) {
    case bpl::Type::Kind::Var: {
        auto it = ren.find(t->name);
        if (it == ren.end())
            it = ren.emplace(t->name, "v" + std::to_string(next++)).first;
        return bpl::Type::var(it->second);
    }
    case bpl::Type::Kind::Ctor: {
        std::vector<TypeRef> args;
        for (auto const& a : t->ctorArgs)
            args.push_back(renameVars(a, ren, next));
        return bpl::Type::ctor(t->name, std::move(args));
    }
    case bpl::Type::Kind::Map: {
        std::vector<TypeRef> dom;
        for (auto const& d : t->domain) dom.push_back(renameVars(d, ren, next));
        return bpl::Type::map(t->typeParams, std::move(dom),
                              renameVars(t->codomain, ren, next));
    }
    default:
        return t;
    }
}

void collectVars(TypeRef const& t, std::set<std::string>& vs) {
    if (!t) return;
    for (auto const& v : sema::freeTypeVars(t)) vs.insert(v);
}

struct Analyzer {
    bpl::Program const& p;
    sema::TypeInfo const& info;
    ActualTypes out;
    std::map<std::string, std::size_t> groupIndex;
    std::map<std::string, std::set<std::string>> itemSeen;
    std::map<std::size_t, std::set<std::string>> rawSeen;
    std::set<Expr const*> consumed;
    std::vector<std::pair<std::string, std::string>> edges;

    Analyzer(bpl::Program const& prog, sema::TypeInfo const& ti)
        : p(prog), info(ti) {}

    std::string groupKeyFor(TypeRef const& declared) {
        return groupKeyForType(declared, info);
    }

    std::string ensureGroup(TypeRef const& declared) {
        std::string key = groupKeyFor(declared);
        if (key.empty()) return key;
        if (!groupIndex.count(key)) {
            MapGroup g;
            g.key = key;
            if (declared->kind == bpl::Type::Kind::Ctor) g.synonym = key;
            g.definition = info.normalize(declared);
            groupIndex.emplace(key, out.groups.size());
            out.groups.push_back(std::move(g));
        }
        return key;
    }

    void registerItem(std::string const& key, TypeRef const& declared) {
        std::string gk = ensureGroup(declared);
        if (gk.empty()) return;
        if (out.itemGroup.emplace(key, gk).second) {
            out.itemOrder.push_back(key);
            out.items[key];
        }
    }

    void registerAll() {
        for (auto const& d : p.decls) {
            switch (d->kind) {
            case Decl::Kind::TypeDecl:
                if (d->synonym && d->typeParams.empty())
                    ensureGroup(bpl::Type::ctor(d->name));
                break;
            case Decl::Kind::ConstDecl:
                for (auto const& n : d->names) registerItem(n, d->type);
                break;
            case Decl::Kind::VarDecl:
                for (auto const& v : d->vars) registerItem(v.name, v.type);
                break;
            case Decl::Kind::FunctionDecl:
                for (std::size_t i = 0; i < d->params.size(); ++i)
                    registerItem(d->name + ".in" + std::to_string(i),
                                 d->params[i].type);
                break;
            case Decl::Kind::ProcedureDecl:
            case Decl::Kind::Implementation:
                for (std::size_t i = 0; i < d->params.size(); ++i)
                    registerItem(d->name + ".in" + std::to_string(i),
                                 d->params[i].type);
                for (std::size_t i = 0; i < d->outs.size(); ++i)
                    registerItem(d->name + ".out" + std::to_string(i),
                                 d->outs[i].type);
                for (auto const& l : d->locals)
                    registerItem(d->name + ".local." + l.name, l.type);
                break;
            default:
                break;
            }
        }
        forEachExpr(p, [&](ExprRef const& e) {
            if (e->kind == Expr::Kind::Quant || e->kind == Expr::Kind::Lambda)
                for (auto const& b : e->bound)
                    registerItem("<bound>." + b.name, b.type);
        });
    }

    bool registered(std::string const& key) const {
        return out.itemGroup.count(key) != 0;
    }

    // Item key of an identifier occurrence, or "" when it does not resolve
    // to a registered polymorphic-map item.
    std::string itemOf(ExprRef const& e) const {
        if (e->kind != Expr::Kind::Ident) return "";
        auto it = info.refs.find(e.get());
        if (it == info.refs.end()) return "";
        std::string key = itemKeyOf(it->second);
        return registered(key) ? key : "";
    }

    void contribute(std::string const& key, std::vector<TypeRef> args,
                    DeclRef const& within) {
        MapInstance inst;
        inst.args = std::move(args);
        std::set<std::string> vs;
        for (auto const& a : inst.args) collectVars(a, vs);
        inst.concrete = vs.empty();
        if (!inst.concrete && within && !within->typeParams.empty()) {
            bool owned = true;
            for (auto const& v : vs)
                if (std::find(within->typeParams.begin(),
                              within->typeParams.end(),
                              v) == within->typeParams.end())
                    owned = false;
            if (owned) inst.varOwner = within->name;
        }
        std::string canon = instanceKey(inst.args);
        // Raw parametric shapes are kept per owner even when an equivalent
        // instance was already seen on another item.
        if (!inst.concrete) {
            std::size_t g = groupIndex.at(out.itemGroup.at(key));
            if (rawSeen[g].insert(inst.varOwner + "|" + canon).second)
                out.groups[g].rawParametrics.push_back(inst);
        }
        if (itemSeen[key].insert(canon).second)
            out.items[key].push_back(std::move(inst));
    }

    void contributeSelf(std::string const& key) {
        auto const& def = out.groups[groupIndex.at(out.itemGroup.at(key))]
                              .definition;
        std::vector<TypeRef> args;
        for (auto const& tp : def->typeParams)
            args.push_back(bpl::Type::var(tp));
        MapInstance inst;
        inst.args = std::move(args);
        std::string canon = instanceKey(inst.args);
        if (itemSeen[key].insert(canon).second)
            out.items[key].push_back(std::move(inst));
    }

    // First expression pass: claim occurrences covered by the select,
    // update, and function-argument rows and record their contributions.
    void scanExpr(ExprRef const& e, DeclRef const& d) {
        forEachExpr(e, [&](ExprRef const& n) {
            switch (n->kind) {
            case Expr::Kind::Select:
            case Expr::Kind::Update: {
                std::string key = itemOf(n->a);
                if (key.empty()) break;
                consumed.insert(n->a.get());
                auto it = info.mapInst.find(n.get());
                if (it != info.mapInst.end())
                    contribute(key, it->second, d);
                break;
            }
            case Expr::Kind::Call: {
                auto fit = info.functions.find(n->text);
                if (fit == info.functions.end()) break;
                auto const& sig = fit->second;
                for (std::size_t i = 0;
                     i < n->items.size() && i < sig.params.size(); ++i) {
                    std::string formal =
                        n->text + ".in" + std::to_string(i);
                    if (!registered(formal)) continue;
                    std::string actual = itemOf(n->items[i]);
                    if (actual.empty()) continue;
                    consumed.insert(n->items[i].get());
                    edges.emplace_back(actual, formal);
                }
                break;
            }
            default:
                break;
            }
        });
    }

    void scanStmt(StmtRef const& s, DeclRef const& d) {
        switch (s->kind) {
        case Stmt::Kind::Assign: {
            auto syms = info.stmtNameRefs.find(s.get());
            auto aInst = info.assignInst.find(s.get());
            for (std::size_t i = 0; i < s->lhs.size(); ++i) {
                if (syms == info.stmtNameRefs.end() ||
                    i >= syms->second.size())
                    break;
                std::string key = itemKeyOf(syms->second[i]);
                if (!registered(key)) continue;
                if (!s->lhs[i].indexGroups.empty()) {
                    if (aInst != info.assignInst.end() &&
                        i < aInst->second.size() &&
                        !aInst->second[i].empty() &&
                        !aInst->second[i][0].empty())
                        contribute(key, aInst->second[i][0], d);
                } else if (i < s->rhs.size()) {
                    std::string rhs = itemOf(s->rhs[i]);
                    if (!rhs.empty()) {
                        consumed.insert(s->rhs[i].get());
                        edges.emplace_back(rhs, key);
                        edges.emplace_back(key, rhs);
                    }
                }
            }
            break;
        }
        case Stmt::Kind::Call:
        case Stmt::Kind::CallForall: {
            auto pit = info.procedures.find(s->callee);
            if (pit == info.procedures.end()) break;
            auto const& sig = pit->second;
            for (std::size_t i = 0;
                 i < s->args.size() && i < sig.ins.size(); ++i) {
                if (!s->args[i]) continue;
                std::string formal =
                    s->callee + ".in" + std::to_string(i);
                if (!registered(formal)) continue;
                std::string actual = itemOf(s->args[i]);
                if (actual.empty()) continue;
                consumed.insert(s->args[i].get());
                edges.emplace_back(actual, formal);
            }
            auto syms = info.stmtNameRefs.find(s.get());
            if (syms != info.stmtNameRefs.end())
                for (std::size_t i = 0; i < s->names.size() &&
                                        i < syms->second.size();
                     ++i) {
                    std::string formal =
                        s->callee + ".out" + std::to_string(i);
                    if (!registered(formal)) continue;
                    std::string actual = itemKeyOf(syms->second[i]);
                    if (registered(actual))
                        edges.emplace_back(actual, formal);
                }
            break;
        }
        default:
            break; // havoc contributes nothing
        }
    }

    void withDeclExprs(DeclRef const& d,
                       std::function<void(ExprRef const&)> const& fn) {
        if (d->expr) fn(d->expr);
        if (d->bodyExpr) fn(d->bodyExpr);
        for (auto const& v : d->vars)
            if (v.where) fn(v.where);
        for (auto const& pr : d->params)
            if (pr.where) fn(pr.where);
        for (auto const& pr : d->outs)
            if (pr.where) fn(pr.where);
        for (auto const& pr : d->locals)
            if (pr.where) fn(pr.where);
        for (auto const& c : d->preCl) fn(c.expr);
        for (auto const& c : d->postCl) fn(c.expr);
    }

    void withBodyStmts(std::vector<StmtRef> const& body,
                       std::function<void(StmtRef const&)> const& fn) {
        for (auto const& s : body) {
            fn(s);
            withBodyStmts(s->body1, fn);
            withBodyStmts(s->body2, fn);
        }
    }

    void scan() {
        for (auto const& d : p.decls) {
            withDeclExprs(d, [&](ExprRef const& e) { scanExpr(e, d); });
            withBodyStmts(d->body, [&](StmtRef const& s) {
                scanStmt(s, d);
                if (s->expr) scanExpr(s->expr, d);
                for (auto const& r : s->rhs) scanExpr(r, d);
                for (auto const& a : s->args)
                    if (a) scanExpr(a, d);
                for (auto const& t : s->lhs)
                    for (auto const& g : t.indexGroups)
                        for (auto const& ix : g) scanExpr(ix, d);
                for (auto const& inv : s->invariants) scanExpr(inv.expr, d);
            });
        }
        // Remaining bare reads take the map's own parametric shape.
        for (auto const& d : p.decls) {
            auto reads = [&](ExprRef const& root) {
                forEachExpr(root, [&](ExprRef const& n) {
                    if (n->kind != Expr::Kind::Ident ||
                        consumed.count(n.get()))
                        return;
                    std::string key = itemOf(n);
                    if (!key.empty()) contributeSelf(key);
                });
            };
            withDeclExprs(d, reads);
            withBodyStmts(d->body, [&](StmtRef const& s) {
                if (s->expr) reads(s->expr);
                for (auto const& r : s->rhs) reads(r);
                for (auto const& a : s->args)
                    if (a) reads(a);
                for (auto const& t : s->lhs)
                    for (auto const& g : t.indexGroups)
                        for (auto const& ix : g) reads(ix);
                for (auto const& inv : s->invariants) reads(inv.expr);
            });
        }
    }

    void close() {
        std::map<std::string, std::vector<std::string>> succ;
        for (auto const& [from, to] : edges) succ[from].push_back(to);
        std::deque<std::string> work;
        for (auto const& k : out.itemOrder) work.push_back(k);
        while (!work.empty()) {
            std::string k = work.front();
            work.pop_front();
            auto sit = succ.find(k);
            if (sit == succ.end()) continue;
            for (auto const& t : sit->second) {
                bool grew = false;
                for (auto const& inst : out.items[k]) {
                    if (itemSeen[t].insert(instanceKey(inst.args)).second) {
                        out.items[t].push_back(inst);
                        grew = true;
                    }
                }
                if (grew) work.push_back(t);
            }
        }
    }

    void fillGroups() {
        std::vector<std::set<std::string>> seen(out.groups.size());
        for (auto const& key : out.itemOrder) {
            std::size_t g = groupIndex.at(out.itemGroup.at(key));
            for (auto const& inst : out.items.at(key)) {
                std::string canon = instanceKey(inst.args);
                if (seen[g].insert(canon).second)
                    out.groups[g].types.push_back(inst);
            }
        }
    }

    ActualTypes run() {
        registerAll();
        scan();
        close();
        fillGroups();
        return std::move(out);
    }
};

} // namespace

std::string groupKeyForType(bpl::TypeRef const& declared,
                            sema::TypeInfo const& info) {
    if (!declared) return "";
    TypeRef norm = info.normalize(declared);
    if (!isPolyMap(norm)) return "";
    if (declared->kind == bpl::Type::Kind::Ctor && declared->ctorArgs.empty() &&
        info.synonyms.count(declared->name))
        return declared->name;
    return bpl::typeToString(norm);
}

std::string instanceKey(std::vector<bpl::TypeRef> const& args) {
    std::map<std::string, std::string> ren;
    int next = 0;
    std::string key;
    for (auto const& a : args) {
        if (!key.empty()) key += ",";
        key += bpl::typeToString(renameVars(a, ren, next));
    }
    return key;
}

std::string itemKeyOf(sema::Symbol const& sym) {
    using sema::RefKind;
    switch (sym.kind) {
    case RefKind::Constant:
    case RefKind::GlobalVar:
        return sym.name;
    case RefKind::Bound:
        return "<bound>." + sym.name;
    case RefKind::InParam:
    case RefKind::OutParam: {
        if (!sym.owner) return "<bound>." + sym.name;
        auto const& list = sym.kind == RefKind::InParam ? sym.owner->params
                                                        : sym.owner->outs;
        for (std::size_t i = 0; i < list.size(); ++i)
            if (list[i].name == sym.name)
                return sym.owner->name +
                       (sym.kind == RefKind::InParam ? ".in" : ".out") +
                       std::to_string(i);
        return sym.owner->name + "." + sym.name;
    }
    case RefKind::Local:
        if (!sym.owner) return "<bound>." + sym.name;
        return sym.owner->name + ".local." + sym.name;
    }
    return sym.name;
}

MapGroup const* ActualTypes::group(std::string const& key) const {
    for (auto const& g : groups)
        if (g.key == key) return &g;
    return nullptr;
}

std::string ActualTypes::dump() const {
    std::string s;
    for (auto const& key : itemOrder) {
        auto const* g = group(itemGroup.at(key));
        s += key + " : {";
        auto const& set = items.at(key);
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (i) s += ", ";
            sema::TypeSubst sub;
            for (std::size_t k = 0; k < g->definition->typeParams.size() &&
                                    k < set[i].args.size();
                 ++k)
                sub.emplace(g->definition->typeParams[k], set[i].args[k]);
            auto inst = bpl::Type::map({}, g->definition->domain,
                                       g->definition->codomain);
            s += bpl::typeToString(sema::substType(inst, sub));
        }
        s += "}\n";
    }
    return s;
}

ActualTypes computeActualTypes(bpl::Program const& p,
                               sema::TypeInfo const& info) {
    return Analyzer(p, info).run();
}

} // namespace b2y::desugar
