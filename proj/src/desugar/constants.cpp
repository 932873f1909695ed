#include "b2y/desugar/desugar.hpp"

#include <map>

namespace b2y::desugar {

using bpl::BinOp;
using bpl::BoundVar;
using bpl::Decl;
using bpl::DeclRef;
using bpl::Expr;
using bpl::ExprRef;
using bpl::Type;
using bpl::TypeRef;

namespace {

ExprRef id(std::string const& n) { return Expr::ident(n); }

ExprRef below(std::string const& l, std::string const& r) {
    return Expr::binary(BinOp::Subtype, id(l), id(r));
}

ExprRef orOf(std::vector<ExprRef> disjuncts) {
    ExprRef acc;
    for (auto& d : disjuncts)
        acc = acc ? Expr::binary(BinOp::Or, acc, d) : d;
    return acc;
}

DeclRef makeAxiom(ExprRef e, Decl::Synth synth, std::string nameHint = "") {
    auto d = Decl::make(Decl::Kind::AxiomDecl);
    d->expr = std::move(e);
    d->synth = synth;
    d->nameHint = std::move(nameHint);
    return d;
}

ExprRef quantOver(std::string const& var, TypeRef const& t, ExprRef body) {
    return Expr::quant(Expr::QKind::Forall, {}, {BoundVar{var, t, {}}}, {}, {},
                       std::move(body));
}

// Detects a cycle in the child -> parent successor relation.
bool hasOrderCycle(bpl::Program const& p, DiagnosticEngine& diags) {
    std::map<std::string, std::vector<std::string>> succ;
    std::map<std::string, SourceSpan> spans;
    for (auto const& d : p.decls) {
        if (d->kind != Decl::Kind::ConstDecl || !d->order.present) continue;
        for (auto const& n : d->names) {
            spans.emplace(n, d->order.span);
            for (auto const& par : d->order.parents)
                succ[n].push_back(par.name);
        }
    }
    std::map<std::string, int> state;  // 0 unseen, 1 on stack, 2 done
    std::function<bool(std::string const&)> visit =
        [&](std::string const& n) -> bool {
        int& st = state[n];
        if (st == 1) return true;
        if (st == 2) return false;
        st = 1;
        auto it = succ.find(n);
        if (it != succ.end())
            for (auto const& m : it->second)
                if (visit(m)) {
                    st = 2;
                    return true;
                }
        st = 2;
        return false;
    };
    for (auto const& [n, _] : succ)
        if (state[n] == 0 && visit(n)) {
            diags.error(spans[n],
                        "ordering specification forms a cycle involving '" +
                            n + "'");
            return true;
        }
    return false;
}

} // namespace

std::optional<bpl::Program> expandConstantConstraints(
    bpl::Program const& p, sema::TypeInfo const& info,
    DiagnosticEngine& diags) {
    if (hasOrderCycle(p, diags)) return std::nullopt;

    bool anyOrderSpec = false;
    bool anyLegacy = false;
    bool trioPresent = false;
    for (auto const& d : p.decls) {
        if (d->kind == Decl::Kind::ConstDecl && d->order.present) {
            anyOrderSpec = true;
            if (d->order.legacy) anyLegacy = true;
        }
        if (d->kind == Decl::Kind::AxiomDecl &&
            d->synth == Decl::Synth::OrderGeneric)
            trioPresent = true;
    }
    bool anySubtypeExpr = false;
    forEachExpr(p, [&](ExprRef const& e) {
        if (e->kind == Expr::Kind::Bin && e->ops[0] == BinOp::Subtype)
            anySubtypeExpr = true;
    });
    bool needTrio = (anyOrderSpec || anySubtypeExpr) && !trioPresent;

    // Index of the first declaration that makes the order relation relevant;
    // the generic axioms go right before it.
    std::size_t trioAt = p.decls.size();
    if (needTrio)
        for (std::size_t i = 0; i < p.decls.size(); ++i) {
            auto const& d = p.decls[i];
            bool triggers = d->kind == Decl::Kind::ConstDecl &&
                            d->order.present;
            if (!triggers) {
                forEachExpr(
                    bpl::Program{{d}}, [&](ExprRef const& e) {
                        if (e->kind == Expr::Kind::Bin &&
                            e->ops[0] == BinOp::Subtype)
                            triggers = true;
                    });
            }
            if (triggers) {
                trioAt = i;
                break;
            }
        }

    if (anyLegacy)
        diags.note({}, "legacy '<:' ordering syntax accepted as 'extends'");

    FreshNames names(p);
    std::string x = names.fresh("x");
    std::string y = names.fresh("y");
    std::string z = names.fresh("z");
    std::string tv = names.fresh("a");

    // All declared children of each constant, in program order. A complete
    // clause closes the predecessor set over this list.
    std::map<std::string, std::vector<std::string>> childrenOf;
    for (auto const& d : p.decls) {
        if (d->kind != Decl::Kind::ConstDecl || !d->order.present) continue;
        for (auto const& n : d->names)
            for (auto const& par : d->order.parents)
                childrenOf[par.name].push_back(n);
    }

    bpl::Program out;
    std::map<std::string, std::vector<std::string>> uniqueSoFar;  // by type
    std::map<std::string, std::vector<std::string>> uniqueChildren;  // by parent

    for (std::size_t i = 0; i < p.decls.size(); ++i) {
        if (needTrio && i == trioAt) {
            TypeRef av = Type::ctor(tv);  // resolves to the quantifier's type parameter
            out.decls.push_back(makeAxiom(
                Expr::quant(Expr::QKind::Forall, {tv}, {BoundVar{x, av, {}}}, {},
                            {}, below(x, x)),
                Decl::Synth::OrderGeneric, "ReflexivePO"));
            out.decls.push_back(makeAxiom(
                Expr::quant(
                    Expr::QKind::Forall, {tv},
                    {BoundVar{x, av, {}}, BoundVar{y, av, {}}}, {}, {},
                    Expr::binary(
                        BinOp::Imp,
                        Expr::binary(BinOp::And, below(x, y), below(y, x)),
                        Expr::binary(BinOp::Eq, id(x), id(y)))),
                Decl::Synth::OrderGeneric, "AntisymmetricPO"));
            out.decls.push_back(makeAxiom(
                Expr::quant(
                    Expr::QKind::Forall, {tv},
                    {BoundVar{x, av, {}}, BoundVar{y, av, {}},
                     BoundVar{z, av, {}}},
                    {}, {},
                    Expr::binary(
                        BinOp::Imp,
                        Expr::binary(BinOp::And, below(x, y), below(y, z)),
                        below(x, z))),
                Decl::Synth::OrderGeneric, "TransitivePO"));
        }
        auto const& d = p.decls[i];
        if (d->kind != Decl::Kind::ConstDecl ||
            (!d->unique && !d->order.present)) {
            out.decls.push_back(d);
            continue;
        }

        // The constraints live on in axioms; the declaration itself becomes
        // a plain constant.
        auto plain = std::make_shared<Decl>(*d);
        plain->unique = false;
        plain->order = bpl::OrderSpec{};
        out.decls.push_back(plain);

        if (d->unique) {
            std::string key =
                sema::typeKey(info.normalize(d->type));
            auto& seen = uniqueSoFar[key];
            for (auto const& n : d->names) {
                for (auto const& e : seen)
                    out.decls.push_back(makeAxiom(
                        Expr::binary(BinOp::Neq, id(e), id(n)),
                        Decl::Synth::Unique, "unique_" + e + "_" + n));
                seen.push_back(n);
            }
        }

        if (d->order.present) {
            std::vector<DeclRef> disjointness;
            for (auto const& n : d->names) {
                std::vector<ExprRef> conj;
                for (auto const& par : d->order.parents)
                    conj.push_back(below(n, par.name));
                if (d->order.parents.empty()) {
                    // No successors at all: nothing is above n.
                    out.decls.push_back(makeAxiom(
                        quantOver(x, d->type,
                                  Expr::unary(bpl::UnOp::Not,
                                              below(n, x))),
                        Decl::Synth::OrderDag));
                } else if (d->order.complete) {
                    // The listed predecessors of each parent are all of them.
                    for (auto const& par : d->order.parents) {
                        std::vector<ExprRef> dis{
                            Expr::binary(BinOp::Eq, id(par.name), id(x))};
                        for (auto const& ch : childrenOf[par.name])
                            dis.push_back(below(x, ch));
                        conj.push_back(quantOver(
                            x, d->type,
                            Expr::binary(BinOp::Imp, below(x, par.name),
                                         orOf(std::move(dis)))));
                    }
                    out.decls.push_back(makeAxiom(Expr::andOf(std::move(conj)),
                                                  Decl::Synth::OrderDag));
                } else {
                    // Plain clause: the listed parents are the only direct
                    // successors of n.
                    std::vector<ExprRef> dis{
                        Expr::binary(BinOp::Eq, id(n), id(x))};
                    for (auto const& par : d->order.parents)
                        dis.push_back(below(par.name, x));
                    conj.push_back(quantOver(
                        x, d->type,
                        Expr::binary(BinOp::Imp, below(n, x),
                                     orOf(std::move(dis)))));
                    out.decls.push_back(makeAxiom(Expr::andOf(std::move(conj)),
                                                  Decl::Synth::OrderDag));
                }
                // Subgraphs hanging off a parent marked unique are disjoint
                // pairwise; the earlier-declared child's direction first.
                for (auto const& par : d->order.parents) {
                    if (!par.unique) continue;
                    auto& seen = uniqueChildren[par.name];
                    for (auto const& e : seen) {
                        disjointness.push_back(makeAxiom(
                            quantOver(
                                x, d->type,
                                Expr::binary(
                                    BinOp::Imp, below(x, e),
                                    Expr::unary(bpl::UnOp::Not,
                                                below(x, n)))),
                            Decl::Synth::OrderDag));
                        disjointness.push_back(makeAxiom(
                            quantOver(
                                x, d->type,
                                Expr::binary(
                                    BinOp::Imp, below(x, n),
                                    Expr::unary(bpl::UnOp::Not,
                                                below(x, e)))),
                            Decl::Synth::OrderDag));
                    }
                    seen.push_back(n);
                }
            }
            for (auto& ax : disjointness) out.decls.push_back(std::move(ax));
        }
    }
    return out;
}

bool rejectTypeQuantifiers(bpl::Program const& p, DiagnosticEngine& diags) {
    bool ok = true;
    for (auto const& d : p.decls) {
        if (d->synth != Decl::Synth::None) continue;
        forEachExpr(bpl::Program{{d}}, [&](ExprRef const& e) {
            if (e->kind == Expr::Kind::Quant && !e->typeParams.empty()) {
                diags.error(e->span,
                            "quantification over type parameters has no "
                            "translation and is not supported");
                ok = false;
            }
        });
    }
    return ok;
}

} // namespace b2y::desugar
