#include "b2y/desugar/desugar.hpp"

#include <algorithm>
#include <map>

namespace b2y::desugar {

using bpl::Decl;
using bpl::DeclRef;
using bpl::Expr;
using bpl::ExprRef;
using bpl::Stmt;
using bpl::StmtRef;

namespace {

// One CFG node: a linear run of statements with an optional label, edges
// given by the trailing goto. Index 0 is the entry and carries a virtual
// in-edge, so it is never absorbed as a merge target.
struct Block {
    std::string label;
    SourceSpan span;
    std::vector<StmtRef> stmts;
    std::vector<int> succs;
    bool alive = true;
};

struct Cfg {
    std::vector<Block> blocks;

    std::vector<int> insOf(int target) const {
        std::vector<int> ins;
        for (int i = 0; i < (int)blocks.size(); ++i) {
            if (!blocks[i].alive) continue;
            for (int s : blocks[i].succs)
                if (s == target) {
                    ins.push_back(i);
                    break;
                }
        }
        return ins;
    }
};

void collectGotos(StmtRef const& s, std::vector<SourceSpan>& out) {
    if (s->kind == Stmt::Kind::Goto) out.push_back(s->span);
    for (auto const& c : s->body1) collectGotos(c, out);
    for (auto const& c : s->body2) collectGotos(c, out);
}

bool nestedJumpOrLabel(StmtRef const& s) {
    for (auto const& c : s->body1) {
        if (c->kind == Stmt::Kind::Goto || c->kind == Stmt::Kind::Label ||
            nestedJumpOrLabel(c))
            return true;
    }
    for (auto const& c : s->body2) {
        if (c->kind == Stmt::Kind::Goto || c->kind == Stmt::Kind::Label ||
            nestedJumpOrLabel(c))
            return true;
    }
    return false;
}

// Splits a top-level body into simple blocks. Fails when a jump or label
// hides inside structured statements or a goto is not last in its block.
std::optional<Cfg> buildCfg(std::vector<StmtRef> const& body) {
    for (auto const& s : body)
        if (nestedJumpOrLabel(s)) return std::nullopt;

    Cfg g;
    g.blocks.emplace_back(); // entry
    std::map<std::string, int> index;
    std::vector<std::vector<std::string>> targets(1);
    std::vector<bool> fallsThrough(1, true);
    for (auto const& s : body) {
        if (s->kind == Stmt::Kind::Label) {
            targets.emplace_back();
            fallsThrough.push_back(true);
            Block b;
            b.label = s->label;
            b.span = s->span;
            index[s->label] = (int)g.blocks.size();
            g.blocks.push_back(std::move(b));
            continue;
        }
        Block& cur = g.blocks.back();
        // a goto must be the last statement of its block
        if (!fallsThrough.back()) return std::nullopt;
        if (s->kind == Stmt::Kind::Goto) {
            targets.back() = s->names;
            fallsThrough.back() = false;
            continue;
        }
        cur.stmts.push_back(s);
    }
    // implicit fallthrough into the next label becomes an explicit edge
    for (std::size_t i = 0; i < g.blocks.size(); ++i) {
        if (fallsThrough[i]) {
            bool endsReturn = !g.blocks[i].stmts.empty() &&
                              g.blocks[i].stmts.back()->kind ==
                                  Stmt::Kind::Return;
            if (!endsReturn && i + 1 < g.blocks.size())
                targets[i] = {g.blocks[i + 1].label};
        }
        for (auto const& l : targets[i]) {
            int t = index.at(l);
            auto& ss = g.blocks[i].succs;
            if (std::find(ss.begin(), ss.end(), t) == ss.end())
                ss.push_back(t);
        }
    }
    return g;
}

bool structurallyNegated(ExprRef const& guard, ExprRef const& candidate) {
    return bpl::exprEqual(candidate,
                          Expr::unary(bpl::UnOp::Not, guard)) ||
           bpl::exprEqual(guard,
                          Expr::unary(bpl::UnOp::Not, candidate));
}

bool onlyAssertAssume(std::vector<StmtRef> const& stmts) {
    for (auto const& s : stmts)
        if (s->kind != Stmt::Kind::Assert && s->kind != Stmt::Kind::Assume)
            return false;
    return true;
}

bool singleIn(Cfg const& g, int node, int from) {
    if (node == 0) return false; // entry's virtual in-edge
    auto ins = g.insOf(node);
    return ins.size() == 1 && ins[0] == from;
}

// head: only asserts/assumes, two successors; body: assume g then B, back
// edge only; end: assume !g first, entered only from head. The head becomes
// a while whose invariant list mirrors the assert/assume prefix.
bool tryLoop(Cfg& g) {
    for (int h = 0; h < (int)g.blocks.size(); ++h) {
        Block& hb = g.blocks[h];
        if (!hb.alive || hb.succs.size() != 2) continue;
        if (!onlyAssertAssume(hb.stmts)) continue;
        for (int pick = 0; pick < 2; ++pick) {
            int bi = hb.succs[pick];
            int ei = hb.succs[1 - pick];
            if (bi == ei || bi == h || ei == h) continue;
            Block& bb = g.blocks[bi];
            Block& eb = g.blocks[ei];
            if (!singleIn(g, bi, h) || !singleIn(g, ei, h)) continue;
            if (bb.succs != std::vector<int>{h}) continue;
            if (bb.stmts.empty() ||
                bb.stmts.front()->kind != Stmt::Kind::Assume)
                continue;
            if (eb.stmts.empty() ||
                eb.stmts.front()->kind != Stmt::Kind::Assume)
                continue;
            ExprRef guard = bb.stmts.front()->expr;
            if (!structurallyNegated(guard, eb.stmts.front()->expr))
                continue;
            std::vector<bpl::Invariant> invs;
            for (auto const& s : hb.stmts)
                invs.push_back({s->kind == Stmt::Kind::Assume, s->expr,
                                s->attrs, s->span});
            std::vector<StmtRef> loopBody(bb.stmts.begin() + 1,
                                          bb.stmts.end());
            StmtRef loop = Stmt::whileStmt(guard, std::move(invs),
                                           std::move(loopBody), hb.span);
            hb.stmts = {std::move(loop)};
            hb.succs = {ei};
            bb.alive = false;
            eb.stmts.erase(eb.stmts.begin());
            return true;
        }
    }
    return false;
}

bool trySeq(Cfg& g) {
    for (int n = 0; n < (int)g.blocks.size(); ++n) {
        Block& nb = g.blocks[n];
        if (!nb.alive || nb.succs.size() != 1) continue;
        int m = nb.succs[0];
        if (m == n || !singleIn(g, m, n)) continue;
        Block& mb = g.blocks[m];
        if (std::find(mb.succs.begin(), mb.succs.end(), n) != mb.succs.end())
            continue;
        nb.stmts.insert(nb.stmts.end(), mb.stmts.begin(), mb.stmts.end());
        nb.succs = mb.succs;
        mb.alive = false;
        return true;
    }
    return false;
}

bool tryChoose(Cfg& g) {
    for (int n = 0; n < (int)g.blocks.size(); ++n) {
        Block& nb = g.blocks[n];
        if (!nb.alive || nb.succs.size() < 2) continue;
        bool ok = true;
        for (int m : nb.succs)
            if (!g.blocks[m].succs.empty() || !singleIn(g, m, n)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        // nested nondeterministic choice, last branch innermost
        std::vector<StmtRef> acc = g.blocks[nb.succs.back()].stmts;
        for (int k = (int)nb.succs.size() - 2; k >= 0; --k) {
            StmtRef choice = Stmt::ifStmt(
                Expr::star(nb.span), g.blocks[nb.succs[k]].stmts,
                std::move(acc), true, nb.span);
            acc = {std::move(choice)};
        }
        nb.stmts.insert(nb.stmts.end(), acc.begin(), acc.end());
        for (int m : nb.succs) g.blocks[m].alive = false;
        nb.succs.clear();
        return true;
    }
    return false;
}

std::optional<std::vector<StmtRef>>
structureBody(std::vector<StmtRef> const& body) {
    auto cfg = buildCfg(body);
    if (!cfg) return std::nullopt;
    Cfg& g = *cfg;
    for (;;) {
        if (tryLoop(g)) continue;
        if (trySeq(g)) continue;
        if (tryChoose(g)) continue;
        break;
    }
    int alive = 0;
    for (auto const& b : g.blocks)
        if (b.alive) ++alive;
    if (alive != 1 || !g.blocks[0].alive || !g.blocks[0].succs.empty())
        return std::nullopt;
    return g.blocks[0].stmts;
}

StmtRef assertFalse(SourceSpan span) {
    return Stmt::assertStmt(Expr::boolLit(false, span), {}, span);
}

std::vector<StmtRef> replaceGotos(std::vector<StmtRef> const& body) {
    std::vector<StmtRef> out;
    out.reserve(body.size());
    for (auto const& s : body) {
        if (s->kind == Stmt::Kind::Goto) {
            out.push_back(assertFalse(s->span));
            continue;
        }
        if (!s->body1.empty() || !s->body2.empty()) {
            auto copy = std::make_shared<Stmt>(*s);
            copy->body1 = replaceGotos(s->body1);
            copy->body2 = replaceGotos(s->body2);
            out.push_back(std::move(copy));
            continue;
        }
        out.push_back(s);
    }
    return out;
}

} // namespace

std::optional<bpl::Program> structureGotos(bpl::Program const& p,
                                           GotoMode mode,
                                           DiagnosticEngine& diags) {
    bpl::Program out;
    bool failed = false;
    for (auto const& d : p.decls) {
        std::vector<SourceSpan> gotos;
        for (auto const& s : d->body) collectGotos(s, gotos);
        if (d->kind != Decl::Kind::Implementation || gotos.empty()) {
            out.decls.push_back(d);
            continue;
        }
        auto structured = structureBody(d->body);
        auto copy = std::make_shared<Decl>(*d);
        if (structured) {
            copy->body = std::move(*structured);
            out.decls.push_back(std::move(copy));
            continue;
        }
        for (auto const& span : gotos) {
            switch (mode) {
            case GotoMode::Structure:
                diags.warning(span, "goto does not fit a structuring rule; "
                                    "replaced by 'assert false'");
                break;
            case GotoMode::AssertFalse:
                diags.note(span, "goto replaced by 'assert false'");
                break;
            case GotoMode::Error:
                diags.error(span, "goto does not fit a structuring rule");
                failed = true;
                break;
            }
        }
        if (mode != GotoMode::Error) copy->body = replaceGotos(d->body);
        out.decls.push_back(std::move(copy));
    }
    if (failed) return std::nullopt;
    return out;
}

} // namespace b2y::desugar
