#include "b2y/why/printer.hpp"

#include <cctype>

namespace b2y::why {

namespace {

// Operator precedence, loosest first. Applications, old/at and any are
// rendered in parentheses whenever they appear as operands, mirroring the
// (pow 2.0 3.0) style of emitted contracts.
int precOf(WBin op) {
    switch (op) {
    case WBin::Imp:
    case WBin::Iff: return 1;
    case WBin::Or: return 2;
    case WBin::And: return 3;
    case WBin::Eq: case WBin::Neq:
    case WBin::Lt: case WBin::Le: case WBin::Gt: case WBin::Ge:
    case WBin::LtR: case WBin::LeR: case WBin::GtR: case WBin::GeR:
    case WBin::Order: return 5;
    case WBin::Add: case WBin::Sub:
    case WBin::AddR: case WBin::SubR: return 6;
    case WBin::Mul: case WBin::MulR: case WBin::DivR: return 7;
    }
    return 5;
}

void renderType(WTypeRef const& t, std::string& out, bool atom) {
    switch (t->kind) {
    case WType::Kind::Con:
        if (t->args.empty()) {
            out += t->name;
            return;
        }
        if (atom) out += '(';
        out += t->name;
        for (auto const& a : t->args) {
            out += ' ';
            renderType(a, out, true);
        }
        if (atom) out += ')';
        return;
    case WType::Kind::Var:
        out += '\'';
        out += t->name;
        return;
    case WType::Kind::Tuple:
        out += '(';
        for (std::size_t i = 0; i < t->args.size(); ++i) {
            if (i) out += ", ";
            renderType(t->args[i], out, false);
        }
        out += ')';
        return;
    }
}

class Renderer {
public:
    void expr(WExprRef const& e, std::string& out, int minPrec) {
        switch (e->kind) {
        case WExpr::Kind::IntLit:
        case WExpr::Kind::RealLit:
            out += e->text;
            return;
        case WExpr::Kind::BoolLit:
            out += e->bval ? "true" : "false";
            return;
        case WExpr::Kind::Ident:
            out += e->text;
            return;
        case WExpr::Kind::Contents:
            out += e->text;
            out += ".contents";
            return;
        case WExpr::Kind::Un: {
            if (e->un == WUn::Not) {
                // not binds like a conjunct.
                bool wrap = minPrec > 4;
                if (wrap) out += '(';
                out += "not ";
                expr(e->a, out, 9);
                if (wrap) out += ')';
                return;
            }
            bool wrap = minPrec >= 1;
            if (wrap) out += '(';
            out += e->un == WUn::NegReal ? "-." : "-";
            expr(e->a, out, 9);
            if (wrap) out += ')';
            return;
        }
        case WExpr::Kind::Bin: {
            WBin op = e->ops[0];
            int p = precOf(op);
            bool wrap = p < minPrec;
            if (wrap) out += '(';
            bool rightAssoc = op == WBin::Imp;
            expr(e->a, out, rightAssoc ? p + 1 : p);
            out += ' ';
            out += binSpelling(op);
            out += ' ';
            expr(e->b, out, rightAssoc ? p : p + 1);
            if (wrap) out += ')';
            return;
        }
        case WExpr::Kind::Chain: {
            bool wrap = 5 < minPrec;
            if (wrap) out += '(';
            expr(e->items[0], out, 6);
            for (std::size_t i = 0; i < e->ops.size(); ++i) {
                out += ' ';
                out += binSpelling(e->ops[i]);
                out += ' ';
                expr(e->items[i + 1], out, 6);
            }
            if (wrap) out += ')';
            return;
        }
        case WExpr::Kind::App: {
            bool wrap = minPrec >= 1;
            if (wrap) out += '(';
            out += e->text;
            if (e->items.empty()) {
                out += " ()";
            } else {
                for (auto const& a : e->items) {
                    out += ' ';
                    expr(a, out, 10);
                }
            }
            if (wrap) out += ')';
            return;
        }
        case WExpr::Kind::Tuple:
            out += '(';
            for (std::size_t i = 0; i < e->items.size(); ++i) {
                if (i) out += ", ";
                expr(e->items[i], out, 0);
            }
            out += ')';
            return;
        case WExpr::Kind::Any: {
            bool wrap = minPrec >= 1;
            if (wrap) out += '(';
            out += "any ";
            renderType(e->type, out, true);
            if (wrap) out += ')';
            return;
        }
        case WExpr::Kind::Old: {
            bool wrap = minPrec >= 1;
            if (wrap) out += '(';
            out += "old ";
            expr(e->a, out, 9);
            if (wrap) out += ')';
            return;
        }
        case WExpr::Kind::At: {
            bool wrap = minPrec >= 1;
            if (wrap) out += '(';
            out += "at ";
            expr(e->a, out, 9);
            out += " '";
            out += e->label;
            if (wrap) out += ')';
            return;
        }
        case WExpr::Kind::Ite: {
            bool wrap = minPrec >= 1;
            if (wrap) out += '(';
            out += "if ";
            expr(e->a, out, 1);
            out += " then ";
            expr(e->b, out, 1);
            out += " else ";
            expr(e->c, out, 1);
            if (wrap) out += ')';
            return;
        }
        case WExpr::Kind::Quant: {
            bool wrap = minPrec >= 1;
            if (wrap) out += '(';
            out += e->qkind == WExpr::QKind::Forall ? "forall " : "exists ";
            for (std::size_t g = 0; g < e->binders.size(); ++g) {
                if (g) out += ", ";
                auto const& b = e->binders[g];
                for (std::size_t i = 0; i < b.names.size(); ++i) {
                    if (i) out += ", ";
                    out += b.names[i];
                }
                out += ": ";
                renderType(b.type, out, false);
            }
            if (!e->triggers.empty()) {
                out += " [";
                for (std::size_t g = 0; g < e->triggers.size(); ++g) {
                    if (g) out += " | ";
                    for (std::size_t i = 0; i < e->triggers[g].size(); ++i) {
                        if (i) out += ", ";
                        expr(e->triggers[g][i], out, 0);
                    }
                }
                out += ']';
            }
            out += ". ";
            expr(e->body, out, 0);
            if (wrap) out += ')';
            return;
        }
        }
    }
};

std::string renderExpr(WExprRef const& e, int minPrec = 0) {
    std::string out;
    Renderer{}.expr(e, out, minPrec);
    return out;
}

void indentTo(std::string& out, int n) { out.append(std::size_t(n), ' '); }

void renderStmts(std::vector<WStmtRef> const& body, std::string& out,
                 int indent);

void renderStmt(WStmtRef const& s, std::string& out, int indent) {
    switch (s->kind) {
    case WStmt::Kind::Assign:
        indentTo(out, indent);
        out += s->name + ".contents <- " + renderExpr(s->expr) + ";\n";
        return;
    case WStmt::Kind::Let:
        indentTo(out, indent);
        out += "let ";
        if (s->names.size() == 1) {
            out += s->names[0];
        } else {
            out += '(';
            for (std::size_t i = 0; i < s->names.size(); ++i) {
                if (i) out += ", ";
                out += s->names[i];
            }
            out += ')';
        }
        out += " = " + renderExpr(s->expr) + " in\n";
        return;
    case WStmt::Kind::Eval:
        indentTo(out, indent);
        out += renderExpr(s->expr) + ";\n";
        return;
    case WStmt::Kind::Result:
        indentTo(out, indent);
        out += renderExpr(s->expr) + "\n";
        return;
    case WStmt::Kind::Assert:
        indentTo(out, indent);
        out += "assert { " + renderExpr(s->expr) + " };\n";
        return;
    case WStmt::Kind::Assume:
        indentTo(out, indent);
        out += "assume { " + renderExpr(s->expr) + " };\n";
        return;
    case WStmt::Kind::If:
        indentTo(out, indent);
        out += "if " + renderExpr(s->expr, 1) + " then begin\n";
        renderStmts(s->body1, out, indent + 2);
        indentTo(out, indent);
        if (s->hasElse) {
            out += "end else begin\n";
            renderStmts(s->body2, out, indent + 2);
            indentTo(out, indent);
        }
        out += "end;\n";
        return;
    case WStmt::Kind::While:
        indentTo(out, indent);
        out += "while (" + renderExpr(s->expr) + ") do\n";
        for (auto const& inv : s->invariants) {
            indentTo(out, indent + 2);
            out += "invariant { " + renderExpr(inv) + " }\n";
        }
        renderStmts(s->body1, out, indent + 2);
        indentTo(out, indent);
        out += "done;\n";
        return;
    case WStmt::Kind::Try:
        indentTo(out, indent);
        out += "try\n";
        renderStmts(s->body1, out, indent + 2);
        indentTo(out, indent);
        out += "with | " + s->name + " -> ";
        for (std::size_t i = 0; i < s->body2.size(); ++i) {
            if (i) out += "; ";
            // Handlers hold plain assumes; render them inline.
            std::string one;
            renderStmt(s->body2[i], one, 0);
            while (!one.empty() && (one.back() == '\n' || one.back() == ';'))
                one.pop_back();
            out += one;
        }
        out += " end;\n";
        return;
    case WStmt::Kind::Raise:
        indentTo(out, indent);
        out += "raise " + s->name + ";\n";
        return;
    case WStmt::Kind::Label:
        indentTo(out, indent);
        out += "'" + s->name + ":\n";
        return;
    }
}

void renderStmts(std::vector<WStmtRef> const& body, std::string& out,
                 int indent) {
    for (auto const& s : body) renderStmt(s, out, indent);
}

// Operator symbols are wrapped in parentheses at declaration sites.
std::string declName(std::string const& name) {
    bool word = !name.empty() &&
                (std::isalpha((unsigned char)name[0]) || name[0] == '_');
    return word ? name : "(" + name + ")";
}

void renderParams(WDeclRef const& d, std::string& out) {
    if (d->params.empty()) {
        if (d->unitParam) out += " ()";
        return;
    }
    for (auto const& p : d->params) {
        out += " (" + p.name + ": ";
        renderType(p.type, out, false);
        out += ')';
    }
}

void renderSpec(WSpec const& spec, std::string& out, int indent) {
    for (auto const& r : spec.requiresCl) {
        indentTo(out, indent);
        out += "requires { " + renderExpr(r) + " }\n";
    }
    if (!spec.writesCl.empty()) {
        indentTo(out, indent);
        out += "writes { ";
        for (std::size_t i = 0; i < spec.writesCl.size(); ++i) {
            if (i) out += ", ";
            out += spec.writesCl[i];
        }
        out += " }\n";
    }
    if (!spec.readsCl.empty()) {
        indentTo(out, indent);
        out += "reads { ";
        for (std::size_t i = 0; i < spec.readsCl.size(); ++i) {
            if (i) out += ", ";
            out += spec.readsCl[i];
        }
        out += " }\n";
    }
    for (auto const& r : spec.returnsCl) {
        indentTo(out, indent);
        out += "returns { | ";
        if (r.pattern.size() == 1) {
            out += r.pattern[0];
        } else {
            out += '(';
            for (std::size_t i = 0; i < r.pattern.size(); ++i) {
                if (i) out += ", ";
                out += r.pattern[i];
            }
            out += ')';
        }
        out += " -> " + renderExpr(r.expr) + " }\n";
    }
    for (auto const& e : spec.ensuresCl) {
        indentTo(out, indent);
        out += "ensures { " + renderExpr(e) + " }\n";
    }
}

void renderDecl(WDeclRef const& d, std::string& out) {
    switch (d->kind) {
    case WDecl::Kind::Type:
        out += "  type " + d->name;
        for (auto const& p : d->tyParams) out += " '" + p;
        if (d->alias) {
            out += " = ";
            renderType(d->alias, out, false);
        }
        out += '\n';
        return;
    case WDecl::Kind::Constant:
        out += "  constant " + d->name + ": ";
        renderType(d->type, out, false);
        out += '\n';
        return;
    case WDecl::Kind::Function:
        out += "  function " + declName(d->name);
        renderParams(d, out);
        out += ": ";
        renderType(d->result, out, false);
        out += '\n';
        return;
    case WDecl::Kind::Predicate:
        out += "  predicate " + declName(d->name);
        renderParams(d, out);
        if (d->def) out += " = " + renderExpr(d->def);
        out += '\n';
        return;
    case WDecl::Kind::Axiom:
        out += "  axiom " + d->name + ": " + renderExpr(d->def) + '\n';
        return;
    case WDecl::Kind::Exception:
        out += "  exception " + d->name + '\n';
        return;
    case WDecl::Kind::Val:
        out += "  val " + d->name;
        renderParams(d, out);
        out += ": ";
        renderType(d->result ? d->result : d->type, out, false);
        out += '\n';
        renderSpec(d->spec, out, 4);
        return;
    case WDecl::Kind::Let:
        out += "  let " + d->name;
        renderParams(d, out);
        out += ": ";
        renderType(d->result, out, false);
        out += '\n';
        renderSpec(d->spec, out, 4);
        if (d->body.empty()) {
            out += "  = ( )\n";
        } else {
            out += "  = (\n";
            renderStmts(d->body, out, 4);
            out += "  )\n";
        }
        return;
    }
}

} // namespace

std::string typeToString(WTypeRef const& t) {
    std::string out;
    renderType(t, out, false);
    return out;
}

std::string exprToString(WExprRef const& e) { return renderExpr(e); }

std::string programToString(Program const& p) {
    std::string out = "module " + p.moduleName + "\n";
    for (auto const& imp : p.imports) {
        bool isClone = imp.find(" with ") != std::string::npos;
        out += std::string("  ") + (isClone ? "clone " : "use ") + imp + "\n";
    }
    for (auto const& d : p.decls) {
        out += '\n';
        renderDecl(d, out);
    }
    out += "end\n";
    return out;
}

} // namespace b2y::why
