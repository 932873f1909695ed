#include "b2y/bpl/printer.hpp"

#include <ostream>
#include <sstream>

namespace b2y::bpl {

namespace {

// Higher binds tighter. Mirrors the parser's precedence ladder.
enum Prec {
    PrecIff = 1, PrecImp, PrecLogical, PrecRel, PrecConcat, PrecAdd,
    PrecMul, PrecPow, PrecUnary, PrecPostfix, PrecAtom
};

int binPrec(BinOp op) {
    switch (op) {
    case BinOp::Iff: return PrecIff;
    case BinOp::Imp: return PrecImp;
    case BinOp::And: case BinOp::Or: return PrecLogical;
    case BinOp::Eq: case BinOp::Neq: case BinOp::Lt: case BinOp::Le:
    case BinOp::Gt: case BinOp::Ge: case BinOp::Subtype: return PrecRel;
    case BinOp::Concat: return PrecConcat;
    case BinOp::Add: case BinOp::Sub: return PrecAdd;
    case BinOp::Mul: case BinOp::IntDiv: case BinOp::Mod:
    case BinOp::RealDiv: return PrecMul;
    case BinOp::Pow: return PrecPow;
    }
    return PrecAtom;
}

char const* binOpText(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::IntDiv: return "div";
    case BinOp::Mod: return "mod";
    case BinOp::RealDiv: return "/";
    case BinOp::Pow: return "**";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Imp: return "==>";
    case BinOp::Iff: return "<==>";
    case BinOp::Eq: return "==";
    case BinOp::Neq: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Subtype: return "<:";
    case BinOp::Concat: return "++";
    }
    return "?";
}

bool mixesLogical(BinOp parent, ExprRef const& child) {
    if (child->kind != Expr::Kind::Bin) return false;
    BinOp c = child->ops[0];
    return (c == BinOp::And || c == BinOp::Or) && c != parent;
}

class ExprPrinter {
public:
    explicit ExprPrinter(std::ostream& os) : os_(os) {}

    void print(ExprRef const& e, int minPrec) {
        switch (e->kind) {
        case Expr::Kind::IntLit: os_ << e->text; return;
        case Expr::Kind::RealLit: os_ << e->text; return;
        case Expr::Kind::BoolLit: os_ << (e->bval ? "true" : "false"); return;
        case Expr::Kind::BvLit:
            os_ << e->text << "bv" << e->bvWidth;
            return;
        case Expr::Kind::StringLit: os_ << '"' << e->text << '"'; return;
        case Expr::Kind::Ident: os_ << e->text; return;
        case Expr::Kind::Star: os_ << '*'; return;
        case Expr::Kind::Un: {
            bool isCoerce = e->un == UnOp::ToInt || e->un == UnOp::ToReal;
            if (isCoerce) {
                os_ << (e->un == UnOp::ToInt ? "int(" : "real(");
                print(e->a, PrecIff);
                os_ << ')';
                return;
            }
            bool parens = minPrec > PrecUnary;
            if (parens) os_ << '(';
            os_ << (e->un == UnOp::Neg ? "-" : "!");
            print(e->a, PrecUnary);
            if (parens) os_ << ')';
            return;
        }
        case Expr::Kind::Bin: {
            BinOp op = e->ops[0];
            int p = binPrec(op);
            bool parens = minPrec > p;
            if (parens) os_ << '(';
            // Left operand: same level allowed for left-assoc operators;
            // ==> is right-assoc and relations do not associate.
            int lp = p, rp = p + 1;
            if (op == BinOp::Imp || op == BinOp::Pow) {
                lp = p + 1;
                rp = p;
            } else if (p == PrecRel) {
                lp = p + 1;
            } else if (p == PrecLogical && mixesLogical(op, e->a)) {
                // && and || do not mix without parentheses
                lp = p + 1;
            }
            print(e->a, lp);
            os_ << ' ' << binOpText(op) << ' ';
            print(e->b, rp);
            if (parens) os_ << ')';
            return;
        }
        case Expr::Kind::Chain: {
            bool parens = minPrec > PrecRel;
            if (parens) os_ << '(';
            print(e->items[0], PrecRel + 1);
            for (std::size_t i = 0; i < e->ops.size(); ++i) {
                os_ << ' ' << binOpText(e->ops[i]) << ' ';
                print(e->items[i + 1], PrecRel + 1);
            }
            if (parens) os_ << ')';
            return;
        }
        case Expr::Kind::Select: {
            print(e->a, PrecPostfix);
            os_ << '[';
            for (std::size_t i = 0; i < e->items.size(); ++i) {
                if (i) os_ << ", ";
                print(e->items[i], PrecIff);
            }
            os_ << ']';
            return;
        }
        case Expr::Kind::Update: {
            print(e->a, PrecPostfix);
            os_ << '[';
            for (std::size_t i = 0; i < e->items.size(); ++i) {
                if (i) os_ << ", ";
                print(e->items[i], PrecIff);
            }
            os_ << " := ";
            print(e->b, PrecIff);
            os_ << ']';
            return;
        }
        case Expr::Kind::Extract:
            print(e->a, PrecPostfix);
            os_ << '[' << e->hi << ':' << e->lo << ']';
            return;
        case Expr::Kind::Old:
            os_ << "old(";
            print(e->a, PrecIff);
            os_ << ')';
            return;
        case Expr::Kind::Ite: {
            bool parens = minPrec > PrecIff;
            if (parens) os_ << '(';
            os_ << "if ";
            print(e->a, PrecImp);
            os_ << " then ";
            print(e->b, PrecImp);
            os_ << " else ";
            print(e->c, PrecImp);
            if (parens) os_ << ')';
            return;
        }
        case Expr::Kind::Call: {
            os_ << e->text << '(';
            for (std::size_t i = 0; i < e->items.size(); ++i) {
                if (i) os_ << ", ";
                print(e->items[i], PrecIff);
            }
            os_ << ')';
            return;
        }
        case Expr::Kind::Quant: {
            os_ << '(' << (e->qkind == Expr::QKind::Forall ? "forall"
                                                           : "exists");
            if (!e->typeParams.empty()) {
                os_ << " <";
                for (std::size_t i = 0; i < e->typeParams.size(); ++i)
                    os_ << (i ? ", " : "") << e->typeParams[i];
                os_ << '>';
            }
            os_ << ' ';
            printBound(e->bound);
            os_ << " ::";
            for (auto const& g : e->triggers) {
                if (g.negated) {
                    os_ << " {:nopats ";
                    for (std::size_t i = 0; i < g.exprs.size(); ++i) {
                        if (i) os_ << ", ";
                        print(g.exprs[i], PrecIff);
                    }
                    os_ << '}';
                } else {
                    os_ << " { ";
                    for (std::size_t i = 0; i < g.exprs.size(); ++i) {
                        if (i) os_ << ", ";
                        print(g.exprs[i], PrecIff);
                    }
                    os_ << " }";
                }
            }
            for (auto const& a : e->attrs) {
                os_ << " {:" << a.name;
                for (std::size_t i = 0; i < a.args.size(); ++i) {
                    os_ << (i ? ", " : " ");
                    print(a.args[i], PrecIff);
                }
                os_ << '}';
            }
            os_ << ' ';
            print(e->body, PrecIff);
            os_ << ')';
            return;
        }
        case Expr::Kind::Lambda:
            os_ << "(lambda ";
            printBound(e->bound);
            os_ << " :: ";
            print(e->body, PrecIff);
            os_ << ')';
            return;
        }
    }

private:
    std::ostream& os_;

    void printBound(std::vector<BoundVar> const& bound) {
        // Adjacent binders sharing a type object were one source group.
        for (std::size_t i = 0; i < bound.size();) {
            std::size_t j = i;
            while (j + 1 < bound.size() && bound[j + 1].type == bound[i].type)
                ++j;
            if (i) os_ << ", ";
            for (std::size_t k = i; k <= j; ++k)
                os_ << (k > i ? ", " : "") << bound[k].name;
            os_ << ": " << typeToString(bound[i].type);
            i = j + 1;
        }
    }
};

void printAttrs(std::ostream& os, std::vector<Attr> const& attrs,
                bool trailingSpace = true) {
    for (auto const& a : attrs) {
        os << "{:" << a.name;
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            os << (i ? ", " : " ");
            printExpr(os, a.args[i]);
        }
        os << '}';
        if (trailingSpace) os << ' ';
    }
}

void ind(std::ostream& os, int n) {
    for (int i = 0; i < n; ++i) os << "  ";
}

// Params grouped by shared type/where pointers.
void printParamGroups(std::ostream& os, std::vector<Param> const& params) {
    for (std::size_t i = 0; i < params.size();) {
        std::size_t j = i;
        while (j + 1 < params.size() && params[j + 1].type == params[i].type &&
               params[j + 1].where == params[i].where)
            ++j;
        if (i) os << ", ";
        for (std::size_t k = i; k <= j; ++k)
            os << (k > i ? ", " : "") << params[k].name;
        os << ": " << typeToString(params[i].type);
        if (params[i].where) {
            os << " where ";
            printExpr(os, params[i].where);
        }
        i = j + 1;
    }
}

void printBlock(std::ostream& os, std::vector<StmtRef> const& body,
                int indent) {
    os << "{\n";
    for (auto const& s : body) printStmt(os, s, indent + 1);
    ind(os, indent);
    os << "}";
}

// name, type parameters, in-params, out-params
void printSignature(std::ostream& os, Decl const& d) {
    os << d.name;
    if (!d.typeParams.empty()) {
        os << '<';
        for (std::size_t i = 0; i < d.typeParams.size(); ++i)
            os << (i ? ", " : "") << d.typeParams[i];
        os << '>';
    }
    os << '(';
    printParamGroups(os, d.params);
    os << ')';
    if (!d.outs.empty()) {
        os << " returns (";
        printParamGroups(os, d.outs);
        os << ')';
    }
}

void printSpecClauses(std::ostream& os, Decl const& d) {
    for (auto const& c : d.preCl) {
        os << "  " << (c.free ? "free requires " : "requires ");
        printAttrs(os, c.attrs);
        printExpr(os, c.expr);
        os << ";\n";
    }
    if (!d.modifies.empty()) {
        os << "  modifies ";
        for (std::size_t i = 0; i < d.modifies.size(); ++i)
            os << (i ? ", " : "") << d.modifies[i];
        os << ";\n";
    }
    for (auto const& c : d.postCl) {
        os << "  " << (c.free ? "free ensures " : "ensures ");
        printAttrs(os, c.attrs);
        printExpr(os, c.expr);
        os << ";\n";
    }
}

void printImplBody(std::ostream& os, Decl const& d) {
    os << "{\n";
    for (std::size_t i = 0; i < d.locals.size();) {
        std::size_t j = i;
        while (j + 1 < d.locals.size() &&
               d.locals[j + 1].type == d.locals[i].type &&
               d.locals[j + 1].where == d.locals[i].where)
            ++j;
        os << "  var ";
        for (std::size_t k = i; k <= j; ++k)
            os << (k > i ? ", " : "") << d.locals[k].name;
        os << ": " << typeToString(d.locals[i].type);
        if (d.locals[i].where) {
            os << " where ";
            printExpr(os, d.locals[i].where);
        }
        os << ";\n";
        i = j + 1;
    }
    for (auto const& s : d.body) printStmt(os, s, 1);
    os << "}\n";
}

// Spec-only form when body is null, fused inline-body form otherwise.
void printProcedure(std::ostream& os, Decl const& d, Decl const* body) {
    os << "procedure ";
    printAttrs(os, d.attrs);
    printSignature(os, d);
    if (!body) {
        os << ";\n";
        printSpecClauses(os, d);
        return;
    }
    os << "\n";
    printSpecClauses(os, d);
    printImplBody(os, *body);
}

} // namespace

void printExpr(std::ostream& os, ExprRef const& e) {
    ExprPrinter(os).print(e, PrecIff);
}

std::string exprToString(ExprRef const& e) {
    std::ostringstream ss;
    printExpr(ss, e);
    return ss.str();
}

void printStmt(std::ostream& os, StmtRef const& s, int indent) {
    switch (s->kind) {
    case Stmt::Kind::Label:
        ind(os, indent > 0 ? indent - 1 : 0);
        os << s->label << ":\n";
        return;
    case Stmt::Kind::Assert:
        ind(os, indent);
        os << "assert ";
        printAttrs(os, s->attrs);
        printExpr(os, s->expr);
        os << ";\n";
        return;
    case Stmt::Kind::Assume:
        ind(os, indent);
        os << "assume ";
        printAttrs(os, s->attrs);
        printExpr(os, s->expr);
        os << ";\n";
        return;
    case Stmt::Kind::Assign: {
        ind(os, indent);
        for (std::size_t i = 0; i < s->lhs.size(); ++i) {
            if (i) os << ", ";
            os << s->lhs[i].name;
            for (auto const& g : s->lhs[i].indexGroups) {
                os << '[';
                for (std::size_t k = 0; k < g.size(); ++k) {
                    if (k) os << ", ";
                    printExpr(os, g[k]);
                }
                os << ']';
            }
        }
        os << " := ";
        for (std::size_t i = 0; i < s->rhs.size(); ++i) {
            if (i) os << ", ";
            printExpr(os, s->rhs[i]);
        }
        os << ";\n";
        return;
    }
    case Stmt::Kind::Havoc: {
        ind(os, indent);
        os << "havoc ";
        for (std::size_t i = 0; i < s->names.size(); ++i)
            os << (i ? ", " : "") << s->names[i];
        os << ";\n";
        return;
    }
    case Stmt::Kind::Call: {
        ind(os, indent);
        os << "call ";
        printAttrs(os, s->attrs);
        if (!s->names.empty()) {
            for (std::size_t i = 0; i < s->names.size(); ++i)
                os << (i ? ", " : "") << s->names[i];
            os << " := ";
        }
        os << s->callee << '(';
        for (std::size_t i = 0; i < s->args.size(); ++i) {
            if (i) os << ", ";
            printExpr(os, s->args[i]);
        }
        os << ");\n";
        return;
    }
    case Stmt::Kind::CallForall: {
        ind(os, indent);
        os << "call forall " << s->callee << '(';
        for (std::size_t i = 0; i < s->args.size(); ++i) {
            if (i) os << ", ";
            if (s->args[i])
                printExpr(os, s->args[i]);
            else
                os << '*';
        }
        os << ");\n";
        return;
    }
    case Stmt::Kind::If: {
        ind(os, indent);
        os << "if (";
        printExpr(os, s->expr);
        os << ") ";
        printBlock(os, s->body1, indent);
        if (s->hasElse) {
            os << " else ";
            // `else if` chains print flat
            if (s->body2.size() == 1 &&
                s->body2[0]->kind == Stmt::Kind::If) {
                std::ostringstream nested;
                printStmt(nested, s->body2[0], indent);
                std::string text = nested.str();
                // strip leading indentation of the nested if
                std::size_t k = text.find("if");
                os << text.substr(k);
                return;
            }
            printBlock(os, s->body2, indent);
        }
        os << "\n";
        return;
    }
    case Stmt::Kind::While: {
        ind(os, indent);
        os << "while (";
        printExpr(os, s->expr);
        os << ")";
        if (s->invariants.empty()) {
            os << ' ';
        } else {
            os << '\n';
            for (auto const& inv : s->invariants) {
                ind(os, indent + 1);
                if (inv.free) os << "free ";
                os << "invariant ";
                printAttrs(os, inv.attrs);
                printExpr(os, inv.expr);
                os << ";\n";
            }
            ind(os, indent);
        }
        printBlock(os, s->body1, indent);
        os << "\n";
        return;
    }
    case Stmt::Kind::Break:
        ind(os, indent);
        os << "break;\n";
        return;
    case Stmt::Kind::Return:
        ind(os, indent);
        os << "return;\n";
        return;
    case Stmt::Kind::Goto: {
        ind(os, indent);
        os << "goto ";
        for (std::size_t i = 0; i < s->names.size(); ++i)
            os << (i ? ", " : "") << s->names[i];
        os << ";\n";
        return;
    }
    }
}

void printDecl(std::ostream& os, DeclRef const& d) {
    switch (d->kind) {
    case Decl::Kind::TypeDecl:
        os << "type ";
        printAttrs(os, d->attrs);
        if (d->finite) os << "finite ";
        os << d->name;
        for (auto const& p : d->typeParams) os << ' ' << p;
        if (d->synonym) os << " = " << typeToString(d->synonym);
        os << ";\n";
        return;
    case Decl::Kind::ConstDecl: {
        os << "const ";
        printAttrs(os, d->attrs);
        if (d->unique) os << "unique ";
        for (std::size_t i = 0; i < d->names.size(); ++i)
            os << (i ? ", " : "") << d->names[i];
        os << ": " << typeToString(d->type);
        if (d->order.present) {
            os << (d->order.legacy ? " <:" : " extends");
            for (std::size_t i = 0; i < d->order.parents.size(); ++i) {
                os << (i ? "," : "");
                os << ' ';
                if (d->order.parents[i].unique) os << "unique ";
                os << d->order.parents[i].name;
            }
            if (d->order.complete) os << " complete";
        }
        os << ";\n";
        return;
    }
    case Decl::Kind::VarDecl:
        os << "var ";
        printAttrs(os, d->attrs);
        printParamGroups(os, d->vars);
        os << ";\n";
        return;
    case Decl::Kind::FunctionDecl: {
        os << "function ";
        printAttrs(os, d->attrs);
        os << d->name;
        if (!d->typeParams.empty()) {
            os << '<';
            for (std::size_t i = 0; i < d->typeParams.size(); ++i)
                os << (i ? ", " : "") << d->typeParams[i];
            os << '>';
        }
        os << '(';
        for (std::size_t i = 0; i < d->params.size(); ++i) {
            if (i) os << ", ";
            // synthesized $argN names stay anonymous
            if (d->params[i].name.rfind("$arg", 0) != 0)
                os << d->params[i].name << ": ";
            os << typeToString(d->params[i].type);
        }
        os << ") returns (";
        if (!d->result.name.empty()) os << d->result.name << ": ";
        os << typeToString(d->result.type) << ')';
        if (d->bodyExpr) {
            os << " { ";
            printExpr(os, d->bodyExpr);
            os << " }\n";
        } else {
            os << ";\n";
        }
        return;
    }
    case Decl::Kind::AxiomDecl:
        os << "axiom ";
        printAttrs(os, d->attrs);
        printExpr(os, d->expr);
        os << ";\n";
        return;
    case Decl::Kind::ProcedureDecl:
        printProcedure(os, *d, nullptr);
        return;
    case Decl::Kind::Implementation:
        os << "implementation ";
        printAttrs(os, d->attrs);
        printSignature(os, *d);
        os << "\n";
        printImplBody(os, *d);
        return;
    }
}

void printProgram(std::ostream& os, Program const& p) {
    bool first = true;
    for (std::size_t i = 0; i < p.decls.size(); ++i) {
        if (!first) os << '\n';
        first = false;
        DeclRef const& d = p.decls[i];
        // A procedure with an inline body parses into a declaration plus an
        // implementation; such pairs print back in the fused form.
        if (d->kind == Decl::Kind::ProcedureDecl && i + 1 < p.decls.size()) {
            DeclRef const& next = p.decls[i + 1];
            if (next->kind == Decl::Kind::Implementation && next->inlineBody &&
                next->name == d->name) {
                printProcedure(os, *d, next.get());
                ++i;
                continue;
            }
        }
        printDecl(os, d);
    }
}

std::string programToString(Program const& p) {
    std::ostringstream ss;
    printProgram(ss, p);
    return ss.str();
}

} // namespace b2y::bpl
