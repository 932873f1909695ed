#include "b2y/bpl/parser.hpp"

#include "b2y/bpl/lexer.hpp"

#include <cstdlib>

namespace b2y::bpl {

namespace {

// Hard ceiling on reported parse errors; anything past this is noise.
constexpr std::size_t kMaxErrors = 50;

class Parser {
public:
    Parser(std::vector<Token> tokens, DiagnosticEngine& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    std::optional<Program> run() {
        Program p;
        while (!at(Tok::Eof)) {
            if (errors_ >= kMaxErrors) break;
            std::size_t before = pos_;
            parseTopDecl(p);
            if (pos_ == before) skipTo({});  // ensure progress
        }
        if (errors_ > 0) return std::nullopt;
        return p;
    }

private:
    std::vector<Token> toks_;
    DiagnosticEngine& diags_;
    std::size_t pos_ = 0;
    std::size_t errors_ = 0;

    Token const& cur() const { return toks_[pos_]; }
    Token const& peek(std::size_t k = 1) const {
        std::size_t i = pos_ + k;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(Tok t) const { return cur().kind == t; }
    Token advance() {
        Token t = cur();
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool accept(Tok t) {
        if (!at(t)) return false;
        advance();
        return true;
    }

    void error(SourceSpan span, std::string msg) {
        if (errors_ < kMaxErrors) diags_.error(span, std::move(msg));
        ++errors_;
    }

    Token expect(Tok t, char const* what) {
        if (at(t)) return advance();
        error(cur().span, std::string("expected ") + what + ", found " +
                              describe(cur()));
        return cur();
    }

    static std::string describe(Token const& t) {
        if (t.kind == Tok::Ident || t.kind == Tok::IntLit ||
            t.kind == Tok::RealLit)
            return "'" + t.text + "'";
        if (t.kind == Tok::Error) return t.text;
        return tokenName(t.kind);
    }

    static bool isDeclStart(Tok t) {
        switch (t) {
        case Tok::KwType: case Tok::KwConst: case Tok::KwVar:
        case Tok::KwFunction: case Tok::KwAxiom: case Tok::KwProcedure:
        case Tok::KwImplementation:
            return true;
        default:
            return false;
        }
    }

    // Recovery: skip to just past the next ';' or to the next declaration
    // keyword / closing brace, whichever comes first.
    void skipTo(std::vector<Tok> extra) {
        while (!at(Tok::Eof)) {
            if (at(Tok::Semi)) {
                advance();
                return;
            }
            if (isDeclStart(cur().kind)) return;
            for (Tok t : extra)
                if (at(t)) return;
            advance();
        }
    }

    SourceSpan spanFrom(SourceSpan const& start) const {
        SourceSpan end = pos_ > 0 ? toks_[pos_ - 1].span : start;
        return SourceSpan::join(start, end);
    }

    // ---- attributes ------------------------------------------------------

    std::vector<Attr> parseAttrs() {
        std::vector<Attr> attrs;
        while (at(Tok::AttrOpen)) {
            SourceSpan start = cur().span;
            advance();
            Attr a;
            a.name = expect(Tok::Ident, "attribute name").text;
            if (!at(Tok::RBrace)) {
                do {
                    if (auto e = parseExpr()) a.args.push_back(*e);
                    else break;
                } while (accept(Tok::Comma));
            }
            expect(Tok::RBrace, "'}'");
            a.span = spanFrom(start);
            attrs.push_back(std::move(a));
        }
        return attrs;
    }

    // ---- types -----------------------------------------------------------

    std::optional<TypeRef> parseType() {
        SourceSpan start = cur().span;
        switch (cur().kind) {
        case Tok::KwInt: advance(); return Type::intType();
        case Tok::KwReal: advance(); return Type::realType();
        case Tok::KwBool: advance(); return Type::boolType();
        case Tok::BvTypeName: {
            Token t = advance();
            return Type::bv(t.bvWidth, t.span);
        }
        case Tok::LParen: {
            advance();
            auto inner = parseType();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Ident: {
            Token t = advance();
            std::vector<TypeRef> args;
            // Type constructor arguments are type atoms.
            while (isTypeAtomStart(cur().kind)) {
                auto a = parseTypeAtom();
                if (!a) break;
                args.push_back(*a);
            }
            return Type::ctor(t.text, std::move(args), spanFrom(start));
        }
        case Tok::Lt:
        case Tok::LBracket:
            return parseMapType();
        default:
            error(cur().span, "expected a type, found " + describe(cur()));
            return std::nullopt;
        }
    }

    static bool isTypeAtomStart(Tok t) {
        switch (t) {
        case Tok::KwInt: case Tok::KwReal: case Tok::KwBool:
        case Tok::BvTypeName: case Tok::Ident: case Tok::LParen:
        case Tok::LBracket: case Tok::Lt:
            return true;
        default:
            return false;
        }
    }

    // A type argument position: like parseType but a bare identifier takes
    // no constructor arguments (those need parentheses).
    std::optional<TypeRef> parseTypeAtom() {
        switch (cur().kind) {
        case Tok::Ident: {
            Token t = advance();
            return Type::ctor(t.text, {}, t.span);
        }
        default:
            return parseType();
        }
    }

    std::optional<TypeRef> parseMapType() {
        SourceSpan start = cur().span;
        std::vector<std::string> typeParams;
        if (accept(Tok::Lt)) {
            do {
                typeParams.push_back(expect(Tok::Ident, "type parameter").text);
            } while (accept(Tok::Comma));
            expect(Tok::Gt, "'>'");
        }
        expect(Tok::LBracket, "'['");
        std::vector<TypeRef> domain;
        if (!at(Tok::RBracket)) {
            do {
                auto d = parseType();
                if (!d) return std::nullopt;
                domain.push_back(*d);
            } while (accept(Tok::Comma));
        }
        expect(Tok::RBracket, "']'");
        auto cod = parseType();
        if (!cod) return std::nullopt;
        return Type::map(std::move(typeParams), std::move(domain), *cod,
                         spanFrom(start));
    }

    // ---- expressions -----------------------------------------------------

    std::optional<ExprRef> parseExpr() { return parseIff(); }

    std::optional<ExprRef> parseIff() {
        SourceSpan start = cur().span;
        auto lhs = parseImplies();
        if (!lhs) return std::nullopt;
        while (at(Tok::Iff)) {
            advance();
            auto rhs = parseImplies();
            if (!rhs) return std::nullopt;
            lhs = Expr::binary(BinOp::Iff, *lhs, *rhs, spanFrom(start));
        }
        return lhs;
    }

    std::optional<ExprRef> parseImplies() {
        SourceSpan start = cur().span;
        auto lhs = parseLogical();
        if (!lhs) return std::nullopt;
        if (at(Tok::Implies)) {
            advance();
            auto rhs = parseImplies();  // right associative
            if (!rhs) return std::nullopt;
            return Expr::binary(BinOp::Imp, *lhs, *rhs, spanFrom(start));
        }
        if (at(Tok::Explies)) {
            // a <== b is b ==> a; left associative chains of <== only.
            ExprRef acc = *lhs;
            while (accept(Tok::Explies)) {
                auto rhs = parseLogical();
                if (!rhs) return std::nullopt;
                acc = Expr::binary(BinOp::Imp, *rhs, acc, spanFrom(start));
            }
            return acc;
        }
        return lhs;
    }

    std::optional<ExprRef> parseLogical() {
        SourceSpan start = cur().span;
        auto lhs = parseRel();
        if (!lhs) return std::nullopt;
        if (!at(Tok::AndAnd) && !at(Tok::OrOr)) return lhs;
        Tok opTok = cur().kind;
        BinOp op = opTok == Tok::AndAnd ? BinOp::And : BinOp::Or;
        ExprRef acc = *lhs;
        while (at(Tok::AndAnd) || at(Tok::OrOr)) {
            if (cur().kind != opTok) {
                // Boogie forbids mixing && and || without parentheses.
                error(cur().span,
                      "ambiguous mix of '&&' and '||'; parenthesize");
                return std::nullopt;
            }
            advance();
            auto rhs = parseRel();
            if (!rhs) return std::nullopt;
            acc = Expr::binary(op, acc, *rhs, spanFrom(start));
        }
        return acc;
    }

    static bool isChainableRel(Tok t) {
        return t == Tok::Lt || t == Tok::Le || t == Tok::Gt || t == Tok::Ge;
    }

    std::optional<ExprRef> parseRel() {
        SourceSpan start = cur().span;
        auto lhs = parseConcat();
        if (!lhs) return std::nullopt;
        switch (cur().kind) {
        case Tok::EqEq: case Tok::NotEq: case Tok::Subtype: {
            Tok t = advance().kind;
            BinOp op = t == Tok::EqEq   ? BinOp::Eq
                       : t == Tok::NotEq ? BinOp::Neq
                                         : BinOp::Subtype;
            auto rhs = parseConcat();
            if (!rhs) return std::nullopt;
            if (at(Tok::EqEq) || at(Tok::NotEq) || at(Tok::Subtype) ||
                isChainableRel(cur().kind)) {
                error(cur().span, "relational operators do not associate; "
                                  "parenthesize");
                return std::nullopt;
            }
            return Expr::binary(op, *lhs, *rhs, spanFrom(start));
        }
        case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge: {
            // Chained inequalities: a <= b < c is the conjunction of the
            // adjacent comparisons.
            std::vector<BinOp> ops;
            std::vector<ExprRef> operands{*lhs};
            while (isChainableRel(cur().kind)) {
                Tok t = advance().kind;
                BinOp op = t == Tok::Lt   ? BinOp::Lt
                           : t == Tok::Le ? BinOp::Le
                           : t == Tok::Gt ? BinOp::Gt
                                          : BinOp::Ge;
                ops.push_back(op);
                auto rhs = parseConcat();
                if (!rhs) return std::nullopt;
                operands.push_back(*rhs);
            }
            if (at(Tok::EqEq) || at(Tok::NotEq) || at(Tok::Subtype)) {
                error(cur().span, "relational operators do not associate; "
                                  "parenthesize");
                return std::nullopt;
            }
            if (ops.size() == 1)
                return Expr::binary(ops[0], operands[0], operands[1],
                                    spanFrom(start));
            return Expr::chain(std::move(ops), std::move(operands),
                               spanFrom(start));
        }
        default:
            return lhs;
        }
    }

    std::optional<ExprRef> parseConcat() {
        SourceSpan start = cur().span;
        auto lhs = parseAdd();
        if (!lhs) return std::nullopt;
        while (accept(Tok::PlusPlus)) {
            auto rhs = parseAdd();
            if (!rhs) return std::nullopt;
            lhs = Expr::binary(BinOp::Concat, *lhs, *rhs, spanFrom(start));
        }
        return lhs;
    }

    std::optional<ExprRef> parseAdd() {
        SourceSpan start = cur().span;
        auto lhs = parseMul();
        if (!lhs) return std::nullopt;
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinOp op = advance().kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
            auto rhs = parseMul();
            if (!rhs) return std::nullopt;
            lhs = Expr::binary(op, *lhs, *rhs, spanFrom(start));
        }
        return lhs;
    }

    std::optional<ExprRef> parseMul() {
        SourceSpan start = cur().span;
        auto lhs = parsePow();
        if (!lhs) return std::nullopt;
        while (at(Tok::Star) || at(Tok::Div) || at(Tok::KwDiv) ||
               at(Tok::KwMod)) {
            Tok t = advance().kind;
            BinOp op = t == Tok::Star    ? BinOp::Mul
                       : t == Tok::Div   ? BinOp::RealDiv
                       : t == Tok::KwDiv ? BinOp::IntDiv
                                         : BinOp::Mod;
            auto rhs = parsePow();
            if (!rhs) return std::nullopt;
            lhs = Expr::binary(op, *lhs, *rhs, spanFrom(start));
        }
        return lhs;
    }

    std::optional<ExprRef> parsePow() {
        SourceSpan start = cur().span;
        auto lhs = parseUnary();
        if (!lhs) return std::nullopt;
        if (accept(Tok::StarStar)) {
            auto rhs = parsePow();  // right associative
            if (!rhs) return std::nullopt;
            return Expr::binary(BinOp::Pow, *lhs, *rhs, spanFrom(start));
        }
        return lhs;
    }

    std::optional<ExprRef> parseUnary() {
        SourceSpan start = cur().span;
        if (accept(Tok::Minus)) {
            auto e = parseUnary();
            if (!e) return std::nullopt;
            return Expr::unary(UnOp::Neg, *e, spanFrom(start));
        }
        if (accept(Tok::Not)) {
            auto e = parseUnary();
            if (!e) return std::nullopt;
            return Expr::unary(UnOp::Not, *e, spanFrom(start));
        }
        return parsePostfix();
    }

    std::optional<ExprRef> parsePostfix() {
        auto base = parseAtom();
        if (!base) return std::nullopt;
        SourceSpan start = (*base)->span;
        while (at(Tok::LBracket)) {
            advance();
            // bv extract b[hi:lo] has integer literal bounds
            if (at(Tok::IntLit) && peek().kind == Tok::Colon) {
                int hi = std::atoi(advance().text.c_str());
                advance();  // ':'
                int lo = std::atoi(expect(Tok::IntLit, "bit index").text.c_str());
                expect(Tok::RBracket, "']'");
                base = Expr::extract(*base, hi, lo, spanFrom(start));
                continue;
            }
            std::vector<ExprRef> indices;
            if (!at(Tok::RBracket)) {
                do {
                    auto i = parseExpr();
                    if (!i) return std::nullopt;
                    indices.push_back(*i);
                } while (accept(Tok::Comma));
            }
            if (accept(Tok::Assign)) {
                auto v = parseExpr();
                if (!v) return std::nullopt;
                expect(Tok::RBracket, "']'");
                base = Expr::update(*base, std::move(indices), *v,
                                    spanFrom(start));
            } else {
                expect(Tok::RBracket, "']'");
                base = Expr::select(*base, std::move(indices), spanFrom(start));
            }
        }
        return base;
    }

    std::optional<ExprRef> parseAtom() {
        SourceSpan start = cur().span;
        switch (cur().kind) {
        case Tok::IntLit: {
            Token t = advance();
            return Expr::intLit(t.text, t.span);
        }
        case Tok::RealLit: {
            Token t = advance();
            return Expr::realLit(t.text, t.span);
        }
        case Tok::BvLit: {
            Token t = advance();
            return Expr::bvLit(t.text, t.bvWidth, t.span);
        }
        case Tok::StringLit: {
            Token t = advance();
            return Expr::stringLit(t.text, t.span);
        }
        case Tok::KwTrue: advance(); return Expr::boolLit(true, start);
        case Tok::KwFalse: advance(); return Expr::boolLit(false, start);
        case Tok::KwOld: {
            advance();
            expect(Tok::LParen, "'('");
            auto e = parseExpr();
            if (!e) return std::nullopt;
            expect(Tok::RParen, "')'");
            return Expr::old(*e, spanFrom(start));
        }
        case Tok::KwInt:
        case Tok::KwReal: {
            // int(e) / real(e) conversion applications
            bool toInt = cur().kind == Tok::KwInt;
            advance();
            expect(Tok::LParen, "'('");
            auto e = parseExpr();
            if (!e) return std::nullopt;
            expect(Tok::RParen, "')'");
            return Expr::unary(toInt ? UnOp::ToInt : UnOp::ToReal, *e,
                               spanFrom(start));
        }
        case Tok::KwIf: {
            advance();
            auto c = parseExpr();
            if (!c) return std::nullopt;
            expect(Tok::KwThen, "'then'");
            auto t = parseExpr();
            if (!t) return std::nullopt;
            expect(Tok::KwElse, "'else'");
            auto e = parseExpr();
            if (!e) return std::nullopt;
            return Expr::ite(*c, *t, *e, spanFrom(start));
        }
        case Tok::Ident: {
            Token t = advance();
            if (at(Tok::LParen)) {
                advance();
                std::vector<ExprRef> args;
                if (!at(Tok::RParen)) {
                    do {
                        auto a = parseExpr();
                        if (!a) return std::nullopt;
                        args.push_back(*a);
                    } while (accept(Tok::Comma));
                }
                expect(Tok::RParen, "')'");
                return Expr::call(t.text, std::move(args), spanFrom(start));
            }
            return Expr::ident(t.text, t.span);
        }
        case Tok::LParen: {
            advance();
            if (at(Tok::KwForall) || at(Tok::KwExists))
                return parseQuantifier(start);
            if (at(Tok::KwLambda)) return parseLambda(start);
            auto e = parseExpr();
            if (!e) return std::nullopt;
            expect(Tok::RParen, "')'");
            return e;
        }
        default:
            error(cur().span,
                  "expected an expression, found " + describe(cur()));
            return std::nullopt;
        }
    }

    std::optional<std::vector<BoundVar>> parseBoundVars() {
        std::vector<BoundVar> bound;
        do {
            std::vector<Token> names;
            names.push_back(expect(Tok::Ident, "bound variable"));
            while (accept(Tok::Comma)) {
                // lookahead: another name in this group or a new group?
                names.push_back(expect(Tok::Ident, "bound variable"));
                if (at(Tok::Colon)) break;
                if (!at(Tok::Comma)) break;
            }
            expect(Tok::Colon, "':'");
            auto ty = parseType();
            if (!ty) return std::nullopt;
            for (auto const& n : names)
                bound.push_back({n.text, *ty, n.span});
        } while (accept(Tok::Comma));
        return bound;
    }

    std::optional<ExprRef> parseQuantifier(SourceSpan start) {
        Expr::QKind q =
            advance().kind == Tok::KwForall ? Expr::QKind::Forall
                                            : Expr::QKind::Exists;
        std::vector<std::string> typeParams;
        if (accept(Tok::Lt)) {
            do {
                typeParams.push_back(expect(Tok::Ident, "type parameter").text);
            } while (accept(Tok::Comma));
            expect(Tok::Gt, "'>'");
        }
        auto bound = parseBoundVars();
        if (!bound) return std::nullopt;
        expect(Tok::ColonColon, "'::'");
        std::vector<TriggerGroup> triggers;
        std::vector<Attr> attrs;
        for (;;) {
            if (at(Tok::LBrace)) {
                advance();
                TriggerGroup g;
                do {
                    auto e = parseExpr();
                    if (!e) return std::nullopt;
                    g.exprs.push_back(*e);
                } while (accept(Tok::Comma));
                expect(Tok::RBrace, "'}'");
                triggers.push_back(std::move(g));
            } else if (at(Tok::AttrOpen)) {
                auto as = parseAttrs();
                for (auto& a : as) {
                    if (a.name == "nopats") {
                        TriggerGroup g;
                        g.negated = true;
                        g.exprs = a.args;
                        triggers.push_back(std::move(g));
                    } else {
                        attrs.push_back(std::move(a));
                    }
                }
            } else {
                break;
            }
        }
        auto body = parseExpr();
        if (!body) return std::nullopt;
        expect(Tok::RParen, "')'");
        return Expr::quant(q, std::move(typeParams), std::move(*bound),
                           std::move(triggers), std::move(attrs), *body,
                           spanFrom(start));
    }

    std::optional<ExprRef> parseLambda(SourceSpan start) {
        advance();  // lambda
        auto bound = parseBoundVars();
        if (!bound) return std::nullopt;
        expect(Tok::ColonColon, "'::'");
        auto body = parseExpr();
        if (!body) return std::nullopt;
        expect(Tok::RParen, "')'");
        return Expr::lambda(std::move(*bound), *body, spanFrom(start));
    }

    // ---- statements ------------------------------------------------------

    std::optional<std::vector<StmtRef>> parseBlock() {
        expect(Tok::LBrace, "'{'");
        std::vector<StmtRef> stmts;
        while (!at(Tok::RBrace) && !at(Tok::Eof)) {
            std::size_t before = pos_;
            auto s = parseStmt();
            if (s) {
                stmts.push_back(*s);
            } else {
                skipTo({Tok::RBrace});
                if (pos_ == before) advance();
            }
            if (errors_ >= kMaxErrors) break;
        }
        expect(Tok::RBrace, "'}'");
        return stmts;
    }

    std::optional<ExprRef> parseGuard() {
        expect(Tok::LParen, "'('");
        ExprRef g;
        if (at(Tok::Star) && peek().kind == Tok::RParen) {
            g = Expr::star(cur().span);
            advance();
        } else {
            auto e = parseExpr();
            if (!e) return std::nullopt;
            g = *e;
        }
        expect(Tok::RParen, "')'");
        return g;
    }

    std::optional<StmtRef> parseIfTail(SourceSpan start) {
        auto guard = parseGuard();
        if (!guard) return std::nullopt;
        auto thenB = parseBlock();
        if (!thenB) return std::nullopt;
        std::vector<StmtRef> elseB;
        bool hasElse = false;
        if (accept(Tok::KwElse)) {
            hasElse = true;
            if (at(Tok::KwIf)) {
                SourceSpan s2 = cur().span;
                advance();
                auto nested = parseIfTail(s2);
                if (!nested) return std::nullopt;
                elseB.push_back(*nested);
            } else {
                auto b = parseBlock();
                if (!b) return std::nullopt;
                elseB = std::move(*b);
            }
        }
        return Stmt::ifStmt(*guard, std::move(*thenB), std::move(elseB),
                            hasElse, spanFrom(start));
    }

    std::optional<StmtRef> parseStmt() {
        SourceSpan start = cur().span;
        switch (cur().kind) {
        case Tok::KwAssert: {
            advance();
            auto attrs = parseAttrs();
            auto e = parseExpr();
            if (!e) return std::nullopt;
            expect(Tok::Semi, "';'");
            return Stmt::assertStmt(*e, std::move(attrs), spanFrom(start));
        }
        case Tok::KwAssume: {
            advance();
            auto attrs = parseAttrs();
            auto e = parseExpr();
            if (!e) return std::nullopt;
            expect(Tok::Semi, "';'");
            return Stmt::assumeStmt(*e, std::move(attrs), spanFrom(start));
        }
        case Tok::KwHavoc: {
            advance();
            std::vector<std::string> names;
            std::vector<SourceSpan> spans;
            do {
                Token t = expect(Tok::Ident, "variable");
                names.push_back(t.text);
                spans.push_back(t.span);
            } while (accept(Tok::Comma));
            expect(Tok::Semi, "';'");
            return Stmt::havoc(std::move(names), std::move(spans),
                               spanFrom(start));
        }
        case Tok::KwCall: {
            advance();
            if (accept(Tok::KwForall)) {
                Token callee = expect(Tok::Ident, "procedure name");
                expect(Tok::LParen, "'('");
                std::vector<ExprRef> args;
                if (!at(Tok::RParen)) {
                    do {
                        if (at(Tok::Star)) {
                            advance();
                            args.push_back(nullptr);  // wildcard
                        } else {
                            auto a = parseExpr();
                            if (!a) return std::nullopt;
                            args.push_back(*a);
                        }
                    } while (accept(Tok::Comma));
                }
                expect(Tok::RParen, "')'");
                expect(Tok::Semi, "';'");
                return Stmt::callForall(callee.text, std::move(args),
                                        spanFrom(start));
            }
            auto attrs = parseAttrs();
            // outs := callee(...) | callee(...)
            std::vector<std::string> outs;
            Token first = expect(Tok::Ident, "procedure or output");
            std::string callee;
            if (at(Tok::Comma) || at(Tok::Assign)) {
                outs.push_back(first.text);
                while (accept(Tok::Comma))
                    outs.push_back(expect(Tok::Ident, "output variable").text);
                expect(Tok::Assign, "':='");
                callee = expect(Tok::Ident, "procedure name").text;
            } else {
                callee = first.text;
            }
            expect(Tok::LParen, "'('");
            std::vector<ExprRef> ins;
            if (!at(Tok::RParen)) {
                do {
                    auto a = parseExpr();
                    if (!a) return std::nullopt;
                    ins.push_back(*a);
                } while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
            expect(Tok::Semi, "';'");
            return Stmt::call(std::move(outs), callee, std::move(ins),
                              std::move(attrs), spanFrom(start));
        }
        case Tok::KwIf: {
            advance();
            return parseIfTail(start);
        }
        case Tok::KwWhile: {
            advance();
            auto guard = parseGuard();
            if (!guard) return std::nullopt;
            std::vector<Invariant> invs;
            while (at(Tok::KwFree) || at(Tok::KwInvariant)) {
                SourceSpan is = cur().span;
                bool free = accept(Tok::KwFree);
                expect(Tok::KwInvariant, "'invariant'");
                auto attrs = parseAttrs();
                auto e = parseExpr();
                if (!e) return std::nullopt;
                expect(Tok::Semi, "';'");
                invs.push_back({free, *e, std::move(attrs), spanFrom(is)});
            }
            auto body = parseBlock();
            if (!body) return std::nullopt;
            return Stmt::whileStmt(*guard, std::move(invs), std::move(*body),
                                   spanFrom(start));
        }
        case Tok::KwBreak: {
            advance();
            if (at(Tok::Ident)) {
                error(cur().span, "labeled break is not supported");
                return std::nullopt;
            }
            expect(Tok::Semi, "';'");
            return Stmt::breakStmt(spanFrom(start));
        }
        case Tok::KwReturn: {
            advance();
            expect(Tok::Semi, "';'");
            return Stmt::returnStmt(spanFrom(start));
        }
        case Tok::KwGoto: {
            advance();
            std::vector<std::string> labels;
            do {
                labels.push_back(expect(Tok::Ident, "label").text);
            } while (accept(Tok::Comma));
            expect(Tok::Semi, "';'");
            return Stmt::gotoStmt(std::move(labels), spanFrom(start));
        }
        case Tok::Ident: {
            if (peek().kind == Tok::Colon) {
                Token t = advance();
                advance();  // ':'
                return Stmt::labelStmt(t.text, spanFrom(start));
            }
            // assignment
            std::vector<LhsTarget> lhs;
            do {
                auto t = parseLhsTarget();
                if (!t) return std::nullopt;
                lhs.push_back(std::move(*t));
            } while (accept(Tok::Comma));
            expect(Tok::Assign, "':='");
            std::vector<ExprRef> rhs;
            do {
                auto e = parseExpr();
                if (!e) return std::nullopt;
                rhs.push_back(*e);
            } while (accept(Tok::Comma));
            expect(Tok::Semi, "';'");
            if (lhs.size() != rhs.size()) {
                error(spanFrom(start),
                      "assignment has " + std::to_string(lhs.size()) +
                          " targets but " + std::to_string(rhs.size()) +
                          " sources");
                return std::nullopt;
            }
            return Stmt::assign(std::move(lhs), std::move(rhs),
                                spanFrom(start));
        }
        default:
            error(cur().span, "expected a statement, found " + describe(cur()));
            return std::nullopt;
        }
    }

    std::optional<LhsTarget> parseLhsTarget() {
        LhsTarget t;
        Token name = expect(Tok::Ident, "assignment target");
        t.name = name.text;
        SourceSpan start = name.span;
        while (accept(Tok::LBracket)) {
            std::vector<ExprRef> group;
            do {
                auto e = parseExpr();
                if (!e) return std::nullopt;
                group.push_back(*e);
            } while (accept(Tok::Comma));
            expect(Tok::RBracket, "']'");
            t.indexGroups.push_back(std::move(group));
        }
        t.span = spanFrom(start);
        return t;
    }

    // ---- declarations ----------------------------------------------------

    std::vector<std::string> parseTypeParamsOpt() {
        std::vector<std::string> ps;
        if (accept(Tok::Lt)) {
            do {
                ps.push_back(expect(Tok::Ident, "type parameter").text);
            } while (accept(Tok::Comma));
            expect(Tok::Gt, "'>'");
        }
        return ps;
    }

    // ids ':' type ['where' expr], flattened; group members share type/where
    // pointers so the printer can reconstruct the grouping.
    bool parseTypedIdsWhere(std::vector<Param>& out, bool allowWhere) {
        std::vector<Token> names;
        names.push_back(expect(Tok::Ident, "variable name"));
        while (accept(Tok::Comma))
            names.push_back(expect(Tok::Ident, "variable name"));
        expect(Tok::Colon, "':'");
        auto ty = parseType();
        if (!ty) return false;
        ExprRef where;
        if (at(Tok::KwWhere)) {
            if (!allowWhere) {
                error(cur().span, "'where' clause is not allowed here");
                return false;
            }
            advance();
            auto e = parseExpr();
            if (!e) return false;
            where = *e;
        }
        for (auto const& n : names)
            out.push_back({n.text, *ty, where, n.span});
        return true;
    }

    // '(' [typed ids where list] ')'
    bool parseParamList(std::vector<Param>& out, bool allowWhere,
                        bool allowAnonymous) {
        expect(Tok::LParen, "'('");
        if (accept(Tok::RParen)) return true;
        int anon = 0;
        do {
            // An entry is anonymous when it is a bare type (no name ':').
            bool named = at(Tok::Ident) && (peek().kind == Tok::Colon ||
                                            peek().kind == Tok::Comma);
            // "a, b: T" style needs deeper lookahead for the comma case:
            if (at(Tok::Ident) && peek().kind == Tok::Comma) {
                // Could be "a, b: T" or two anonymous ctor types. Scan for a
                // ':' before the matching ')' at depth 0.
                named = false;
                std::size_t i = pos_;
                int depth = 0;
                while (i < toks_.size()) {
                    Tok k = toks_[i].kind;
                    if (k == Tok::LParen || k == Tok::LBracket) ++depth;
                    else if (k == Tok::RBracket) --depth;
                    else if (k == Tok::RParen) {
                        if (depth == 0) break;
                        --depth;
                    } else if (k == Tok::Colon && depth == 0) {
                        named = true;
                        break;
                    } else if (k == Tok::Semi || k == Tok::Eof) {
                        break;
                    }
                    ++i;
                }
            }
            if (named) {
                if (!parseTypedIdsWhere(out, allowWhere)) return false;
            } else if (allowAnonymous) {
                SourceSpan s = cur().span;
                auto ty = parseType();
                if (!ty) return false;
                out.push_back({"$arg" + std::to_string(anon++), *ty, nullptr,
                               s});
            } else {
                if (!parseTypedIdsWhere(out, allowWhere)) return false;
            }
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "')'");
        return true;
    }

    // Attributes are accepted both before and after the declaration keyword.
    void takeAttrs(std::vector<Attr>& attrs) {
        for (auto& a : parseAttrs()) attrs.push_back(std::move(a));
    }

    void parseTopDecl(Program& p) {
        auto attrs = parseAttrs();
        SourceSpan start = cur().span;
        switch (cur().kind) {
        case Tok::KwType: {
            advance();
            takeAttrs(attrs);
            bool finite = false;
            // 'finite' is an identifier-like modifier in older Boogie.
            if (at(Tok::KwFinite) || (at(Tok::Ident) && cur().text == "finite")) {
                finite = true;
                advance();
            }
            auto d = Decl::make(Decl::Kind::TypeDecl);
            d->attrs = std::move(attrs);
            d->finite = finite;
            d->name = expect(Tok::Ident, "type name").text;
            while (at(Tok::Ident))
                d->typeParams.push_back(advance().text);
            if (accept(Tok::Eq)) {
                auto t = parseType();
                if (!t) { skipTo({}); return; }
                d->synonym = *t;
            }
            expect(Tok::Semi, "';'");
            d->span = spanFrom(start);
            p.decls.push_back(d);
            return;
        }
        case Tok::KwConst: {
            advance();
            takeAttrs(attrs);
            auto d = Decl::make(Decl::Kind::ConstDecl);
            d->attrs = std::move(attrs);
            d->unique = accept(Tok::KwUnique);
            do {
                Token t = expect(Tok::Ident, "constant name");
                d->names.push_back(t.text);
                d->nameSpans.push_back(t.span);
            } while (accept(Tok::Comma));
            expect(Tok::Colon, "':'");
            auto ty = parseType();
            if (!ty) { skipTo({}); return; }
            d->type = *ty;
            if (at(Tok::KwExtends) || at(Tok::Subtype)) {
                SourceSpan os = cur().span;
                d->order.present = true;
                d->order.legacy = at(Tok::Subtype);
                advance();
                if (!at(Tok::Semi) && !at(Tok::KwComplete)) {
                    do {
                        OrderParent parent;
                        parent.unique = accept(Tok::KwUnique);
                        Token t = expect(Tok::Ident, "parent constant");
                        parent.name = t.text;
                        parent.span = t.span;
                        d->order.parents.push_back(std::move(parent));
                    } while (accept(Tok::Comma));
                }
                d->order.complete = accept(Tok::KwComplete);
                d->order.span = SourceSpan::join(os, spanFrom(os));
            }
            expect(Tok::Semi, "';'");
            d->span = spanFrom(start);
            p.decls.push_back(d);
            return;
        }
        case Tok::KwVar: {
            advance();
            takeAttrs(attrs);
            auto d = Decl::make(Decl::Kind::VarDecl);
            d->attrs = std::move(attrs);
            do {
                if (!parseTypedIdsWhere(d->vars, /*allowWhere=*/true)) {
                    skipTo({});
                    return;
                }
            } while (accept(Tok::Comma));
            expect(Tok::Semi, "';'");
            d->span = spanFrom(start);
            p.decls.push_back(d);
            return;
        }
        case Tok::KwFunction: {
            advance();
            takeAttrs(attrs);
            auto d = Decl::make(Decl::Kind::FunctionDecl);
            d->attrs = std::move(attrs);
            d->name = expect(Tok::Ident, "function name").text;
            d->typeParams = parseTypeParamsOpt();
            if (!parseParamList(d->params, /*allowWhere=*/false,
                                /*allowAnonymous=*/true)) {
                skipTo({});
                return;
            }
            if (accept(Tok::KwReturns)) {
                expect(Tok::LParen, "'('");
                // named or anonymous result
                if (at(Tok::Ident) && peek().kind == Tok::Colon) {
                    Token t = advance();
                    advance();
                    auto ty = parseType();
                    if (!ty) { skipTo({}); return; }
                    d->result = {t.text, *ty, nullptr, t.span};
                } else {
                    SourceSpan s = cur().span;
                    auto ty = parseType();
                    if (!ty) { skipTo({}); return; }
                    d->result = {"", *ty, nullptr, s};
                }
                expect(Tok::RParen, "')'");
            } else if (accept(Tok::Colon)) {
                SourceSpan s = cur().span;
                auto ty = parseType();
                if (!ty) { skipTo({}); return; }
                d->result = {"", *ty, nullptr, s};
            } else {
                error(cur().span, "expected 'returns' or ':' in function "
                                  "declaration");
                skipTo({});
                return;
            }
            if (accept(Tok::LBrace)) {
                auto e = parseExpr();
                if (!e) { skipTo({}); return; }
                d->bodyExpr = *e;
                expect(Tok::RBrace, "'}'");
            } else {
                expect(Tok::Semi, "';'");
            }
            d->span = spanFrom(start);
            p.decls.push_back(d);
            return;
        }
        case Tok::KwAxiom: {
            advance();
            takeAttrs(attrs);
            auto d = Decl::make(Decl::Kind::AxiomDecl);
            d->attrs = std::move(attrs);
            auto e = parseExpr();
            if (!e) { skipTo({}); return; }
            d->expr = *e;
            expect(Tok::Semi, "';'");
            d->span = spanFrom(start);
            p.decls.push_back(d);
            return;
        }
        case Tok::KwProcedure: {
            advance();
            takeAttrs(attrs);
            auto d = Decl::make(Decl::Kind::ProcedureDecl);
            d->attrs = std::move(attrs);
            d->name = expect(Tok::Ident, "procedure name").text;
            d->typeParams = parseTypeParamsOpt();
            if (!parseParamList(d->params, /*allowWhere=*/true,
                                /*allowAnonymous=*/false)) {
                skipTo({});
                return;
            }
            if (accept(Tok::KwReturns)) {
                if (!parseParamList(d->outs, /*allowWhere=*/true,
                                    /*allowAnonymous=*/false)) {
                    skipTo({});
                    return;
                }
            }
            bool hasSemi = accept(Tok::Semi);
            parseSpecClauses(*d);
            if (!hasSemi) {
                // inline implementation body
                auto impl = parseImplBody(d->name, d->typeParams, d->params,
                                          d->outs, start);
                if (!impl) { skipTo({}); return; }
                (*impl)->inlineBody = true;
                d->span = spanFrom(start);
                p.decls.push_back(d);
                p.decls.push_back(*impl);
                return;
            }
            d->span = spanFrom(start);
            p.decls.push_back(d);
            return;
        }
        case Tok::KwImplementation: {
            advance();
            takeAttrs(attrs);
            auto attrsCopy = std::move(attrs);
            std::string name = expect(Tok::Ident, "procedure name").text;
            auto typeParams = parseTypeParamsOpt();
            std::vector<Param> ins, outs;
            if (!parseParamList(ins, false, false)) { skipTo({}); return; }
            if (accept(Tok::KwReturns)) {
                if (!parseParamList(outs, false, false)) { skipTo({}); return; }
            }
            auto impl = parseImplBody(name, typeParams, ins, outs, start);
            if (!impl) { skipTo({}); return; }
            (*impl)->attrs = std::move(attrsCopy);
            p.decls.push_back(*impl);
            return;
        }
        default:
            error(cur().span,
                  "expected a declaration, found " + describe(cur()));
            skipTo({});
            return;
        }
    }

    void parseSpecClauses(Decl& d) {
        for (;;) {
            bool free = false;
            if (at(Tok::KwFree)) {
                free = true;
                advance();
            }
            SourceSpan cs = cur().span;
            if (at(Tok::KwRequires) || at(Tok::KwEnsures)) {
                bool isPre = at(Tok::KwRequires);
                advance();
                auto attrs = parseAttrs();
                auto e = parseExpr();
                if (!e) { skipTo({}); return; }
                expect(Tok::Semi, "';'");
                SpecClause c{free, *e, std::move(attrs), spanFrom(cs)};
                (isPre ? d.preCl : d.postCl).push_back(std::move(c));
            } else if (at(Tok::KwModifies)) {
                if (free) {
                    error(cur().span, "'free' does not apply to modifies");
                    return;
                }
                advance();
                if (!at(Tok::Semi)) {
                    do {
                        Token t = expect(Tok::Ident, "modified variable");
                        d.modifies.push_back(t.text);
                        d.modifiesSpans.push_back(t.span);
                    } while (accept(Tok::Comma));
                }
                expect(Tok::Semi, "';'");
            } else {
                if (free)
                    error(cur().span,
                          "expected 'requires' or 'ensures' after 'free'");
                return;
            }
        }
    }

    std::optional<std::shared_ptr<Decl>> parseImplBody(
        std::string const& name, std::vector<std::string> const& tps,
        std::vector<Param> const& ins, std::vector<Param> const& outs,
        SourceSpan start) {
        auto impl = Decl::make(Decl::Kind::Implementation);
        impl->name = name;
        impl->typeParams = tps;
        impl->params = ins;
        impl->outs = outs;
        // Drop where clauses from the implementation's own param copies; the
        // registry keeps them with the declaration.
        for (auto& q : impl->params) q.where = nullptr;
        for (auto& q : impl->outs) q.where = nullptr;
        expect(Tok::LBrace, "'{'");
        while (at(Tok::KwVar)) {
            advance();
            do {
                if (!parseTypedIdsWhere(impl->locals, /*allowWhere=*/true))
                    return std::nullopt;
            } while (accept(Tok::Comma));
            expect(Tok::Semi, "';'");
        }
        while (!at(Tok::RBrace) && !at(Tok::Eof)) {
            std::size_t before = pos_;
            auto s = parseStmt();
            if (s) {
                impl->body.push_back(*s);
            } else {
                skipTo({Tok::RBrace});
                if (pos_ == before) advance();
            }
            if (errors_ >= kMaxErrors) break;
        }
        expect(Tok::RBrace, "'}'");
        impl->span = spanFrom(start);
        return impl;
    }
};

} // namespace

std::optional<Program> parseProgramIn(std::string const& source, int fileId,
                                      DiagnosticEngine& diags) {
    auto tokens = lex(source, fileId);
    // Surface lexical errors through the parser's normal error path.
    for (auto const& t : tokens) {
        if (t.kind == Tok::Error) {
            diags.error(t.span, t.text);
            return std::nullopt;
        }
    }
    return Parser(std::move(tokens), diags).run();
}

std::optional<Program> parseProgram(std::string const& source,
                                    std::string const& fileName,
                                    SourceManager& sm,
                                    DiagnosticEngine& diags) {
    int id = sm.addFile(fileName);
    return parseProgramIn(source, id, diags);
}

} // namespace b2y::bpl
