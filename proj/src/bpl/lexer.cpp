#include "b2y/bpl/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace b2y::bpl {

char const* tokenName(Tok t) {
    switch (t) {
    case Tok::Eof: return "end of input";
    case Tok::Error: return "invalid token";
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::RealLit: return "real literal";
    case Tok::BvLit: return "bitvector literal";
    case Tok::StringLit: return "string literal";
    case Tok::BvTypeName: return "bitvector type";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::ColonColon: return "'::'";
    case Tok::Assign: return "':='";
    case Tok::AttrOpen: return "'{:'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Div: return "'/'";
    case Tok::KwDiv: return "'div'";
    case Tok::KwMod: return "'mod'";
    case Tok::StarStar: return "'**'";
    case Tok::PlusPlus: return "'++'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Implies: return "'==>'";
    case Tok::Explies: return "'<=='";
    case Tok::Iff: return "'<==>'";
    case Tok::Not: return "'!'";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Subtype: return "'<:'";
    case Tok::Eq: return "'='";
    case Tok::KwType: return "'type'";
    case Tok::KwConst: return "'const'";
    case Tok::KwUnique: return "'unique'";
    case Tok::KwExtends: return "'extends'";
    case Tok::KwComplete: return "'complete'";
    case Tok::KwFinite: return "'finite'";
    case Tok::KwVar: return "'var'";
    case Tok::KwFunction: return "'function'";
    case Tok::KwReturns: return "'returns'";
    case Tok::KwAxiom: return "'axiom'";
    case Tok::KwProcedure: return "'procedure'";
    case Tok::KwImplementation: return "'implementation'";
    case Tok::KwRequires: return "'requires'";
    case Tok::KwEnsures: return "'ensures'";
    case Tok::KwModifies: return "'modifies'";
    case Tok::KwFree: return "'free'";
    case Tok::KwInvariant: return "'invariant'";
    case Tok::KwWhere: return "'where'";
    case Tok::KwAssert: return "'assert'";
    case Tok::KwAssume: return "'assume'";
    case Tok::KwHavoc: return "'havoc'";
    case Tok::KwCall: return "'call'";
    case Tok::KwForall: return "'forall'";
    case Tok::KwExists: return "'exists'";
    case Tok::KwLambda: return "'lambda'";
    case Tok::KwOld: return "'old'";
    case Tok::KwIf: return "'if'";
    case Tok::KwThen: return "'then'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwBreak: return "'break'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwGoto: return "'goto'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwInt: return "'int'";
    case Tok::KwReal: return "'real'";
    case Tok::KwBool: return "'bool'";
    }
    return "token";
}

namespace {

std::unordered_map<std::string, Tok> const& keywords() {
    static const std::unordered_map<std::string, Tok> kw = {
        {"type", Tok::KwType}, {"const", Tok::KwConst},
        {"unique", Tok::KwUnique}, {"extends", Tok::KwExtends},
        {"complete", Tok::KwComplete}, {"finite", Tok::KwFinite},
        {"var", Tok::KwVar}, {"function", Tok::KwFunction},
        {"returns", Tok::KwReturns}, {"axiom", Tok::KwAxiom},
        {"procedure", Tok::KwProcedure},
        {"implementation", Tok::KwImplementation},
        {"requires", Tok::KwRequires}, {"ensures", Tok::KwEnsures},
        {"modifies", Tok::KwModifies}, {"free", Tok::KwFree},
        {"invariant", Tok::KwInvariant}, {"where", Tok::KwWhere},
        {"assert", Tok::KwAssert}, {"assume", Tok::KwAssume},
        {"havoc", Tok::KwHavoc}, {"call", Tok::KwCall},
        {"forall", Tok::KwForall}, {"exists", Tok::KwExists},
        {"lambda", Tok::KwLambda}, {"old", Tok::KwOld},
        {"if", Tok::KwIf}, {"then", Tok::KwThen}, {"else", Tok::KwElse},
        {"while", Tok::KwWhile}, {"break", Tok::KwBreak},
        {"return", Tok::KwReturn}, {"goto", Tok::KwGoto},
        {"true", Tok::KwTrue}, {"false", Tok::KwFalse},
        {"int", Tok::KwInt}, {"real", Tok::KwReal}, {"bool", Tok::KwBool},
        {"div", Tok::KwDiv}, {"mod", Tok::KwMod},
    };
    return kw;
}

bool isIdentStart(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           c == '$' || c == '#' || c == '\'' || c == '.' || c == '`' ||
           c == '~' || c == '^' || c == '?' || c == '\\';
}
bool isIdentCont(char c) {
    return isIdentStart(c) || std::isdigit(static_cast<unsigned char>(c));
}

class Scanner {
public:
    Scanner(std::string const& src, int fileId)
        : src_(src), fileId_(fileId) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            Token t = next();
            out.push_back(t);
            if (t.kind == Tok::Eof) break;
        }
        return out;
    }

private:
    std::string const& src_;
    int fileId_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;

    bool atEnd() const { return pos_ >= src_.size(); }
    char peek(std::size_t k = 0) const {
        return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    bool match(char c) {
        if (atEnd() || src_[pos_] != c) return false;
        advance();
        return true;
    }

    Token make(Tok kind, SourceSpan span, std::string text = {}) const {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = span;
        return t;
    }

    void skipTrivia(bool& bad, SourceSpan& badSpan, std::string& badMsg) {
        for (;;) {
            if (atEnd()) return;
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!atEnd() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                SourceSpan start{fileId_, line_, col_, line_, col_};
                advance();
                advance();
                int depth = 1;  // Boogie block comments nest
                while (!atEnd() && depth > 0) {
                    if (peek() == '/' && peek(1) == '*') {
                        advance(); advance(); ++depth;
                    } else if (peek() == '*' && peek(1) == '/') {
                        advance(); advance(); --depth;
                    } else {
                        advance();
                    }
                }
                if (depth > 0) {
                    bad = true;
                    badSpan = start;
                    badMsg = "unterminated block comment";
                    return;
                }
            } else {
                return;
            }
        }
    }

    Token next() {
        bool bad = false;
        SourceSpan badSpan;
        std::string badMsg;
        skipTrivia(bad, badSpan, badMsg);
        if (bad) return make(Tok::Error, badSpan, badMsg);

        SourceSpan span{fileId_, line_, col_, line_, col_};
        auto finish = [&](Tok k, std::string text = {}) {
            span.endLine = line_;
            span.endCol = col_;
            return make(k, span, std::move(text));
        };

        if (atEnd()) return finish(Tok::Eof);
        char c = advance();

        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits(1, c);
            while (std::isdigit(static_cast<unsigned char>(peek())))
                digits += advance();
            // 12bv8 bitvector literal
            if (peek() == 'b' && peek(1) == 'v' &&
                std::isdigit(static_cast<unsigned char>(peek(2)))) {
                advance();
                advance();
                std::string width;
                while (std::isdigit(static_cast<unsigned char>(peek())))
                    width += advance();
                Token t = finish(Tok::BvLit, digits);
                t.bvWidth = std::stoi(width);
                return t;
            }
            // real: 1.5, 1.5e-3, 1e9
            bool isReal = false;
            if (peek() == '.' &&
                std::isdigit(static_cast<unsigned char>(peek(1)))) {
                isReal = true;
                digits += advance();
                while (std::isdigit(static_cast<unsigned char>(peek())))
                    digits += advance();
            }
            if ((peek() == 'e' || peek() == 'E') &&
                (std::isdigit(static_cast<unsigned char>(peek(1))) ||
                 ((peek(1) == '+' || peek(1) == '-') &&
                  std::isdigit(static_cast<unsigned char>(peek(2)))))) {
                isReal = true;
                digits += advance();
                if (peek() == '+' || peek() == '-') digits += advance();
                while (std::isdigit(static_cast<unsigned char>(peek())))
                    digits += advance();
            }
            return finish(isReal ? Tok::RealLit : Tok::IntLit, digits);
        }

        if (isIdentStart(c)) {
            std::string name(1, c);
            while (isIdentCont(peek())) name += advance();
            auto it = keywords().find(name);
            if (it != keywords().end()) return finish(it->second, name);
            // bv13 in type position
            if (name.size() > 2 && name[0] == 'b' && name[1] == 'v') {
                bool allDigits = true;
                for (std::size_t i = 2; i < name.size(); ++i)
                    if (!std::isdigit(static_cast<unsigned char>(name[i])))
                        allDigits = false;
                if (allDigits) {
                    Token t = finish(Tok::BvTypeName, name);
                    t.bvWidth = std::stoi(name.substr(2));
                    return t;
                }
            }
            return finish(Tok::Ident, name);
        }

        switch (c) {
        case '(': return finish(Tok::LParen);
        case ')': return finish(Tok::RParen);
        case '[': return finish(Tok::LBracket);
        case ']': return finish(Tok::RBracket);
        case '{':
            if (match(':')) return finish(Tok::AttrOpen);
            return finish(Tok::LBrace);
        case '}': return finish(Tok::RBrace);
        case ',': return finish(Tok::Comma);
        case ';': return finish(Tok::Semi);
        case ':':
            if (match(':')) return finish(Tok::ColonColon);
            if (match('=')) return finish(Tok::Assign);
            return finish(Tok::Colon);
        case '+':
            if (match('+')) return finish(Tok::PlusPlus);
            return finish(Tok::Plus);
        case '-': return finish(Tok::Minus);
        case '*':
            if (match('*')) return finish(Tok::StarStar);
            return finish(Tok::Star);
        case '/': return finish(Tok::Div);
        case '&':
            if (match('&')) return finish(Tok::AndAnd);
            return finish(Tok::Error, "stray '&'");
        case '|':
            if (match('|')) return finish(Tok::OrOr);
            return finish(Tok::Error, "stray '|'");
        case '!':
            if (match('=')) return finish(Tok::NotEq);
            return finish(Tok::Not);
        case '=':
            if (peek() == '=' && peek(1) == '>') {
                advance();
                advance();
                return finish(Tok::Implies);
            }
            if (match('=')) return finish(Tok::EqEq);
            return finish(Tok::Eq);
        case '<':
            if (peek() == '=' && peek(1) == '=' && peek(2) == '>') {
                advance(); advance(); advance();
                return finish(Tok::Iff);
            }
            if (peek() == '=' && peek(1) == '=') {
                advance(); advance();
                return finish(Tok::Explies);
            }
            if (match('=')) return finish(Tok::Le);
            if (match(':')) return finish(Tok::Subtype);
            return finish(Tok::Lt);
        case '>':
            if (match('=')) return finish(Tok::Ge);
            return finish(Tok::Gt);
        case '"': {
            std::string s;
            while (!atEnd() && peek() != '"' && peek() != '\n') s += advance();
            if (!match('"'))
                return finish(Tok::Error, "unterminated string literal");
            return finish(Tok::StringLit, s);
        }
        default:
            return finish(Tok::Error,
                          std::string("unexpected character '") + c + "'");
        }
    }
};

} // namespace

std::vector<Token> lex(std::string const& source, int fileId) {
    return Scanner(source, fileId).run();
}

} // namespace b2y::bpl
