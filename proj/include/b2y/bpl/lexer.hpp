#pragma once

#include "b2y/basic.hpp"

#include <string>
#include <vector>

namespace b2y::bpl {

enum class Tok {
    Eof, Error,
    Ident, IntLit, RealLit, BvLit, StringLit, BvTypeName,
    // punctuation
    LParen, RParen, LBracket, RBracket, LBrace, RBrace,
    Comma, Semi, Colon, ColonColon, Assign /* := */, AttrOpen /* {: */,
    // operators
    Plus, Minus, Star, Div /* / */, KwDiv, KwMod, StarStar, PlusPlus,
    AndAnd, OrOr, Implies, Explies, Iff, Not,
    EqEq, NotEq, Lt, Le, Gt, Ge, Subtype /* <: */, Eq /* = */,
    // keywords
    KwType, KwConst, KwUnique, KwExtends, KwComplete, KwFinite, KwVar,
    KwFunction, KwReturns, KwAxiom, KwProcedure, KwImplementation,
    KwRequires, KwEnsures, KwModifies, KwFree, KwInvariant, KwWhere,
    KwAssert, KwAssume, KwHavoc, KwCall, KwForall, KwExists, KwLambda,
    KwOld, KwIf, KwThen, KwElse, KwWhile, KwBreak, KwReturn, KwGoto,
    KwTrue, KwFalse, KwInt, KwReal, KwBool
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;   // identifier / literal spelling
    int bvWidth = 0;    // BvLit and BvTypeName
    SourceSpan span;
};

char const* tokenName(Tok t);

// Scans the whole input; lexical problems become Error tokens carrying a
// message in text, which the parser reports. Never throws.
std::vector<Token> lex(std::string const& source, int fileId);

} // namespace b2y::bpl
