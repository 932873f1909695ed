#include "b2y/sema/typecheck.hpp"
#include "support/testutil.hpp"

#include <doctest.h>

using namespace b2y;
using bpl::Decl;
using bpl::Expr;
using bpl::Stmt;
using bpl::Type;

namespace {

struct Checked {
    bpl::Program prog;
    sema::TypeInfo info;
};

Checked checkOk(std::string const& src) {
    SourceManager sm;
    DiagnosticEngine diags(sm);
    auto p = bpl::parseProgram(src, "test.bpl", sm, diags);
    INFO("diagnostics:\n", diags.renderToString());
    INFO("source:\n", src);
    REQUIRE(p.has_value());
    auto info = sema::typecheck(*p, diags);
    INFO("sema diagnostics:\n", diags.renderToString());
    REQUIRE(info.has_value());
    return {std::move(*p), std::move(*info)};
}

// Typechecking must fail; returns the rendered diagnostics for inspection.
std::string checkErrors(std::string const& src) {
    SourceManager sm;
    DiagnosticEngine diags(sm);
    auto p = bpl::parseProgram(src, "test.bpl", sm, diags);
    INFO("source:\n", src);
    INFO("parse diagnostics:\n", diags.renderToString());
    REQUIRE(p.has_value());
    auto info = sema::typecheck(*p, diags);
    INFO("sema diagnostics:\n", diags.renderToString());
    REQUIRE_FALSE(info.has_value());
    REQUIRE(diags.hasErrors());
    return diags.renderToString();
}

bpl::TypeRef typeOf(Checked const& c, Expr const* e) {
    auto it = c.info.exprTypes.find(e);
    REQUIRE(it != c.info.exprTypes.end());
    return it->second;
}

std::string typeStr(Checked const& c, Expr const* e) {
    return bpl::typeToString(typeOf(c, e));
}

bpl::DeclRef declAt(Checked const& c, std::size_t i) {
    REQUIRE(i < c.prog.decls.size());
    return c.prog.decls[i];
}

// Last implementation in the program; convenient for single-procedure tests.
bpl::DeclRef lastImpl(Checked const& c) {
    for (auto it = c.prog.decls.rbegin(); it != c.prog.decls.rend(); ++it)
        if ((*it)->kind == Decl::Kind::Implementation) return *it;
    REQUIRE(false);
    return nullptr;
}

} // namespace

TEST_CASE("sema: literal and operator types") {
    auto c = checkOk("axiom 1 + 2 * 3 == 7;\n"
                     "axiom 2.5 / 0.5 > 1.0;\n"
                     "axiom 7 div 2 == 3 && 7 mod 2 == 1;\n"
                     "axiom 2.0 ** 3.0 == 8.0;\n"
                     "axiom !(true <==> false);\n"
                     "axiom -3 < 4;\n"
                     "axiom real(2) == 2.0 && int(2.5) == 2;\n");
    auto eq = declAt(c, 0)->expr;  // (1 + 2*3) == 7
    CHECK(typeStr(c, eq.get()) == "bool");
    CHECK(typeStr(c, eq->a.get()) == "int");
    CHECK(typeStr(c, eq->a->b.get()) == "int");  // 2*3
    auto gt = declAt(c, 1)->expr;
    CHECK(typeStr(c, gt->a.get()) == "real");
    auto pow = declAt(c, 3)->expr->a;
    CHECK(typeStr(c, pow.get()) == "real");
    auto conv = declAt(c, 6)->expr;  // (real(2) == 2.0) && (int(2.5) == 2)
    CHECK(typeStr(c, conv->a->a.get()) == "real");
    CHECK(typeStr(c, conv->b->a.get()) == "int");
}

TEST_CASE("sema: chains and bitvectors") {
    auto c = checkOk("const b: bv8;\n"
                     "axiom 1 <= 2 && 2 < 3;\n"
                     "axiom 2bv32 ++ b[4:0] ++ b[8:4] == 0bv40;\n");
    auto eq = declAt(c, 2)->expr;
    CHECK(typeStr(c, eq->a.get()) == "bv40");
}

TEST_CASE("sema: chain comparisons type as bool") {
    auto c = checkOk("const N: int;\n"
                     "axiom (forall k, l: int :: 0 <= k <= l < N ==> k < N);\n");
    auto q = declAt(c, 1)->expr;
    auto imp = q->body;
    CHECK(imp->a->kind == Expr::Kind::Chain);
    CHECK(typeStr(c, imp->a.get()) == "bool");
    CHECK(typeStr(c, imp->a->items[1].get()) == "int");
}

TEST_CASE("sema: identifier resolution and kinds") {
    auto c = checkOk("const C: int;\n"
                     "var g: bool;\n"
                     "procedure p(x: int) returns (y: int)\n"
                     "  requires x > C;\n"
                     "  ensures y == old(x) + C;\n"
                     "{\n"
                     "  var t: int;\n"
                     "  t := x + C;\n"
                     "  y := t;\n"
                     "}\n");
    auto proc = declAt(c, 2);
    REQUIRE(proc->kind == Decl::Kind::ProcedureDecl);
    auto& pre = proc->preCl[0].expr;  // x > C
    auto itX = c.info.refs.find(pre->a.get());
    REQUIRE(itX != c.info.refs.end());
    CHECK(itX->second.kind == sema::RefKind::InParam);
    auto itC = c.info.refs.find(pre->b.get());
    REQUIRE(itC != c.info.refs.end());
    CHECK(itC->second.kind == sema::RefKind::Constant);

    auto& post = proc->postCl[0].expr;  // y == old(x) + C
    auto itY = c.info.refs.find(post->a.get());
    REQUIRE(itY != c.info.refs.end());
    CHECK(itY->second.kind == sema::RefKind::OutParam);

    auto impl = lastImpl(c);
    auto& assign = impl->body[0];  // t := x + C
    auto itNames = c.info.stmtNameRefs.find(assign.get());
    REQUIRE(itNames != c.info.stmtNameRefs.end());
    CHECK(itNames->second[0].kind == sema::RefKind::Local);
    CHECK(itNames->second[0].name == "t");
}

TEST_CASE("sema: locals shadow globals") {
    auto c = checkOk("var g: int;\n"
                     "procedure p();\n"
                     "implementation p() {\n"
                     "  var g: bool;\n"
                     "  g := true;\n"
                     "}\n");
    auto impl = lastImpl(c);
    auto it = c.info.stmtNameRefs.find(impl->body[0].get());
    REQUIRE(it != c.info.stmtNameRefs.end());
    CHECK(it->second[0].kind == sema::RefKind::Local);
    CHECK(bpl::typeToString(it->second[0].type) == "bool");
}

TEST_CASE("sema: bound variables shadow and scope") {
    auto c = checkOk("const c: int;\n"
                     "axiom (forall c: bool :: c ==> c);\n"
                     "axiom (exists x: int :: x == c);\n");
    auto q = declAt(c, 1)->expr;
    auto it = c.info.refs.find(q->body->a.get());
    REQUIRE(it != c.info.refs.end());
    CHECK(it->second.kind == sema::RefKind::Bound);
    CHECK(bpl::typeToString(it->second.type) == "bool");
}

TEST_CASE("sema: quantifier type parameters resolve to variables") {
    auto c = checkOk(
        "axiom (forall <T> m: [T]int, x: T :: m[x] >= 0);\n");
    auto q = declAt(c, 0)->expr;
    auto sel = q->body->a;  // m[x]
    CHECK(typeStr(c, sel.get()) == "int");
    CHECK(typeStr(c, sel->items[0].get()) == "T");
    auto itM = c.info.refs.find(sel->a.get());
    REQUIRE(itM != c.info.refs.end());
    CHECK(itM->second.type->kind == Type::Kind::Map);
    CHECK(itM->second.type->domain[0]->kind == Type::Kind::Var);
}

TEST_CASE("sema: polymorphic map selection instantiates binders") {
    auto c = checkOk("const m: <a>[a, a]int;\n"
                     "axiom m[true, false] == m[1, 2];\n");
    auto eq = declAt(c, 1)->expr;
    auto left = eq->a;
    auto itL = c.info.mapInst.find(left.get());
    REQUIRE(itL != c.info.mapInst.end());
    REQUIRE(itL->second.size() == 1);
    CHECK(bpl::typeToString(itL->second[0]) == "bool");
    auto itR = c.info.mapInst.find(eq->b.get());
    REQUIRE(itR != c.info.mapInst.end());
    CHECK(bpl::typeToString(itR->second[0]) == "int");
}

TEST_CASE("sema: codomain-only binder defaults to int") {
    auto c = checkOk("const m: <a>[int]a;\n"
                     "axiom m[0] == m[1];\n");
    auto eq = declAt(c, 1)->expr;
    auto it = c.info.mapInst.find(eq->a.get());
    REQUIRE(it != c.info.mapInst.end());
    CHECK(bpl::typeToString(it->second[0]) == "int");
    CHECK(typeStr(c, eq->a.get()) == "int");
}

TEST_CASE("sema: codomain-only binder takes the expected type when known") {
    auto c = checkOk("const m: <a>[int]a;\n"
                     "axiom m[0] ==> false;\n"
                     "axiom 1 + m[1] == 2;\n");
    auto imp = declAt(c, 1)->expr;
    auto it = c.info.mapInst.find(imp->a.get());
    REQUIRE(it != c.info.mapInst.end());
    CHECK(bpl::typeToString(it->second[0]) == "bool");
    auto add = declAt(c, 2)->expr->a;
    auto it2 = c.info.mapInst.find(add->b.get());
    REQUIRE(it2 != c.info.mapInst.end());
    CHECK(bpl::typeToString(it2->second[0]) == "int");
}

TEST_CASE("sema: map update keeps the base type") {
    auto c = checkOk("const m: <a>[a]int;\n"
                     "axiom m[true := 1][false] == 1;\n");
    auto eq = declAt(c, 1)->expr;
    auto sel = eq->a;
    auto upd = sel->a;
    REQUIRE(upd->kind == Expr::Kind::Update);
    auto t = typeOf(c, upd.get());
    REQUIRE(t->kind == Type::Kind::Map);
    CHECK(t->typeParams.size() == 1);
    auto it = c.info.mapInst.find(upd.get());
    REQUIRE(it != c.info.mapInst.end());
    CHECK(bpl::typeToString(it->second[0]) == "bool");
}

TEST_CASE("sema: polymorphic function applications record type arguments") {
    auto c = checkOk("function id<a>(x: a) returns (a);\n"
                     "axiom id(true) && id(1) == 1;\n");
    auto conj = declAt(c, 1)->expr;
    auto callB = conj->a;
    REQUIRE(callB->kind == Expr::Kind::Call);
    auto it = c.info.callTypeArgs.find(callB.get());
    REQUIRE(it != c.info.callTypeArgs.end());
    CHECK(bpl::typeToString(it->second[0]) == "bool");
    auto callI = conj->b->a;
    auto it2 = c.info.callTypeArgs.find(callI.get());
    REQUIRE(it2 != c.info.callTypeArgs.end());
    CHECK(bpl::typeToString(it2->second[0]) == "int");
}

TEST_CASE("sema: function bodies check against the result type") {
    checkOk("function sq(x: int) returns (int) { x * x }\n"
            "function choose(b: bool, x: int, y: int) returns (int)\n"
            "{ if b then x else y }\n");
    auto err = checkErrors("function bad(x: int) returns (bool) { x + 1 }\n");
    CHECK(err.find("expected bool") != std::string::npos);
}

TEST_CASE("sema: lambda produces a map type") {
    auto c = checkOk("axiom (lambda x: int, y: bool :: y)[1, true];\n");
    auto sel = declAt(c, 0)->expr;
    auto lam = sel->a;
    auto t = typeOf(c, lam.get());
    REQUIRE(t->kind == Type::Kind::Map);
    REQUIRE(t->domain.size() == 2);
    CHECK(bpl::typeToString(t->codomain) == "bool");
}

TEST_CASE("sema: type synonyms are transparent") {
    auto c = checkOk("type Heap = [int]int;\n"
                     "type Pair a = [a]a;\n"
                     "var h: Heap;\n"
                     "var h2: [int]int;\n"
                     "procedure p()\n"
                     "  modifies h;\n"
                     "{\n"
                     "  h[0] := h2[1];\n"
                     "}\n");
    auto const& g = c.info.globals;
    REQUIRE(g.count("h"));
    REQUIRE(g.count("h2"));
    CHECK(c.info.sameType(g.at("h").type, g.at("h2").type));
    CHECK_FALSE(c.info.sameType(g.at("h").type, Type::intType()));
    auto pair = c.info.synonyms.at("Pair");
    CHECK(pair.params.size() == 1);
    auto norm = c.info.normalize(
        Type::ctor("Pair", {Type::boolType()}, SourceSpan{}));
    CHECK(bpl::typeToString(norm) == "[bool]bool");
}

TEST_CASE("sema: map types compare up to binder renaming") {
    auto c = checkOk("const m: <a>[a]a;\n"
                     "const n: <b>[b]b;\n"
                     "axiom m == n;\n");
    CHECK(c.info.sameType(c.info.globals.at("m").type,
                          c.info.globals.at("n").type));
}

TEST_CASE("sema: statements record call data") {
    auto c = checkOk("var g: int;\n"
                     "procedure sub<a>(x: a) returns (r: a);\n"
                     "procedure caller()\n"
                     "  modifies g;\n"
                     "{\n"
                     "  var b: bool;\n"
                     "  call b := sub(true);\n"
                     "  call g := sub(7);\n"
                     "  havoc g, b;\n"
                     "}\n");
    auto impl = lastImpl(c);
    auto& callB = impl->body[0];
    auto it = c.info.stmtCallTypeArgs.find(callB.get());
    REQUIRE(it != c.info.stmtCallTypeArgs.end());
    CHECK(bpl::typeToString(it->second[0]) == "bool");
    auto itOut = c.info.stmtNameRefs.find(callB.get());
    REQUIRE(itOut != c.info.stmtNameRefs.end());
    CHECK(itOut->second[0].kind == sema::RefKind::Local);
    auto& callG = impl->body[1];
    auto it2 = c.info.stmtCallTypeArgs.find(callG.get());
    REQUIRE(it2 != c.info.stmtCallTypeArgs.end());
    CHECK(bpl::typeToString(it2->second[0]) == "int");
    auto& hav = impl->body[2];
    auto itH = c.info.stmtNameRefs.find(hav.get());
    REQUIRE(itH != c.info.stmtNameRefs.end());
    REQUIRE(itH->second.size() == 2);
    CHECK(itH->second[0].kind == sema::RefKind::GlobalVar);
    CHECK(itH->second[1].kind == sema::RefKind::Local);
}

TEST_CASE("sema: indexed assignment instantiates map binders") {
    auto c = checkOk("var m: <a>[a]int;\n"
                     "procedure p()\n"
                     "  modifies m;\n"
                     "{\n"
                     "  m[true] := 5;\n"
                     "  m[1] := 6;\n"
                     "}\n");
    auto impl = lastImpl(c);
    auto itT = c.info.assignInst.find(impl->body[0].get());
    REQUIRE(itT != c.info.assignInst.end());
    REQUIRE(itT->second.size() == 1);     // one lhs target
    REQUIRE(itT->second[0].size() == 1);  // one index group
    CHECK(bpl::typeToString(itT->second[0][0][0]) == "bool");
    auto itI = c.info.assignInst.find(impl->body[1].get());
    REQUIRE(itI != c.info.assignInst.end());
    CHECK(bpl::typeToString(itI->second[0][0][0]) == "int");
}

TEST_CASE("sema: nested index groups walk through map layers") {
    auto c = checkOk("var grid: [int][bool]real;\n"
                     "procedure p()\n"
                     "  modifies grid;\n"
                     "{\n"
                     "  grid[3][true] := 1.5;\n"
                     "}\n");
    auto impl = lastImpl(c);
    auto& s = impl->body[0];
    REQUIRE(s->lhs[0].indexGroups.size() == 2);
    CHECK(typeStr(c, s->rhs[0].get()) == "real");
}

TEST_CASE("sema: wildcard guards type as bool") {
    auto c = checkOk("procedure p() {\n"
                     "  if (*) {\n"
                     "    while (*) { }\n"
                     "  }\n"
                     "}\n");
    auto impl = lastImpl(c);
    auto& ifs = impl->body[0];
    CHECK(typeStr(c, ifs->expr.get()) == "bool");
}

TEST_CASE("sema: old is allowed in posts, invariants and bodies only") {
    checkOk("var g: int;\n"
            "procedure p()\n"
            "  modifies g;\n"
            "  ensures g == old(g) + 1;\n"
            "{\n"
            "  g := g + 1;\n"
            "  while (false) invariant g >= old(g); { }\n"
            "  assert g == old(g) + 1;\n"
            "}\n");
    CHECK(checkErrors("var g: int;\n"
                      "procedure p();\n"
                      "  requires old(g) == 0;\n")
              .find("old()") != std::string::npos);
    CHECK(checkErrors("var g: int;\n"
                      "procedure p(x: int); requires x == old(x);\n")
              .find("old()") != std::string::npos);
}

TEST_CASE("sema: axioms and function bodies cannot read globals") {
    CHECK(checkErrors("var g: int;\naxiom g == 0;\n")
              .find("cannot be mentioned here") != std::string::npos);
    CHECK(checkErrors("var g: int;\n"
                      "function f(x: int) returns (int) { x + g }\n")
              .find("cannot be mentioned here") != std::string::npos);
    // constants are fine in both places
    checkOk("const c: int;\naxiom c == 0;\n"
            "function f(x: int) returns (int) { x + c }\n");
}

TEST_CASE("sema: out parameters are invisible in requires") {
    CHECK(checkErrors("procedure p(x: int) returns (y: int);\n"
                      "  requires y > 0;\n")
              .find("unknown identifier 'y'") != std::string::npos);
    checkOk("procedure p(x: int) returns (y: int);\n"
            "  ensures y > x;\n");
}

TEST_CASE("sema: where clause scoping") {
    auto c = checkOk(
        "var g: int where g >= 0;\n"
        "var h: int where g <= h;\n"
        "procedure p(x: int where x > g, y: int where y > x)\n"
        "  returns (r: int where r >= x + y);\n"
        "implementation p(x: int, y: int) returns (r: int) {\n"
        "  var t: int where t != r;\n"
        "  t := x;\n"
        "  r := t + y;\n"
        "}\n");
    CHECK(c.info.globals.at("g").where != nullptr);
    // in-parameter wheres cannot see outs
    CHECK(checkErrors("procedure p(x: int where x > r) returns (r: int);\n")
              .find("unknown identifier 'r'") != std::string::npos);
}

TEST_CASE("sema: unknown names are reported") {
    CHECK(checkErrors("axiom nope == 1;\n").find("unknown identifier") !=
          std::string::npos);
    CHECK(checkErrors("var v: Mystery;\n").find("unknown type") !=
          std::string::npos);
    CHECK(checkErrors("procedure p() { call q(); }\n")
              .find("unknown procedure") != std::string::npos);
    CHECK(checkErrors("axiom f(1) == 1;\n").find("unknown function") !=
          std::string::npos);
    CHECK(checkErrors("procedure p() { goto L; }\n")
              .find("undeclared label") != std::string::npos);
}

TEST_CASE("sema: namespaces separate functions, procedures and values") {
    CHECK(checkErrors("function f(x: int) returns (int);\naxiom f == 1;\n")
              .find("must be applied") != std::string::npos);
    CHECK(checkErrors("procedure p();\naxiom p(1) == 1;\n")
              .find("cannot be used in an expression") != std::string::npos);
    CHECK(checkErrors("function f(x: int) returns (int);\n"
                      "procedure q() { call f(1); }\n")
              .find("is a function") != std::string::npos);
}

TEST_CASE("sema: redeclarations are rejected") {
    CHECK(checkErrors("type T; type T;\n").find("redeclaration of type") !=
          std::string::npos);
    CHECK(checkErrors("const c: int;\nvar c: bool;\n")
              .find("redeclaration of 'c'") != std::string::npos);
    CHECK(checkErrors("const f: int;\nfunction f() returns (int);\n")
              .find("redeclaration of 'f'") != std::string::npos);
    CHECK(checkErrors("procedure p();\nprocedure p(x: int);\n")
              .find("redeclaration of procedure") != std::string::npos);
    // same name for a procedure and a constant is fine: separate namespaces
    checkOk("const p: int;\nprocedure p();\n");
}

TEST_CASE("sema: type errors in operators") {
    CHECK(checkErrors("axiom true + false == true;\n")
              .find("needs int or real") != std::string::npos);
    CHECK(checkErrors("axiom 1 == true;\n").find("cannot compare") !=
          std::string::npos);
    CHECK(checkErrors("axiom 1 && true;\n").find("expected bool") !=
          std::string::npos);
    CHECK(checkErrors("axiom 1 < true;\n").find("cannot compare") !=
          std::string::npos);
    CHECK(checkErrors("axiom (if 1 then 2 else 3) == 2;\n")
              .find("expected bool") != std::string::npos);
    CHECK(checkErrors("axiom (if true then 2 else false) == 2;\n")
              .find("different types") != std::string::npos);
    CHECK(checkErrors("const b: bv8;\naxiom 1 ++ b == b;\n")
              .find("bitvector") != std::string::npos);
    CHECK(checkErrors("const b: bv8;\naxiom b[9:0] == b;\n")
              .find("does not fit") != std::string::npos);
    CHECK(checkErrors("axiom 5[1] == 2;\n").find("non-map") !=
          std::string::npos);
    CHECK(checkErrors("const m: [int, int]int;\naxiom m[1] == 2;\n")
              .find("index(es)") != std::string::npos);
}

TEST_CASE("sema: arity errors") {
    CHECK(checkErrors("function f(x: int, y: int) returns (int);\n"
                      "axiom f(1) == 1;\n")
              .find("expects 2 argument(s)") != std::string::npos);
    CHECK(checkErrors("type Box a;\nvar b: Box;\n")
              .find("expects 1 argument(s)") != std::string::npos);
    CHECK(checkErrors("procedure s(x: int);\n"
                      "procedure q() { call s(1, 2); }\n")
              .find("expects 1 argument(s)") != std::string::npos);
    CHECK(checkErrors("procedure s() returns (r: int);\n"
                      "procedure q() { call s(); }\n")
              .find("returns 1 value(s)") != std::string::npos);
}

TEST_CASE("sema: mutability of assignment targets") {
    CHECK(checkErrors("const c: int;\nprocedure p() { c := 1; }\n")
              .find("cannot assign to constant") != std::string::npos);
    CHECK(checkErrors("procedure p(x: int) { x := 1; }\n")
              .find("cannot assign to in-parameter") != std::string::npos);
    CHECK(checkErrors("const c: int;\nprocedure p() { havoc c; }\n")
              .find("cannot havoc constant") != std::string::npos);
    CHECK(checkErrors("procedure s() returns (r: int);\n"
                      "const c: int;\n"
                      "procedure q() { call c := s(); }\n")
              .find("cannot assign to constant") != std::string::npos);
}

TEST_CASE("sema: call output types must match") {
    CHECK(checkErrors("procedure s() returns (r: int);\n"
                      "procedure q() { var b: bool; call b := s(); }\n")
              .find("has type bool") != std::string::npos);
    checkOk("procedure s<a>(x: a) returns (r: a);\n"
            "procedure q() { var b: bool; call b := s(true); }\n");
}

TEST_CASE("sema: modifies entries must be globals") {
    CHECK(checkErrors("const c: int;\nprocedure p(); modifies c;\n")
              .find("not a global variable") != std::string::npos);
    CHECK(checkErrors("procedure p(); modifies zap;\n")
              .find("not a global variable") != std::string::npos);
}

TEST_CASE("sema: implementations must match their procedure") {
    CHECK(checkErrors("implementation q() { }\n")
              .find("undeclared procedure") != std::string::npos);
    CHECK(checkErrors("procedure p(x: int);\n"
                      "implementation p() { }\n")
              .find("does not match") != std::string::npos);
    CHECK(checkErrors("procedure p(x: int);\n"
                      "implementation p(x: bool) { }\n")
              .find("but the declaration says") != std::string::npos);
    // positional renaming of type parameters is accepted
    checkOk("procedure p<a>(x: a) returns (y: a);\n"
            "implementation p<b>(z: b) returns (w: b) { w := z; }\n");
}

TEST_CASE("sema: duplicate names inside scopes") {
    CHECK(checkErrors("procedure p(x: int, x: bool);\n")
              .find("duplicate parameter") != std::string::npos);
    CHECK(checkErrors("procedure p(x: int) returns (x: bool);\n")
              .find("duplicate parameter") != std::string::npos);
    CHECK(checkErrors("procedure p(x: int);\n"
                      "implementation p(x: int) { var x: bool; }\n")
              .find("duplicate variable") != std::string::npos);
    CHECK(checkErrors("axiom (forall x: int, x: bool :: true);\n")
              .find("duplicate bound variable") != std::string::npos);
    CHECK(checkErrors("function f<a, a>(x: a) returns (int);\n")
              .find("duplicate type parameter") != std::string::npos);
    CHECK(checkErrors("procedure p() { L: L: assert true; }\n")
              .find("duplicate label") != std::string::npos);
}

TEST_CASE("sema: control flow constraints") {
    CHECK(checkErrors("procedure p() { break; }\n")
              .find("break outside of a loop") != std::string::npos);
    checkOk("procedure p() { while (true) { if (true) { break; } } }\n");
    // labels nested in blocks are visible to goto
    checkOk("procedure p() {\n"
            "  goto Inside;\n"
            "  if (true) { Inside: assert true; }\n"
            "}\n");
}

TEST_CASE("sema: synonym cycles are rejected") {
    CHECK(checkErrors("type A = B;\ntype B = A;\n").find("cyclic") !=
          std::string::npos);
    CHECK(checkErrors("type L = [int]L;\n").find("cyclic") !=
          std::string::npos);
    checkOk("type A = B;\ntype B = int;\nconst x: A;\naxiom x == 0;\n");
}

TEST_CASE("sema: attribute arguments are not typechecked") {
    checkOk("procedure p() {\n"
            "  assert {:msg \"hi\", thisNameDoesNotExist} true;\n"
            "}\n"
            "axiom {:ignore unknownToo} true;\n");
}

TEST_CASE("sema: trigger expressions are typechecked") {
    checkOk("function f(x: int) returns (int);\n"
            "axiom (forall x: int :: {f(x)} f(x) >= 0);\n");
    CHECK(checkErrors("function f(x: int) returns (int);\n"
                      "axiom (forall x: int :: {f(true)} f(x) >= 0);\n")
              .find("expected int") != std::string::npos);
}

TEST_CASE("sema: call-forall checks non-wildcard arguments") {
    checkOk("procedure lemma(x: int, y: bool);\n"
            "procedure q() { call forall lemma(*, true); }\n");
    CHECK(checkErrors("procedure lemma(x: int);\n"
                      "procedure q() { call forall lemma(true); }\n")
              .find("expected int") != std::string::npos);
}

TEST_CASE("sema: corpus programs typecheck") {
    for (auto const* name :
         {"not_verify.bpl", "lemmas.bpl", "trivial_inv.bpl"}) {
        auto src = test::corpusFile(name);
        checkOk(src);
    }
}

TEST_CASE("sema: error order is deterministic and program-ordered") {
    std::string src = "axiom one == 1;\n"
                      "axiom 1 == true;\n"
                      "procedure p() { break; }\n";
    auto r1 = checkErrors(src);
    auto r2 = checkErrors(src);
    CHECK(r1 == r2);
    auto p1 = r1.find("unknown identifier 'one'");
    auto p2 = r1.find("cannot compare");
    auto p3 = r1.find("break outside");
    REQUIRE(p1 != std::string::npos);
    REQUIRE(p2 != std::string::npos);
    REQUIRE(p3 != std::string::npos);
    CHECK(p1 < p2);
    CHECK(p2 < p3);
}
