#include "b2y/why/ast.hpp"
#include "b2y/why/printer.hpp"
#include "b2y/why/validate.hpp"
#include "support/testutil.hpp"

#include <doctest.h>

using namespace b2y;
using why::Binder;
using why::Program;
using why::WBin;
using why::WDecl;
using why::WDeclRef;
using why::WExpr;
using why::WExprRef;
using why::WStmt;
using why::WType;
using why::WUn;

namespace {

WExprRef id(std::string const& n) { return WExpr::ident(n); }
WExprRef num(std::string const& n) { return WExpr::intLit(n); }

std::shared_ptr<WDecl> constant(std::string name, why::WTypeRef t) {
    auto d = WDecl::make(WDecl::Kind::Constant);
    d->name = std::move(name);
    d->type = std::move(t);
    return d;
}

std::shared_ptr<WDecl> axiom(std::string name, WExprRef e) {
    auto d = WDecl::make(WDecl::Kind::Axiom);
    d->name = std::move(name);
    d->def = std::move(e);
    return d;
}

std::size_t validateCount(Program const& m) {
    SourceManager sm;
    DiagnosticEngine diags(sm);
    auto n = why::validate(m, diags);
    INFO("diagnostics:\n", diags.renderToString());
    INFO("module:\n", why::programToString(m));
    return n;
}

} // namespace

TEST_CASE("module printing: constant then axiom") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int", "int.EuclideanDivision", "ref.Ref"};
    m.decls.push_back(constant("N", WType::intT()));
    m.decls.push_back(
        axiom("A0", WExpr::binary(WBin::Le, num("0"), id("N"))));
    CHECK(why::programToString(m) ==
          "module M\n"
          "  use int.Int\n"
          "  use int.EuclideanDivision\n"
          "  use ref.Ref\n"
          "\n"
          "  constant N: int\n"
          "\n"
          "  axiom A0: 0 <= N\n"
          "end\n");
}

TEST_CASE("module printing: empty module is header plus imports") {
    Program m;
    m.moduleName = "Empty";
    m.imports = {"ref.Ref"};
    CHECK(why::programToString(m) == "module Empty\n  use ref.Ref\nend\n");
}

TEST_CASE("module printing: clone import line") {
    Program m;
    m.moduleName = "B";
    m.imports = {"int.Int", "bv.BitVector with constant size = 8"};
    CHECK(why::programToString(m) ==
          "module B\n"
          "  use int.Int\n"
          "  clone bv.BitVector with constant size = 8\n"
          "end\n");
}

TEST_CASE("published lemma pair matches the printer modulo whitespace") {
    auto powGt = WExpr::binary(
        WBin::GtR,
        WExpr::app("pow", {WExpr::realLit("2.0"), WExpr::realLit("3.0")}),
        WExpr::realLit("0.0"));

    auto val = WDecl::make(WDecl::Kind::Val);
    val->name = "lemma_yes";
    val->unitParam = true;
    val->result = WType::unitT();
    val->spec.ensuresCl = {powGt};

    auto let = WDecl::make(WDecl::Kind::Let);
    let->name = "lemma_yes_impl";
    let->unitParam = true;
    let->result = WType::unitT();
    let->spec.ensuresCl = {powGt};

    Program m;
    m.moduleName = "Lemmas";
    m.decls = {val, let};
    std::string text = why::programToString(m);

    std::string published =
        "val lemma_yes (): ()\n"
        "  ensures\n"
        "    { (pow 2.0 3.0) >. 0.0 }\n"
        "\n"
        "let lemma_yes_impl (): ()\n"
        "  ensures\n"
        "    { (pow 2.0 3.0) >. 0.0 }\n"
        "=( )\n";

    // Strip the module frame, then compare token streams.
    auto head = text.find('\n');
    auto tail = text.rfind("end\n");
    std::string inner = text.substr(head + 1, tail - head - 1);
    CHECK(test::whyTokens(inner) == test::whyTokens(published));
}

TEST_CASE("real literals always carry a decimal point") {
    CHECK(why::exprToString(WExpr::realLit("2.5")) == "2.5");
    CHECK(why::exprToString(WExpr::realLit("2")) == "2.0");
    CHECK(why::exprToString(WExpr::realLit("2.")) == "2.0");
    CHECK(why::exprToString(WExpr::realLit("2e3")) == "2.0e3");
    CHECK(why::exprToString(WExpr::realLit("31.4e-1")) == "31.4e-1");
}

TEST_CASE("operator precedence and parenthesization") {
    auto chain = WExpr::chain({WBin::Le, WBin::Le, WBin::Lt},
                              {num("0"), id("k"), id("l"), id("N")});
    auto imp = WExpr::binary(WBin::Imp, chain,
                             WExpr::binary(WBin::Lt, id("N"), id("N")));
    CHECK(why::exprToString(imp) == "0 <= k <= l < N -> N < N");

    CHECK(why::exprToString(WExpr::binary(
              WBin::Imp, id("a"),
              WExpr::binary(WBin::Imp, id("b"), id("c")))) == "a -> b -> c");
    CHECK(why::exprToString(WExpr::binary(
              WBin::Imp, WExpr::binary(WBin::Imp, id("a"), id("b")),
              id("c"))) == "(a -> b) -> c");

    CHECK(why::exprToString(WExpr::binary(
              WBin::Or, WExpr::binary(WBin::And, id("a"), id("b")),
              id("c"))) == "a /\\ b \\/ c");
    CHECK(why::exprToString(WExpr::binary(
              WBin::And, id("a"),
              WExpr::binary(WBin::Or, id("b"), id("c")))) ==
          "a /\\ (b \\/ c)");

    CHECK(why::exprToString(WExpr::unary(
              WUn::Not, WExpr::binary(WBin::And, id("a"), id("b")))) ==
          "not (a /\\ b)");
    CHECK(why::exprToString(WExpr::binary(
              WBin::And, WExpr::unary(WUn::Not, id("a")), id("b"))) ==
          "not a /\\ b");

    CHECK(why::exprToString(WExpr::binary(
              WBin::Mul, WExpr::unary(WUn::Neg, id("N")), num("2"))) ==
          "(-N) * 2");
    CHECK(why::exprToString(WExpr::binary(
              WBin::Add, WExpr::contents("i"), num("2"))) == "i.contents + 2");
}

TEST_CASE("application, old, at and any rendering") {
    CHECK(why::exprToString(WExpr::app("havoc", {})) == "havoc ()");
    CHECK(why::exprToString(WExpr::app(
              "ref", {WExpr::any(WType::intT())})) == "ref (any int)");
    CHECK(why::exprToString(WExpr::binary(
              WBin::Eq, WExpr::app("div", {id("a"), id("b")}), id("c"))) ==
          "(div a b) = c");
    CHECK(why::exprToString(WExpr::app(
              "get", {WExpr::contents("m"),
                      WExpr::tuple({id("i"), id("j")})})) ==
          "get m.contents (i, j)");
    CHECK(why::exprToString(WExpr::app(
              "set", {WExpr::contents("m"), id("i"), id("v")})) ==
          "set m.contents i v");
    CHECK(why::exprToString(WExpr::binary(
              WBin::Eq, WExpr::old(id("x")), id("y"))) == "(old x) = y");
    CHECK(why::exprToString(WExpr::at(WExpr::contents("x"), "begin")) ==
          "at x.contents 'begin");
    CHECK(why::exprToString(WExpr::ite(id("c"), num("1"), num("2"))) ==
          "if c then 1 else 2");
}

TEST_CASE("quantifier rendering with binder groups and triggers") {
    auto q = WExpr::quant(
        WExpr::QKind::Forall,
        {Binder{{"k", "l"}, WType::intT(), {}}},
        {}, WExpr::binary(WBin::Lt, id("k"), id("l")));
    CHECK(why::exprToString(q) == "forall k, l: int. k < l");

    auto qt = WExpr::quant(
        WExpr::QKind::Exists, {Binder{{"j"}, WType::intT(), {}}}, {},
        WExpr::binary(WBin::Eq, WExpr::contents("i"),
                      WExpr::binary(WBin::Mul, num("2"), id("j"))));
    CHECK(why::exprToString(qt) == "exists j: int. i.contents = 2 * j");

    auto trig = WExpr::quant(
        WExpr::QKind::Forall, {Binder{{"x"}, WType::intT(), {}}},
        {{WExpr::app("f", {id("x")})}, {WExpr::app("g", {id("x")})}},
        WExpr::binary(WBin::Le, WExpr::app("f", {id("x")}), id("x")));
    CHECK(why::exprToString(trig) == "forall x: int [f x | g x]. (f x) <= x");

    auto tv = WExpr::quant(
        WExpr::QKind::Forall, {Binder{{"x"}, WType::var("a"), {}}}, {},
        WExpr::binary(WBin::Order, id("x"), id("x")));
    CHECK(why::exprToString(tv) == "forall x: 'a. x <: x");

    // As an operand the quantifier is parenthesized.
    CHECK(why::exprToString(WExpr::binary(WBin::And, q, id("p"))) ==
          "(forall k, l: int. k < l) /\\ p");
}

TEST_CASE("type rendering") {
    CHECK(why::typeToString(WType::con("map", {WType::intT(),
                                               WType::boolT()})) ==
          "map int bool");
    CHECK(why::typeToString(WType::con(
              "map", {WType::tuple({WType::intT(), WType::boolT()}),
                      WType::realT()})) == "map (int, bool) real");
    CHECK(why::typeToString(WType::con(
              "ref", {WType::con("map", {WType::intT(), WType::intT()})})) ==
          "ref (map int int)");
    CHECK(why::typeToString(WType::unitT()) == "()");
    CHECK(why::typeToString(WType::var("a")) == "'a");
}

TEST_CASE("statement and body printing") {
    auto let = WDecl::make(WDecl::Kind::Let);
    let->name = "not_verify_impl";
    let->unitParam = true;
    let->result = WType::unitT();

    auto guard = WExpr::binary(WBin::Neq, WExpr::contents("x"),
                               WExpr::contents("x"));
    std::vector<why::WStmtRef> tryBody = {
        WStmt::assign("x", WExpr::unary(WUn::Neg, id("N"))),
        WStmt::whileStmt(guard, {}, {}),
    };
    let->body = {
        WStmt::letIn({"x"}, WExpr::app("ref", {WExpr::any(WType::intT())})),
        WStmt::labelMark("begin"),
        WStmt::tryWith(tryBody, "Return",
                       {WStmt::assumeStmt(WExpr::trueLit())}),
    };

    Program m;
    m.moduleName = "M";
    m.decls = {let};
    CHECK(why::programToString(m) ==
          "module M\n"
          "\n"
          "  let not_verify_impl (): ()\n"
          "  = (\n"
          "    let x = ref (any int) in\n"
          "    'begin:\n"
          "    try\n"
          "      x.contents <- -N;\n"
          "      while (x.contents <> x.contents) do\n"
          "      done;\n"
          "    with | Return -> assume { true } end;\n"
          "  )\n"
          "end\n");
}

TEST_CASE("while with invariants and if with else print structurally") {
    auto body = std::vector<why::WStmtRef>{
        WStmt::assign("i", WExpr::binary(WBin::Add, WExpr::contents("i"),
                                         num("2"))),
    };
    auto loop = WStmt::whileStmt(
        WExpr::binary(WBin::Lt, WExpr::contents("i"), num("10")),
        {WExpr::chain({WBin::Le, WBin::Le},
                      {num("0"), WExpr::contents("i"), num("10")})},
        body);
    std::string out;
    auto ifs = WStmt::ifStmt(WExpr::any(WType::boolT()),
                             {WStmt::assign("x", num("1"))},
                             {WStmt::raise("Break")}, true);
    auto let = WDecl::make(WDecl::Kind::Let);
    let->name = "p";
    let->unitParam = true;
    let->result = WType::unitT();
    let->body = {loop, ifs};
    Program m;
    m.moduleName = "M";
    m.decls = {let};
    CHECK(why::programToString(m) ==
          "module M\n"
          "\n"
          "  let p (): ()\n"
          "  = (\n"
          "    while (i.contents < 10) do\n"
          "      invariant { 0 <= i.contents <= 10 }\n"
          "      i.contents <- i.contents + 2;\n"
          "    done;\n"
          "    if (any bool) then begin\n"
          "      x.contents <- 1;\n"
          "    end else begin\n"
          "      raise Break;\n"
          "    end;\n"
          "  )\n"
          "end\n");
}

TEST_CASE("val declarations: value form, unit form, returns patterns") {
    auto global = WDecl::make(WDecl::Kind::Val);
    global->name = "v";
    global->type = WType::con("ref", {WType::intT()});

    auto proc = WDecl::make(WDecl::Kind::Val);
    proc->name = "p";
    proc->params = {{"t", WType::intT(), {}}};
    proc->result = WType::tuple({WType::intT(), WType::boolT()});
    proc->spec.requiresCl = {WExpr::binary(WBin::Lt, num("0"), id("t"))};
    proc->spec.writesCl = {"v"};
    proc->spec.returnsCl = {
        {{"u", "w"}, WExpr::binary(WBin::Le, id("t"), id("u"))}};

    auto havoc = WDecl::make(WDecl::Kind::Val);
    havoc->name = "havoc";
    havoc->unitParam = true;
    havoc->result = WType::var("a");

    Program m;
    m.moduleName = "M";
    m.decls = {global, proc, havoc};
    CHECK(why::programToString(m) ==
          "module M\n"
          "\n"
          "  val v: ref int\n"
          "\n"
          "  val p (t: int): (int, bool)\n"
          "    requires { 0 < t }\n"
          "    writes { v }\n"
          "    returns { | (u, w) -> t <= u }\n"
          "\n"
          "  val havoc (): 'a\n"
          "end\n");
}

TEST_CASE("support declarations print their fixed shapes") {
    auto order = WDecl::make(WDecl::Kind::Predicate);
    order->name = "<:";
    order->params = {{"x", WType::var("a"), {}}, {"y", WType::var("a"), {}}};

    auto yes = WDecl::make(WDecl::Kind::Predicate);
    yes->name = "yes";
    yes->params = {{"x", WType::var("a"), {}}};
    yes->def = WExpr::trueLit();

    auto exn = WDecl::make(WDecl::Kind::Exception);
    exn->name = "Return";

    auto fn = WDecl::make(WDecl::Kind::Function);
    fn->name = "f";
    fn->params = {{"x", WType::intT(), {}}, {"y", WType::boolT(), {}}};
    fn->result = WType::realT();

    auto ty = WDecl::make(WDecl::Kind::Type);
    ty->name = "t";
    ty->tyParams = {"a", "b"};

    auto syn = WDecl::make(WDecl::Kind::Type);
    syn->name = "m_int";
    syn->alias = WType::con("map", {WType::intT(), WType::intT()});

    Program m;
    m.moduleName = "M";
    m.decls = {ty, syn, order, yes, fn, exn};
    CHECK(why::programToString(m) ==
          "module M\n"
          "\n"
          "  type t 'a 'b\n"
          "\n"
          "  type m_int = map int int\n"
          "\n"
          "  predicate (<:) (x: 'a) (y: 'a)\n"
          "\n"
          "  predicate yes (x: 'a) = true\n"
          "\n"
          "  function f (x: int) (y: bool): real\n"
          "\n"
          "  exception Return\n"
          "end\n");
}

TEST_CASE("printing is deterministic") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int", "ref.Ref"};
    m.decls.push_back(constant("N", WType::intT()));
    m.decls.push_back(axiom("A0", WExpr::binary(WBin::Le, num("0"), id("N"))));
    std::string a = why::programToString(m);
    std::string b = why::programToString(m);
    Program copy = m;
    CHECK(a == b);
    CHECK(why::programToString(copy) == a);
}

TEST_CASE("validation: well-formed module has zero diagnostics") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int", "ref.Ref", "map.Map"};
    m.decls.push_back(constant("N", WType::intT()));
    m.decls.push_back(axiom("A0", WExpr::binary(WBin::Le, num("0"), id("N"))));
    auto v = WDecl::make(WDecl::Kind::Val);
    v->name = "v";
    v->type = WType::con("ref", {WType::con("map",
                                            {WType::intT(), WType::intT()})});
    m.decls.push_back(v);
    auto let = WDecl::make(WDecl::Kind::Let);
    let->name = "p";
    let->unitParam = true;
    let->result = WType::unitT();
    let->body = {
        WStmt::assign("v", WExpr::app("set", {WExpr::contents("v"), num("0"),
                                              id("N")})),
    };
    m.decls.push_back(let);
    CHECK(validateCount(m) == 0);
}

TEST_CASE("validation: use before declaration is one diagnostic") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int"};
    m.decls.push_back(axiom("A0", WExpr::binary(WBin::Le, num("0"), id("N"))));
    m.decls.push_back(constant("N", WType::intT()));
    SourceManager sm;
    DiagnosticEngine diags(sm);
    CHECK(why::validate(m, diags) == 1);
    REQUIRE(diags.all().size() == 1);
    CHECK(diags.all()[0].message.find("before its declaration") !=
          std::string::npos);
}

TEST_CASE("validation: shadowed local names both spans") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int", "ref.Ref"};
    auto let = WDecl::make(WDecl::Kind::Let);
    let->name = "p";
    let->span = {0, 1, 1, 1, 6};
    let->params = {{"x", WType::intT(), SourceSpan{0, 2, 3, 2, 9}}};
    let->result = WType::unitT();
    let->body = {
        WStmt::letIn({"x"}, WExpr::app("ref", {WExpr::any(WType::intT())}),
                     SourceSpan{0, 4, 3, 4, 9}),
    };
    m.decls.push_back(let);
    SourceManager sm;
    DiagnosticEngine diags(sm);
    CHECK(why::validate(m, diags) == 1);
    REQUIRE(diags.all().size() == 1);
    auto const& d = diags.all()[0];
    CHECK(d.message.find("shadows") != std::string::npos);
    CHECK(d.span.beginLine == 4);
    CHECK(d.related.beginLine == 2);
}

TEST_CASE("validation: undeclared names, exceptions and labels") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int", "ref.Ref"};
    auto let = WDecl::make(WDecl::Kind::Let);
    let->name = "p";
    let->unitParam = true;
    let->result = WType::unitT();
    let->body = {
        WStmt::eval(id("mystery")),
        WStmt::raise("Return"),
        WStmt::eval(WExpr::at(id("p0"), "begin")),
    };
    m.decls.push_back(let);
    SourceManager sm;
    DiagnosticEngine diags(sm);
    CHECK(why::validate(m, diags) == 4);
    std::string text = diags.renderToString();
    CHECK(text.find("undeclared identifier 'mystery'") != std::string::npos);
    CHECK(text.find("'Return' is not declared") != std::string::npos);
    CHECK(text.find("label 'begin'") != std::string::npos);
    CHECK(text.find("'p0'") != std::string::npos);
}

TEST_CASE("validation: label declared before use is accepted") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int", "ref.Ref"};
    auto exn = WDecl::make(WDecl::Kind::Exception);
    exn->name = "Return";
    m.decls.push_back(exn);
    auto v = WDecl::make(WDecl::Kind::Val);
    v->name = "x";
    v->type = WType::con("ref", {WType::intT()});
    m.decls.push_back(v);
    auto let = WDecl::make(WDecl::Kind::Let);
    let->name = "p";
    let->unitParam = true;
    let->result = WType::unitT();
    let->body = {
        WStmt::labelMark("begin"),
        WStmt::assertStmt(WExpr::binary(
            WBin::Eq, WExpr::at(WExpr::contents("x"), "begin"),
            WExpr::contents("x"))),
        WStmt::raise("Return"),
    };
    m.decls.push_back(let);
    CHECK(validateCount(m) == 0);
}

TEST_CASE("validation: identifier syntax and case rules") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int", "ref.Ref"};

    auto bad = constant("a$b", WType::intT());
    auto vUp = WDecl::make(WDecl::Kind::Val);
    vUp->name = "Xvar";
    vUp->type = WType::con("ref", {WType::intT()});
    auto tyUp = WDecl::make(WDecl::Kind::Type);
    tyUp->name = "T";
    auto exLow = WDecl::make(WDecl::Kind::Exception);
    exLow->name = "ret";

    m.decls = {bad, vUp, tyUp, exLow};
    SourceManager sm;
    DiagnosticEngine diags(sm);
    CHECK(why::validate(m, diags) == 4);
    std::string text = diags.renderToString();
    CHECK(text.find("a$b") != std::string::npos);
    CHECK(text.find("'Xvar' must start with a lowercase") != std::string::npos);
    CHECK(text.find("'T' must start with a lowercase") != std::string::npos);
    CHECK(text.find("'ret' must be a capitalized") != std::string::npos);
}

TEST_CASE("validation: uppercase logic constants are fine") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int"};
    m.decls.push_back(constant("N", WType::intT()));
    m.decls.push_back(axiom("ReflexivePO", WExpr::trueLit()));
    CHECK(validateCount(m) == 0);
}

TEST_CASE("validation: order predicate must be declared before <: use") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int"};
    m.decls.push_back(constant("a", WType::intT()));
    m.decls.push_back(constant("b", WType::intT()));
    m.decls.push_back(
        axiom("O0", WExpr::binary(WBin::Order, id("a"), id("b"))));
    CHECK(validateCount(m) == 1);

    auto order = WDecl::make(WDecl::Kind::Predicate);
    order->name = "<:";
    order->params = {{"x", WType::var("a"), {}}, {"y", WType::var("a"), {}}};
    Program ok = m;
    ok.decls.insert(ok.decls.begin(), order);
    CHECK(validateCount(ok) == 0);
}

TEST_CASE("validation: imported symbols require their import") {
    Program without;
    without.moduleName = "M";
    without.imports = {"int.Int"};
    without.decls.push_back(
        axiom("A0", WExpr::binary(WBin::Eq,
                                  WExpr::app("get", {id("m"), num("0")}),
                                  num("0"))));
    auto mconst = constant("m", WType::con("map",
                                           {WType::intT(), WType::intT()}));
    without.decls.insert(without.decls.begin(), mconst);
    // get resolves only with map.Map; the map type itself also needs it.
    CHECK(validateCount(without) == 2);

    Program with = without;
    with.imports = {"int.Int", "map.Map"};
    CHECK(validateCount(with) == 0);
}

TEST_CASE("validation: quantifier binder shadowing a constant") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int"};
    m.decls.push_back(constant("k", WType::intT()));
    m.decls.push_back(axiom(
        "A0", WExpr::quant(WExpr::QKind::Forall,
                           {Binder{{"k"}, WType::intT(), {}}}, {},
                           WExpr::binary(WBin::Le, id("k"), id("k")))));
    CHECK(validateCount(m) == 1);
}

TEST_CASE("validation: block-local let does not leak") {
    Program m;
    m.moduleName = "M";
    m.imports = {"int.Int", "ref.Ref", "bool.Bool"};
    auto let = WDecl::make(WDecl::Kind::Let);
    let->name = "p";
    let->unitParam = true;
    let->result = WType::unitT();
    let->body = {
        WStmt::whileStmt(WExpr::any(WType::boolT()), {},
                         {WStmt::letIn({"t"}, num("1"))}),
        WStmt::eval(id("t")),
    };
    m.decls.push_back(let);
    SourceManager sm;
    DiagnosticEngine diags(sm);
    CHECK(why::validate(m, diags) == 1);
    CHECK(diags.renderToString().find("undeclared identifier 't'") !=
          std::string::npos);
}
