#include "b2y/why/validate.hpp"

#include <cctype>
#include <map>
#include <set>
#include <vector>

namespace b2y::why {

namespace {

struct TheorySymbols {
    std::vector<std::string> values;
    std::vector<std::string> types;
};

// Symbols each supported theory brings into scope. Unknown imports are
// accepted and contribute nothing.
TheorySymbols theorySymbols(std::string const& path) {
    if (path == "int.EuclideanDivision") return {{"div", "mod"}, {}};
    if (path == "real.FromInt") return {{"from_int"}, {}};
    if (path == "real.Truncate") return {{"truncate", "floor", "ceil"}, {}};
    if (path == "real.PowerReal") return {{"pow"}, {}};
    if (path == "bool.Bool")
        return {{"andb", "orb", "notb", "xorb", "implb"}, {}};
    if (path == "map.Map") return {{"get", "set"}, {"map"}};
    if (path == "ref.Ref") return {{"ref", "contents"}, {"ref"}};
    if (path.rfind("bv.BitVector", 0) == 0)
        return {{"of_int", "to_uint", "size"}, {"bv"}};
    return {};
}

bool wordChars(std::string const& s) {
    if (s.empty()) return false;
    if (!std::isalpha((unsigned char)s[0]) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum((unsigned char)c) && c != '_') return false;
    return true;
}

bool symbolChars(std::string const& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (std::string("=<>~!$&?@^.:|#%+-*/\\").find(c) == std::string::npos)
            return false;
    return true;
}

bool lowerInitial(std::string const& s) {
    return !s.empty() && (std::islower((unsigned char)s[0]) || s[0] == '_');
}

bool upperInitial(std::string const& s) {
    return !s.empty() && std::isupper((unsigned char)s[0]);
}

struct Entry {
    SourceSpan span;
};

class Validator {
public:
    Validator(Program const& p, DiagnosticEngine& diags)
        : p_(p), diags_(diags) {}

    std::size_t run() {
        for (auto const& imp : p_.imports) {
            auto syms = theorySymbols(imp);
            for (auto const& v : syms.values) ambientValues_.insert(v);
            for (auto const& t : syms.types) ambientTypes_.insert(t);
        }
        for (auto const& d : p_.decls) collectLater(d);
        for (auto const& d : p_.decls) decl(d);
        return count_;
    }

private:
    Program const& p_;
    DiagnosticEngine& diags_;
    std::size_t count_ = 0;

    std::set<std::string> ambientValues_, ambientTypes_;
    std::map<std::string, Entry> types_, values_, axioms_, exceptions_;
    // Everything declared anywhere in the module, to tell "used before its
    // declaration" apart from "never declared".
    std::set<std::string> laterValues_, laterTypes_;

    std::vector<std::map<std::string, Entry>> scopes_;
    std::set<std::string> labels_;  // of the let body being walked
    bool hasLabels_ = false;

    void report(SourceSpan span, std::string msg) {
        ++count_;
        diags_.error(span, std::move(msg));
    }

    void reportShadow(SourceSpan span, std::string const& name,
                      SourceSpan earlier) {
        ++count_;
        Diagnostic d;
        d.severity = Severity::Error;
        d.span = span;
        d.message = "declaration of '" + name + "' shadows an earlier one";
        d.related = earlier;
        d.relatedMessage = "earlier declaration is here";
        diags_.add(std::move(d));
    }

    void collectLater(WDeclRef const& d) {
        switch (d->kind) {
        case WDecl::Kind::Type: laterTypes_.insert(d->name); break;
        case WDecl::Kind::Axiom:
        case WDecl::Kind::Exception: break;
        default: laterValues_.insert(d->name); break;
        }
    }

    Entry const* findValue(std::string const& name) {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        auto f = values_.find(name);
        return f == values_.end() ? nullptr : &f->second;
    }

    void useValue(std::string const& name, SourceSpan span) {
        if (findValue(name) || ambientValues_.count(name)) return;
        if (laterValues_.count(name))
            report(span, "'" + name + "' is used before its declaration");
        else
            report(span, "use of undeclared identifier '" + name + "'");
    }

    void useType(WTypeRef const& t) {
        if (!t) return;
        if (t->kind == WType::Kind::Con) {
            if (t->name == "int" || t->name == "real" || t->name == "bool" ||
                ambientTypes_.count(t->name) || types_.count(t->name)) {
                // fine
            } else if (laterTypes_.count(t->name)) {
                report({}, "type '" + t->name +
                               "' is used before its declaration");
            } else {
                report({}, "use of undeclared type '" + t->name + "'");
            }
        }
        for (auto const& a : t->args) useType(a);
    }

    // Declares into the innermost scope (or the module tables when none).
    void declareValue(std::string const& name, SourceSpan span,
                      bool caseChecked) {
        if (caseChecked) {
            if (!wordChars(name))
                report(span, "identifier '" + name +
                                 "' is outside WhyML's identifier syntax");
            else if (!lowerInitial(name))
                report(span, "value identifier '" + name +
                                 "' must start with a lowercase letter");
        } else if (!wordChars(name) && !symbolChars(name)) {
            report(span, "identifier '" + name +
                             "' is outside WhyML's identifier syntax");
        }
        if (auto const* prev = findValue(name)) {
            reportShadow(span, name, prev->span);
            return;
        }
        if (scopes_.empty())
            values_[name] = {span};
        else
            scopes_.back()[name] = {span};
    }

    void pushScope() { scopes_.emplace_back(); }
    void popScope() { scopes_.pop_back(); }

    void expr(WExprRef const& e) {
        if (!e) return;
        switch (e->kind) {
        case WExpr::Kind::Ident:
        case WExpr::Kind::Contents:
            useValue(e->text, e->span);
            return;
        case WExpr::Kind::App:
            useValue(e->text, e->span);
            break;
        case WExpr::Kind::Any:
            useType(e->type);
            return;
        case WExpr::Kind::At:
            if (!labels_.count(e->label))
                report(e->span, "label '" + e->label +
                                    "' is not declared at this point");
            break;
        case WExpr::Kind::Bin:
            if (e->ops[0] == WBin::Order) useValue("<:", e->span);
            break;
        case WExpr::Kind::Chain:
            for (auto op : e->ops)
                if (op == WBin::Order) useValue("<:", e->span);
            break;
        case WExpr::Kind::Quant: {
            pushScope();
            for (auto const& b : e->binders) {
                useType(b.type);
                for (auto const& n : b.names) declareValue(n, b.span, true);
            }
            for (auto const& g : e->triggers)
                for (auto const& t : g) expr(t);
            expr(e->body);
            popScope();
            return;
        }
        default: break;
        }
        expr(e->a);
        expr(e->b);
        expr(e->c);
        for (auto const& i : e->items) expr(i);
        expr(e->body);
    }

    void stmts(std::vector<WStmtRef> const& body) {
        pushScope();
        for (auto const& s : body) stmt(s);
        popScope();
    }

    void stmt(WStmtRef const& s) {
        switch (s->kind) {
        case WStmt::Kind::Assign:
            useValue(s->name, s->span);
            expr(s->expr);
            return;
        case WStmt::Kind::Let:
            expr(s->expr);
            for (auto const& n : s->names) declareValue(n, s->span, true);
            return;
        case WStmt::Kind::Eval:
        case WStmt::Kind::Result:
        case WStmt::Kind::Assert:
        case WStmt::Kind::Assume:
            expr(s->expr);
            return;
        case WStmt::Kind::If:
            expr(s->expr);
            stmts(s->body1);
            stmts(s->body2);
            return;
        case WStmt::Kind::While:
            expr(s->expr);
            for (auto const& inv : s->invariants) expr(inv);
            stmts(s->body1);
            return;
        case WStmt::Kind::Try:
            stmts(s->body1);
            if (!exceptions_.count(s->name))
                report(s->span,
                       "exception '" + s->name + "' is not declared");
            stmts(s->body2);
            return;
        case WStmt::Kind::Raise:
            if (!exceptions_.count(s->name))
                report(s->span,
                       "exception '" + s->name + "' is not declared");
            return;
        case WStmt::Kind::Label:
            labels_.insert(s->name);
            if (!wordChars(s->name))
                report(s->span, "label '" + s->name +
                                    "' is outside WhyML's identifier syntax");
            return;
        }
    }

    void spec(WSpec const& sp) {
        for (auto const& r : sp.requiresCl) expr(r);
        for (auto const& n : sp.writesCl) useValue(n, {});
        for (auto const& n : sp.readsCl) useValue(n, {});
        for (auto const& r : sp.returnsCl) {
            pushScope();
            for (auto const& n : r.pattern) declareValue(n, {}, true);
            expr(r.expr);
            popScope();
        }
        for (auto const& e : sp.ensuresCl) expr(e);
    }

    void declareModuleName(std::map<std::string, Entry>& table,
                           std::string const& name, SourceSpan span) {
        auto f = table.find(name);
        if (f != table.end()) {
            reportShadow(span, name, f->second.span);
            return;
        }
        table[name] = {span};
    }

    void paramsOf(WDeclRef const& d) {
        for (auto const& p : d->params) {
            useType(p.type);
            declareValue(p.name, p.span, true);
        }
    }

    void decl(WDeclRef const& d) {
        switch (d->kind) {
        case WDecl::Kind::Type:
            useType(d->alias);
            if (!wordChars(d->name))
                report(d->span, "identifier '" + d->name +
                                    "' is outside WhyML's identifier syntax");
            else if (!lowerInitial(d->name))
                report(d->span, "type identifier '" + d->name +
                                    "' must start with a lowercase letter");
            declareModuleName(types_, d->name, d->span);
            return;
        case WDecl::Kind::Constant:
            useType(d->type);
            declareValue(d->name, d->span, false);
            return;
        case WDecl::Kind::Function:
        case WDecl::Kind::Predicate: {
            pushScope();
            paramsOf(d);
            useType(d->result);
            expr(d->def);
            popScope();
            declareValue(d->name, d->span, false);
            return;
        }
        case WDecl::Kind::Axiom:
            if (!wordChars(d->name))
                report(d->span, "axiom name '" + d->name +
                                    "' is outside WhyML's identifier syntax");
            declareModuleName(axioms_, d->name, d->span);
            expr(d->def);
            return;
        case WDecl::Kind::Exception:
            if (!wordChars(d->name) || !upperInitial(d->name))
                report(d->span, "exception '" + d->name +
                                    "' must be a capitalized identifier");
            declareModuleName(exceptions_, d->name, d->span);
            return;
        case WDecl::Kind::Val: {
            pushScope();
            paramsOf(d);
            useType(d->result ? d->result : d->type);
            spec(d->spec);
            popScope();
            declareValue(d->name, d->span, true);
            return;
        }
        case WDecl::Kind::Let: {
            labels_.clear();
            pushScope();
            paramsOf(d);
            useType(d->result);
            spec(d->spec);
            stmts(d->body);
            popScope();
            declareValue(d->name, d->span, true);
            return;
        }
        }
    }
};

} // namespace

std::size_t validate(Program const& p, DiagnosticEngine& diags) {
    return Validator(p, diags).run();
}

} // namespace b2y::why
