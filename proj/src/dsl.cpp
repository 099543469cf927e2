#include "cpsforge/dsl.hpp"

#include "cpsforge/metric.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace cpsforge::dsl {

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

[[noreturn]] void fail(const std::string& msg, int line, int col, ErrorCode code = ErrorCode::Parse)
{
    throw Error(code, std::to_string(line) + ":" + std::to_string(col) + ": " + msg, {}, line, col);
}

std::vector<Token> lex(const std::string& src)
{
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k && i < src.size(); ++j, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            if (j < src.size() && src[j] == '{' && src[j - 1] == '_') {
                const std::size_t close = src.find('}', j);
                if (close == std::string::npos) fail("unterminated '{' in jet name", line, col);
                j = close + 1;
            }
            t.kind = Tok::Ident;
            t.text = src.substr(i, j - i);
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            t.kind = Tok::Number;
            t.text = src.substr(i, j - i);
            advance(j - i);
        } else if (std::string("(){}[],;:=+-*/^").find(c) != std::string::npos) {
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            advance(1);
        } else {
            fail(std::string("unexpected character '") + c + "'", line, col);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

// ---------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Document document()
    {
        Document doc;
        while (peek().kind != Tok::End) {
            const Token& t = expect_ident();
            if (t.text == "model") {
                doc.model_name = expect_ident().text;
                expect(";");
                continue;
            }
            static const std::vector<std::string> blocks{"chart",      "fields", "background", "lagrangian",
                                                         "bc",         "constraints", "vectors"};
            if (std::find(blocks.begin(), blocks.end(), t.text) == blocks.end())
                fail("unknown block '" + t.text + "'", t.line, t.column);
            Block b;
            b.name = t.text;
            b.line = t.line;
            b.column = t.column;
            expect("{");
            while (!is("}")) b.statements.push_back(statement(b.name));
            expect("}");
            doc.blocks.push_back(std::move(b));
        }
        return doc;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool is(const std::string& p) const { return peek().kind == Tok::Punct && peek().text == p; }

    const Token& expect(const std::string& p)
    {
        if (!is(p)) {
            const Token& t = peek();
            fail("expected '" + p + "' but found '" + (t.kind == Tok::End ? "end of input" : t.text) + "'", t.line,
                 t.column);
        }
        return next();
    }

    const Token& expect_ident()
    {
        if (peek().kind != Tok::Ident) {
            const Token& t = peek();
            fail("expected a name but found '" + (t.kind == Tok::End ? "end of input" : t.text) + "'", t.line,
                 t.column);
        }
        return next();
    }

    std::string label()
    {
        std::string s = expect_ident().text;
        if (is("[")) {
            next();
            s += "[";
            for (bool first = true; !is("]"); first = false) {
                if (!first) {
                    expect(",");
                    s += ",";
                }
                const Token& t = next();
                if (t.kind != Tok::Ident && t.kind != Tok::Number) fail("bad component index", t.line, t.column);
                s += t.text;
            }
            expect("]");
            s += "]";
        }
        return s;
    }

    Statement statement(const std::string& block)
    {
        Statement st;
        st.line = peek().line;
        st.column = peek().column;
        if (block == "constraints") {
            st.head = "constraint";
            st.exprs.push_back(expr());
            expect("=");
            st.exprs.push_back(expr());
            expect(";");
            return st;
        }
        if (block == "bc") {
            st.head = "bc";
            st.words.push_back(expect_ident().text);
            expect(":");
            const Token& k = expect_ident();
            st.words.push_back(k.text);
            if (k.text == "robin") {
                expect("(");
                st.exprs.push_back(expr());
                expect(")");
            } else if (k.text != "free" && k.text != "dirichlet") {
                fail("unknown boundary condition '" + k.text + "'", k.line, k.column);
            }
            expect(";");
            return st;
        }
        const Token& head = expect_ident();
        st.head = head.text;
        auto bad = [&] { fail("unexpected statement '" + head.text + "' in block " + block, head.line, head.column); };
        if (block == "chart") {
            if (st.head == "coords") {
                st.words.push_back(expect_ident().text);
                while (is(",")) {
                    next();
                    st.words.push_back(expect_ident().text);
                }
            } else if (st.head == "boundary") {
                st.words.push_back(expect_ident().text);
            } else if (st.head == "max_jet_order") {
                const Token& t = next();
                if (t.kind != Tok::Number) fail("expected an integer", t.line, t.column);
                st.words.push_back(t.text);
            } else {
                bad();
            }
        } else if (block == "fields") {
            if (st.head == "scalar" || st.head == "oneform") {
                st.words.push_back(expect_ident().text);
            } else if (st.head == "lieform") {
                st.words.push_back(expect_ident().text);
                expect(":");
                st.words.push_back(expect_ident().text);
                if (is("(")) {
                    next();
                    const Token& t = next();
                    if (t.kind != Tok::Number) fail("expected an integer", t.line, t.column);
                    st.words.push_back(t.text);
                    expect(")");
                }
            } else {
                bad();
            }
        } else if (block == "background") {
            if (st.head == "metric") {
                const Token& d = expect_ident();
                if (d.text != "diag") fail("only diagonal metrics are supported: use diag(...)", d.line, d.column,
                                           ErrorCode::UnsupportedMetric);
                expect("(");
                st.exprs.push_back(expr());
                while (is(",")) {
                    next();
                    st.exprs.push_back(expr());
                }
                expect(")");
            } else if (st.head == "function") {
                st.words.push_back(expect_ident().text);
                if (is("(")) {
                    next();
                    st.words.push_back(expect_ident().text);
                    while (is(",")) {
                        next();
                        st.words.push_back(expect_ident().text);
                    }
                    expect(")");
                }
                if (is("=")) {
                    next();
                    st.exprs.push_back(expr());
                }
            } else if (st.head == "const") {
                st.words.push_back(expect_ident().text);
            } else {
                bad();
            }
        } else if (block == "lagrangian") {
            if (st.head == "let") {
                st.words.push_back(expect_ident().text);
                expect("=");
                st.exprs.push_back(expr());
            } else if (st.head == "L" || st.head == "ell") {
                expect("=");
                st.exprs.push_back(expr());
            } else {
                bad();
            }
        } else if (block == "vectors") {
            if (st.head == "xi") {
                st.words.push_back(expect_ident().text);
                expect("=");
                st.exprs.push_back(primary());
                if (st.exprs.back()->kind != Node::Kind::Tuple) fail("expected a component tuple", st.line, st.column);
            } else if (st.head == "evol") {
                st.words.push_back(expect_ident().text);
                expect("=");
                expect("{");
                for (bool first = true; !is("}"); first = false) {
                    if (!first) expect(",");
                    st.words.push_back(label());
                    expect(":");
                    st.exprs.push_back(expr());
                }
                expect("}");
            } else {
                bad();
            }
        }
        expect(";");
        return st;
    }

    NodePtr make(Node::Kind k, std::string text, std::vector<NodePtr> kids, const Token& at)
    {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->text = std::move(text);
        n->kids = std::move(kids);
        n->line = at.line;
        n->column = at.column;
        return n;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        while (is("+") || is("-")) {
            const Token& op = next();
            lhs = make(Node::Kind::Binary, op.text, {lhs, term()}, op);
        }
        return lhs;
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        while (is("*") || is("/")) {
            const Token& op = next();
            lhs = make(Node::Kind::Binary, op.text, {lhs, unary()}, op);
        }
        return lhs;
    }

    NodePtr unary()
    {
        if (is("-")) {
            const Token& op = next();
            return make(Node::Kind::Neg, "-", {unary()}, op);
        }
        return power();
    }

    NodePtr power()
    {
        NodePtr base = primary();
        if (is("^")) {
            const Token& op = next();
            return make(Node::Kind::Binary, "^", {base, unary()}, op);
        }
        return base;
    }

    NodePtr primary()
    {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            next();
            return make(Node::Kind::Number, t.text, {}, t);
        }
        if (is("(")) {
            const Token& open = next();
            NodePtr first = expr();
            if (is(",")) {
                std::vector<NodePtr> items{first};
                while (is(",")) {
                    next();
                    items.push_back(expr());
                }
                expect(")");
                return make(Node::Kind::Tuple, "", items, open);
            }
            expect(")");
            return first;
        }
        if (t.kind == Tok::Ident) {
            const Token& id = next();
            if (is("(")) {
                next();
                std::vector<NodePtr> args;
                for (bool first = true; !is(")"); first = false) {
                    if (!first) expect(",");
                    args.push_back(expr());
                }
                expect(")");
                return make(Node::Kind::Call, id.text, args, id);
            }
            std::string name = id.text;
            if (is("[")) {
                --pos_;
                name = label();
                if (peek().kind == Tok::Ident && peek().text.front() == '_') name += next().text;
            }
            return make(Node::Kind::Name, name, {}, id);
        }
        fail("expected an expression but found '" + (t.kind == Tok::End ? "end of input" : t.text) + "'", t.line,
             t.column);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- printer

int precedence(const NodePtr& n)
{
    if (n->kind == Node::Kind::Binary) {
        if (n->text == "+" || n->text == "-") return 1;
        if (n->text == "*" || n->text == "/") return 2;
        return 4;
    }
    if (n->kind == Node::Kind::Neg) return 3;
    return 5;
}

std::string wrap(const NodePtr& n, bool paren) { return paren ? "(" + print_node(n) + ")" : print_node(n); }

std::string join(const std::vector<std::string>& v, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

} // namespace

std::string print_node(const NodePtr& n)
{
    switch (n->kind) {
    case Node::Kind::Number:
    case Node::Kind::Name:
        return n->text;
    case Node::Kind::Call:
    case Node::Kind::Tuple: {
        std::vector<std::string> args;
        for (const auto& k : n->kids) args.push_back(print_node(k));
        return n->text + "(" + join(args, ", ") + ")";
    }
    case Node::Kind::Neg:
        return "-" + wrap(n->kids[0], precedence(n->kids[0]) <= 3);
    case Node::Kind::Binary: {
        const int p = precedence(n);
        if (n->text == "^")
            return wrap(n->kids[0], precedence(n->kids[0]) <= 4) + "^" +
                   wrap(n->kids[1], precedence(n->kids[1]) < 5);
        const bool right_strict = n->text == "-" || n->text == "/";
        const std::string sep = p == 1 ? " " + n->text + " " : n->text;
        return wrap(n->kids[0], precedence(n->kids[0]) < p) + sep +
               wrap(n->kids[1], precedence(n->kids[1]) < p || (right_strict && precedence(n->kids[1]) == p));
    }
    }
    return {};
}

std::string print_document(const Document& doc)
{
    std::ostringstream os;
    if (!doc.model_name.empty()) os << "model " << doc.model_name << ";\n";
    for (const auto& b : doc.blocks) {
        os << b.name << " {\n";
        for (const auto& st : b.statements) {
            os << "  ";
            const auto& w = st.words;
            if (st.head == "coords") {
                os << "coords " << join(w, ", ");
            } else if (st.head == "boundary" || st.head == "max_jet_order" || st.head == "scalar" ||
                       st.head == "oneform" || st.head == "const") {
                os << st.head << " " << w[0];
            } else if (st.head == "lieform") {
                os << "lieform " << w[0] << " : " << w[1];
                if (w.size() > 2) os << "(" << w[2] << ")";
            } else if (st.head == "metric") {
                std::vector<std::string> e;
                for (const auto& x : st.exprs) e.push_back(print_node(x));
                os << "metric diag(" << join(e, ", ") << ")";
            } else if (st.head == "function") {
                os << "function " << w[0];
                if (w.size() > 1) os << "(" << join({w.begin() + 1, w.end()}, ", ") << ")";
                if (!st.exprs.empty()) os << " = " << print_node(st.exprs[0]);
            } else if (st.head == "let") {
                os << "let " << w[0] << " = " << print_node(st.exprs[0]);
            } else if (st.head == "L" || st.head == "ell") {
                os << st.head << " = " << print_node(st.exprs[0]);
            } else if (st.head == "bc") {
                os << w[0] << ": " << w[1];
                if (!st.exprs.empty()) os << "(" << print_node(st.exprs[0]) << ")";
            } else if (st.head == "constraint") {
                os << print_node(st.exprs[0]) << " = " << print_node(st.exprs[1]);
            } else if (st.head == "xi") {
                os << "xi " << w[0] << " = " << print_node(st.exprs[0]);
            } else if (st.head == "evol") {
                std::vector<std::string> items;
                for (std::size_t i = 0; i < st.exprs.size(); ++i)
                    items.push_back(w[i + 1] + ": " + print_node(st.exprs[i]));
                os << "evol " << w[0] << " = { " << join(items, ", ") << " }";
            }
            os << ";\n";
        }
        os << "}\n";
    }
    return os.str();
}

Document parse_document(const std::string& text) { return Parser(lex(text)).document(); }

// ---------------------------------------------------------------- evaluator

namespace {

// Lie-algebra components of a form; plain values have a single component.
struct Value {
    std::vector<Form> comp;
    bool lie = false;
};

Value plain(const Form& f) { return {{f}, false}; }
Value scalar_value(const Expr& e) { return plain(Form::scalar(e)); }

Rational parse_number(const std::string& s)
{
    const auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(s));
    const std::string ip = s.substr(0, dot);
    const std::string fp = s.substr(dot + 1);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
    const std::int64_t num = (ip.empty() ? 0 : std::stoll(ip)) * den + (fp.empty() ? 0 : std::stoll(fp));
    return Rational(num, den);
}

class Evaluator {
public:
    explicit Evaluator(Model& m) : m_(m) {}

    bool boundary_mode = false;
    std::map<std::string, Value> lets;

    Value eval(const NodePtr& n)
    {
        try {
            return eval_inner(n);
        } catch (const Error& e) {
            if (e.line() > 0) throw;
            throw Error(e.code(),
                        std::to_string(n->line) + ":" + std::to_string(n->column) + ": " + e.what(), e.detail(),
                        n->line, n->column);
        }
    }

    Expr eval_scalar(const NodePtr& n)
    {
        const Value v = eval(n);
        if (v.lie || !is_scalar(v.comp[0])) fail("expected a scalar expression", n->line, n->column,
                                                ErrorCode::DegreeMismatch);
        return v.comp[0].coefficient({});
    }

    // Forms evaluated in boundary mode are pulled back to {x^n = 0}.
    Value finish(Value v) const
    {
        if (boundary_mode)
            for (auto& f : v.comp) f = pullback_boundary(m_.chart, f);
        return v;
    }

    int coord_index(const std::string& name) const
    {
        for (int i = 0; i < m_.chart.n; ++i)
            if (m_.chart.coords[static_cast<std::size_t>(i)] == name) return i;
        return -1;
    }

private:
    static bool is_scalar(const Form& f) { return f.is_zero() || f.bidegree() == std::make_pair(0, 0); }

    Model& m_;

    const FieldDecl* field(const std::string& name) const
    {
        for (const auto& f : m_.fields)
            if (f.name == name) return &f;
        return nullptr;
    }

    std::vector<int> active() const
    {
        return boundary_mode ? tangential_coords(m_.chart) : all_coords(m_.chart);
    }

    // Splits "A[t]_x" / "u_{tx}" / "u_tx" into a component label and a multi-index.
    bool resolve_jet(const std::string& text, std::string& label, MultiIndex& J) const
    {
        const auto comps = m_.components();
        std::string base = text;
        std::string suffix;
        const auto close = text.find(']');
        const std::size_t from = close == std::string::npos ? 0 : close;
        const auto us = text.find('_', from);
        if (us != std::string::npos) {
            base = text.substr(0, us);
            suffix = text.substr(us + 1);
        }
        if (!comps.count(base)) return false;
        if (!suffix.empty() && suffix.front() == '{') {
            if (suffix.back() != '}') return false;
            suffix = suffix.substr(1, suffix.size() - 2);
        }
        std::vector<Index> idx;
        std::size_t p = 0;
        while (p < suffix.size()) {
            if (suffix[p] == ' ' || suffix[p] == ',') {
                ++p;
                continue;
            }
            int best = -1;
            std::size_t best_len = 0;
            for (int i = 0; i < m_.chart.n; ++i) {
                const std::string& c = m_.chart.coords[static_cast<std::size_t>(i)];
                if (c.size() > best_len && suffix.compare(p, c.size(), c) == 0) {
                    best = i;
                    best_len = c.size();
                }
            }
            if (best < 0) return false;
            idx.push_back(static_cast<Index>(best));
            p += best_len;
        }
        label = base;
        J = MultiIndex(idx);
        return true;
    }

    Value field_value(const FieldDecl& f) const
    {
        if (f.kind == FieldKind::Scalar) return scalar_value(Expr::jet(f.name));
        Value v;
        v.lie = f.kind == FieldKind::LieOneForm;
        const int dim = v.lie ? f.algebra.dim : 1;
        for (int I = 0; I < dim; ++I) {
            Form a;
            for (int mu = 0; mu < m_.chart.n; ++mu) a += Expr::jet(f.label(m_.chart, mu, I)) * Form::dx(mu);
            v.comp.push_back(a);
        }
        return v;
    }

    Value name_value(const NodePtr& n)
    {
        const std::string& s = n->text;
        if (auto it = lets.find(s); it != lets.end()) return it->second;
        if (s == "vol") return plain(boundary_mode ? boundary_volume(m_.metric) : metric_volume(m_.metric));
        if (const int i = coord_index(s); i >= 0) return scalar_value(Expr::coord(i));
        if (m_.constants.count(s)) return scalar_value(Expr::param(s));
        if (auto it = m_.functions.find(s); it != m_.functions.end()) {
            if (it->second.default_coords.empty() && !it->second.params.empty())
                fail("function '" + s + "' needs arguments", n->line, n->column);
            std::vector<Expr> args;
            for (int c : it->second.default_coords) args.push_back(Expr::coord(c));
            return scalar_value(Expr::func(s, args));
        }
        if (const FieldDecl* f = field(s)) return field_value(*f);
        std::string label;
        MultiIndex J;
        if (resolve_jet(s, label, J)) {
            if (static_cast<int>(J.order()) > m_.chart.max_jet_order)
                fail("jet order of '" + s + "' exceeds the cap", n->line, n->column, ErrorCode::JetOrderExceeded);
            return scalar_value(Expr::jet(label, J));
        }
        fail("unknown symbol '" + s + "'", n->line, n->column, ErrorCode::UnknownSymbol);
    }

    Value binary(const NodePtr& n)
    {
        const std::string& op = n->text;
        if (op == "^") {
            const Expr base = eval_scalar(n->kids[0]);
            const Expr ex = eval_scalar(n->kids[1]);
            if (!ex.is_constant() || !ex.constant_value().is_integer())
                fail("exponent must be an integer constant", n->line, n->column);
            return scalar_value(base.pow(static_cast<int>(ex.constant_value().num())));
        }
        Value a = eval(n->kids[0]);
        Value b = eval(n->kids[1]);
        if (op == "+" || op == "-") {
            if (a.lie != b.lie || a.comp.size() != b.comp.size())
                fail("cannot add a Lie-algebra valued form and a plain form", n->line, n->column,
                     ErrorCode::DegreeMismatch);
            for (std::size_t i = 0; i < a.comp.size(); ++i) {
                const auto da = a.comp[i].bidegree();
                const auto db = b.comp[i].bidegree();
                if (!a.comp[i].is_zero() && !b.comp[i].is_zero() && da != db)
                    fail("adding forms of different degree", n->line, n->column, ErrorCode::DegreeMismatch);
                a.comp[i] = op == "+" ? a.comp[i] + b.comp[i] : a.comp[i] - b.comp[i];
            }
            return a;
        }
        if (op == "/") {
            if (b.lie || !is_scalar(b.comp[0])) fail("division by a form", n->line, n->column, ErrorCode::DegreeMismatch);
            const Expr d = b.comp[0].coefficient({});
            if (d.is_zero()) fail("division by zero", n->line, n->column, ErrorCode::DivisionByZero);
            for (auto& f : a.comp) f = f.map_coefficients([&](const Expr& c) { return c / d; });
            return a;
        }
        // product: one side must be a plain scalar
        const bool a_scalar = !a.lie && is_scalar(a.comp[0]);
        const bool b_scalar = !b.lie && is_scalar(b.comp[0]);
        if (!a_scalar && !b_scalar)
            fail("product of two forms of positive degree: use wedge(...)", n->line, n->column,
                 ErrorCode::DegreeMismatch);
        if (a_scalar) {
            const Expr s = a.comp[0].coefficient({});
            for (auto& f : b.comp) f = s * f;
            return b;
        }
        const Expr s = b.comp[0].coefficient({});
        for (auto& f : a.comp) f = s * f;
        return a;
    }

    Value wedge2(const Value& a, const Value& b, const NodePtr& n)
    {
        if (a.lie && b.lie)
            fail("wedge of two Lie-algebra valued forms: use bracket(...) or tr(...)", n->line, n->column,
                 ErrorCode::DegreeMismatch);
        const int limit = m_.chart.n;
        auto deg = [](const Value& v) {
            int d = 0;
            for (const auto& f : v.comp)
                if (!f.is_zero()) d = std::max(d, f.horizontal_degree());
            return d;
        };
        if (deg(a) + deg(b) > limit)
            fail("wedge exceeds the top degree " + std::to_string(limit), n->line, n->column,
                 ErrorCode::DegreeMismatch);
        Value out;
        out.lie = a.lie || b.lie;
        if (a.lie)
            for (const auto& f : a.comp) out.comp.push_back(wedge(f, b.comp[0]));
        else if (b.lie)
            for (const auto& f : b.comp) out.comp.push_back(wedge(a.comp[0], f));
        else
            out.comp.push_back(wedge(a.comp[0], b.comp[0]));
        return out;
    }

    const FieldDecl* lie_field_of(const Value& v) const
    {
        for (const auto& f : m_.fields)
            if (f.kind == FieldKind::LieOneForm && static_cast<int>(v.comp.size()) == f.algebra.dim) return &f;
        return nullptr;
    }

    void arity(const NodePtr& n, std::size_t k) const
    {
        if (n->kids.size() != k)
            fail(n->text + "(...) takes " + std::to_string(k) + " argument" + (k == 1 ? "" : "s"), n->line,
                 n->column);
    }

    Value call(const NodePtr& n)
    {
        const std::string& f = n->text;
        if (f == "d") {
            arity(n, 1);
            Value v = eval(n->kids[0]);
            for (auto& c : v.comp) c = d_H_on(m_.chart, active(), c);
            return v;
        }
        if (f == "wedge") {
            if (n->kids.size() < 2) fail("wedge(...) takes at least two arguments", n->line, n->column);
            Value acc = eval(n->kids[0]);
            for (std::size_t i = 1; i < n->kids.size(); ++i) acc = wedge2(acc, eval(n->kids[i]), n);
            return acc;
        }
        if (f == "hodge") {
            arity(n, 1);
            Value v = eval(n->kids[0]);
            for (auto& c : v.comp) {
                if (boundary_mode) {
                    c = hodge(m_.metric, tangential_coords(m_.chart), pullback_boundary(m_.chart, c));
                } else {
                    c = hodge(m_.metric, all_coords(m_.chart), c);
                }
            }
            return v;
        }
        if (f == "vol") {
            arity(n, 0);
            return plain(boundary_mode ? boundary_volume(m_.metric) : metric_volume(m_.metric));
        }
        if (f == "dx") {
            arity(n, 1);
            const int i = n->kids[0]->kind == Node::Kind::Name ? coord_index(n->kids[0]->text) : -1;
            if (i < 0) fail("dx(...) expects a coordinate name", n->line, n->column, ErrorCode::UnknownSymbol);
            return plain(Form::dx(i));
        }
        if (f == "iota") {
            arity(n, 2);
            const VectorDecl* vd = n->kids[0]->kind == Node::Kind::Name ? m_.vector(n->kids[0]->text) : nullptr;
            if (!vd || vd->evolutionary)
                fail("iota(...) expects a declared xi vector", n->line, n->column, ErrorCode::UnknownSymbol);
            Value v = eval(n->kids[1]);
            for (auto& c : v.comp) c = iota_horizontal(m_.chart, vd->xi, c);
            return v;
        }
        if (f == "box") {
            arity(n, 1);
            return scalar_value(cpsforge::box(m_.chart, m_.metric, eval_scalar(n->kids[0])));
        }
        if (f == "dnormal") {
            arity(n, 1);
            return scalar_value(normal_derivative(m_.chart, m_.metric, eval_scalar(n->kids[0])));
        }
        if (f == "diff") {
            arity(n, 2);
            const Expr e = eval_scalar(n->kids[0]);
            const Expr v = eval_scalar(n->kids[1]);
            if (v.size() != 1 || !v.terms().begin()->second.is_one() || v.terms().begin()->first.size() != 1 ||
                v.terms().begin()->first[0].second != 1)
                fail("diff(e, v) needs a single symbol v", n->line, n->column);
            return scalar_value(e.diff(v.terms().begin()->first[0].first));
        }
        if (f == "bracket") {
            arity(n, 2);
            const Value a = eval(n->kids[0]);
            const Value b = eval(n->kids[1]);
            if (!a.lie || !b.lie || a.comp.size() != b.comp.size())
                fail("bracket(...) needs two Lie-algebra valued forms", n->line, n->column, ErrorCode::DegreeMismatch);
            const FieldDecl* lf = lie_field_of(a);
            Value out;
            out.lie = true;
            const int dim = static_cast<int>(a.comp.size());
            out.comp.assign(a.comp.size(), Form());
            for (int I = 0; I < dim; ++I)
                for (int J = 0; J < dim; ++J) {
                    const Form w = wedge(a.comp[static_cast<std::size_t>(I)], b.comp[static_cast<std::size_t>(J)]);
                    if (w.is_zero()) continue;
                    for (int K = 0; K < dim; ++K) {
                        const Rational s = lf ? lf->algebra.structure(I, J, K) : Rational(0);
                        if (!s.is_zero()) out.comp[static_cast<std::size_t>(K)] += Expr(s) * w;
                    }
                }
            return out;
        }
        if (f == "tr") {
            arity(n, 2);
            const Value a = eval(n->kids[0]);
            const Value b = eval(n->kids[1]);
            if (!a.lie || !b.lie || a.comp.size() != b.comp.size())
                fail("tr(...) needs two Lie-algebra valued forms", n->line, n->column, ErrorCode::DegreeMismatch);
            Form out;
            for (std::size_t I = 0; I < a.comp.size(); ++I) out += wedge(a.comp[I], b.comp[I]);
            return plain(out);
        }
        if (f == "inner") {
            arity(n, 2);
            const Value a = eval(n->kids[0]);
            const Value b = eval(n->kids[1]);
            if (a.lie != b.lie || a.comp.size() != b.comp.size())
                fail("inner(...) needs matching arguments", n->line, n->column, ErrorCode::DegreeMismatch);
            Expr out;
            for (std::size_t I = 0; I < a.comp.size(); ++I)
                for (int mu = 0; mu < m_.chart.n; ++mu) {
                    const Word w{basis_dx(mu)};
                    out += Expr(Rational(1) / m_.metric[static_cast<std::size_t>(mu)]) * a.comp[I].coefficient(w) *
                           b.comp[I].coefficient(w);
                }
            return scalar_value(out);
        }
        if (auto it = m_.functions.find(f); it != m_.functions.end()) {
            arity(n, it->second.params.size());
            std::vector<Expr> args;
            for (const auto& k : n->kids) args.push_back(eval_scalar(k));
            return scalar_value(Expr::func(f, args));
        }
        fail("unknown function '" + f + "'", n->line, n->column, ErrorCode::UnknownSymbol);
    }

    Value eval_inner(const NodePtr& n)
    {
        switch (n->kind) {
        case Node::Kind::Number:
            return scalar_value(Expr(parse_number(n->text)));
        case Node::Kind::Name:
            return name_value(n);
        case Node::Kind::Neg: {
            Value v = eval(n->kids[0]);
            for (auto& f : v.comp) f = -f;
            return v;
        }
        case Node::Kind::Binary:
            return binary(n);
        case Node::Kind::Call:
            return call(n);
        case Node::Kind::Tuple:
            fail("unexpected tuple", n->line, n->column);
        }
        fail("bad expression", n->line, n->column);
    }
};

} // namespace

Model build_model(const Document& doc, const std::string& source, const BuildOptions& options)
{
    Model m;
    m.name = doc.model_name.empty() ? options.fallback_name : doc.model_name;
    m.source = source;

    auto blocks = [&](const std::string& name) {
        std::vector<const Statement*> out;
        for (const auto& b : doc.blocks)
            if (b.name == name)
                for (const auto& s : b.statements) out.push_back(&s);
        return out;
    };

    // chart
    std::vector<std::string> coords;
    std::string boundary;
    int cap = 4;
    int boundary_line = 0;
    int boundary_col = 0;
    for (const Statement* s : blocks("chart")) {
        if (s->head == "coords") coords = s->words;
        if (s->head == "boundary") {
            boundary = s->words[0];
            boundary_line = s->line;
            boundary_col = s->column;
        }
        if (s->head == "max_jet_order") cap = std::stoi(s->words[0]);
    }
    if (coords.empty()) fail("chart declares no coordinates", 1, 1);
    if (options.max_jet_order > 0) cap = options.max_jet_order;
    const bool has_boundary = !boundary.empty() && boundary != "none";
    if (has_boundary && boundary != coords.back())
        fail("the boundary axis must be the last coordinate", boundary_line, boundary_col);
    m.chart = Chart(coords, has_boundary, cap);
    m.metric.assign(coords.size(), Rational(1));

    // fields
    std::set<std::string> names(coords.begin(), coords.end());
    auto declare = [&](const std::string& n, const Statement* s) {
        if (!names.insert(n).second) fail("symbol '" + n + "' declared twice", s->line, s->column);
    };
    for (const Statement* s : blocks("fields")) {
        FieldDecl f;
        f.name = s->words[0];
        declare(f.name, s);
        if (s->head == "scalar") {
            f.kind = FieldKind::Scalar;
        } else if (s->head == "oneform") {
            f.kind = FieldKind::OneForm;
        } else {
            f.kind = FieldKind::LieOneForm;
            if (s->words[1] == "su2")
                f.algebra = LieAlgebra::su2();
            else if (s->words[1] == "abelian" && s->words.size() > 2)
                f.algebra = LieAlgebra::abelian(std::stoi(s->words[2]));
            else
                fail("unknown Lie algebra '" + s->words[1] + "'", s->line, s->column, ErrorCode::UnknownSymbol);
        }
        m.fields.push_back(std::move(f));
    }
    if (m.fields.empty()) fail("no dynamical fields", 1, 1, ErrorCode::NoFields);

    Evaluator ev(m);

    // background
    for (const Statement* s : blocks("background")) {
        if (s->head == "metric") {
            if (s->exprs.size() != coords.size())
                fail("metric needs one diagonal entry per coordinate", s->line, s->column, ErrorCode::ShapeMismatch);
            for (std::size_t i = 0; i < s->exprs.size(); ++i) {
                const Expr e = ev.eval_scalar(s->exprs[i]);
                if (!e.is_constant() || e.is_zero())
                    fail("metric entries must be nonzero rational constants", s->line, s->column,
                         ErrorCode::UnsupportedMetric);
                m.metric[i] = e.constant_value();
            }
        } else if (s->head == "const") {
            declare(s->words[0], s);
            m.constants.insert(s->words[0]);
        } else if (s->head == "function") {
            FunctionDecl fd;
            fd.name = s->words[0];
            declare(fd.name, s);
            bool all_coords = s->words.size() > 1;
            std::map<std::string, Value> locals;
            for (std::size_t i = 1; i < s->words.size(); ++i) {
                const std::string p = fd.name + "#" + s->words[i];
                fd.params.push_back(p);
                locals[s->words[i]] = scalar_value(Expr::param(p));
                const int c = ev.coord_index(s->words[i]);
                if (c < 0) all_coords = false;
                fd.default_coords.push_back(c);
            }
            if (!all_coords) fd.default_coords.clear();
            if (!s->exprs.empty()) {
                Evaluator local(m);
                local.lets = locals;
                fd.realization = local.eval_scalar(s->exprs[0]);
            }
            m.functions[fd.name] = std::move(fd);
        }
    }

    // vectors (before the Lagrangian so iota(...) can refer to them)
    for (const Statement* s : blocks("vectors")) {
        VectorDecl v;
        v.name = s->words[0];
        if (m.vector(v.name)) fail("vector '" + v.name + "' declared twice", s->line, s->column);
        if (s->head == "xi") {
            const auto& comps = s->exprs[0]->kids;
            if (comps.size() != coords.size())
                fail("vector field needs " + std::to_string(coords.size()) + " components", s->line, s->column,
                     ErrorCode::ComponentCount);
            for (const auto& c : comps) {
                const Expr e = ev.eval_scalar(c);
                if (e.depends_on_jets())
                    fail("vector field components may depend on coordinates only", c->line, c->column,
                         ErrorCode::ComponentCount);
                v.xi.push_back(e);
            }
        } else {
            v.evolutionary = true;
            const auto comps = m.components();
            for (std::size_t i = 0; i < s->exprs.size(); ++i) {
                const std::string& key = s->words[i + 1];
                const NodePtr& node = s->exprs[i];
                if (comps.count(key)) {
                    v.W[key] = ev.eval_scalar(node);
                    continue;
                }
                const FieldDecl* f = nullptr;
                for (const auto& fd : m.fields)
                    if (fd.name == key) f = &fd;
                if (!f) fail("unknown field component '" + key + "'", node->line, node->column,
                             ErrorCode::UnknownSymbol);
                const Value val = ev.eval(node);
                const int dim = f->kind == FieldKind::LieOneForm ? f->algebra.dim : 1;
                if (static_cast<int>(val.comp.size()) != dim)
                    fail("value does not match the field type of '" + key + "'", node->line, node->column,
                         ErrorCode::DegreeMismatch);
                for (int I = 0; I < dim; ++I) {
                    const Form& a = val.comp[static_cast<std::size_t>(I)];
                    if (!a.is_zero() && a.bidegree() != std::make_pair(1, 0))
                        fail("one-form field needs a one-form value", node->line, node->column,
                             ErrorCode::DegreeMismatch);
                    for (int mu = 0; mu < m.chart.n; ++mu)
                        v.W[f->label(m.chart, mu, I)] = a.coefficient({basis_dx(mu)});
                }
            }
        }
        m.vectors.push_back(std::move(v));
    }

    // lagrangian
    bool have_L = false;
    for (const Statement* s : blocks("lagrangian")) {
        if (s->head == "let") {
            declare(s->words[0], s);
            ev.boundary_mode = false;
            ev.lets[s->words[0]] = ev.eval(s->exprs[0]);
            continue;
        }
        const bool is_ell = s->head == "ell";
        ev.boundary_mode = is_ell;
        const Value v = ev.finish(ev.eval(s->exprs[0]));
        ev.boundary_mode = false;
        if (v.lie) fail("the Lagrangian must be a plain form: use tr(...)", s->line, s->column,
                        ErrorCode::DegreeMismatch);
        const Form& f = v.comp[0];
        const int want = is_ell ? m.chart.n - 1 : m.chart.n;
        if (!f.is_zero() && f.bidegree() != std::make_pair(want, 0))
            fail(std::string(is_ell ? "ell" : "L") + " must be a (" + std::to_string(want) + ",0) form", s->line,
                 s->column, ErrorCode::DegreeMismatch);
        if (is_ell) {
            if (!has_boundary && !f.is_zero())
                fail("ell given on a chart without boundary", s->line, s->column, ErrorCode::DegreeMismatch);
            m.ell = f;
        } else {
            m.L = f;
            have_L = true;
        }
    }
    if (!have_L) fail("lagrangian block must define L", 1, 1);

    // boundary conditions
    for (const Statement* s : blocks("bc")) {
        const std::string& fname = s->words[0];
        const FieldDecl* f = nullptr;
        for (const auto& fd : m.fields)
            if (fd.name == fname) f = &fd;
        if (!f) fail("unknown field '" + fname + "'", s->line, s->column, ErrorCode::UnknownSymbol);
        if (m.bc.count(fname))
            fail("field '" + fname + "' has more than one boundary condition; mixed conditions are not supported",
                 s->line, s->column, ErrorCode::MixedBoundaryCondition);
        BoundaryCondition bc;
        if (s->words[1] == "dirichlet") bc.kind = BcKind::Dirichlet;
        if (s->words[1] == "robin") {
            if (f->kind != FieldKind::Scalar)
                fail("robin conditions apply to scalar fields only", s->line, s->column,
                     ErrorCode::UnsupportedTensorRank);
            bc.kind = BcKind::Robin;
            ev.boundary_mode = true;
            bc.robin = ev.eval_scalar(s->exprs[0]).substitute({{intern_coord(m.chart.transversal()), Expr()}});
            ev.boundary_mode = false;
        }
        m.bc[fname] = bc;
    }

    // constraints
    for (const Statement* s : blocks("constraints"))
        m.constraints.push_back(ev.eval_scalar(s->exprs[0]) - ev.eval_scalar(s->exprs[1]));

    return m;
}

Model parse_model(const std::string& text, const BuildOptions& options)
{
    return build_model(parse_document(text), text, options);
}

Model load_model(const std::string& path, const BuildOptions& options)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Usage, "cannot open model file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    BuildOptions o = options;
    if (o.fallback_name.empty()) {
        std::string base = path.substr(path.find_last_of('/') + 1);
        o.fallback_name = base.substr(0, base.find('.'));
    }
    return parse_model(ss.str(), o);
}

} // namespace cpsforge::dsl
