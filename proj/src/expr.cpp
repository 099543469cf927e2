#include "cpsforge/expr.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace cpsforge {

const char* error_code_name(ErrorCode c)
{
    switch (c) {
    case ErrorCode::DivisionByZero: return "DIVISION_BY_ZERO";
    case ErrorCode::Overflow: return "OVERFLOW";
    case ErrorCode::JetOrderExceeded: return "JET_ORDER_EXCEEDED";
    case ErrorCode::ComponentCount: return "COMPONENT_COUNT";
    case ErrorCode::NonDecomposable: return "NON_DECOMPOSABLE";
    case ErrorCode::NonTangent: return "NON_TANGENT";
    case ErrorCode::UnsupportedTensorRank: return "UNSUPPORTED_TENSOR_RANK";
    case ErrorCode::UnsupportedMetric: return "UNSUPPORTED_METRIC";
    case ErrorCode::MixedBoundaryCondition: return "MIXED_BOUNDARY_CONDITION";
    case ErrorCode::Parse: return "PARSE_ERROR";
    case ErrorCode::UnknownSymbol: return "UNKNOWN_SYMBOL";
    case ErrorCode::DegreeMismatch: return "DEGREE_MISMATCH";
    case ErrorCode::NoFields: return "NO_FIELDS";
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::CflViolation: return "CFL_VIOLATION";
    case ErrorCode::SliceOutsideGrid: return "SLICE_OUTSIDE_GRID";
    case ErrorCode::Numeric: return "NUMERIC";
    case ErrorCode::Usage: return "USAGE";
    }
    return "UNKNOWN";
}

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::initializer_list<int> idx)
{
    for (int i : idx) idx_.push_back(static_cast<Index>(i));
    std::sort(idx_.begin(), idx_.end());
}

MultiIndex::MultiIndex(std::vector<Index> idx) : idx_(std::move(idx)) { std::sort(idx_.begin(), idx_.end()); }

int MultiIndex::count(int i) const
{
    return static_cast<int>(std::count(idx_.begin(), idx_.end(), static_cast<Index>(i)));
}

MultiIndex MultiIndex::plus(int i) const
{
    MultiIndex out = *this;
    out.idx_.insert(std::upper_bound(out.idx_.begin(), out.idx_.end(), static_cast<Index>(i)), static_cast<Index>(i));
    return out;
}

MultiIndex MultiIndex::plus(const MultiIndex& other) const
{
    MultiIndex out = *this;
    for (Index i : other.idx_) out = out.plus(i);
    return out;
}

MultiIndex MultiIndex::minus(int i) const
{
    MultiIndex out = *this;
    auto it = std::find(out.idx_.begin(), out.idx_.end(), static_cast<Index>(i));
    if (it == out.idx_.end()) throw std::logic_error("MultiIndex::minus: index not present");
    out.idx_.erase(it);
    return out;
}

bool MultiIndex::divides(const MultiIndex& other) const
{
    return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
}

MultiIndex MultiIndex::complement_in(const MultiIndex& other) const
{
    std::vector<Index> out;
    std::set_difference(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end(), std::back_inserter(out));
    return MultiIndex(std::move(out));
}

// ---------------------------------------------------------------------------
// Atom table. Chunked storage keeps published atoms at stable addresses so
// lookups by id need no lock.

namespace {

constexpr std::size_t kChunkBits = 12;
constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;
constexpr std::size_t kMaxChunks = 4096;

struct AtomTable {
    std::mutex mu;
    std::unordered_map<std::string, AtomId> by_key;
    std::array<std::atomic<Atom*>, kMaxChunks> chunks{};
    std::uint32_t count = 0;

    ~AtomTable()
    {
        for (auto& c : chunks) delete[] c.load();
    }

    AtomId insert(Atom a)
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = by_key.find(a.key); it != by_key.end()) return it->second;
        const AtomId id = count;
        const std::size_t chunk = id >> kChunkBits;
        if (chunk >= kMaxChunks) throw Error(ErrorCode::Overflow, "atom table exhausted");
        Atom* block = chunks[chunk].load(std::memory_order_acquire);
        if (block == nullptr) {
            block = new Atom[kChunkSize];
            chunks[chunk].store(block, std::memory_order_release);
        }
        block[id & (kChunkSize - 1)] = std::move(a);
        by_key.emplace(block[id & (kChunkSize - 1)].key, id);
        ++count;
        return id;
    }

    const Atom& get(AtomId id) const
    {
        return chunks[id >> kChunkBits].load(std::memory_order_acquire)[id & (kChunkSize - 1)];
    }
};

AtomTable& table()
{
    static AtomTable t;
    return t;
}

std::string join_indices(const MultiIndex& J)
{
    std::string s;
    for (Index i : J.indices()) {
        if (!s.empty()) s += ',';
        s += std::to_string(i);
    }
    return s;
}

} // namespace

const Atom& atom(AtomId id) { return table().get(id); }

AtomId intern_coord(int i)
{
    Atom a;
    a.kind = AtomKind::Coord;
    a.coord = i;
    a.key = "X" + std::to_string(i);
    return table().insert(std::move(a));
}

AtomId intern_param(const std::string& name)
{
    Atom a;
    a.kind = AtomKind::Param;
    a.name = name;
    a.key = "P" + name;
    return table().insert(std::move(a));
}

AtomId intern_jet(const std::string& label, const MultiIndex& J)
{
    Atom a;
    a.kind = AtomKind::Jet;
    a.name = label;
    a.J = J;
    a.key = "J" + label + "|" + join_indices(J);
    return table().insert(std::move(a));
}

AtomId intern_func(const std::string& name, std::vector<int> derivs, std::vector<Expr> args)
{
    if (derivs.empty()) derivs.assign(args.size(), 0);
    if (derivs.size() != args.size()) throw std::logic_error("intern_func: derivative arity mismatch");
    Atom a;
    a.kind = AtomKind::Func;
    a.name = name;
    a.derivs = std::move(derivs);
    a.args = std::move(args);
    std::string key = "F" + name + "|";
    for (int d : a.derivs) key += std::to_string(d) + ",";
    key += "|";
    for (const Expr& e : a.args) key += e.str() + ";";
    a.key = std::move(key);
    return table().insert(std::move(a));
}

namespace {

int kind_rank(AtomKind k)
{
    switch (k) {
    case AtomKind::Coord: return 0;
    case AtomKind::Param: return 1;
    case AtomKind::Jet: return 2;
    case AtomKind::Func: return 3;
    }
    return 4;
}

int cmp3(auto const& a, auto const& b)
{
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
}

} // namespace

int compare_atoms(AtomId x, AtomId y)
{
    if (x == y) return 0;
    const Atom& a = atom(x);
    const Atom& b = atom(y);
    if (int c = cmp3(kind_rank(a.kind), kind_rank(b.kind))) return c;
    switch (a.kind) {
    case AtomKind::Coord: return cmp3(a.coord, b.coord);
    case AtomKind::Param: return cmp3(a.name, b.name);
    case AtomKind::Jet:
        if (int c = cmp3(a.name, b.name)) return c;
        return cmp3(a.J, b.J);
    case AtomKind::Func:
        if (int c = cmp3(a.name, b.name)) return c;
        if (int c = cmp3(a.derivs, b.derivs)) return c;
        return cmp3(a.key, b.key);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Names

std::string NameTable::coord(int i) const
{
    if (i >= 0 && static_cast<std::size_t>(i) < coords.size()) return coords[static_cast<std::size_t>(i)];
    return "x" + std::to_string(i + 1);
}

std::string NameTable::jet(const std::string& label, const MultiIndex& J) const
{
    if (J.empty()) return label;
    bool single_chars = true;
    for (Index i : J.indices()) single_chars = single_chars && coord(i).size() == 1;
    if (J.order() == 1) return label + "_" + coord(J.indices()[0]);
    std::string s = label + "_{";
    bool first = true;
    for (Index i : J.indices()) {
        if (!single_chars && !first) s += ',';
        s += coord(i);
        first = false;
    }
    return s + "}";
}

std::string atom_str(AtomId id, const NameTable& names)
{
    const Atom& a = atom(id);
    switch (a.kind) {
    case AtomKind::Coord: return names.coord(a.coord);
    case AtomKind::Param: return a.name;
    case AtomKind::Jet: return names.jet(a.name, a.J);
    case AtomKind::Func: {
        std::string s = a.name;
        const bool plain = std::all_of(a.derivs.begin(), a.derivs.end(), [](int d) { return d == 0; });
        if (!plain) {
            if (a.args.size() == 1 && a.derivs[0] <= 3) {
                s += std::string(static_cast<std::size_t>(a.derivs[0]), '\'');
            } else {
                s += "^(";
                for (std::size_t k = 0; k < a.derivs.size(); ++k) s += (k ? "," : "") + std::to_string(a.derivs[k]);
                s += ")";
            }
        }
        s += "(";
        for (std::size_t k = 0; k < a.args.size(); ++k) s += (k ? ", " : "") + a.args[k].str(names);
        return s + ")";
    }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Expr

Monomial monomial_mul(const Monomial& a, const Monomial& b)
{
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            const int e = a[i].second + b[j].second;
            if (e != 0) out.emplace_back(a[i].first, e);
            ++i;
            ++j;
        }
    }
    return out;
}

Expr::Expr(Rational c)
{
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
}

Expr Expr::from_atom(AtomId a, int power)
{
    Expr e;
    if (power == 0) return Expr(1);
    e.terms_.emplace(Monomial{{a, power}}, Rational(1));
    return e;
}

Expr Expr::func(const std::string& name, std::vector<Expr> args, std::vector<int> derivs)
{
    return from_atom(intern_func(name, std::move(derivs), std::move(args)));
}

bool Expr::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Rational Expr::constant_value() const
{
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw std::logic_error("Expr::constant_value on non-constant");
    return terms_.begin()->second;
}

void Expr::add_term(const Monomial& m, const Rational& c)
{
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Expr Expr::operator-() const
{
    Expr out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
}

Expr& Expr::operator+=(const Expr& o)
{
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Expr& Expr::operator-=(const Expr& o)
{
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Expr operator+(const Expr& a, const Expr& b)
{
    if (a.terms_.size() < b.terms_.size()) {
        Expr out = b;
        out += a;
        return out;
    }
    Expr out = a;
    out += b;
    return out;
}

Expr operator-(const Expr& a, const Expr& b)
{
    Expr out = a;
    out -= b;
    return out;
}

Expr operator*(const Expr& a, const Expr& b)
{
    Expr out;
    if (a.is_zero() || b.is_zero()) return out;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) out.add_term(monomial_mul(ma, mb), ca * cb);
    return out;
}

Expr operator*(const Expr& a, const Rational& c)
{
    if (c.is_zero()) return {};
    Expr out = a;
    for (auto& [m, v] : out.terms_) v *= c;
    return out;
}

Expr operator/(const Expr& a, const Expr& b) { return a * b.pow(-1); }

Expr Expr::pow(int e) const
{
    if (e == 0) return Expr(1);
    if (e < 0) {
        if (terms_.size() != 1) throw Error(ErrorCode::DivisionByZero, "division by a non-monomial expression: " + str());
        const auto& [m, c] = *terms_.begin();
        Monomial inv = m;
        for (auto& p : inv) p.second = -p.second;
        Expr base;
        base.terms_.emplace(inv, Rational(1) / c);
        return base.pow(-e);
    }
    Expr out(1);
    Expr base = *this;
    int k = e;
    while (k > 0) {
        if (k & 1) out = out * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return out;
}

namespace {

// d(atom)/dv with the chain rule through function arguments.
Expr atom_diff(AtomId a, AtomId v)
{
    if (a == v) return Expr(1);
    const Atom& at = atom(a);
    if (at.kind != AtomKind::Func) return {};
    Expr out;
    for (std::size_t k = 0; k < at.args.size(); ++k) {
        Expr dk = at.args[k].diff(v);
        if (dk.is_zero()) continue;
        std::vector<int> d = at.derivs;
        ++d[k];
        out += Expr::func(at.name, at.args, d) * dk;
    }
    return out;
}

} // namespace

Expr apply_derivation(const Expr& e, const std::function<Expr(AtomId)>& leaf)
{
    std::map<AtomId, Expr> cache;
    std::function<const Expr&(AtomId)> image = [&](AtomId a) -> const Expr& {
        auto it = cache.find(a);
        if (it != cache.end()) return it->second;
        Expr img;
        const Atom& at = atom(a);
        if (at.kind == AtomKind::Func) {
            for (std::size_t k = 0; k < at.args.size(); ++k) {
                Expr dk = apply_derivation(at.args[k], leaf);
                if (dk.is_zero()) continue;
                std::vector<int> d = at.derivs;
                ++d[k];
                img += Expr::func(at.name, at.args, d) * dk;
            }
        } else {
            img = leaf(a);
        }
        return cache.emplace(a, std::move(img)).first->second;
    };
    Expr out;
    for (const auto& [m, c] : e.terms()) {
        for (std::size_t k = 0; k < m.size(); ++k) {
            const Expr& da = image(m[k].first);
            if (da.is_zero()) continue;
            Monomial rest = m;
            rest[k].second -= 1;
            if (rest[k].second == 0) rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
            Expr term;
            term.add_term(rest, c * Rational(m[k].second));
            out += term * da;
        }
    }
    return out;
}

Expr Expr::diff(AtomId v) const
{
    std::map<AtomId, Expr> cache;
    auto get = [&](AtomId a) -> const Expr& {
        auto it = cache.find(a);
        if (it == cache.end()) it = cache.emplace(a, atom_diff(a, v)).first;
        return it->second;
    };
    Expr out;
    for (const auto& [m, c] : terms_) {
        for (std::size_t k = 0; k < m.size(); ++k) {
            const Expr& da = get(m[k].first);
            if (da.is_zero()) continue;
            Monomial rest = m;
            rest[k].second -= 1;
            if (rest[k].second == 0) rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
            Expr term;
            term.terms_.emplace(rest, c * Rational(m[k].second));
            out += term * da;
        }
    }
    return out;
}

Expr Expr::substitute(const std::map<AtomId, Expr>& rules) const
{
    if (rules.empty()) return *this;
    std::map<AtomId, Expr> cache;
    auto image = [&](AtomId a) -> const Expr& {
        auto it = cache.find(a);
        if (it != cache.end()) return it->second;
        Expr img;
        if (auto r = rules.find(a); r != rules.end()) {
            img = r->second;
        } else {
            const Atom& at = atom(a);
            if (at.kind == AtomKind::Func) {
                std::vector<Expr> args;
                args.reserve(at.args.size());
                for (const Expr& x : at.args) args.push_back(x.substitute(rules));
                img = Expr::func(at.name, std::move(args), at.derivs);
            } else {
                img = Expr::from_atom(a);
            }
        }
        return cache.emplace(a, std::move(img)).first->second;
    };
    Expr out;
    for (const auto& [m, c] : terms_) {
        Expr t(c);
        for (const auto& [a, e] : m) t = t * image(a).pow(e);
        out += t;
    }
    return out;
}

std::set<AtomId> Expr::atoms() const
{
    std::set<AtomId> out;
    for (const auto& [m, c] : terms_) {
        for (const auto& [a, e] : m) {
            if (!out.insert(a).second) continue;
            const Atom& at = atom(a);
            if (at.kind == AtomKind::Func)
                for (const Expr& x : at.args) {
                    auto inner = x.atoms();
                    out.insert(inner.begin(), inner.end());
                }
        }
    }
    return out;
}

int Expr::jet_order() const
{
    int best = -1;
    for (AtomId a : atoms()) {
        const Atom& at = atom(a);
        if (at.kind == AtomKind::Jet) best = std::max(best, static_cast<int>(at.J.order()));
    }
    return best;
}

namespace {

struct CanonTerm {
    std::vector<std::pair<AtomId, int>> factors; // structurally sorted
    Rational coef;
};

int compare_factor_lists(const CanonTerm& x, const CanonTerm& y)
{
    int dx = 0;
    int dy = 0;
    for (auto& f : x.factors) dx += f.second < 0 ? -f.second : f.second;
    for (auto& f : y.factors) dy += f.second < 0 ? -f.second : f.second;
    if (dx != dy) return dx < dy ? -1 : 1;
    const std::size_t n = std::min(x.factors.size(), y.factors.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (int c = compare_atoms(x.factors[k].first, y.factors[k].first)) return c;
        if (x.factors[k].second != y.factors[k].second) return x.factors[k].second > y.factors[k].second ? -1 : 1;
    }
    if (x.factors.size() != y.factors.size()) return x.factors.size() < y.factors.size() ? -1 : 1;
    return 0;
}

} // namespace

std::string Expr::str(const NameTable& names) const
{
    if (terms_.empty()) return "0";
    std::vector<CanonTerm> ts;
    ts.reserve(terms_.size());
    for (const auto& [m, c] : terms_) {
        CanonTerm t{m, c};
        std::sort(t.factors.begin(), t.factors.end(),
                  [](const auto& a, const auto& b) { return compare_atoms(a.first, b.first) < 0; });
        ts.push_back(std::move(t));
    }
    std::sort(ts.begin(), ts.end(), [](const CanonTerm& a, const CanonTerm& b) { return compare_factor_lists(a, b) < 0; });
    std::ostringstream os;
    bool first = true;
    for (const CanonTerm& t : ts) {
        Rational c = t.coef;
        if (first) {
            if (c < Rational(0)) {
                os << "-";
                c = -c;
            }
        } else {
            if (c < Rational(0)) {
                os << " - ";
                c = -c;
            } else {
                os << " + ";
            }
        }
        first = false;
        bool need_star = false;
        if (!c.is_one() || t.factors.empty()) {
            os << c.str();
            need_star = true;
        }
        for (const auto& [a, e] : t.factors) {
            if (need_star) os << "*";
            os << atom_str(a, names);
            if (e != 1) os << "^" << e;
            need_star = true;
        }
    }
    return os.str();
}

double evaluate(const Expr& e, const AtomValue& value)
{
    std::map<AtomId, double> cache;
    double sum = 0.0;
    for (const auto& [m, c] : e.terms()) {
        double t = c.to_double();
        for (const auto& [a, p] : m) {
            auto it = cache.find(a);
            if (it == cache.end()) it = cache.emplace(a, value(a)).first;
            double v = 1.0;
            const double base = p < 0 ? 1.0 / it->second : it->second;
            for (int k = 0; k < (p < 0 ? -p : p); ++k) v *= base;
            t *= v;
        }
        sum += t;
    }
    return sum;
}

} // namespace cpsforge
