#include "cpsforge/form.hpp"

#include <algorithm>
#include <sstream>

namespace cpsforge {

int compare_basis(BasisId a, BasisId b)
{
    if (a == b) return 0;
    const bool va = is_vertical(a);
    const bool vb = is_vertical(b);
    if (va != vb) return va ? 1 : -1;
    if (!va) return a < b ? -1 : 1;
    return compare_atoms(basis_jet(a), basis_jet(b));
}

bool WordLess::operator()(const Word& a, const Word& b) const
{
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < n; ++k)
        if (int c = compare_basis(a[k], b[k])) return c < 0;
    return a.size() < b.size();
}

std::pair<int, int> word_bidegree(const Word& w)
{
    int r = 0;
    for (BasisId b : w) r += is_vertical(b) ? 0 : 1;
    return {r, static_cast<int>(w.size()) - r};
}

namespace {

// Insertion sort of one parity class; returns the permutation sign or 0 on a repeat.
int sort_with_sign(std::vector<BasisId>& v)
{
    int sign = 1;
    for (std::size_t i = 1; i < v.size(); ++i) {
        std::size_t j = i;
        while (j > 0) {
            const int c = compare_basis(v[j - 1], v[j]);
            if (c == 0) return 0;
            if (c < 0) break;
            std::swap(v[j - 1], v[j]);
            sign = -sign;
            --j;
        }
    }
    return sign;
}

} // namespace

int canonicalize_word(std::vector<BasisId>& factors)
{
    // dx and theta commute under the bigraded sign, so only the relative order
    // within each class matters.
    std::vector<BasisId> h;
    std::vector<BasisId> v;
    for (BasisId b : factors) (is_vertical(b) ? v : h).push_back(b);
    const int sh = sort_with_sign(h);
    if (sh == 0) return 0;
    const int sv = sort_with_sign(v);
    if (sv == 0) return 0;
    factors = std::move(h);
    factors.insert(factors.end(), v.begin(), v.end());
    return sh * sv;
}

Form Form::scalar(const Expr& e)
{
    Form f;
    f.add_term({}, e);
    return f;
}

Form Form::basis(BasisId b)
{
    Form f;
    f.add_term({b}, Expr(1));
    return f;
}

Form Form::dx(int i) { return basis(basis_dx(i)); }

Form Form::theta(const std::string& label, const MultiIndex& J) { return basis(basis_theta(label, J)); }

Form Form::dx_word(const std::vector<int>& coords)
{
    std::vector<BasisId> w;
    for (int i : coords) w.push_back(basis_dx(i));
    const int s = canonicalize_word(w);
    Form f;
    if (s != 0) f.add_term(w, Expr(s));
    return f;
}

Form Form::volume(int n)
{
    std::vector<int> c;
    for (int i = 0; i < n; ++i) c.push_back(i);
    return dx_word(c);
}

std::pair<int, int> Form::bidegree() const
{
    if (terms_.empty()) return {-1, -1};
    return word_bidegree(terms_.begin()->first);
}

Expr Form::coefficient(const Word& w) const
{
    auto it = terms_.find(w);
    return it == terms_.end() ? Expr() : it->second;
}

void Form::add_term(const Word& w, const Expr& c)
{
    if (c.is_zero()) return;
    if (!terms_.empty() && word_bidegree(w) != bidegree())
        throw Error(ErrorCode::DegreeMismatch, "adding forms of different bidegree");
    auto [it, inserted] = terms_.emplace(w, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Form Form::operator-() const
{
    Form out = *this;
    for (auto& [w, c] : out.terms_) c = -c;
    return out;
}

Form& Form::operator+=(const Form& o)
{
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
}

Form& Form::operator-=(const Form& o)
{
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
}

Form operator+(const Form& a, const Form& b)
{
    Form out = a;
    out += b;
    return out;
}

Form operator-(const Form& a, const Form& b)
{
    Form out = a;
    out -= b;
    return out;
}

Form operator*(const Expr& c, const Form& f)
{
    Form out;
    if (c.is_zero()) return out;
    for (const auto& [w, x] : f.terms_) out.add_term(w, c * x);
    return out;
}

std::string basis_str(BasisId b, const NameTable& names)
{
    if (!is_vertical(b)) return "d" + names.coord(basis_coord(b));
    const Atom& a = atom(basis_jet(b));
    return "δ" + names.jet(a.name, a.J);
}

std::string Form::str(const NameTable& names) const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [w, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (w.empty()) {
            os << "(" << c.str(names) << ")";
            continue;
        }
        if (!(c == Expr(1))) os << "(" << c.str(names) << ") ";
        for (std::size_t k = 0; k < w.size(); ++k) os << (k ? "∧" : "") << basis_str(w[k], names);
    }
    return os.str();
}

Form normalize(const RawForm& raw)
{
    Form out;
    for (const RawTerm& t : raw.terms) {
        std::vector<BasisId> w = t.factors;
        const int s = canonicalize_word(w);
        if (s == 0) continue;
        out.add_term(w, s > 0 ? t.coeff : -t.coeff);
    }
    return out;
}

Form normalize(const Form& f)
{
    RawForm raw;
    for (const auto& [w, c] : f.terms()) raw.terms.push_back({c, w});
    return normalize(raw);
}

Form wedge(const Form& a, const Form& b)
{
    Form out;
    for (const auto& [wa, ca] : a.terms()) {
        for (const auto& [wb, cb] : b.terms()) {
            std::vector<BasisId> w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            const int s = canonicalize_word(w);
            if (s == 0) continue;
            Expr c = ca * cb;
            out.add_term(w, s > 0 ? c : -c);
        }
    }
    return out;
}

namespace {

BasisId prolong_theta(const Chart& chart, BasisId b, int i)
{
    const Atom& a = atom(basis_jet(b));
    MultiIndex K = a.J.plus(i);
    if (static_cast<int>(K.order()) > chart.max_jet_order)
        throw Error(ErrorCode::JetOrderExceeded, "contact form exceeds jet order " + std::to_string(chart.max_jet_order),
                    "δ" + chart.names().jet(a.name, K));
    return basis_theta(a.name, K);
}

void check_xi(const Chart& chart, const std::vector<Expr>& xi)
{
    if (static_cast<int>(xi.size()) != chart.n)
        throw Error(ErrorCode::ComponentCount, "vector field needs " + std::to_string(chart.n) + " components, got " +
                                                   std::to_string(xi.size()));
    for (const Expr& c : xi)
        if (c.depends_on_jets())
            throw Error(ErrorCode::ComponentCount, "vector field components must depend on coordinates only", c.str());
}

} // namespace

Form total_lie(const Chart& chart, int i, const Form& f)
{
    Form out;
    for (const auto& [w, c] : f.terms()) {
        out.add_term(w, total_derivative(chart, i, c));
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (!is_vertical(w[k])) continue;
            std::vector<BasisId> nw = w;
            nw[k] = prolong_theta(chart, w[k], i);
            const int s = canonicalize_word(nw);
            if (s == 0) continue;
            out.add_term(nw, s > 0 ? c : -c);
        }
    }
    return out;
}

Form d_H_on(const Chart& chart, const std::vector<int>& coords, const Form& f)
{
    Form out;
    for (int i : coords) out += wedge(Form::dx(i), total_lie(chart, i, f));
    return out;
}

Form d_H(const Chart& chart, const Form& f)
{
    std::vector<int> all;
    for (int i = 0; i < chart.n; ++i) all.push_back(i);
    return d_H_on(chart, all, f);
}

Form dd(const Chart&, const Form& f)
{
    Form out;
    for (const auto& [w, c] : f.terms()) {
        for (AtomId a : jet_atoms(c)) {
            Expr dc = c.diff(a);
            if (dc.is_zero()) continue;
            // dd c ^ w, theta placed in front of the vertical block.
            std::vector<BasisId> nw;
            nw.reserve(w.size() + 1);
            nw.push_back(basis_theta(a));
            nw.insert(nw.end(), w.begin(), w.end());
            const int s = canonicalize_word(nw);
            if (s == 0) continue;
            out.add_term(nw, s > 0 ? dc : -dc);
        }
    }
    return out;
}

Form horizontal_parity(const Form& f)
{
    Form out;
    for (const auto& [w, c] : f.terms()) out.add_term(w, word_bidegree(w).first % 2 ? -c : c);
    return out;
}

Form d_V(const Chart& chart, const Form& f) { return horizontal_parity(dd(chart, f)); }

Form iota_horizontal(const Chart& chart, const std::vector<Expr>& xi, const Form& f)
{
    check_xi(chart, xi);
    Form out;
    for (const auto& [w, c] : f.terms()) {
        int pos = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (is_vertical(w[k])) continue;
            const Expr& comp = xi[static_cast<std::size_t>(basis_coord(w[k]))];
            if (!comp.is_zero()) {
                Word nw = w;
                nw.erase(nw.begin() + static_cast<std::ptrdiff_t>(k));
                Expr t = c * comp;
                out.add_term(nw, pos % 2 ? -t : t);
            }
            ++pos;
        }
    }
    return out;
}

MixedForm iota_coordinate_lift(const Chart& chart, const std::vector<Expr>& xi, const Form& f)
{
    check_xi(chart, xi);
    MixedForm out;
    auto add = [&](const Word& w, const Expr& c) {
        if (c.is_zero()) return;
        out[word_bidegree(w)].add_term(w, c);
    };
    for (const auto& [w, c] : f.terms()) {
        // The word is read as an ordinary total-degree product in the stored order.
        for (std::size_t k = 0; k < w.size(); ++k) {
            const int sign = k % 2 ? -1 : 1;
            Word nw = w;
            nw.erase(nw.begin() + static_cast<std::ptrdiff_t>(k));
            if (!is_vertical(w[k])) {
                add(nw, c * xi[static_cast<std::size_t>(basis_coord(w[k]))] * Rational(sign));
            } else {
                const Atom& a = atom(basis_jet(w[k]));
                Expr contr;
                for (int m = 0; m < chart.n; ++m) {
                    if (xi[static_cast<std::size_t>(m)].is_zero()) continue;
                    MultiIndex K = a.J.plus(m);
                    if (static_cast<int>(K.order()) > chart.max_jet_order)
                        throw Error(ErrorCode::JetOrderExceeded, "contraction exceeds jet order");
                    contr -= Expr::jet(a.name, K) * xi[static_cast<std::size_t>(m)];
                }
                add(nw, c * contr * Rational(sign));
            }
        }
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

Form lie_horizontal(const Chart& chart, const std::vector<Expr>& xi, const Form& f)
{
    return iota_horizontal(chart, xi, d_H(chart, f)) + d_H(chart, iota_horizontal(chart, xi, f));
}

Form ii_vertical(const Chart& chart, const EvolutionaryField& W, const Form& f)
{
    Form out;
    std::map<AtomId, Expr> cache;
    auto image = [&](AtomId jet) -> const Expr& {
        auto it = cache.find(jet);
        if (it != cache.end()) return it->second;
        const Atom& a = atom(jet);
        Expr v;
        if (auto w = W.find(a.name); w != W.end()) v = total_derivative_multi(chart, a.J, w->second);
        return cache.emplace(jet, std::move(v)).first->second;
    };
    for (const auto& [w, c] : f.terms()) {
        int pos = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (!is_vertical(w[k])) continue;
            const Expr& img = image(basis_jet(w[k]));
            if (!img.is_zero()) {
                Word nw = w;
                nw.erase(nw.begin() + static_cast<std::ptrdiff_t>(k));
                Expr t = c * img;
                out.add_term(nw, pos % 2 ? -t : t);
            }
            ++pos;
        }
    }
    return out;
}

Form iota_vertical(const Chart& chart, const EvolutionaryField& W, const Form& f)
{
    return horizontal_parity(ii_vertical(chart, W, f));
}

Form lie_vertical(const Chart& chart, const EvolutionaryField& W, const Form& f)
{
    return dd(chart, ii_vertical(chart, W, f)) + ii_vertical(chart, W, dd(chart, f));
}

Form substitute(const Form& f, const std::map<AtomId, Expr>& rules)
{
    if (rules.empty()) return f;
    return f.map_coefficients([&](const Expr& c) { return c.substitute(rules); });
}

Form pullback_to_section(const Chart&, const Form& f, const std::map<std::string, Expr>& section)
{
    std::map<AtomId, Expr> rules;
    auto rule_for = [&](AtomId a) {
        if (rules.count(a)) return;
        const Atom& at = atom(a);
        auto it = section.find(at.name);
        if (it == section.end()) return;
        Expr v = it->second;
        for (Index i : at.J.indices()) v = v.diff(intern_coord(i));
        rules.emplace(a, std::move(v));
    };
    Form out;
    for (const auto& [w, c] : f.terms()) {
        if (word_bidegree(w).second > 0) continue;
        for (AtomId a : jet_atoms(c)) rule_for(a);
        out.add_term(w, c.substitute(rules));
    }
    return out;
}

int jet_order(const Form& f)
{
    int best = -1;
    for (const auto& [w, c] : f.terms()) {
        best = std::max(best, c.jet_order());
        for (BasisId b : w)
            if (is_vertical(b)) best = std::max(best, static_cast<int>(atom(basis_jet(b)).J.order()));
    }
    return best;
}

Form restrict_to_hyperplane(const Form& f, int i, const Expr& value)
{
    const std::map<AtomId, Expr> rules{{intern_coord(i), value}};
    Form out;
    for (const auto& [w, c] : f.terms()) {
        if (std::find(w.begin(), w.end(), basis_dx(i)) != w.end()) continue;
        out.add_term(w, c.substitute(rules));
    }
    return out;
}

Form strip_volume(const Form& f, const std::vector<int>& coords)
{
    std::vector<BasisId> vol;
    for (int i : coords) vol.push_back(basis_dx(i));
    std::sort(vol.begin(), vol.end());
    Form out;
    for (const auto& [w, c] : f.terms()) {
        const int r = word_bidegree(w).first;
        if (static_cast<std::size_t>(r) != vol.size() || !std::equal(vol.begin(), vol.end(), w.begin()))
            throw Error(ErrorCode::DegreeMismatch, "form is not a multiple of the volume word", f.str());
        out.add_term(Word(w.begin() + r, w.end()), c);
    }
    return out;
}

} // namespace cpsforge
