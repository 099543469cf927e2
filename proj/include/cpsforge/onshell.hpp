#pragma once

#include "cpsforge/form.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cpsforge {

// Rewriting modulo equations of motion and their total-derivative
// prolongations. Each equation is solved for its leading jet under an orderly
// ranking (order, then number of x^1 derivatives, then x^2, ..., then label);
// the leader must occur linearly with a rational coefficient. Prolongations
// are generated on demand up to the chart's jet cap, and contact forms follow
// the vertical derivative of the same rule.
class OnShellIdeal {
public:
    // With on_boundary set, replacements are restricted to x^n = 0.
    explicit OnShellIdeal(Chart chart, bool on_boundary = false);

    // Adds eq = 0, prolonged along `directions`. Returns false when the
    // reduced equation has no admissible leader; it is then kept in unsolved().
    bool add(const Expr& eq, std::vector<int> directions);

    [[nodiscard]] Expr reduce(const Expr& e) const;
    [[nodiscard]] Form reduce(const Form& f) const;

    [[nodiscard]] const std::vector<Expr>& unsolved() const { return unsolved_; }
    // (leading jet, replacement) pairs of the unprolonged rules.
    [[nodiscard]] std::vector<std::pair<Expr, Expr>> rules() const;
    [[nodiscard]] std::size_t size() const { return rules_.size(); }
    [[nodiscard]] const Chart& chart() const { return chart_; }

private:
    struct Rule {
        std::string label;
        MultiIndex lead;
        Rational c;
        Expr rest;
        Form theta_rest;
        std::vector<int> directions;
    };

    [[nodiscard]] std::optional<Expr> jet_replacement(AtomId jet) const;
    [[nodiscard]] std::optional<Form> theta_replacement(AtomId jet) const;
    [[nodiscard]] Expr finish(const Expr& e) const;

    Chart chart_;
    bool on_boundary_;
    std::vector<Rule> rules_;
    std::vector<Expr> unsolved_;
    mutable std::map<AtomId, std::optional<Expr>> jet_cache_;
    mutable std::map<AtomId, std::optional<Form>> theta_cache_;
};

// Orderly ranking used for leaders: negative, zero or positive like strcmp.
[[nodiscard]] int compare_rank(AtomId a, AtomId b);

} // namespace cpsforge
