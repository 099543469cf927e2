#pragma once

#include "cpsforge/relative.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace cpsforge {

enum class FieldKind { Scalar, OneForm, LieOneForm };

struct LieAlgebra {
    std::string name; // "su2" or "abelian(k)"
    int dim = 1;
    // f_{IJ}^K, zero-based indices; [T_I, T_J] = f_{IJ}^K T_K
    std::map<std::tuple<int, int, int>, Rational> f;

    [[nodiscard]] Rational structure(int I, int J, int K) const;
    static LieAlgebra su2();
    static LieAlgebra abelian(int k);
};

struct FieldDecl {
    std::string name;
    FieldKind kind = FieldKind::Scalar;
    LieAlgebra algebra; // dim 1 abelian for scalars and plain one-forms

    // Jet label of a component: "u", "A[t]", "A[t,1]" (Lie index printed one-based).
    [[nodiscard]] std::string label(const Chart& chart, int mu = -1, int I = 0) const;
    [[nodiscard]] std::vector<std::string> labels(const Chart& chart) const;
};

enum class BcKind { Free, Dirichlet, Robin };

struct BoundaryCondition {
    BcKind kind = BcKind::Free;
    Expr robin; // Robin coefficient f, for bc u: robin(f)
};

// Formal function symbol with an optional numeric realization. The realization
// is an expression in the parameter atoms named in `params`.
struct FunctionDecl {
    std::string name;
    std::vector<std::string> params;
    // Bare use applies the function to these coordinates (e.g. f on the boundary).
    std::vector<int> default_coords;
    std::optional<Expr> realization;
};

struct VectorDecl {
    std::string name;
    bool evolutionary = false;
    std::vector<Expr> xi;  // space-time vector field
    EvolutionaryField W;   // evolutionary field (by component label)
};

// Per-label description of a jet variable: which declared field, component and Lie index.
struct ComponentInfo {
    std::string field;
    FieldKind kind = FieldKind::Scalar;
    int mu = -1;
    int lie = 0;
};

struct Model {
    std::string name;
    Chart chart;
    std::vector<Rational> metric; // diagonal entries
    std::vector<FieldDecl> fields;
    std::map<std::string, FunctionDecl> functions;
    std::set<std::string> constants;
    Form L;   // (n, 0)
    Form ell; // (n-1, 0) on the boundary chart
    std::map<std::string, BoundaryCondition> bc; // by field name
    std::vector<Expr> constraints;               // densities restricting the field space
    std::vector<VectorDecl> vectors;
    std::string source; // original text

    [[nodiscard]] std::vector<std::string> labels() const;
    [[nodiscard]] std::map<std::string, ComponentInfo> components() const;
    [[nodiscard]] bool is_dirichlet_label(const std::string& label) const;
    [[nodiscard]] const VectorDecl* vector(const std::string& name) const;
    [[nodiscard]] NameTable names() const { return chart.names(); }
};

} // namespace cpsforge
