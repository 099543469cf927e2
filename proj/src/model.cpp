#include "cpsforge/model.hpp"

namespace cpsforge {

Rational LieAlgebra::structure(int I, int J, int K) const
{
    auto it = f.find({I, J, K});
    return it == f.end() ? Rational(0) : it->second;
}

LieAlgebra LieAlgebra::su2()
{
    LieAlgebra a;
    a.name = "su2";
    a.dim = 3;
    // f_{IJK} = epsilon_{IJK}
    const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
    for (int p = 0; p < 6; ++p) a.f[{perms[p][0], perms[p][1], perms[p][2]}] = Rational(p < 3 ? 1 : -1);
    return a;
}

LieAlgebra LieAlgebra::abelian(int k)
{
    LieAlgebra a;
    a.name = "abelian(" + std::to_string(k) + ")";
    a.dim = k;
    return a;
}

std::string FieldDecl::label(const Chart& chart, int mu, int I) const
{
    switch (kind) {
    case FieldKind::Scalar:
        return name;
    case FieldKind::OneForm:
        return name + "[" + chart.coords[static_cast<std::size_t>(mu)] + "]";
    case FieldKind::LieOneForm:
        return name + "[" + chart.coords[static_cast<std::size_t>(mu)] + "," + std::to_string(I + 1) + "]";
    }
    return name;
}

std::vector<std::string> FieldDecl::labels(const Chart& chart) const
{
    std::vector<std::string> out;
    if (kind == FieldKind::Scalar) return {name};
    for (int mu = 0; mu < chart.n; ++mu) {
        if (kind == FieldKind::OneForm)
            out.push_back(label(chart, mu));
        else
            for (int I = 0; I < algebra.dim; ++I) out.push_back(label(chart, mu, I));
    }
    return out;
}

std::vector<std::string> Model::labels() const
{
    std::vector<std::string> out;
    for (const auto& f : fields)
        for (auto& l : f.labels(chart)) out.push_back(l);
    return out;
}

std::map<std::string, ComponentInfo> Model::components() const
{
    std::map<std::string, ComponentInfo> out;
    for (const auto& f : fields) {
        if (f.kind == FieldKind::Scalar) {
            out[f.name] = {f.name, f.kind, -1, 0};
            continue;
        }
        for (int mu = 0; mu < chart.n; ++mu)
            for (int I = 0; I < (f.kind == FieldKind::LieOneForm ? f.algebra.dim : 1); ++I)
                out[f.label(chart, mu, I)] = {f.name, f.kind, mu, I};
    }
    return out;
}

bool Model::is_dirichlet_label(const std::string& label) const
{
    const auto comps = components();
    auto it = comps.find(label);
    if (it == comps.end()) return false;
    auto bc_it = bc.find(it->second.field);
    if (bc_it == bc.end() || bc_it->second.kind != BcKind::Dirichlet) return false;
    // For one-form fields only the components along the boundary are fixed.
    return it->second.mu < 0 || it->second.mu != chart.transversal();
}

const VectorDecl* Model::vector(const std::string& name) const
{
    for (const auto& v : vectors)
        if (v.name == name) return &v;
    return nullptr;
}

} // namespace cpsforge
