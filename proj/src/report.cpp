#include "cpsforge/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cpsforge {

using nlohmann::json;

namespace {

std::string fstr(const Form& f, const NameTable& nt) { return f.is_zero() ? "0" : f.str(nt); }

json rel_json(const RelForm& r, const NameTable& nt)
{
    return json{{"bulk", fstr(r.bulk, nt)}, {"boundary", fstr(r.boundary, nt)}, {"zero", r.is_zero()}};
}

json source_json(const SourceForm& s, const NameTable& nt)
{
    json out = json::object();
    for (const auto& [label, f] : s) out[label] = fstr(f, nt);
    return out;
}

json expr_list(const std::vector<Expr>& xs, const NameTable& nt)
{
    json out = json::array();
    for (const Expr& e : xs) out.push_back(e.str(nt));
    return out;
}

void dump_into(const json& j, std::string& out)
{
    switch (j.type()) {
    case json::value_t::object: {
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += json(it.key()).dump();
            out += ':';
            dump_into(it.value(), out);
        }
        out += '}';
        break;
    }
    case json::value_t::array: {
        out += '[';
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (k) out += ',';
            dump_into(j[k], out);
        }
        out += ']';
        break;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
            break;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        out += buf;
        break;
    }
    default:
        out += j.dump(-1, ' ', false, json::error_handler_t::replace);
    }
}

// Newlines between top-level entries keep golden diffs readable.
std::string pretty(const json& j)
{
    if (!j.is_object()) {
        std::string s;
        dump_into(j, s);
        return s;
    }
    std::string out = "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += "  " + json(it.key()).dump() + ": ";
        dump_into(it.value(), out);
    }
    out += "\n}\n";
    return out;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

} // namespace

json vector_json(const VectorReport& v, const NameTable& nt)
{
    json j;
    j["name"] = v.name;
    j["evolutionary"] = v.evolutionary;
    j["xi"] = expr_list(v.xi, nt);
    json W = json::object();
    for (const auto& [label, e] : v.W) W[label] = e.str(nt);
    j["W"] = W;
    if (v.invariance_residual) {
        j["xi_invariant"] = v.xi_invariant();
        j["invariance_residual"] = rel_json(*v.invariance_residual, nt);
    }
    if (v.noether) {
        j["noether"] = json{{"current", rel_json(v.noether->current, nt)},
                            {"lie_tilde", rel_json(v.noether->lie_tilde, nt)},
                            {"flux_residual", rel_json(v.noether->flux_residual, nt)},
                            {"slice_current", fstr(v.noether->slice_current, nt)},
                            {"slice_boundary_current", fstr(v.noether->slice_boundary_current, nt)}};
    }
    j["d_symmetry"] = json{{"is_symmetry", v.dsym.is_symmetry},
                           {"method", v.dsym.method},
                           {"potential", rel_json(v.dsym.potential, nt)},
                           {"certificate", rel_json(v.dsym.certificate, nt)},
                           {"obstruction", fstr(v.dsym.obstruction, nt)}};
    j["gauge"] = json{{"bulk_raw", fstr(v.gauge.bulk_raw, nt)},
                      {"bulk_reduced", fstr(v.gauge.bulk_reduced, nt)},
                      {"boundary_raw", fstr(v.gauge.boundary_raw, nt)},
                      {"boundary_reduced", fstr(v.gauge.boundary_reduced, nt)},
                      {"is_gauge", v.gauge.is_gauge()}};
    return j;
}

json report_json(const PipelineReport& r)
{
    const NameTable nt = r.chart.names();
    json j;
    j["model"] = r.model;
    j["chart"] = json{{"coords", r.chart.coords}, {"boundary", r.chart.has_boundary}, {"max_jet_order", r.chart.max_jet_order}};
    json metric = json::array();
    for (const Rational& q : r.metric) metric.push_back(q.str());
    j["metric"] = metric;
    j["labels"] = r.labels;
    j["lagrangian"] = json{{"L", fstr(r.lp.L, nt)}, {"ell", fstr(r.lp.ell, nt)}, {"dirichlet", r.lp.dirichlet}};
    j["decomposition"] = json{{"E", source_json(r.v.E, nt)},
                              {"Theta", fstr(r.v.Theta, nt)},
                              {"b_bar", source_json(r.v.b_bar, nt)},
                              {"theta_bar", fstr(r.v.theta_bar, nt)},
                              {"canonical", r.v.canonical},
                              {"bulk_residual", fstr(r.v.bulk_residual, nt)},
                              {"boundary_residual", fstr(r.v.boundary_residual, nt)}};
    j["presymplectic"] = json{{"Omega", fstr(r.omega.Omega, nt)},
                              {"omega_bar", fstr(r.omega.omega_bar, nt)},
                              {"slice_bulk", fstr(r.omega.slice_bulk, nt)},
                              {"slice_boundary", fstr(r.omega.slice_boundary, nt)},
                              {"identity_residual", rel_json(r.omega.identity_residual, nt)},
                              {"closed", r.omega.closed},
                              {"vanishes", r.omega.Omega.is_zero() && r.omega.omega_bar.is_zero()}};
    json bulk = json::object(), bdry = json::object();
    for (const auto& [label, e] : r.sol.bulk) bulk[label] = e.str(nt);
    for (const auto& [label, e] : r.sol.boundary) bdry[label] = e.str(nt);
    j["sol"] = json{{"bulk", bulk},
                    {"boundary", bdry},
                    {"dirichlet", r.sol.dirichlet},
                    {"constraints", expr_list(r.sol.constraints, nt)},
                    {"equals_field_space", r.sol.equals_field_space}};
    json vs = json::array();
    for (const auto& v : r.vectors) vs.push_back(vector_json(v, nt));
    j["vectors"] = vs;
    j["caveats"] = r.caveats;
    j["certificates_zero"] = r.certificates_zero();
    return j;
}

std::string canonical_dump(const json& j) { return pretty(j); }

std::string vector_text(const VectorReport& v, const NameTable& nt)
{
    std::ostringstream os;
    os << v.name << ": ";
    if (v.invariance_residual) os << "ξ-invariant: " << yes_no(v.xi_invariant()) << "; ";
    os << "d̲-symmetry: " << yes_no(v.dsym.is_symmetry) << " (" << v.dsym.method << ")\n";
    if (v.invariance_residual && !v.xi_invariant()) {
        os << "  invariance residual (bulk): " << fstr(v.invariance_residual->bulk, nt) << '\n';
        os << "  invariance residual (boundary): " << fstr(v.invariance_residual->boundary, nt) << '\n';
    }
    if (!v.dsym.is_symmetry && !v.dsym.obstruction.is_zero()) os << "  obstruction: " << fstr(v.dsym.obstruction, nt) << '\n';
    if (v.noether) os << "  current: " << fstr(v.noether->current.bulk, nt) << " | " << fstr(v.noether->current.boundary, nt) << '\n';
    os << "  gauge residual (bulk): " << fstr(v.gauge.bulk_raw, nt) << "; on-shell: " << fstr(v.gauge.bulk_reduced, nt) << '\n';
    os << "  gauge residual (boundary): " << fstr(v.gauge.boundary_raw, nt)
       << "; on-shell: " << fstr(v.gauge.boundary_reduced, nt) << '\n';
    return os.str();
}

std::string report_text(const PipelineReport& r)
{
    const NameTable nt = r.chart.names();
    std::ostringstream os;
    os << "model " << r.model << '\n';
    for (const auto& [label, e] : r.v.E) os << "E[" << label << "] = " << fstr(e, nt) << '\n';
    os << "Theta = " << fstr(r.v.Theta, nt) << '\n';
    for (const auto& [label, b] : r.v.b_bar) os << "b[" << label << "] = " << fstr(b, nt) << '\n';
    os << "theta_bar = " << fstr(r.v.theta_bar, nt) << '\n';
    os << "residuals: " << (r.v.residuals_zero() ? "zero" : "NONZERO") << '\n';
    os << "Omega = " << fstr(r.omega.Omega, nt) << '\n';
    os << "omega_bar = " << fstr(r.omega.omega_bar, nt) << '\n';
    os << "Sol = field space: " << yes_no(r.sol.equals_field_space) << "; Omega = 0: "
       << yes_no(r.omega.Omega.is_zero() && r.omega.omega_bar.is_zero()) << '\n';
    for (const auto& v : r.vectors) os << vector_text(v, nt);
    for (const auto& c : r.caveats) os << "caveat: " << c << '\n';
    return os.str();
}

} // namespace cpsforge
