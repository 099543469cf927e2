#include "cpsforge/dsl.hpp"
#include "cpsforge/numeric.hpp"
#include "cpsforge/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cpsforge;
namespace num = cpsforge::numeric;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNonDecomposable = 2;
constexpr int kResidual = 3;

struct Common {
    std::string path;
    std::string json_path;
    std::string out_path;
    int max_jet_order = -1;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Usage, "cannot open " + path, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Usage, "cannot write " + path, path);
    out << text;
}

// Text to --out when given, otherwise stdout.
void emit(const Common& c, const std::string& text)
{
    if (c.out_path.empty())
        std::cout << text;
    else
        write_file(c.out_path, text);
}

Model load(const Common& c, const std::string& extra = {})
{
    dsl::BuildOptions opt;
    opt.max_jet_order = c.max_jet_order;
    opt.fallback_name = std::filesystem::path(c.path).stem().string();
    return dsl::parse_model(read_file(c.path) + extra, opt);
}

int cmd_derive(const Common& c)
{
    const Model m = load(c);
    const PipelineReport r = run_cps(m);
    if (!c.json_path.empty()) write_file(c.json_path, canonical_dump(report_json(r)));
    emit(c, report_text(r));
    if (!r.certificates_zero()) {
        std::cerr << "residual certificate is nonzero\n";
        return kResidual;
    }
    return kOk;
}

int cmd_check(const Common& c, const std::string& xi, const std::string& evolutionary)
{
    if (xi.empty() == evolutionary.empty()) throw Error(ErrorCode::Usage, "check needs exactly one of --xi and --evolutionary");
    std::string name = xi;
    std::string extra;
    if (!evolutionary.empty()) {
        name = "cli_evolutionary";
        extra = "\nvectors {\n  evol " + name + " = { " + evolutionary + " };\n}\n";
    }
    const Model m = load(c, extra);
    const VectorDecl* decl = m.vector(name);
    if (!decl) throw Error(ErrorCode::UnknownSymbol, "unknown vector field '" + name + "'", name);
    const LagrangianPair lp = lagrangian_pair(m);
    const VariationDecomposition v = decompose(m.chart, lp, m.labels());
    const OnShellIdeals ideals = build_ideals(m.chart, lp, v, m.constraints);
    const VectorReport vr = analyse_vector(m, lp, v, ideals, *decl);
    if (!c.json_path.empty()) write_file(c.json_path, canonical_dump(vector_json(vr, m.names())));
    emit(c, vector_text(vr, m.names()));
    if (vr.noether && !vr.noether->flux_residual.is_zero()) return kResidual;
    if (vr.dsym.is_symmetry && !vr.dsym.certificate.is_zero()) return kResidual;
    return kOk;
}

// ---------------------------------------------------------------------------
// numeric subcommands

struct NumericOptions {
    std::string grid;
    std::string eps = "1e-2,1e-3,1e-4";
    std::string xi;
    int slices = 5;
};

std::pair<int, int> parse_grid(const std::string& s, std::pair<int, int> fallback)
{
    if (s.empty()) return fallback;
    const auto x = s.find_first_of("xX");
    if (x == std::string::npos) throw Error(ErrorCode::Usage, "--grid expects NxM", s);
    try {
        const int a = std::stoi(s.substr(0, x));
        const int b = std::stoi(s.substr(x + 1));
        if (a <= 0 || b <= 0) throw Error(ErrorCode::Usage, "--grid sizes must be positive", s);
        return {a, b};
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::Usage, "--grid expects NxM", s);
    }
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::Usage, "--eps expects a comma separated list", s);
        }
    }
    if (out.empty()) throw Error(ErrorCode::Usage, "--eps is empty", s);
    return out;
}

std::string single_label(const Model& m)
{
    const auto labels = m.labels();
    if (labels.size() != 1 || m.fields.front().kind != FieldKind::Scalar || m.chart.n != 2)
        throw Error(ErrorCode::Usage, "numeric checks need one scalar field on a two-dimensional chart");
    return labels.front();
}

Expr T() { return Expr::coord(0); }
Expr X() { return Expr::coord(1); }
Expr Sin(const Expr& a) { return Expr::func("sin", {a}); }
Expr Cos(const Expr& a) { return Expr::func("cos", {a}); }
Expr R(long p, long q = 1) { return Expr(Rational(p, q)); }

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int cmd_fd_check(const Common& c, const NumericOptions& o)
{
    const Model m = load(c);
    const std::string label = single_label(m);
    const PipelineReport r = run_cps(m, {false});
    const num::NumericContext ctx = num::NumericContext::from_model(m);
    const auto [nt, nx] = parse_grid(o.grid, {128, 128});
    const num::Grid g = num::Grid::spacetime(0, 1, nt, 0, 1, nx, m.chart.has_boundary);
    const Expr phi = R(3, 4) * Sin(R(2) * T() + X() + R(1, 3)) + R(1, 2) * Cos(T() - R(3) * X()) + R(1, 3);
    const Expr v = R(2) * Expr::func("bump", {R(5, 2) * (T() - R(1, 2))}) * Expr::func("bump", {R(3, 2) * X()});
    const num::AnalyticField P({{label, phi}}), V({{label, v}});
    const std::vector<double> eps = parse_list(o.eps);
    std::string csv = "eps,fd,bulk_pairing,boundary_pairing,residual,residual_without_b\n";
    std::vector<double> res;
    for (double e : eps) {
        const auto a = num::fd_variation_check(r.lp, r.v, g, ctx, P, V, e, true);
        const auto b = num::fd_variation_check(r.lp, r.v, g, ctx, P, V, e, false);
        res.push_back(a.residual);
        csv += fmt(e) + "," + fmt(a.fd) + "," + fmt(a.bulk_pairing) + "," + fmt(a.boundary_pairing) + "," +
               fmt(a.residual) + "," + fmt(b.residual) + "\n";
    }
    emit(c, csv);
    if (eps.size() >= 2) std::cerr << "slope " << fmt(num::loglog_slope(eps, res)) << "\n";
    return kOk;
}

// Strip [0, pi] with the model's lateral face at x = 0, or the periodic circle [0, 2 pi).
num::Grid solver_grid(const Model& m, const NumericOptions& o)
{
    const auto [nt, nx] = parse_grid(o.grid, {512, 256});
    if (m.chart.has_boundary) return num::Grid::spacetime(0, 2, nt, 0, M_PI, nx, true);
    return num::Grid::spacetime(0, 2, nt, 0, 2 * M_PI, nx, false, true);
}

Expr mode(const Model& m, int k)
{
    const bool dirichlet = !lagrangian_pair(m).dirichlet.empty();
    return dirichlet ? Sin(R(k) * X()) : Cos(R(k) * X());
}

std::vector<double> slice_times(const num::Grid& g, int count)
{
    std::vector<double> ts;
    const int nt = g.cells[0];
    for (int k = 0; k < count; ++k) ts.push_back(g.coord(0, count == 1 ? 0 : (k * nt) / (count - 1)));
    return ts;
}

int cmd_slice_independence(const Common& c, const NumericOptions& o)
{
    const Model m = load(c);
    const std::string label = single_label(m);
    const PipelineReport r = run_cps(m, {false});
    const num::NumericContext ctx = num::NumericContext::from_model(m);
    const num::Grid g = solver_grid(m, o);
    const num::AnalyticField i0({{label, R(1, 2) * mode(m, 1) * Cos(T()) + R(1, 4) * mode(m, 2) * Sin(R(2) * T())}});
    const num::AnalyticField i1({{label, mode(m, 1) * Cos(T()) + R(1, 2) * mode(m, 2) * Sin(R(2) * T() + R(1, 3))}});
    const num::AnalyticField i2({{label, mode(m, 1) * Sin(T()) + R(1, 4) * mode(m, 2) * Cos(R(2) * T())}});
    const num::GridField P = num::wave_solver(m, r.v, g, ctx, i0);
    const num::GridField D1 = num::linearized_wave_solver(m, r.v, g, ctx, P, i1);
    const num::GridField D2 = num::linearized_wave_solver(m, r.v, g, ctx, P, i2);
    std::string csv = "t,omega,canonical\n";
    std::vector<double> vals;
    const bool diag2 = m.metric.size() == 2;
    for (double t : slice_times(g, o.slices)) {
        const double w = num::symplectic_eval(r.omega, g, ctx, P, D1, D2, t, num::Quadrature::Trapezoid);
        const double can = diag2 ? num::canonical_pairing(m.metric, label, g, D1, D2, t, num::Quadrature::Trapezoid) : NAN;
        vals.push_back(w);
        csv += fmt(t) + "," + fmt(w) + "," + fmt(can) + "\n";
    }
    emit(c, csv);
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    const double scale = std::max(std::abs(*lo), std::abs(*hi));
    std::cerr << "drift " << fmt(*hi - *lo) << " relative " << fmt(scale > 0 ? (*hi - *lo) / scale : 0) << "\n";
    return kOk;
}

int cmd_flux(const Common& c, const NumericOptions& o)
{
    if (o.xi.empty()) throw Error(ErrorCode::Usage, "flux needs --xi");
    const Model m = load(c);
    const std::string label = single_label(m);
    const VectorDecl* decl = m.vector(o.xi);
    if (!decl || decl->evolutionary) throw Error(ErrorCode::UnknownSymbol, "unknown space-time vector '" + o.xi + "'", o.xi);
    const PipelineReport r = run_cps(m, {false});
    const LagrangianPair lp = lagrangian_pair(m);
    const EvolutionaryField W = lift_vector_field(m, decl->xi);
    const NoetherData nd = noether_current_xi(m.chart, lp, r.v, decl->xi, W);
    const num::NumericContext ctx = num::NumericContext::from_model(m);
    const num::Grid g = solver_grid(m, o);
    const num::AnalyticField i0({{label, mode(m, 1) * Cos(T()) + R(1, 2) * mode(m, 2) * Sin(R(2) * T())}});
    const num::GridField P = num::wave_solver(m, r.v, g, ctx, i0);
    const auto ts = slice_times(g, o.slices);
    std::string csv = "t1,t2,q1,q2,delta_q,rhs,residual\n";
    for (std::size_t k = 1; k < ts.size(); ++k) {
        const auto f = num::flux_check(nd, g, ctx, P, ts.front(), ts[k], num::Quadrature::Trapezoid);
        csv += fmt(ts.front()) + "," + fmt(ts[k]) + "," + fmt(f.q1) + "," + fmt(f.q2) + "," + fmt(f.delta_q) + "," +
               fmt(f.rhs) + "," + fmt(f.residual) + "\n";
    }
    emit(c, csv);
    return kOk;
}

int cmd_corpus_list(const std::string& dir)
{
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".cps") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        const Model m = dsl::load_model(p.string());
        std::cout << p.filename().string() << "\t" << m.name << "\t";
        const auto labels = m.labels();
        for (std::size_t k = 0; k < labels.size(); ++k) std::cout << (k ? "," : "") << labels[k];
        std::cout << "\t" << (m.chart.has_boundary ? "boundary" : "no boundary") << "\n";
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Covariant phase space derivations for local field theories with boundary"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("path", common.path, "model file (.cps)")->required();
        sub->add_option("--json", common.json_path, "write the JSON report here");
        sub->add_option("--out", common.out_path, "write text or CSV output here instead of stdout");
        sub->add_option("--max-jet-order", common.max_jet_order, "override the chart's jet order cap");
    };

    CLI::App* derive = app.add_subcommand("derive", "run the covariant phase space pipeline");
    add_common(derive);

    std::string xi, evolutionary;
    CLI::App* check = app.add_subcommand("check", "symmetry and gauge verdicts for one vector field");
    add_common(check);
    check->add_option("--xi", xi, "name of a declared vector field");
    check->add_option("--evolutionary", evolutionary, "evolutionary field, e.g. \"u: 1\" or \"A: d(lam)\"");

    NumericOptions nopt;
    CLI::App* numeric = app.add_subcommand("numeric", "discretized cross-checks (CSV output)");
    numeric->require_subcommand(1);
    auto add_numeric = [&](CLI::App* sub) {
        add_common(sub);
        sub->add_option("--grid", nopt.grid, "time x space cells, NxM");
    };
    CLI::App* fd = numeric->add_subcommand("fd-check", "finite-difference action variation against E and b");
    add_numeric(fd);
    fd->add_option("--eps", nopt.eps, "comma separated step sizes");
    CLI::App* slice = numeric->add_subcommand("slice-independence", "presymplectic pairing on several slices");
    add_numeric(slice);
    slice->add_option("--slices", nopt.slices, "number of slices")->check(CLI::Range(2, 1000));
    CLI::App* flux = numeric->add_subcommand("flux", "charge difference against the flux law");
    add_numeric(flux);
    flux->add_option("--xi", nopt.xi, "name of a declared space-time vector field");
    flux->add_option("--slices", nopt.slices, "number of slices")->check(CLI::Range(2, 1000));

    std::string corpus_dir = "corpus";
    CLI::App* list = app.add_subcommand("corpus-list", "list the model files in a directory");
    list->add_option("dir", corpus_dir, "directory with .cps files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*derive) return cmd_derive(common);
        if (*check) return cmd_check(common, xi, evolutionary);
        if (*fd) return cmd_fd_check(common, nopt);
        if (*slice) return cmd_slice_independence(common, nopt);
        if (*flux) return cmd_flux(common, nopt);
        if (*list) return cmd_corpus_list(corpus_dir);
    } catch (const Error& e) {
        // parse errors already lead with "line:column: "
        std::cerr << error_code_name(e.code()) << ": " << e.what();
        if (!e.detail().empty()) std::cerr << "\n  " << e.detail();
        std::cerr << "\n";
        return e.code() == ErrorCode::NonDecomposable ? kNonDecomposable : kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
