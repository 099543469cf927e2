#include "cpsforge/cps.hpp"
#include "cpsforge/dsl.hpp"
#include "cpsforge/metric.hpp"
#include "support/acceptance.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cpsforge;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::filesystem::path> corpus_files()
{
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(acceptance::corpus_path("")))
        if (e.path().extension() == ".cps") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

ErrorCode code_of(const std::string& text)
{
    try {
        (void)dsl::parse_model(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Usage; // sentinel: no error raised
}

const std::string kHead = "model m;\nchart { coords t, x; boundary x; }\n";

} // namespace

TEST(Dsl, CorpusParses)
{
    const auto files = corpus_files();
    ASSERT_GE(files.size(), 16u);
    for (const auto& f : files) {
        const Model m = dsl::load_model(f.string());
        EXPECT_EQ(m.name, f.stem().string());
        EXPECT_FALSE(m.fields.empty()) << f;
        if (!m.L.is_zero()) {
            EXPECT_EQ(m.L.horizontal_degree(), m.chart.n) << f;
        }
    }
}

TEST(Dsl, PrintParseRoundTrip)
{
    for (const auto& f : corpus_files()) {
        const std::string text = slurp(f);
        const std::string once = dsl::print_document(dsl::parse_document(text));
        const std::string twice = dsl::print_document(dsl::parse_document(once));
        EXPECT_EQ(once, twice) << f;
        // the printed document builds the same Lagrangian pair
        const Model a = dsl::parse_model(text);
        const Model b = dsl::parse_model(once);
        EXPECT_EQ(a.L, b.L) << f;
        EXPECT_EQ(a.ell, b.ell) << f;
    }
}

TEST(Dsl, Errors)
{
    EXPECT_EQ(code_of(kHead + "lagrangian { L = 0; }\n"), ErrorCode::NoFields);
    EXPECT_EQ(code_of(kHead + "fields { scalar u; }\nlagrangian { L = wedge(vol, vol); }\n"),
              ErrorCode::DegreeMismatch);
    EXPECT_EQ(code_of(kHead + "fields { scalar u; }\nlagrangian { L = w*vol; }\n"), ErrorCode::UnknownSymbol);

    try {
        (void)dsl::parse_model(kHead + "fields { scalar u; }\nlagrangian { L = (u*vol; }\n");
        FAIL() << "expected a parse error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Parse);
        EXPECT_EQ(e.line(), 4);
        EXPECT_GT(e.column(), 1);
    }
}

TEST(Dsl, RobinConditionAddsBoundaryMass)
{
    const Model m = dsl::parse_model(kHead + R"(
fields { scalar u; }
background { metric diag(-1, 1); function f(t); }
lagrangian { L = 1/2*inner(d(u), d(u))*vol; }
bc { u: robin(f); }
)");
    EXPECT_TRUE(m.ell.is_zero());
    const LagrangianPair lp = lagrangian_pair(m);
    const Expr f = Expr::func("f", {Expr::coord(0)});
    const Form expected = (Rational(1, 2) * f * Expr::jet("u").pow(2)) * boundary_volume(m.metric);
    EXPECT_EQ(lp.ell, expected);
}

TEST(Dsl, MaxJetOrderOverride)
{
    dsl::BuildOptions opt;
    opt.max_jet_order = 5;
    const Model m = dsl::load_model(acceptance::corpus_path("scalar_robin.cps"), opt);
    EXPECT_EQ(m.chart.max_jet_order, 5);
}
