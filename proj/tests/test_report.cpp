#include "cpsforge/dsl.hpp"
#include "cpsforge/report.hpp"
#include "support/acceptance.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace cpsforge;

namespace {

std::string golden(const std::string& name)
{
    std::ifstream in(std::string(CPSFORGE_GOLDEN_DIR) + "/" + name + ".json");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trimmed(std::string s)
{
    while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
    return s;
}

std::string render(const std::string& model)
{
    return canonical_dump(report_json(run_cps(dsl::load_model(acceptance::corpus_path(model + ".cps")))));
}

} // namespace

TEST(Report, ScalarRobinMatchesGolden) { EXPECT_EQ(trimmed(render("scalar_robin")), trimmed(golden("scalar_robin"))); }

TEST(Report, ChernSimonsMatchesGolden) { EXPECT_EQ(trimmed(render("cs_k1")), trimmed(golden("cs_k1"))); }

TEST(Report, CanonicalDumpSortsKeysAndRoundsNumbers)
{
    const nlohmann::json j = {{"b", 0.1 + 0.2}, {"a", {{"z", 1}, {"y", "s"}}}, {"c", true}};
    const std::string out = canonical_dump(j);
    EXPECT_LT(out.find("\"a\""), out.find("\"b\""));
    EXPECT_LT(out.find("\"b\""), out.find("\"c\""));
    EXPECT_LT(out.find("\"y\""), out.find("\"z\""));
    EXPECT_NE(out.find("0.3"), std::string::npos);
    EXPECT_EQ(out.find("0.30000000000000004"), std::string::npos);
    EXPECT_EQ(nlohmann::json::parse(out)["a"]["y"], "s");
}

TEST(Report, TextSummaryLines)
{
    const PipelineReport r = run_cps(dsl::load_model(acceptance::corpus_path("no_equation_L2.cps")));
    const std::string text = report_text(r);
    EXPECT_NE(text.find("Sol = field space: yes; Omega = 0: yes"), std::string::npos) << text;
    const PipelineReport n = run_cps(dsl::load_model(acceptance::corpus_path("scalar_neumann.cps")));
    ASSERT_FALSE(n.vectors.empty());
    const std::string vt = vector_text(n.vectors.front(), n.chart.names());
    EXPECT_NE(vt.find("ξ-invariant: yes; d̲-symmetry: yes"), std::string::npos) << vt;
}
