#include "support/checks.hpp"

#include <gtest/gtest.h>

using namespace cpsforge::checks;

TEST(Bicomplex, RandomizedIdentities)
{
    for (const CheckResult& r : bicomplex_suite(500, 2024)) {
        EXPECT_TRUE(r.ok()) << r.name << ": " << r.failures << "/" << r.cases << " failed; first: " << r.first_failure;
    }
}

TEST(Jet, NullLagrangians)
{
    const CheckResult r = null_lagrangian_check(200, 77);
    EXPECT_TRUE(r.ok()) << r.first_failure;
}
