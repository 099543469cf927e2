#pragma once

// One function per acceptance criterion. Each returns a verdict with the
// measured quantity next to its tolerance; the unit tests and the acceptance
// binary share them.

#include <string>
#include <vector>

namespace cpsforge::acceptance {

struct Verdict {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail; // measured values against the thresholds
    std::vector<std::string> printout; // report lines shown verbatim
    double seconds = 0;
};

// Directory with the .cps corpus (set at build time).
[[nodiscard]] std::string corpus_path(const std::string& file);

[[nodiscard]] Verdict scalar_robin();
[[nodiscard]] Verdict chern_simons();
[[nodiscard]] Verdict yang_mills();
[[nodiscard]] Verdict null_lagrangians();
[[nodiscard]] Verdict representative_independence();
[[nodiscard]] Verdict bicomplex();
[[nodiscard]] Verdict fd_action_variation();
[[nodiscard]] Verdict slice_independence();
[[nodiscard]] Verdict flux_law();
[[nodiscard]] Verdict no_equation_pair();
[[nodiscard]] Verdict hamiltonian_comparison();

[[nodiscard]] std::vector<Verdict> all();

} // namespace cpsforge::acceptance
