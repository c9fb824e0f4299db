#ifndef IQSWITCH_VERIFY_HPP
#define IQSWITCH_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace iqswitch {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst_residual = 0.0;
    double tolerance = 0.0;
    std::size_t cases = 0;
};

struct VerifyOptions {
    std::size_t max_n = 6;         // at most 8
    std::size_t trials = 1000;     // random inputs per frame / per n
    std::uint64_t seed = 1;
    double zeta_perturbation = 0.0;  // fault injection for negative controls
};

// Geometry and scheduler invariant suite over every frame with n <= max_n:
// projection norms of unit vectors against zeta, closed form against the
// Gram-Schmidt oracle, norm expansion, dimension count, cone optimality,
// cone/subspace agreement on the orthant, and MaxWeight against enumeration.
std::vector<CheckResult> run_geometry_checks(const VerifyOptions& opts);

}  // namespace iqswitch

#endif  // IQSWITCH_VERIFY_HPP
