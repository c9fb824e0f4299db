#ifndef IQSWITCH_ANALYTICS_HPP
#define IQSWITCH_ANALYTICS_HPP

#include <vector>

#include "iqswitch/geometry.hpp"
#include "iqswitch/matrix.hpp"
#include "iqswitch/traffic.hpp"

namespace iqswitch {

// Exact steady-state mean of q+ = max(q + a - 1, 0) with E[a] = lambda,
// Var[a] = sigma2. Throws ValidationError for lambda >= 1 or lambda < 0.
double kingman_mean(double lambda, double sigma2);

struct LowerBounds {
    // Per-port bounds at the current eps: sum_j sigma2_ij / (2 gamma_i) - (1 - gamma_i) / 2.
    // Reported raw; they may be negative for small variances.
    std::vector<double> rows;
    std::vector<double> cols;
    // eps -> 0 limits of eps times the bound: sum sigma2 / (2 kappa) for
    // saturated ports, 0 otherwise. Uses the limiting variances.
    std::vector<double> rows_limit;
    std::vector<double> cols_limit;
};

// Any-policy lower bounds on E[sum_j q_ij] and E[sum_i q_ij].
// Throws ValidationError if some gamma <= 0. spec must be canonical.
LowerBounds universal_lower_bounds(const TrafficSpec& spec, const SaturationProfile& profile);

// 1/2 <sigma2, zeta(frame)>: the limit of eps E[<q, alpha>] for any valid alpha.
// For complete frames this equals (1 - 1/(2n)) ||sigma||^2.
double heavy_traffic_prediction(const RealMatrix& sigma2, const CollapseFrame& frame);

inline constexpr double kWeightTol = 1e-10;

struct WeightVector {
    RealMatrix alpha;

    // <alpha, e^(i)> = n kappa_i for i <= n1 and <alpha, e~^(j)> = n kappa~_j
    // for j <= n2. Throws ValidationError naming the first violated port.
    void validate(const SaturationProfile& profile, double tol = kWeightTol) const;
    bool valid(const SaturationProfile& profile, double tol = kWeightTol) const;
};

// Block construction supported off the saturated x saturated block.
// Throws ValidationError for complete frames.
WeightVector make_weight_vector(const SaturationProfile& profile, const CollapseFrame& frame);

WeightVector ones_weight_vector(std::size_t n);

struct SumQueueBounds {
    double lower = 0.0;  // <sigma2, zeta> / (2 kappa_max)
    double upper = 0.0;  // <sigma2, zeta> / (2 kappa_min)
    double ulb_rows = 0.0;
    double ulb_cols = 0.0;
    double ulb = 0.0;    // max of the two
};

// Heavy-traffic bounds on eps E[sum q]. kappa extremes are over saturated
// ports; ulb uses 1/kappa_i on saturated rows and 1/kappa~_j on saturated
// columns. Throws ValidationError if a saturated kappa is <= 0.
SumQueueBounds sum_queue_bounds(const RealMatrix& sigma2, const CollapseFrame& frame,
                                const SaturationProfile& profile);

struct DriftParams {
    double eta = 1.0;
    double zeta_drift = 0.0;
    double D = 1.0;
    unsigned r = 1;
};

// (2 zeta)^r + (4 D)^r ((D + eta) / eta)^r r!
double moment_bound(const DriftParams& p);

}  // namespace iqswitch

#endif  // IQSWITCH_ANALYTICS_HPP
