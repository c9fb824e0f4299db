#ifndef IQSWITCH_TRAFFIC_HPP
#define IQSWITCH_TRAFFIC_HPP

#include <cstdint>
#include <vector>

#include "iqswitch/core.hpp"
#include "iqswitch/rng.hpp"

namespace iqswitch {

// Rates within this distance of a capacity constraint count as saturated.
inline constexpr double kSaturationTol = 1e-9;
// Required agreement between a pmf mean and its target rate.
inline constexpr double kMeanTol = 1e-12;

// Finite pmf on {0, ..., size()-1}.
class Pmf {
public:
    explicit Pmf(std::vector<double> probabilities);

    static Pmf point_mass(std::uint64_t value);
    static Pmf bernoulli(double p);
    // scale * Bernoulli(mean / scale)
    static Pmf scaled_bernoulli(std::uint64_t scale, double mean);
    static Pmf binomial(unsigned trials, double p);

    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    std::uint64_t max_value() const noexcept { return probabilities_.size() - 1; }
    const std::vector<double>& probabilities() const noexcept { return probabilities_; }

    // Inverse-cdf draw from a uniform u in [0, 1).
    std::uint64_t sample(double u) const noexcept {
        std::size_t k = 0;
        while (k + 1 < cdf_.size() && u >= cdf_[k]) ++k;
        return k;
    }

private:
    std::vector<double> probabilities_;
    std::vector<double> cdf_;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

enum class ArrivalKind { bernoulli, scaled_bernoulli, binomial, pmf };

// Rule that turns a target mean lambda_ij into a pmf, so an epsilon sweep can
// rebuild every queue's distribution at mean nu - eps * k.
struct ArrivalFamily {
    ArrivalKind kind = ArrivalKind::bernoulli;
    // Scale for scaled_bernoulli, trial count for binomial. Unused otherwise.
    unsigned parameter = 1;
    // ArrivalKind::pmf only: a single shared pmf or one per queue (row-major).
    std::vector<Pmf> pmfs;

    Pmf make(std::size_t n, std::size_t i, std::size_t j, double mean) const;
    bool rebuildable() const noexcept { return kind != ArrivalKind::pmf; }
};

const char* to_string(ArrivalKind kind);

enum class KNormalization {
    // Scale k so that <k, 1> = n (the saturation rate vector convention).
    normalize,
    // Keep k as given, e.g. k = nu for lambda = (1 - eps) nu.
    as_given,
};

// Arrival configuration lambda = nu - eps * k with per-queue bounded pmfs.
// Immutable once built; create() validates every invariant and names the
// violated one in the ValidationError message.
class TrafficSpec {
public:
    static TrafficSpec create(RealMatrix nu, RealMatrix k, double eps, ArrivalFamily family, std::uint64_t a_max,
                              KNormalization normalization = KNormalization::normalize);

    std::size_t n() const noexcept { return nu_.n(); }
    const RealMatrix& nu() const noexcept { return nu_; }
    const RealMatrix& k() const noexcept { return k_; }
    double eps() const noexcept { return eps_; }
    const ArrivalFamily& family() const noexcept { return family_; }
    std::uint64_t a_max() const noexcept { return a_max_; }
    KNormalization normalization() const noexcept { return normalization_; }
    const RealMatrix& lambda() const noexcept { return lambda_; }
    const Pmf& dist(std::size_t i, std::size_t j) const noexcept { return dists_[i * n() + j]; }

    // Same nu, k and family at a different heavy-traffic parameter.
    TrafficSpec with_eps(double eps) const;
    // Relabels ports: new row r is old row row_order[r], likewise columns.
    TrafficSpec permuted(const std::vector<int>& row_order, const std::vector<int>& col_order) const;

private:
    TrafficSpec() = default;
    static TrafficSpec build(RealMatrix nu, RealMatrix k, double eps, ArrivalFamily family, std::uint64_t a_max,
                             KNormalization normalization);

    RealMatrix nu_, k_, lambda_;
    double eps_ = 0.0;
    ArrivalFamily family_;
    std::uint64_t a_max_ = 1;
    KNormalization normalization_ = KNormalization::normalize;
    std::vector<Pmf> dists_;
};

// k * n / <k, 1>. Throws ValidationError for negative entries or k = 0.
RealMatrix normalize_saturation(const RealMatrix& k);

struct PortClassification {
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    // Canonical position -> original index; saturated ports first, stable.
    std::vector<int> row_order;
    std::vector<int> col_order;
    // In canonical order: delta_i = 1 - <nu, e^(i)>, delta~_j = 1 - <nu, e~^(j)>.
    std::vector<double> delta;
    std::vector<double> delta_tilde;
    double nu_min = 0.0;
    double nu_min_prime = 0.0;

    bool is_canonical() const;
};

// Throws ValidationError("capacity region violated: row i") when nu is
// outside C by more than tol.
PortClassification classify_ports(const RealMatrix& nu, double tol = kSaturationTol);

struct SaturationProfile {
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::vector<double> delta, delta_tilde;
    std::vector<double> kappa, kappa_tilde;
    std::vector<double> gamma, gamma_tilde;
    double kappa_avg = 0.0;
    // Extremes over saturated ports only (rows i <= n1 and columns j <= n2).
    double kappa_min_saturated = 0.0;
    double kappa_max_saturated = 0.0;
    double nu_min = 0.0;
    double nu_min_prime = 0.0;
};

// Requires spec in canonical port order (saturated ports first).
SaturationProfile saturation_profile(const TrafficSpec& spec);

struct CanonicalTraffic {
    TrafficSpec spec;
    std::vector<int> row_order;
    std::vector<int> col_order;
};

CanonicalTraffic canonicalize(const TrafficSpec& spec);

struct Rates {
    RealMatrix lambda;
    double rho = 0.0;
    bool in_capacity = false;
};

Rates build_rates(const TrafficSpec& spec);

struct Moments {
    RealMatrix lambda;
    RealMatrix sigma2;
};

// Exact pmf mean and variance per queue; throws if a mean misses nu - eps k.
Moments moments(const TrafficSpec& spec);

// sigma^2 in the eps -> 0 limit: the family rebuilt at mean nu, or the
// current variances for fixed user pmfs.
RealMatrix limiting_variance(const TrafficSpec& spec);

// Independent per-queue substreams derived from one master seed.
class ArrivalSampler {
public:
    ArrivalSampler(const TrafficSpec& spec, std::uint64_t seed);

    void sample(ArrivalMatrix& out);
    ArrivalMatrix sample();

private:
    std::size_t n_;
    std::vector<Pmf> dists_;
    std::vector<Rng> streams_;
};

}  // namespace iqswitch

#endif  // IQSWITCH_TRAFFIC_HPP
