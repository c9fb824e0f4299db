#ifndef IQSWITCH_SIM_HPP
#define IQSWITCH_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "iqswitch/analytics.hpp"
#include "iqswitch/geometry.hpp"
#include "iqswitch/traffic.hpp"

namespace iqswitch {

struct Estimate {
    double mean = 0.0;
    double ci = 0.0;  // 95% half-width
};

// Non-overlapping batch means with a Student-t interval. Needs >= 2 batches.
Estimate batch_means(const std::vector<double>& batch_values);

inline constexpr std::size_t kDefaultBatches = 20;
inline constexpr std::size_t kMinBatches = 10;

// max(1e5, ceil(20 / eps^2)); 1e5 at eps = 0.
std::uint64_t default_warmup(double eps);

struct SimConfig {
    TrafficSpec spec;  // canonical port order
    CollapseFrame frame;
    std::uint64_t warmup = 100000;
    std::uint64_t horizon = 1000000;  // sampled slots after warmup
    std::size_t batch_count = kDefaultBatches;
    std::uint64_t seed = 1;
    bool track_perp = true;
    bool track_cone = false;
};

// Frame of the canonical spec, warmup from default_warmup, horizon at least
// 10 warmups and rounded up to a multiple of the batch count.
SimConfig make_sim_config(const TrafficSpec& canonical_spec, std::uint64_t seed, std::uint64_t min_horizon = 0,
                          std::size_t batch_count = kDefaultBatches);

// Every batch is an audit window: change of total queue must equal
// arrivals minus departures, in exact integers.
struct ConservationAudit {
    std::size_t windows = 0;
    std::size_t failures = 0;
    std::uint64_t arrivals = 0;
    std::uint64_t departures = 0;
    std::uint64_t unused_service = 0;
    bool ok() const noexcept { return failures == 0; }
};

struct SteadyStateStats {
    RealMatrix mean_q;
    Estimate weighted_sum;   // E[<q, alpha>]
    Estimate sum_q;          // E[sum q]
    Estimate perp_norm;      // E[||q_perp S||]
    Estimate perp_norm_sq;   // E[||q_perp S||^2]
    Estimate cone_perp_norm; // E[||q_perp K||], when tracked
    std::vector<Estimate> row_sums;
    std::vector<Estimate> col_sums;
    Estimate unsat_block;    // E[sum of q_ij over i > n1, j > n2]
    std::uint64_t slots_sampled = 0;
    ConservationAudit audit;
};

// Empty start, warmup slots discarded, then `horizon` slots recorded after
// each step. Throws ValidationError if the rates are outside capacity or the
// frame does not match the spec's saturation, SimulationError on overflow or
// an audit mismatch.
SteadyStateStats run_switch(const SimConfig& cfg, const WeightVector& alpha);

// q+ = max(q + a - 1, 0). Throws ValidationError if pmf.mean() >= 1.
Estimate run_single_server(const Pmf& pmf, std::uint64_t seed, std::uint64_t warmup, std::uint64_t horizon,
                           std::size_t batch_count = kDefaultBatches);

struct SweepRow {
    double eps = 0.0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    SteadyStateStats stats;
    double prediction = 0.0;
    double ulb_max = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
};

struct SweepCell {
    double eps = 0.0;
    Estimate eps_weighted_sum;
    Estimate eps_sum_q;
    Estimate perp_norm;
    Estimate sum_q;
    double unsat_block_eps = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;  // ordered by (eps index, rep)
    std::vector<SweepCell> cells;  // replication averages per eps
    double prediction = 0.0;
    // Intercepts at eps = 0 of the per-eps averages; NaN with a single eps.
    Estimate extrapolated_weighted_sum;
    Estimate extrapolated_sum_q;
};

struct SweepOptions {
    std::vector<double> eps;
    std::size_t reps = 4;
    std::size_t jobs = 1;
    std::uint64_t min_horizon = 0;
    std::uint64_t min_warmup = 0;  // raises the warmup rule; horizon unchanged
    std::size_t batch_count = kDefaultBatches;
    bool track_cone = false;
};

// Runs every (eps, rep) cell on `jobs` threads. Cell seeds are derived from
// (seed, eps index, rep), so the table does not depend on the job count.
SweepTable sweep(const TrafficSpec& canonical_spec, std::uint64_t seed, const SweepOptions& opts,
                 const WeightVector& alpha);

// Intercept of the least-squares line through (x, y).
double linear_extrapolation(const std::vector<double>& x, const std::vector<double>& y);
// Same intercept with the half-widths of independent y propagated through
// the least-squares weights.
Estimate extrapolate_to_zero(const std::vector<double>& x, const std::vector<Estimate>& y);

void write_sweep_csv(std::ostream& out, const SweepTable& table);

// Seventeen significant digits, '.' decimal point regardless of locale.
std::string format_double(double v);

}  // namespace iqswitch

#endif  // IQSWITCH_SIM_HPP
