#include "iqswitch/sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "iqswitch/core.hpp"
#include "iqswitch/error.hpp"
#include "iqswitch/rng.hpp"
#include "iqswitch/scheduler.hpp"

namespace iqswitch {

namespace {

constexpr std::uint64_t kArrivalStream = 0xa11;
constexpr std::uint64_t kSchedulerStream = 0x5c4;
constexpr std::uint64_t kServerStream = 0x515;

std::uint64_t round_up(std::uint64_t x, std::uint64_t m) { return (x + m - 1) / m * m; }

void check_batches(std::uint64_t horizon, std::size_t batch_count) {
    if (batch_count < kMinBatches)
        throw ValidationError("batch_count must be at least " + std::to_string(kMinBatches));
    if (horizon == 0 || horizon % batch_count != 0)
        throw ValidationError("horizon must be a positive multiple of batch_count");
}

}  // namespace

Estimate batch_means(const std::vector<double>& batch_values) {
    const std::size_t b = batch_values.size();
    if (b < 2) throw ValidationError("batch means need at least two batches");
    double mean = 0.0;
    for (const double v : batch_values) mean += v;
    mean /= static_cast<double>(b);
    double ss = 0.0;
    for (const double v : batch_values) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(b - 1);
    const boost::math::students_t dist(static_cast<double>(b - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    return {mean, t * std::sqrt(var / static_cast<double>(b))};
}

std::uint64_t default_warmup(double eps) {
    constexpr std::uint64_t kFloor = 100000;
    if (eps <= 0.0) return kFloor;
    const double rule = std::ceil(20.0 / (eps * eps));
    if (rule > 1e15) throw ValidationError("eps too small for the warmup rule");
    return std::max(kFloor, static_cast<std::uint64_t>(rule));
}

SimConfig make_sim_config(const TrafficSpec& canonical_spec, std::uint64_t seed, std::uint64_t min_horizon,
                          std::size_t batch_count) {
    const auto ports = classify_ports(canonical_spec.nu());
    if (!ports.is_canonical()) throw ValidationError("traffic is not in canonical port order");
    SimConfig cfg{canonical_spec, CollapseFrame(canonical_spec.n(), ports.n1, ports.n2)};
    cfg.warmup = default_warmup(canonical_spec.eps());
    cfg.horizon = round_up(std::max(min_horizon, 10 * cfg.warmup), batch_count);
    cfg.batch_count = batch_count;
    cfg.seed = seed;
    return cfg;
}

SteadyStateStats run_switch(const SimConfig& cfg, const WeightVector& alpha) {
    const TrafficSpec& spec = cfg.spec;
    const std::size_t n = spec.n();
    check_batches(cfg.horizon, cfg.batch_count);
    const Rates rates = build_rates(spec);
    if (!rates.in_capacity)
        throw ValidationError("arrival rates outside the capacity region (rho = " + format_double(rates.rho) + ")");
    const auto ports = classify_ports(spec.nu());
    if (!ports.is_canonical() || cfg.frame != CollapseFrame(n, ports.n1, ports.n2))
        throw ValidationError("frame does not match the saturated ports of the traffic");
    if (alpha.alpha.n() != n) throw ValidationError("weight vector dimension mismatch");

    QueueMatrix q(n);
    ArrivalMatrix a(n);
    MaxWeightScheduler scheduler;
    Rng sched_rng(derive_seed(cfg.seed, {kSchedulerStream}));
    ArrivalSampler sampler(spec, derive_seed(cfg.seed, {kArrivalStream}));
    PerpNormTracker tracker(cfg.frame);

    SteadyStateStats st;
    ConservationAudit& audit = st.audit;
    std::uint64_t window_arrivals = 0, window_departures = 0, window_start = 0;

    auto slot = [&] {
        const ScheduleMatrix s = scheduler.schedule(q, sched_rng);
        sampler.sample(a);
        const StepCounts c = apply_step(q, a, s, spec.a_max());
        window_arrivals += c.arrivals;
        window_departures += c.departures;
        audit.arrivals += c.arrivals;
        audit.departures += c.departures;
        audit.unused_service += c.unused;
    };
    auto close_window = [&] {
        const std::uint64_t total = q.total();
        ++audit.windows;
        if (window_start + window_arrivals - window_departures != total) ++audit.failures;
        window_start = total;
        window_arrivals = window_departures = 0;
    };

    for (std::uint64_t t = 0; t < cfg.warmup; ++t) slot();
    close_window();

    const std::uint64_t batch_len = cfg.horizon / cfg.batch_count;
    const std::size_t nb = cfg.batch_count;
    // Integer per-queue sums per batch; every linear statistic derives from these.
    std::vector<std::uint64_t> qsum(nb * n * n, 0);
    std::vector<double> perp(nb, 0.0), perp_sq(nb, 0.0), cone(nb, 0.0);
    const auto qflat = q.values().flat();

    for (std::size_t b = 0; b < nb; ++b) {
        std::uint64_t* sums = qsum.data() + b * n * n;
        for (std::uint64_t t = 0; t < batch_len; ++t) {
            slot();
            for (std::size_t k = 0; k < n * n; ++k) sums[k] += qflat[k];
            if (cfg.track_perp) {
                const double p = tracker.subspace(qflat);
                perp[b] += p;
                perp_sq[b] += p * p;
            }
            if (cfg.track_cone) cone[b] += tracker.cone(qflat);
        }
        close_window();
    }
    if (!audit.ok()) throw SimulationError("conservation audit failed in " + std::to_string(audit.failures) + " windows");

    const double len = static_cast<double>(batch_len);
    auto estimate = [&](auto&& per_batch) {
        std::vector<double> v(nb);
        for (std::size_t b = 0; b < nb; ++b) v[b] = per_batch(qsum.data() + b * n * n) / len;
        return batch_means(v);
    };
    auto from_series = [&](const std::vector<double>& s) {
        std::vector<double> v(nb);
        for (std::size_t b = 0; b < nb; ++b) v[b] = s[b] / len;
        return batch_means(v);
    };

    st.slots_sampled = cfg.horizon;
    st.mean_q = RealMatrix(n);
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t k = 0; k < n * n; ++k) st.mean_q.flat()[k] += static_cast<double>(qsum[b * n * n + k]);
    for (auto& v : st.mean_q.flat()) v /= static_cast<double>(cfg.horizon);

    st.sum_q = estimate([&](const std::uint64_t* s) {
        std::uint64_t t = 0;
        for (std::size_t k = 0; k < n * n; ++k) t += s[k];
        return static_cast<double>(t);
    });
    st.weighted_sum = estimate([&](const std::uint64_t* s) {
        double t = 0.0;
        for (std::size_t k = 0; k < n * n; ++k) t += alpha.alpha.flat()[k] * static_cast<double>(s[k]);
        return t;
    });
    st.unsat_block = estimate([&](const std::uint64_t* s) {
        std::uint64_t t = 0;
        for (std::size_t i = cfg.frame.n1(); i < n; ++i)
            for (std::size_t j = cfg.frame.n2(); j < n; ++j) t += s[i * n + j];
        return static_cast<double>(t);
    });
    for (std::size_t p = 0; p < n; ++p) {
        st.row_sums.push_back(estimate([&](const std::uint64_t* s) {
            std::uint64_t t = 0;
            for (std::size_t j = 0; j < n; ++j) t += s[p * n + j];
            return static_cast<double>(t);
        }));
        st.col_sums.push_back(estimate([&](const std::uint64_t* s) {
            std::uint64_t t = 0;
            for (std::size_t i = 0; i < n; ++i) t += s[i * n + p];
            return static_cast<double>(t);
        }));
    }
    if (cfg.track_perp) {
        st.perp_norm = from_series(perp);
        st.perp_norm_sq = from_series(perp_sq);
    }
    if (cfg.track_cone) st.cone_perp_norm = from_series(cone);
    return st;
}

Estimate run_single_server(const Pmf& pmf, std::uint64_t seed, std::uint64_t warmup, std::uint64_t horizon,
                           std::size_t batch_count) {
    if (pmf.mean() >= 1.0) throw ValidationError("single server: unstable arrivals (mean >= 1)");
    check_batches(horizon, batch_count);
    Rng rng(derive_seed(seed, {kServerStream}));
    std::uint64_t q = 0;
    auto slot = [&] {
        const std::uint64_t a = pmf.sample(uniform01(rng));
        q = q + a > 0 ? q + a - 1 : 0;
    };
    for (std::uint64_t t = 0; t < warmup; ++t) slot();
    const std::uint64_t batch_len = horizon / batch_count;
    std::vector<double> means(batch_count);
    for (std::size_t b = 0; b < batch_count; ++b) {
        std::uint64_t sum = 0;
        for (std::uint64_t t = 0; t < batch_len; ++t) {
            slot();
            sum += q;
        }
        means[b] = static_cast<double>(sum) / static_cast<double>(batch_len);
    }
    return batch_means(means);
}

namespace {

// Weights c with intercept = sum c_k y_k.
std::vector<double> intercept_weights(const std::vector<double>& x) {
    if (x.size() < 2) throw ValidationError("extrapolation: need at least two points");
    const double m = static_cast<double>(x.size());
    double mx = 0.0;
    for (const double v : x) mx += v;
    mx /= m;
    double sxx = 0.0;
    for (const double v : x) sxx += (v - mx) * (v - mx);
    if (sxx == 0.0) throw ValidationError("extrapolation: need at least two distinct x values");
    std::vector<double> c;
    for (const double v : x) c.push_back(1.0 / m - mx * (v - mx) / sxx);
    return c;
}

}  // namespace

double linear_extrapolation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("extrapolation: size mismatch");
    const auto c = intercept_weights(x);
    double a = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) a += c[k] * y[k];
    return a;
}

Estimate extrapolate_to_zero(const std::vector<double>& x, const std::vector<Estimate>& y) {
    if (x.size() != y.size()) throw ValidationError("extrapolation: size mismatch");
    const auto c = intercept_weights(x);
    Estimate e;
    double var = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        e.mean += c[k] * y[k].mean;
        var += c[k] * c[k] * y[k].ci * y[k].ci;
    }
    e.ci = std::sqrt(var);
    return e;
}

SweepTable sweep(const TrafficSpec& canonical_spec, std::uint64_t seed, const SweepOptions& opts,
                 const WeightVector& alpha) {
    if (opts.eps.empty()) throw ValidationError("sweep: eps list is empty");
    if (opts.reps == 0) throw ValidationError("sweep: reps must be positive");
    if (!canonical_spec.family().rebuildable() && opts.eps.size() > 1)
        throw ValidationError("sweep: explicit pmfs cannot be rebuilt at other eps values");

    std::vector<TrafficSpec> specs;
    for (const double e : opts.eps) {
        specs.push_back(canonical_spec.family().rebuildable() ? canonical_spec.with_eps(e) : canonical_spec);
        if (!build_rates(specs.back()).in_capacity)
            throw ValidationError("sweep: eps = " + format_double(e) + " is outside the capacity region");
    }

    const SaturationProfile profile = saturation_profile(canonical_spec);
    const CollapseFrame frame(canonical_spec.n(), profile.n1, profile.n2);
    const RealMatrix sigma2 = limiting_variance(canonical_spec);
    const double prediction = heavy_traffic_prediction(sigma2, frame);
    const SumQueueBounds bounds = sum_queue_bounds(sigma2, frame, profile);

    const std::size_t cells = opts.eps.size() * opts.reps;
    SweepTable table;
    table.prediction = prediction;
    table.rows.resize(cells);
    std::vector<std::exception_ptr> errors(cells);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            const std::size_t e = c / opts.reps;
            const std::size_t r = c % opts.reps;
            try {
                SweepRow row;
                row.eps = opts.eps[e];
                row.rep = r;
                row.seed = derive_seed(seed, {e, r});
                SimConfig cfg = make_sim_config(specs[e], row.seed, opts.min_horizon, opts.batch_count);
                cfg.warmup = std::max(cfg.warmup, opts.min_warmup);
                cfg.track_cone = opts.track_cone;
                row.stats = run_switch(cfg, alpha);
                row.prediction = prediction;
                row.ulb_max = bounds.ulb;
                row.lower_bound = bounds.lower;
                row.upper_bound = bounds.upper;
                table.rows[c] = std::move(row);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, cells));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    std::vector<double> xs;
    std::vector<Estimate> ys_sum, ys_weighted;
    for (std::size_t e = 0; e < opts.eps.size(); ++e) {
        SweepCell cell;
        cell.eps = opts.eps[e];
        double ci_w = 0.0, ci_s = 0.0, ci_p = 0.0, ci_q = 0.0;
        for (std::size_t r = 0; r < opts.reps; ++r) {
            const SteadyStateStats& s = table.rows[e * opts.reps + r].stats;
            cell.eps_weighted_sum.mean += cell.eps * s.weighted_sum.mean;
            cell.eps_sum_q.mean += cell.eps * s.sum_q.mean;
            cell.perp_norm.mean += s.perp_norm.mean;
            cell.sum_q.mean += s.sum_q.mean;
            cell.unsat_block_eps += cell.eps * s.unsat_block.mean;
            ci_w += std::pow(cell.eps * s.weighted_sum.ci, 2);
            ci_s += std::pow(cell.eps * s.sum_q.ci, 2);
            ci_p += std::pow(s.perp_norm.ci, 2);
            ci_q += std::pow(s.sum_q.ci, 2);
        }
        const double reps = static_cast<double>(opts.reps);
        cell.eps_weighted_sum = {cell.eps_weighted_sum.mean / reps, std::sqrt(ci_w) / reps};
        cell.eps_sum_q = {cell.eps_sum_q.mean / reps, std::sqrt(ci_s) / reps};
        cell.perp_norm = {cell.perp_norm.mean / reps, std::sqrt(ci_p) / reps};
        cell.sum_q = {cell.sum_q.mean / reps, std::sqrt(ci_q) / reps};
        cell.unsat_block_eps /= reps;
        xs.push_back(cell.eps);
        ys_sum.push_back(cell.eps_sum_q);
        ys_weighted.push_back(cell.eps_weighted_sum);
        table.cells.push_back(cell);
    }
    const bool distinct = std::any_of(xs.begin(), xs.end(), [&](double x) { return x != xs.front(); });
    if (distinct) {
        table.extrapolated_sum_q = extrapolate_to_zero(xs, ys_sum);
        table.extrapolated_weighted_sum = extrapolate_to_zero(xs, ys_weighted);
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        table.extrapolated_sum_q = {nan, nan};
        table.extrapolated_weighted_sum = {nan, nan};
    }
    return table;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    out << "eps,rep,eps_weighted_sum,eps_weighted_sum_ci,eps_sum_q,eps_sum_q_ci,perp_norm_mean,perp_norm_ci,"
           "unsat_block_eps_mean,prediction,ulb_max,lower_bound,upper_bound,slots,seed\n";
    for (const auto& r : table.rows) {
        const auto& s = r.stats;
        out << format_double(r.eps) << ',' << r.rep << ',' << format_double(r.eps * s.weighted_sum.mean) << ','
            << format_double(r.eps * s.weighted_sum.ci) << ',' << format_double(r.eps * s.sum_q.mean) << ','
            << format_double(r.eps * s.sum_q.ci) << ',' << format_double(s.perp_norm.mean) << ','
            << format_double(s.perp_norm.ci) << ',' << format_double(r.eps * s.unsat_block.mean) << ','
            << format_double(r.prediction) << ',' << format_double(r.ulb_max) << ','
            << format_double(r.lower_bound) << ',' << format_double(r.upper_bound) << ',' << s.slots_sampled << ','
            << r.seed << '\n';
    }
}

}  // namespace iqswitch
