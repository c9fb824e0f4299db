// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
//   acceptance [--jobs N] [--seed S] [--only K]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "iqswitch/analytics.hpp"
#include "iqswitch/config.hpp"
#include "iqswitch/geometry.hpp"
#include "iqswitch/scheduler.hpp"
#include "iqswitch/sim.hpp"
#include "iqswitch/verify.hpp"

using namespace iqswitch;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Context {
    std::size_t jobs = 1;
    std::uint64_t seed = 20240601;
    const std::vector<double> eps{0.2, 0.1, 0.05};
    const std::size_t reps = 4;

    // Sweeps shared between criteria, run on first use.
    std::optional<SweepTable> incomplete, complete, skewed;

    RunConfig config(const char* name) const { return load_config(std::string(IQSWITCH_CONFIG_DIR) + "/" + name); }

    SweepOptions options() const {
        SweepOptions o;
        o.eps = eps;
        o.reps = reps;
        o.jobs = jobs;
        return o;
    }

    const SweepTable& incomplete_sweep() {
        if (!incomplete) {
            const auto cfg = config("incomplete_n3.json");
            incomplete = sweep(cfg.spec, seed, options(), ones_weight_vector(3));
        }
        return *incomplete;
    }
    const SweepTable& complete_sweep() {
        if (!complete) {
            const auto cfg = config("complete_n2.json");
            complete = sweep(cfg.spec, seed, options(), ones_weight_vector(2));
        }
        return *complete;
    }
    const SweepTable& skewed_sweep() {
        if (!skewed) {
            const auto cfg = config("nonuniform_k_n3.json");
            const auto profile = saturation_profile(cfg.spec);
            const CollapseFrame frame(3, profile.n1, profile.n2);
            skewed = sweep(cfg.spec, seed, options(), make_weight_vector(profile, frame));
        }
        return *skewed;
    }
};

Outcome kingman(Context& ctx) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = run_single_server(Pmf::binomial(2, 0.45), ctx.seed, 100000, 100000000);
    const double exact = kingman_mean(0.9, 0.495);
    const double rel = std::abs(e.mean - exact) / exact;
    out.require(rel < 0.01, "Binomial(2,0.45) mean " + fmt("%.4f", e.mean) + " +- " + fmt("%.4f", e.ci) + " vs " +
                                fmt("%.4f", exact) + " (rel " + fmt("%.3f%%", 100 * rel) + ", limit 1%)");
    out.require(e.ci < 0.02, "CI half-width " + fmt("%.4f", e.ci) + " < 0.02");
    bool zero = true;
    for (const double l : {0.1, 0.5, 0.9, 0.999})
        zero = zero && run_single_server(Pmf::bernoulli(l), ctx.seed, 1000, 1000000).mean == 0.0;
    out.require(zero, "Bernoulli(0.1, 0.5, 0.9, 0.999) means exactly 0");
    const double secs = seconds_since(t0);
    out.require(secs < 60.0, "runtime " + fmt("%.1fs", secs) + " < 60s");
    return out;
}

Outcome geometry(Context& ctx) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    VerifyOptions opts;
    opts.max_n = 6;
    opts.trials = 1000;
    opts.seed = ctx.seed;
    for (const auto& c : run_geometry_checks(opts))
        out.require(c.passed, c.name + " worst " + fmt("%.2e", c.worst_residual) + " <= " + fmt("%.0e", c.tolerance));

    const CollapseFrame f(3, 1, 1);
    const auto z = zeta(f);
    const bool anchors = std::abs(z(0, 0) - 1.5) < 1e-15 && std::abs(z(0, 1) - 1.125) < 1e-15 &&
                         std::abs(z(1, 0) - 1.125) < 1e-15 && z(1, 1) == 0.0 && z(2, 2) == 0.0;
    out.require(anchors, "zeta anchors 1.5 / 1.125 / 0 at n=3, n1=n2=1");
    const auto basis = orthonormal_basis(f);
    const double c11 = norm_squared(project_subspace(unit_matrix(3, 0, 0), f).parallel);
    const double c12 = norm_squared(project_subspace(unit_matrix(3, 0, 1), f).parallel);
    const double b11 = norm_squared(project_onto_basis(unit_matrix(3, 0, 0), basis));
    const double b12 = norm_squared(project_onto_basis(unit_matrix(3, 0, 1), basis));
    out.require(std::abs(c11 - 0.5) < 1e-12 && std::abs(b11 - 0.5) < 1e-12,
                "||chi11 par S||^2 = " + fmt("%.15f", c11) + " (0.5)");
    out.require(std::abs(c12 - 0.375) < 1e-12 && std::abs(b12 - 0.375) < 1e-12,
                "||chi12 par S||^2 = " + fmt("%.15f", c12) + " (0.375)");
    out.detail += "; " + fmt("%.1fs", seconds_since(t0));
    return out;
}

Outcome matching(Context& ctx) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(ctx.seed, {3}));
    MaxWeightScheduler scheduler;
    std::size_t mismatches = 0, total = 0;
    for (std::size_t n = 2; n <= 7; ++n) {
        for (int t = 0; t < 1000; ++t) {
            // Alternate wide and narrow entry ranges; narrow ones force ties.
            std::uniform_int_distribution<std::uint64_t> entry(0, t % 2 ? 3 : 20);
            QueueMatrix q(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) q(i, j) = entry(rng);
            const auto s = scheduler.schedule(q, rng);
            ++total;
            if (!s.is_maximal() || integer_weight(q, s) != maxweight_bruteforce(q).max_weight) ++mismatches;
        }
    }
    out.require(mismatches == 0, std::to_string(total - mismatches) + "/" + std::to_string(total) +
                                     " matrices (n = 2..7) match enumeration");
    const double secs = seconds_since(t0);
    out.require(secs < 60.0, "runtime " + fmt("%.1fs", secs) + " < 60s");
    return out;
}

Outcome incomplete_limit(Context& ctx) {
    Outcome out;
    const auto& tab = ctx.incomplete_sweep();
    const double target = 2.0 / 3.0;
    out.require(std::abs(tab.prediction - target) < 1e-12, "prediction " + fmt("%.6f", tab.prediction));
    const double ex = tab.extrapolated_sum_q.mean;
    out.require(std::abs(ex - target) <= 0.10 * target,
                "extrapolated eps*E[sum q] " + fmt("%.4f", ex) + " +- " + fmt("%.4f", tab.extrapolated_sum_q.ci) +
                    " within 10% of 2/3 (rel " + fmt("%.1f%%", 100 * (ex / target - 1)) + ")");
    const auto& last = tab.cells.back();
    out.require(std::abs(last.eps_sum_q.mean - target) <= 0.20 * target,
                "eps=0.05 value " + fmt("%.4f", last.eps_sum_q.mean) + " within 20% of 2/3");

    // Per-queue eps*E[q_ij] on the unsaturated block at the smallest eps.
    double worst = 0.0;
    for (std::size_t i = 1; i < 3; ++i) {
        for (std::size_t j = 1; j < 3; ++j) {
            double m = 0.0;
            for (const auto& r : tab.rows)
                if (r.eps == last.eps) m += r.eps * r.stats.mean_q(i, j);
            worst = std::max(worst, m / static_cast<double>(ctx.reps));
        }
    }
    out.require(worst < 0.05, "unsaturated block max eps*E[q_ij] at eps=0.05 " + fmt("%.4f", worst) + " < 0.05");

    // Warmup-doubling stability at the smallest eps.
    const auto cfg = ctx.config("incomplete_n3.json");
    SweepOptions o = ctx.options();
    o.eps = {last.eps};
    o.min_warmup = 2 * default_warmup(last.eps);
    const auto doubled = sweep(cfg.spec, ctx.seed, o, ones_weight_vector(3));
    const auto& d = doubled.cells.front().eps_sum_q;
    const double gap = std::abs(d.mean - last.eps_sum_q.mean);
    const double allowed = 2.0 * std::hypot(d.ci, last.eps_sum_q.ci);
    out.require(gap <= allowed, "doubled warmup shifts eps=0.05 value by " + fmt("%.4f", gap) + " <= " +
                                    fmt("%.4f", allowed));
    return out;
}

Outcome complete_limit(Context& ctx) {
    Outcome out;
    const auto& tab = ctx.complete_sweep();
    const double target = 0.75;
    out.require(std::abs(tab.prediction - target) < 1e-12, "prediction " + fmt("%.6f", tab.prediction));
    const double ex = tab.extrapolated_sum_q.mean;
    out.require(std::abs(ex - target) <= 0.10 * target,
                "extrapolated eps*E[sum q] " + fmt("%.4f", ex) + " +- " + fmt("%.4f", tab.extrapolated_sum_q.ci) +
                    " within 10% of 0.75 (rel " + fmt("%.1f%%", 100 * (ex / target - 1)) + ")");
    return out;
}

Outcome collapse(Context& ctx) {
    Outcome out;
    const auto& cells = ctx.incomplete_sweep().cells;
    for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
        const auto& a = cells[k];
        const auto& b = cells[k + 1];
        const double perp_change = std::abs(b.perp_norm.mean / a.perp_norm.mean - 1.0);
        const double growth = b.sum_q.mean / a.sum_q.mean;
        const double ra = a.perp_norm.mean / a.sum_q.mean;
        const double rb = b.perp_norm.mean / b.sum_q.mean;
        const std::string step = "eps " + fmt("%g", a.eps) + "->" + fmt("%g", b.eps) + ": ";
        out.require(perp_change < 0.25, step + "E[||q perp||] " + fmt("%.3f", a.perp_norm.mean) + "->" +
                                            fmt("%.3f", b.perp_norm.mean) + " change " +
                                            fmt("%.1f%%", 100 * perp_change) + " < 25%");
        out.require(growth >= 1.6 && growth <= 2.4, step + "E[sum q] growth x" + fmt("%.3f", growth) + " in [1.6, 2.4]");
        out.require(rb < ra, step + "ratio " + fmt("%.4f", ra) + " -> " + fmt("%.4f", rb) + " decreasing");
    }
    return out;
}

Outcome lower_bound(Context& ctx) {
    Outcome out;
    std::size_t checked = 0, violations = 0;
    double tightest = INFINITY;
    auto scan = [&](const SweepTable& tab, const RunConfig& cfg) {
        for (const auto& r : tab.rows) {
            const auto spec = cfg.spec.with_eps(r.eps);
            const auto profile = saturation_profile(spec);
            const auto b = universal_lower_bounds(spec, profile);
            for (std::size_t p = 0; p < profile.n1; ++p) {
                const auto& e = r.stats.row_sums[p];
                ++checked;
                if (e.mean < b.rows[p] - 3.0 * e.ci) ++violations;
                tightest = std::min(tightest, e.mean / b.rows[p]);
            }
            for (std::size_t p = 0; p < profile.n2; ++p) {
                const auto& e = r.stats.col_sums[p];
                ++checked;
                if (e.mean < b.cols[p] - 3.0 * e.ci) ++violations;
                tightest = std::min(tightest, e.mean / b.cols[p]);
            }
        }
    };
    scan(ctx.incomplete_sweep(), ctx.config("incomplete_n3.json"));
    scan(ctx.complete_sweep(), ctx.config("complete_n2.json"));
    out.require(violations == 0, std::to_string(checked - violations) + "/" + std::to_string(checked) +
                                     " saturated port means above bound - 3 CI (smallest mean/bound " +
                                     fmt("%.3f", tightest) + ")");
    return out;
}

Outcome weighted(Context& ctx) {
    Outcome out;
    const auto cfg = ctx.config("nonuniform_k_n3.json");
    const auto profile = saturation_profile(cfg.spec);
    const CollapseFrame frame(3, profile.n1, profile.n2);
    out.require(std::abs(profile.kappa[0] - 1.5 * 18.0 / 17.0) < 1e-12, "kappa_1 " + fmt("%.6f", profile.kappa[0]));
    const auto& tab = ctx.skewed_sweep();
    const double pred = tab.prediction;
    const double exw = tab.extrapolated_weighted_sum.mean;
    out.require(std::abs(exw - pred) <= 0.15 * pred,
                "block alpha: extrapolated eps*E[<q,alpha>] " + fmt("%.4f", exw) + " within 15% of " +
                    fmt("%.4f", pred) + " (rel " + fmt("%.1f%%", 100 * (exw / pred - 1)) + ")");
    const auto b = sum_queue_bounds(limiting_variance(cfg.spec), frame, profile);
    const auto& s = tab.extrapolated_sum_q;
    out.require(s.mean >= b.lower - s.ci && s.mean <= b.upper + s.ci,
                "alpha = 1: extrapolated eps*E[sum q] " + fmt("%.4f", s.mean) + " in [" + fmt("%.4f", b.lower) +
                    ", " + fmt("%.4f", b.upper) + "] +- " + fmt("%.4f", s.ci));
    return out;
}

Outcome determinism(Context& ctx) {
    Outcome out;
    const auto cfg = ctx.config("complete_n2.json");
    SweepOptions o = ctx.options();
    o.jobs = ctx.jobs == 1 ? 3 : 1;
    const auto again = sweep(cfg.spec, ctx.seed, o, ones_weight_vector(2));
    std::ostringstream a, b;
    write_sweep_csv(a, ctx.complete_sweep());
    write_sweep_csv(b, again);
    out.require(a.str() == b.str(), "rerun CSV identical (" + std::to_string(a.str().size()) + " bytes, jobs " +
                                        std::to_string(ctx.jobs) + " vs " + std::to_string(o.jobs) + ")");

    std::size_t runs = 0, windows = 0, bad = 0;
    for (const SweepTable* t : {&ctx.incomplete_sweep(), &ctx.complete_sweep(), &ctx.skewed_sweep(), &again}) {
        for (const auto& r : t->rows) {
            ++runs;
            windows += r.stats.audit.windows;
            if (!r.stats.audit.ok() || r.stats.audit.windows != kDefaultBatches + 1) ++bad;
        }
    }
    out.require(bad == 0, "conservation audit exact in " + std::to_string(windows) + " windows over " +
                              std::to_string(runs) + " runs");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    Context ctx;
    ctx.jobs = std::max(1u, std::thread::hardware_concurrency());
    int only = 0;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--jobs") ctx.jobs = std::strtoull(argv[i + 1], nullptr, 10);
        else if (flag == "--seed") ctx.seed = std::strtoull(argv[i + 1], nullptr, 10);
        else if (flag == "--only") only = std::atoi(argv[i + 1]);
        else {
            std::fprintf(stderr, "usage: acceptance [--jobs N] [--seed S] [--only K]\n");
            return 2;
        }
    }

    const std::vector<std::pair<const char*, std::function<Outcome(Context&)>>> criteria{
        {"Kingman exactness", kingman},
        {"Projection norms and basis oracle", geometry},
        {"MaxWeight oracle equivalence", matching},
        {"Incomplete-saturation heavy-traffic limit", incomplete_limit},
        {"Complete-saturation limit", complete_limit},
        {"State-space collapse", collapse},
        {"Universal lower bound never violated", lower_bound},
        {"Weighted-sum generality", weighted},
        {"Determinism and conservation", determinism},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (only && static_cast<int>(k + 1) != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second(ctx);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("[%s] %zu. %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, only ? std::size_t{1} : criteria.size());
    return failures == 0 ? 0 : 1;
}
