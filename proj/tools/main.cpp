// iqswitch: heavy-traffic predictions, simulation sweeps and geometry checks
// for an n x n input-queued switch under MaxWeight.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 a check failed,
// 3 runtime failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iqswitch/analytics.hpp"
#include "iqswitch/config.hpp"
#include "iqswitch/error.hpp"
#include "iqswitch/geometry.hpp"
#include "iqswitch/sim.hpp"
#include "iqswitch/verify.hpp"

using namespace iqswitch;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitRuntime = 3;

std::size_t default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// --seed beats IQSWITCH_SEED, which beats the config file.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
    if (flag) return *flag;
    if (const char* env = std::getenv("IQSWITCH_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const std::string s(env);
            const auto v = std::stoull(s, &used);
            if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ValidationError("IQSWITCH_SEED: not an unsigned integer: " + std::string(env));
        }
    }
    return fallback;
}

// Canonical matrices are reported in the config file's port labels.
json original_labels(const RealMatrix& m, const RunConfig& cfg) {
    const std::size_t n = m.n();
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            out[static_cast<std::size_t>(cfg.row_order[r])][static_cast<std::size_t>(cfg.col_order[c])] = m(r, c);
    return out;
}

std::vector<double> original_labels(const std::vector<double>& v, const std::vector<int>& order) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t p = 0; p < v.size(); ++p) out[static_cast<std::size_t>(order[p])] = v[p];
    return out;
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"ci", e.ci}}; }

json one_based(const std::vector<int>& order) {
    json out = json::array();
    for (const int p : order) out.push_back(p + 1);
    return out;
}

struct Scenario {
    RunConfig cfg;
    SaturationProfile profile;
    CollapseFrame frame;
};

Scenario load_scenario(const std::string& path, std::optional<double> eps) {
    RunConfig cfg = load_config(path);
    if (eps) cfg.spec = cfg.spec.with_eps(*eps);
    auto profile = saturation_profile(cfg.spec);
    const CollapseFrame frame(cfg.spec.n(), profile.n1, profile.n2);
    return {std::move(cfg), std::move(profile), frame};
}

// "ones" when valid, otherwise the block construction.
WeightVector choose_weights(const Scenario& s, const std::string& which) {
    const std::size_t n = s.cfg.spec.n();
    if (which == "ones") {
        auto w = ones_weight_vector(n);
        w.validate(s.profile);
        return w;
    }
    if (which == "block") {
        auto w = make_weight_vector(s.profile, s.frame);
        w.validate(s.profile);
        return w;
    }
    auto ones = ones_weight_vector(n);
    if (ones.valid(s.profile)) return ones;
    if (s.frame.complete())
        throw ValidationError("weight vector: all-ones is not valid for this saturation and no block construction "
                              "exists when every port is saturated");
    auto w = make_weight_vector(s.profile, s.frame);
    w.validate(s.profile);
    return w;
}

int cmd_predict(const std::string& path, std::optional<double> eps) {
    const Scenario s = load_scenario(path, eps);
    const RealMatrix sigma2 = limiting_variance(s.cfg.spec);
    const auto bounds = sum_queue_bounds(sigma2, s.frame, s.profile);
    const auto ulb = universal_lower_bounds(s.cfg.spec, s.profile);

    json weights = nullptr;
    std::string weight_kind = "none";
    if (auto ones = ones_weight_vector(s.cfg.spec.n()); ones.valid(s.profile)) {
        weights = original_labels(ones.alpha, s.cfg);
        weight_kind = "ones";
    } else if (!s.frame.complete()) {
        weights = original_labels(make_weight_vector(s.profile, s.frame).alpha, s.cfg);
        weight_kind = "block";
    }

    const json out = {
        {"schema_version", kSchemaVersion},
        {"n", s.cfg.spec.n()},
        {"n1", s.frame.n1()},
        {"n2", s.frame.n2()},
        {"eps", s.cfg.spec.eps()},
        {"complete", s.frame.complete()},
        {"dimension", s.frame.dimension()},
        {"saturated_rows", one_based({s.cfg.row_order.begin(), s.cfg.row_order.begin() + static_cast<long>(s.frame.n1())})},
        {"saturated_cols", one_based({s.cfg.col_order.begin(), s.cfg.col_order.begin() + static_cast<long>(s.frame.n2())})},
        {"sigma2", original_labels(sigma2, s.cfg)},
        {"zeta", original_labels(zeta(s.frame), s.cfg)},
        {"prediction", heavy_traffic_prediction(sigma2, s.frame)},
        {"sum_bounds",
         {{"lower", bounds.lower},
          {"upper", bounds.upper},
          {"ulb", bounds.ulb},
          {"ulb_rows", bounds.ulb_rows},
          {"ulb_cols", bounds.ulb_cols}}},
        {"universal_lower_bounds",
         {{"rows", original_labels(ulb.rows, s.cfg.row_order)},
          {"cols", original_labels(ulb.cols, s.cfg.col_order)},
          {"rows_limit", original_labels(ulb.rows_limit, s.cfg.row_order)},
          {"cols_limit", original_labels(ulb.cols_limit, s.cfg.col_order)}}},
        {"weight_vector", weights},
        {"weight_vector_kind", weight_kind},
    };
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

struct SweepArgs {
    std::string config;
    std::vector<double> eps{0.2, 0.1, 0.05};
    std::size_t reps = 4;
    std::size_t jobs = default_jobs();
    std::optional<std::uint64_t> seed;
    std::uint64_t horizon = 0;
    std::string out;
    std::string summary;
    std::string weights = "auto";
    double tolerance = 0.10;
    bool cone = false;
};

int cmd_sweep(const SweepArgs& a) {
    const Scenario s = load_scenario(a.config, std::nullopt);
    const WeightVector alpha = choose_weights(s, a.weights);
    SweepOptions opts;
    opts.eps = a.eps;
    opts.reps = a.reps;
    opts.jobs = a.jobs;
    opts.min_horizon = a.horizon ? a.horizon : s.cfg.horizon;
    opts.batch_count = s.cfg.batch_count;
    opts.track_cone = a.cone;
    const std::uint64_t seed = resolve_seed(a.seed, s.cfg.seed);
    const SweepTable table = sweep(s.cfg.spec, seed, opts, alpha);

    if (a.out.empty() || a.out == "-") {
        write_sweep_csv(std::cout, table);
    } else {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + a.out + " for writing");
        write_sweep_csv(f, table);
        if (!f.flush()) throw std::runtime_error("write failed: " + a.out);
    }

    const double ex = table.extrapolated_weighted_sum.mean;
    const bool have_limit = std::isfinite(ex);
    const double rel = have_limit ? std::abs(ex - table.prediction) / std::abs(table.prediction) : NAN;
    const bool pass = !have_limit || rel <= a.tolerance;

    json cells = json::array();
    for (const auto& c : table.cells)
        cells.push_back({{"eps", c.eps},
                         {"eps_weighted_sum", estimate_json(c.eps_weighted_sum)},
                         {"eps_sum_q", estimate_json(c.eps_sum_q)},
                         {"perp_norm", estimate_json(c.perp_norm)},
                         {"unsat_block_eps", c.unsat_block_eps}});
    json summary = {
        {"schema_version", kSchemaVersion},
        {"seed", seed},
        {"reps", a.reps},
        {"n1", s.frame.n1()},
        {"n2", s.frame.n2()},
        {"prediction", table.prediction},
        {"extrapolated_weighted_sum", have_limit ? estimate_json(table.extrapolated_weighted_sum) : json(nullptr)},
        {"extrapolated_sum_q", have_limit ? estimate_json(table.extrapolated_sum_q) : json(nullptr)},
        {"relative_error", have_limit ? json(rel) : json(nullptr)},
        {"tolerance", a.tolerance},
        {"pass", have_limit ? json(pass) : json(nullptr)},
        {"cells", cells},
    };
    const std::string text = summary.dump(2) + "\n";
    if (!a.summary.empty()) {
        std::ofstream f(a.summary, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + a.summary + " for writing");
        f << text;
    } else if (!a.out.empty() && a.out != "-") {
        std::cout << text;
    } else {
        std::cerr << text;
    }
    return pass ? kExitOk : kExitCheckFailed;
}

struct SimulateArgs {
    std::string config;
    std::optional<double> eps;
    std::optional<std::uint64_t> seed;
    std::uint64_t horizon = 0;
    std::string weights = "auto";
    bool cone = false;
};

int cmd_simulate(const SimulateArgs& a) {
    const Scenario s = load_scenario(a.config, a.eps);
    const WeightVector alpha = choose_weights(s, a.weights);
    const std::uint64_t seed = resolve_seed(a.seed, s.cfg.seed);
    SimConfig sc = make_sim_config(s.cfg.spec, seed, a.horizon ? a.horizon : s.cfg.horizon, s.cfg.batch_count);
    sc.track_cone = a.cone;
    const auto st = run_switch(sc, alpha);

    json rows = json::array(), cols = json::array();
    std::vector<json> row_json(st.row_sums.size()), col_json(st.col_sums.size());
    for (std::size_t p = 0; p < st.row_sums.size(); ++p) {
        row_json[static_cast<std::size_t>(s.cfg.row_order[p])] = estimate_json(st.row_sums[p]);
        col_json[static_cast<std::size_t>(s.cfg.col_order[p])] = estimate_json(st.col_sums[p]);
    }
    for (auto& r : row_json) rows.push_back(std::move(r));
    for (auto& c : col_json) cols.push_back(std::move(c));

    json out = {
        {"schema_version", kSchemaVersion},
        {"seed", seed},
        {"eps", s.cfg.spec.eps()},
        {"warmup", sc.warmup},
        {"slots", st.slots_sampled},
        {"batches", sc.batch_count},
        {"mean_q", original_labels(st.mean_q, s.cfg)},
        {"weighted_sum", estimate_json(st.weighted_sum)},
        {"sum_q", estimate_json(st.sum_q)},
        {"perp_norm", estimate_json(st.perp_norm)},
        {"perp_norm_sq", estimate_json(st.perp_norm_sq)},
        {"unsat_block", estimate_json(st.unsat_block)},
        {"row_sums", rows},
        {"col_sums", cols},
        {"audit",
         {{"windows", st.audit.windows},
          {"failures", st.audit.failures},
          {"arrivals", st.audit.arrivals},
          {"departures", st.audit.departures},
          {"unused_service", st.audit.unused_service}}},
    };
    if (a.cone) out["cone_perp_norm"] = estimate_json(st.cone_perp_norm);
    std::cout << out.dump(2) << '\n';
    return st.audit.ok() ? kExitOk : kExitCheckFailed;
}

struct KingmanArgs {
    std::vector<double> pmf;
    std::vector<double> binomial;
    std::optional<double> bernoulli;
    std::optional<std::uint64_t> seed;
    std::uint64_t warmup = 100000;
    std::uint64_t horizon = 100000000;
    double tolerance = 0.01;
};

int cmd_kingman(const KingmanArgs& a) {
    const int given = !a.pmf.empty() + !a.binomial.empty() + a.bernoulli.has_value();
    if (given != 1) throw ValidationError("kingman: give exactly one of --pmf, --binomial, --bernoulli");
    std::optional<Pmf> pmf;
    if (!a.pmf.empty()) {
        pmf.emplace(a.pmf);
    } else if (!a.binomial.empty()) {
        if (a.binomial.size() != 2 || a.binomial[0] < 1 || a.binomial[0] != std::floor(a.binomial[0]))
            throw ValidationError("kingman: --binomial takes TRIALS,P with a positive integer TRIALS");
        pmf.emplace(Pmf::binomial(static_cast<unsigned>(a.binomial[0]), a.binomial[1]));
    } else {
        pmf.emplace(Pmf::bernoulli(*a.bernoulli));
    }
    const std::uint64_t seed = resolve_seed(a.seed, 1);
    const Estimate e = run_single_server(*pmf, seed, a.warmup, a.horizon);
    const double exact = kingman_mean(pmf->mean(), pmf->variance());
    const double err = std::abs(e.mean - exact);
    // Relative error is meaningless at an exact mean of zero.
    const bool pass = exact == 0.0 ? e.mean == 0.0 : err / exact <= a.tolerance;
    const json out = {
        {"schema_version", kSchemaVersion},
        {"seed", seed},
        {"lambda", pmf->mean()},
        {"sigma2", pmf->variance()},
        {"exact", exact},
        {"simulated", estimate_json(e)},
        {"relative_error", exact == 0.0 ? json(nullptr) : json(err / exact)},
        {"tolerance", a.tolerance},
        {"pass", pass},
    };
    std::cout << out.dump(2) << '\n';
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_verify(std::size_t max_n, std::size_t trials, const std::optional<std::uint64_t>& seed_flag,
               double perturbation) {
    VerifyOptions opts;
    opts.max_n = max_n;
    opts.trials = trials;
    opts.seed = resolve_seed(seed_flag, 1);
    opts.zeta_perturbation = perturbation;
    bool all = true;
    for (const auto& c : run_geometry_checks(opts)) {
        all = all && c.passed;
        std::printf("%s %-34s worst %.3e  tol %.0e  cases %zu\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.worst_residual, c.tolerance, c.cases);
    }
    return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heavy-traffic analysis and simulation of input-queued switches under MaxWeight", "iqswitch"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "iqswitch 1.0.0");

    const auto positive = CLI::PositiveNumber;
    const CLI::Validator at_least_one(
        [](std::string& v) { return v.find_first_not_of('0') == std::string::npos ? "must be at least 1" : ""; },
        "INT>=1");
    const auto eps_range = CLI::Range(0.0, 1.0);

    std::string predict_config;
    std::optional<double> predict_eps;
    auto* predict = app.add_subcommand("predict", "Heavy-traffic prediction, bounds and weight vector as JSON");
    predict->add_option("config", predict_config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    predict->add_option("--eps", predict_eps, "Override the config's eps")->check(eps_range);

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Simulate a grid of eps values and extrapolate to eps = 0");
    sweep_cmd->add_option("config", sw.config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--eps", sw.eps, "Comma-separated eps values")->delimiter(',')->check(eps_range)
        ->capture_default_str();
    sweep_cmd->add_option("--reps", sw.reps, "Replications per eps")->check(at_least_one)->capture_default_str();
    sweep_cmd->add_option("--jobs", sw.jobs, "Worker threads")->check(at_least_one)->capture_default_str();
    sweep_cmd->add_option("--seed", sw.seed, "Master seed (overrides IQSWITCH_SEED and the config)");
    sweep_cmd->add_option("--horizon", sw.horizon, "Minimum sampled slots per cell");
    sweep_cmd->add_option("--out", sw.out, "CSV output path ('-' for stdout)");
    sweep_cmd->add_option("--summary", sw.summary, "Write the summary JSON here instead of the console");
    sweep_cmd->add_option("--weights", sw.weights, "Weight vector")
        ->check(CLI::IsMember({"auto", "ones", "block"}))->capture_default_str();
    sweep_cmd->add_option("--tolerance", sw.tolerance, "Relative tolerance on the extrapolated limit")
        ->check(positive)->capture_default_str();
    sweep_cmd->add_flag("--cone", sw.cone, "Also track the distance to the cone");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate one eps and report steady-state statistics");
    simulate->add_option("config", sim.config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    simulate->add_option("--eps", sim.eps, "Override the config's eps")->check(eps_range);
    simulate->add_option("--seed", sim.seed, "Seed (overrides IQSWITCH_SEED and the config)");
    simulate->add_option("--horizon", sim.horizon, "Minimum sampled slots");
    simulate->add_option("--weights", sim.weights, "Weight vector")
        ->check(CLI::IsMember({"auto", "ones", "block"}))->capture_default_str();
    simulate->add_flag("--cone", sim.cone, "Also track the distance to the cone");

    KingmanArgs km;
    auto* kingman = app.add_subcommand("kingman", "Single-server queue against the exact mean");
    auto* pmf_opt = kingman->add_option("--pmf", km.pmf, "Arrival pmf P(0),P(1),...")->delimiter(',');
    auto* bin_opt = kingman->add_option("--binomial", km.binomial, "TRIALS,P")->delimiter(',')->expected(2);
    auto* ber_opt = kingman->add_option("--bernoulli", km.bernoulli, "Arrival probability")->check(CLI::Range(0.0, 1.0));
    pmf_opt->excludes(bin_opt)->excludes(ber_opt);
    bin_opt->excludes(ber_opt);
    kingman->add_option("--seed", km.seed, "Seed (overrides IQSWITCH_SEED)");
    kingman->add_option("--warmup", km.warmup, "Discarded slots")->capture_default_str();
    kingman->add_option("--horizon", km.horizon, "Sampled slots")->check(CLI::Range(20ULL, ~0ULL))
        ->capture_default_str();
    kingman->add_option("--tolerance", km.tolerance, "Relative tolerance")->check(positive)->capture_default_str();

    std::size_t max_n = 6, trials = 1000;
    std::optional<std::uint64_t> verify_seed;
    double perturbation = 0.0;
    auto* verify = app.add_subcommand("verify", "Geometry and scheduler invariant suite");
    verify->add_option("--max-n", max_n, "Largest switch size (2..8)")->check(CLI::Range(2, 8))
        ->capture_default_str();
    verify->add_option("--trials", trials, "Random inputs per frame")->check(at_least_one)->capture_default_str();
    verify->add_option("--seed", verify_seed, "Seed (overrides IQSWITCH_SEED)");
    verify->add_option("--zeta-perturbation", perturbation)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*predict) return cmd_predict(predict_config, predict_eps);
        if (*sweep_cmd) return cmd_sweep(sw);
        if (*simulate) return cmd_simulate(sim);
        if (*kingman) return cmd_kingman(km);
        if (*verify) return cmd_verify(max_n, trials, verify_seed, perturbation);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitInvalid;
}
