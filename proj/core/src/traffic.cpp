#include "iqswitch/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "iqswitch/error.hpp"

namespace iqswitch {

namespace {

std::string cell(std::size_t i, std::size_t j) { return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"; }

// Snap probabilities that overshoot [0, 1] by rounding noise.
double clamp_probability(double p, const char* what) {
    if (!std::isfinite(p) || p < -kSaturationTol || p > 1.0 + kSaturationTol)
        throw ValidationError(std::string(what) + ": probability " + std::to_string(p) + " outside [0,1]");
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

Pmf::Pmf(std::vector<double> probabilities) : probabilities_(std::move(probabilities)) {
    if (probabilities_.empty()) throw ValidationError("pmf: empty support");
    double total = 0.0;
    for (const double p : probabilities_) {
        if (!std::isfinite(p) || p < 0.0) throw ValidationError("pmf: probabilities must be finite and nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("pmf: probabilities sum to " + std::to_string(total));
    while (probabilities_.size() > 1 && probabilities_.back() == 0.0) probabilities_.pop_back();

    cdf_.resize(probabilities_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probabilities_.size(); ++k) {
        acc += probabilities_[k];
        cdf_[k] = acc;
        mean_ += static_cast<double>(k) * probabilities_[k];
    }
    cdf_.back() = 1.0;
    for (std::size_t k = 0; k < probabilities_.size(); ++k) {
        const double d = static_cast<double>(k) - mean_;
        variance_ += d * d * probabilities_[k];
    }
}

Pmf Pmf::point_mass(std::uint64_t value) {
    std::vector<double> p(value + 1, 0.0);
    p[value] = 1.0;
    return Pmf(std::move(p));
}

Pmf Pmf::bernoulli(double p) {
    p = clamp_probability(p, "bernoulli");
    return Pmf({1.0 - p, p});
}

Pmf Pmf::scaled_bernoulli(std::uint64_t scale, double mean) {
    if (scale == 0) throw ValidationError("scaled_bernoulli: scale must be positive");
    const double p = clamp_probability(mean / static_cast<double>(scale), "scaled_bernoulli");
    std::vector<double> probs(scale + 1, 0.0);
    probs[0] = 1.0 - p;
    probs[scale] = p;
    return Pmf(std::move(probs));
}

Pmf Pmf::binomial(unsigned trials, double p) {
    if (trials == 0) throw ValidationError("binomial: trial count must be positive");
    p = clamp_probability(p, "binomial");
    std::vector<double> probs(trials + 1);
    double coeff = 1.0;
    for (unsigned k = 0; k <= trials; ++k) {
        probs[k] = coeff * std::pow(p, k) * std::pow(1.0 - p, trials - k);
        coeff = coeff * static_cast<double>(trials - k) / static_cast<double>(k + 1);
    }
    return Pmf(std::move(probs));
}

const char* to_string(ArrivalKind kind) {
    switch (kind) {
        case ArrivalKind::bernoulli: return "bernoulli";
        case ArrivalKind::scaled_bernoulli: return "scaled_bernoulli";
        case ArrivalKind::binomial: return "binomial";
        case ArrivalKind::pmf: return "pmf";
    }
    return "unknown";
}

Pmf ArrivalFamily::make(std::size_t n, std::size_t i, std::size_t j, double mean) const {
    switch (kind) {
        case ArrivalKind::bernoulli: return Pmf::bernoulli(mean);
        case ArrivalKind::scaled_bernoulli: return Pmf::scaled_bernoulli(parameter, mean);
        case ArrivalKind::binomial: return Pmf::binomial(parameter, mean / static_cast<double>(parameter));
        case ArrivalKind::pmf:
            if (pmfs.size() == 1) return pmfs.front();
            if (pmfs.size() == n * n) return pmfs[i * n + j];
            throw ValidationError("dist: pmf list must hold 1 or n*n entries");
    }
    throw ValidationError("dist: unknown kind");
}

RealMatrix normalize_saturation(const RealMatrix& k) {
    double total = 0.0;
    for (const double v : k.flat()) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("saturation vector k must be finite and nonnegative");
        total += v;
    }
    if (total <= 0.0) throw ValidationError("saturation vector k must not be all zero");
    RealMatrix out = k;
    const double scale = static_cast<double>(k.n()) / total;
    for (auto& v : out.flat()) v *= scale;
    return out;
}

TrafficSpec TrafficSpec::create(RealMatrix nu, RealMatrix k, double eps, ArrivalFamily family, std::uint64_t a_max,
                                KNormalization normalization) {
    if (normalization == KNormalization::normalize) {
        k = normalize_saturation(k);
    } else {
        double total = 0.0;
        for (const double v : k.flat()) {
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("saturation vector k must be finite and nonnegative");
            total += v;
        }
        if (total <= 0.0) throw ValidationError("saturation vector k must not be all zero");
    }
    return build(std::move(nu), std::move(k), eps, std::move(family), a_max, normalization);
}

TrafficSpec TrafficSpec::build(RealMatrix nu, RealMatrix k, double eps, ArrivalFamily family, std::uint64_t a_max,
                               KNormalization normalization) {
    const std::size_t n = nu.n();
    if (n < 2) throw ValidationError("port count n must be at least 2");
    if (k.n() != n) throw ValidationError("k must be n x n like nu");
    if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps must lie in [0, 1)");
    if (a_max < 1) throw ValidationError("a_max must be at least 1");
    classify_ports(nu);

    TrafficSpec spec;
    spec.nu_ = std::move(nu);
    spec.k_ = std::move(k);
    spec.eps_ = eps;
    spec.family_ = std::move(family);
    spec.a_max_ = a_max;
    spec.normalization_ = normalization;
    spec.lambda_ = RealMatrix(n);
    spec.dists_.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double rate = spec.nu_(i, j) - eps * spec.k_(i, j);
            if (rate < -kMeanTol)
                throw ValidationError("arrival rate negative at " + cell(i, j) + ": eps too large for nu and k");
            rate = std::max(rate, 0.0);
            spec.lambda_(i, j) = rate;
            Pmf pmf = spec.family_.make(n, i, j, rate);
            if (pmf.max_value() > a_max)
                throw ValidationError("arrival support exceeds a_max at " + cell(i, j));
            if (std::abs(pmf.mean() - rate) > kMeanTol)
                throw ValidationError("pmf mean " + std::to_string(pmf.mean()) + " at " + cell(i, j) +
                                      " differs from nu - eps k = " + std::to_string(rate));
            spec.dists_.push_back(std::move(pmf));
        }
    }
    return spec;
}

TrafficSpec TrafficSpec::with_eps(double eps) const {
    return build(nu_, k_, eps, family_, a_max_, normalization_);
}

TrafficSpec TrafficSpec::permuted(const std::vector<int>& row_order, const std::vector<int>& col_order) const {
    const std::size_t n = this->n();
    if (row_order.size() != n || col_order.size() != n) throw ValidationError("permuted: order size mismatch");
    RealMatrix nu(n), k(n);
    ArrivalFamily family = family_;
    if (family.kind == ArrivalKind::pmf && family.pmfs.size() == n * n) family.pmfs.clear();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const auto i = static_cast<std::size_t>(row_order[r]);
            const auto j = static_cast<std::size_t>(col_order[c]);
            nu(r, c) = nu_(i, j);
            k(r, c) = k_(i, j);
            if (family_.kind == ArrivalKind::pmf && family_.pmfs.size() == n * n)
                family.pmfs.push_back(family_.pmfs[i * n + j]);
        }
    }
    return build(std::move(nu), std::move(k), eps_, std::move(family), a_max_, normalization_);
}

bool PortClassification::is_canonical() const {
    for (std::size_t i = 0; i < row_order.size(); ++i)
        if (row_order[i] != static_cast<int>(i) || col_order[i] != static_cast<int>(i)) return false;
    return true;
}

PortClassification classify_ports(const RealMatrix& nu, double tol) {
    const std::size_t n = nu.n();
    PortClassification out;
    out.nu_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = nu(i, j);
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("capacity region violated: negative or non-finite rate at " + cell(i, j));
            out.nu_min = std::min(out.nu_min, v);
        }
    }
    std::vector<double> row_delta(n), col_delta(n);
    std::vector<bool> row_sat(n), col_sat(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rs = nu.row_sum(i);
        if (rs > 1.0 + tol) throw ValidationError("capacity region violated: row " + std::to_string(i + 1));
        row_sat[i] = std::abs(1.0 - rs) <= tol;
        row_delta[i] = row_sat[i] ? 0.0 : 1.0 - rs;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double cs = nu.col_sum(j);
        if (cs > 1.0 + tol) throw ValidationError("capacity region violated: column " + std::to_string(j + 1));
        col_sat[j] = std::abs(1.0 - cs) <= tol;
        col_delta[j] = col_sat[j] ? 0.0 : 1.0 - cs;
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < n; ++i) {
            if (row_sat[i] == (pass == 0)) out.row_order.push_back(static_cast<int>(i));
            if (col_sat[i] == (pass == 0)) out.col_order.push_back(static_cast<int>(i));
        }
    }
    out.n1 = static_cast<std::size_t>(std::count(row_sat.begin(), row_sat.end(), true));
    out.n2 = static_cast<std::size_t>(std::count(col_sat.begin(), col_sat.end(), true));
    out.nu_min_prime = out.nu_min;
    for (std::size_t r = 0; r < n; ++r) {
        out.delta.push_back(row_delta[out.row_order[r]]);
        out.delta_tilde.push_back(col_delta[out.col_order[r]]);
        if (r >= out.n1) out.nu_min_prime = std::min(out.nu_min_prime, out.delta.back());
        if (r >= out.n2) out.nu_min_prime = std::min(out.nu_min_prime, out.delta_tilde.back());
    }
    return out;
}

SaturationProfile saturation_profile(const TrafficSpec& spec) {
    const auto ports = classify_ports(spec.nu());
    if (!ports.is_canonical())
        throw ValidationError("traffic is not in canonical port order (saturated ports first); canonicalize first");
    const std::size_t n = spec.n();
    SaturationProfile p;
    p.n1 = ports.n1;
    p.n2 = ports.n2;
    p.delta = ports.delta;
    p.delta_tilde = ports.delta_tilde;
    p.nu_min = ports.nu_min;
    p.nu_min_prime = ports.nu_min_prime;
    p.kappa.resize(n);
    p.kappa_tilde.resize(n);
    p.gamma.resize(n);
    p.gamma_tilde.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p.kappa[i] = spec.k().row_sum(i);
        p.kappa_tilde[i] = spec.k().col_sum(i);
        p.gamma[i] = p.delta[i] + spec.eps() * p.kappa[i];
        p.gamma_tilde[i] = p.delta_tilde[i] + spec.eps() * p.kappa_tilde[i];
        total += p.kappa[i];
    }
    p.kappa_avg = total / static_cast<double>(n);
    bool any = false;
    auto note = [&](double kappa) {
        if (!any) {
            p.kappa_min_saturated = p.kappa_max_saturated = kappa;
            any = true;
        } else {
            p.kappa_min_saturated = std::min(p.kappa_min_saturated, kappa);
            p.kappa_max_saturated = std::max(p.kappa_max_saturated, kappa);
        }
    };
    for (std::size_t i = 0; i < p.n1; ++i) note(p.kappa[i]);
    for (std::size_t j = 0; j < p.n2; ++j) note(p.kappa_tilde[j]);
    return p;
}

CanonicalTraffic canonicalize(const TrafficSpec& spec) {
    auto ports = classify_ports(spec.nu());
    return {spec.permuted(ports.row_order, ports.col_order), std::move(ports.row_order), std::move(ports.col_order)};
}

Rates build_rates(const TrafficSpec& spec) {
    const std::size_t n = spec.n();
    Rates r{RealMatrix(n), 0.0, true};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double rate = spec.nu()(i, j) - spec.eps() * spec.k()(i, j);
            if (rate < -kMeanTol)
                throw ValidationError("arrival rate negative at " + cell(i, j) + ": eps too large for nu and k");
            r.lambda(i, j) = std::max(rate, 0.0);
        }
    }
    for (std::size_t i = 0; i < n; ++i) r.rho = std::max({r.rho, r.lambda.row_sum(i), r.lambda.col_sum(i)});
    r.in_capacity = r.rho < 1.0 - kSaturationTol;
    return r;
}

Moments moments(const TrafficSpec& spec) {
    const std::size_t n = spec.n();
    const Rates rates = build_rates(spec);
    Moments m{RealMatrix(n), RealMatrix(n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Pmf& pmf = spec.dist(i, j);
            if (std::abs(pmf.mean() - rates.lambda(i, j)) > kMeanTol)
                throw ValidationError("pmf mean at " + cell(i, j) + " inconsistent with nu - eps k");
            m.lambda(i, j) = pmf.mean();
            m.sigma2(i, j) = pmf.variance();
        }
    }
    return m;
}

RealMatrix limiting_variance(const TrafficSpec& spec) {
    if (spec.family().rebuildable()) return moments(spec.with_eps(0.0)).sigma2;
    return moments(spec).sigma2;
}

ArrivalSampler::ArrivalSampler(const TrafficSpec& spec, std::uint64_t seed) : n_(spec.n()) {
    dists_.reserve(n_ * n_);
    streams_.reserve(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            dists_.push_back(spec.dist(i, j));
            streams_.emplace_back(derive_seed(seed, {i, j}));
        }
    }
}

void ArrivalSampler::sample(ArrivalMatrix& out) {
    if (out.n() != n_) out = ArrivalMatrix(n_);
    auto flat = out.flat();
    for (std::size_t k = 0; k < flat.size(); ++k) flat[k] = dists_[k].sample(uniform01(streams_[k]));
}

ArrivalMatrix ArrivalSampler::sample() {
    ArrivalMatrix out(n_);
    sample(out);
    return out;
}

}  // namespace iqswitch
