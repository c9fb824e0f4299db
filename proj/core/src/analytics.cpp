#include "iqswitch/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iqswitch/error.hpp"

namespace iqswitch {

double kingman_mean(double lambda, double sigma2) {
    if (!(lambda >= 0.0)) throw ValidationError("kingman_mean: lambda must be nonnegative");
    if (lambda >= 1.0) throw ValidationError("kingman_mean: unstable queue (lambda >= 1)");
    if (!(sigma2 >= 0.0)) throw ValidationError("kingman_mean: sigma2 must be nonnegative");
    return sigma2 / (2.0 * (1.0 - lambda)) - lambda / 2.0;
}

LowerBounds universal_lower_bounds(const TrafficSpec& spec, const SaturationProfile& profile) {
    const std::size_t n = spec.n();
    const RealMatrix sigma2 = moments(spec).sigma2;
    const RealMatrix sigma2_limit = limiting_variance(spec);
    LowerBounds b;
    b.rows.resize(n);
    b.cols.resize(n);
    b.rows_limit.assign(n, 0.0);
    b.cols_limit.assign(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        const double g = profile.gamma[p];
        const double gt = profile.gamma_tilde[p];
        if (!(g > 0.0)) throw ValidationError("universal lower bound: gamma <= 0 at row " + std::to_string(p + 1));
        if (!(gt > 0.0)) throw ValidationError("universal lower bound: gamma <= 0 at column " + std::to_string(p + 1));
        b.rows[p] = sigma2.row_sum(p) / (2.0 * g) - (1.0 - g) / 2.0;
        b.cols[p] = sigma2.col_sum(p) / (2.0 * gt) - (1.0 - gt) / 2.0;
        if (p < profile.n1) b.rows_limit[p] = sigma2_limit.row_sum(p) / (2.0 * profile.kappa[p]);
        if (p < profile.n2) b.cols_limit[p] = sigma2_limit.col_sum(p) / (2.0 * profile.kappa_tilde[p]);
    }
    return b;
}

double heavy_traffic_prediction(const RealMatrix& sigma2, const CollapseFrame& frame) {
    if (sigma2.n() != frame.n()) throw ValidationError("prediction: dimension mismatch");
    return 0.5 * inner(sigma2, zeta(frame));
}

void WeightVector::validate(const SaturationProfile& profile, double tol) const {
    const std::size_t n = alpha.n();
    if (profile.kappa.size() != n) throw ValidationError("weight vector: dimension mismatch");
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < profile.n1; ++i) {
        if (std::abs(alpha.row_sum(i) - nd * profile.kappa[i]) > tol)
            throw ValidationError("weight vector: <alpha, e^(" + std::to_string(i + 1) + ")> != n kappa");
    }
    for (std::size_t j = 0; j < profile.n2; ++j) {
        if (std::abs(alpha.col_sum(j) - nd * profile.kappa_tilde[j]) > tol)
            throw ValidationError("weight vector: <alpha, e~^(" + std::to_string(j + 1) + ")> != n kappa~");
    }
}

bool WeightVector::valid(const SaturationProfile& profile, double tol) const {
    try {
        validate(profile, tol);
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

WeightVector make_weight_vector(const SaturationProfile& profile, const CollapseFrame& frame) {
    if (frame.complete()) throw ValidationError("weight vector: block construction needs n1, n2 < n");
    const std::size_t n = frame.n();
    const double nd = static_cast<double>(n);
    WeightVector w{RealMatrix(n)};
    for (std::size_t i = 0; i < frame.n1(); ++i)
        for (std::size_t j = frame.n2(); j < n; ++j)
            w.alpha(i, j) = nd * profile.kappa[i] / static_cast<double>(n - frame.n2());
    for (std::size_t j = 0; j < frame.n2(); ++j)
        for (std::size_t i = frame.n1(); i < n; ++i)
            w.alpha(i, j) = nd * profile.kappa_tilde[j] / static_cast<double>(n - frame.n1());
    return w;
}

WeightVector ones_weight_vector(std::size_t n) { return WeightVector{RealMatrix(n, 1.0)}; }

SumQueueBounds sum_queue_bounds(const RealMatrix& sigma2, const CollapseFrame& frame,
                                const SaturationProfile& profile) {
    const std::size_t n = frame.n();
    if (sigma2.n() != n || profile.kappa.size() != n) throw ValidationError("sum bounds: dimension mismatch");
    SumQueueBounds b;
    if (frame.n1() + frame.n2() == 0) return b;
    for (std::size_t i = 0; i < frame.n1(); ++i)
        if (!(profile.kappa[i] > 0.0))
            throw ValidationError("sum bounds: kappa <= 0 at saturated row " + std::to_string(i + 1));
    for (std::size_t j = 0; j < frame.n2(); ++j)
        if (!(profile.kappa_tilde[j] > 0.0))
            throw ValidationError("sum bounds: kappa~ <= 0 at saturated column " + std::to_string(j + 1));

    const double s = inner(sigma2, zeta(frame));
    b.lower = s / (2.0 * profile.kappa_max_saturated);
    b.upper = s / (2.0 * profile.kappa_min_saturated);
    for (std::size_t i = 0; i < frame.n1(); ++i) b.ulb_rows += sigma2.row_sum(i) / profile.kappa[i];
    for (std::size_t j = 0; j < frame.n2(); ++j) b.ulb_cols += sigma2.col_sum(j) / profile.kappa_tilde[j];
    b.ulb_rows /= 2.0;
    b.ulb_cols /= 2.0;
    b.ulb = std::max(b.ulb_rows, b.ulb_cols);
    return b;
}

double moment_bound(const DriftParams& p) {
    if (!(p.eta > 0.0)) throw ValidationError("moment bound: eta must be positive");
    if (!(p.D > 0.0)) throw ValidationError("moment bound: D must be positive");
    if (p.zeta_drift < 0.0) throw ValidationError("moment bound: drift threshold must be nonnegative");
    if (p.r == 0) throw ValidationError("moment bound: r must be a positive integer");
    const double r = static_cast<double>(p.r);
    return std::pow(2.0 * p.zeta_drift, r) + std::pow(4.0 * p.D, r) * std::pow((p.D + p.eta) / p.eta, r) * std::tgamma(r + 1.0);
}

}  // namespace iqswitch
