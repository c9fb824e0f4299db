#include <doctest.h>

#include "iqswitch/analytics.hpp"
#include "iqswitch/error.hpp"

using namespace iqswitch;

namespace {

// lambda = (1 - eps) nu with nu_ij = 1/(2n) on the unsaturated block and 1/n elsewhere.
RealMatrix block_pattern_nu(std::size_t n, std::size_t n1, std::size_t n2) {
    const double nd = static_cast<double>(n);
    RealMatrix nu(n, 1.0 / nd);
    for (std::size_t i = n1; i < n; ++i)
        for (std::size_t j = n2; j < n; ++j) nu(i, j) = 1.0 / (2.0 * nd);
    return nu;
}

TrafficSpec block_pattern_spec(std::size_t n, std::size_t n1, std::size_t n2, double eps) {
    const auto nu = block_pattern_nu(n, n1, n2);
    return TrafficSpec::create(nu, nu, eps, ArrivalFamily{}, 1, KNormalization::as_given);
}

}  // namespace

TEST_CASE("kingman mean") {
    CHECK(kingman_mean(0.5, 0.25) == doctest::Approx(0.0));
    CHECK(kingman_mean(0.9, 0.495) == doctest::Approx(2.025));
    CHECK(kingman_mean(0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(kingman_mean(1.0, 0.1), ValidationError);
    CHECK_THROWS_AS(kingman_mean(-0.1, 0.1), ValidationError);
    // Increasing in sigma2 everywhere; increasing in lambda only while
    // sigma2 > (1 - lambda)^2, where the derivative is positive.
    for (double l = 0.05; l < 0.95; l += 0.05) {
        for (double s = 0.0; s < 2.0; s += 0.1) {
            CHECK(kingman_mean(l, s + 0.1) > kingman_mean(l, s));
            if (s > (1.0 - l) * (1.0 - l)) CHECK(kingman_mean(l + 0.01, s) > kingman_mean(l, s));
        }
    }
    CHECK(kingman_mean(0.21, 0.2) < kingman_mean(0.2, 0.2));
}

TEST_CASE("universal lower bound for a saturated row") {
    const auto spec = block_pattern_spec(3, 1, 1, 0.1);
    const auto profile = saturation_profile(spec);
    const auto b = universal_lower_bounds(spec, profile);
    CHECK(spec.lambda()(0, 1) == doctest::Approx(0.3));
    CHECK(b.rows[0] == doctest::Approx(2.7));
    CHECK(b.cols[0] == doctest::Approx(2.7));
    CHECK(b.rows_limit[0] == doctest::Approx(3.0 * (2.0 / 9.0) / 2.0));
    CHECK(b.rows_limit[1] == 0.0);
    CHECK(b.cols_limit[2] == 0.0);
}

TEST_CASE("universal lower bound with deterministic arrivals is nonpositive") {
    ArrivalFamily f{ArrivalKind::pmf, 1, {Pmf::point_mass(0)}};
    const auto spec = TrafficSpec::create(RealMatrix(2), RealMatrix(2, 1.0), 0.0, f, 1);
    const auto b = universal_lower_bounds(spec, saturation_profile(spec));
    for (const double v : b.rows) CHECK(v <= 0.0);
}

TEST_CASE("heavy traffic prediction reduces to the Bernoulli closed forms") {
    for (std::size_t n = 2; n <= 8; ++n) {
        for (std::size_t n1 = 0; n1 < n; ++n1) {
            for (std::size_t n2 = 0; n2 < n; ++n2) {
                const auto spec = block_pattern_spec(n, n1, n2, 0.1);
                const auto profile = saturation_profile(spec);
                REQUIRE(profile.n1 == n1);
                REQUIRE(profile.n2 == n2);
                const CollapseFrame frame(n, n1, n2);
                const auto sigma2 = limiting_variance(spec);
                const double nd = static_cast<double>(n);
                const double expected = static_cast<double>(n1 + n2) / 2.0 * (1.0 - 1.0 / nd);
                CHECK(heavy_traffic_prediction(sigma2, frame) == doctest::Approx(expected).epsilon(1e-12));
                const auto bounds = sum_queue_bounds(sigma2, frame, profile);
                CHECK(bounds.ulb == doctest::Approx(static_cast<double>(std::max(n1, n2)) / 2.0 * (1.0 - 1.0 / nd)));
                if (n1 + n2 > 0) {
                    CHECK(bounds.lower == doctest::Approx(expected));
                    CHECK(bounds.upper == doctest::Approx(expected));
                    CHECK(ones_weight_vector(n).valid(profile));
                }
            }
        }
        const RealMatrix uniform(n, 1.0 / static_cast<double>(n));
        const auto spec = TrafficSpec::create(uniform, uniform, 0.1, ArrivalFamily{}, 1);
        const auto sigma2 = limiting_variance(spec);
        const double nd = static_cast<double>(n);
        const double pred = heavy_traffic_prediction(sigma2, CollapseFrame(n, n, n));
        CHECK(pred == doctest::Approx((2.0 * nd - 1.0) / 2.0 * (1.0 - 1.0 / nd)));
        CHECK(pred == doctest::Approx((1.0 - 1.0 / (2.0 * nd)) * sigma2.total()));
    }
    CHECK(heavy_traffic_prediction(RealMatrix(3), CollapseFrame(3, 1, 1)) == 0.0);
}

TEST_CASE("anchors at n = 3 and n = 2") {
    const auto spec = block_pattern_spec(3, 1, 1, 0.05);
    CHECK(heavy_traffic_prediction(limiting_variance(spec), CollapseFrame(3, 1, 1)) == doctest::Approx(2.0 / 3.0));
    CHECK(sum_queue_bounds(limiting_variance(spec), CollapseFrame(3, 1, 1), saturation_profile(spec)).ulb ==
          doctest::Approx(1.0 / 3.0));
    const RealMatrix half(2, 0.5);
    const auto complete = TrafficSpec::create(half, half, 0.1, ArrivalFamily{}, 1);
    CHECK(heavy_traffic_prediction(limiting_variance(complete), CollapseFrame(2, 2, 2)) == doctest::Approx(0.75));
}

TEST_CASE("block weight vector") {
    const auto spec = block_pattern_spec(3, 1, 1, 0.1);
    const auto profile = saturation_profile(spec);
    const CollapseFrame frame(3, 1, 1);
    const auto w = make_weight_vector(profile, frame);
    CHECK(w.alpha(0, 1) == doctest::Approx(1.5));
    CHECK(w.alpha(0, 2) == doctest::Approx(1.5));
    CHECK(w.alpha(1, 0) == doctest::Approx(1.5));
    CHECK(w.alpha(0, 0) == 0.0);
    CHECK(w.alpha(1, 1) == 0.0);
    CHECK(w.alpha.row_sum(0) == doctest::Approx(3.0));
    CHECK_NOTHROW(w.validate(profile));
    CHECK(ones_weight_vector(3).valid(profile));
    CHECK_THROWS_AS(make_weight_vector(profile, CollapseFrame(3, 3, 3)), ValidationError);

    // Non-uniform k: row 1 scaled by 1.5, then normalized.
    RealMatrix k = block_pattern_nu(3, 1, 1);
    for (std::size_t j = 0; j < 3; ++j) k(0, j) *= 1.5;
    const auto skew = TrafficSpec::create(block_pattern_nu(3, 1, 1), k, 0.1, ArrivalFamily{}, 1);
    const auto sp = saturation_profile(skew);
    CHECK(sp.kappa[0] == doctest::Approx(27.0 / 17.0));
    CHECK(sp.kappa_tilde[0] == doctest::Approx(21.0 / 17.0));
    const auto ws = make_weight_vector(sp, frame);
    CHECK_NOTHROW(ws.validate(sp));
    CHECK_FALSE(ones_weight_vector(3).valid(sp));

    const auto none = saturation_profile(block_pattern_spec(3, 0, 0, 0.1));
    CHECK(ones_weight_vector(3).valid(none));
}

TEST_CASE("sum bounds ratio equals the kappa ratio") {
    SaturationProfile p;
    p.n1 = 1;
    p.n2 = 1;
    p.kappa = {0.5, 1.25, 1.25};
    p.kappa_tilde = {1.5, 0.75, 0.75};
    p.kappa_min_saturated = 0.5;
    p.kappa_max_saturated = 1.5;
    const auto b = sum_queue_bounds(RealMatrix(3, 0.2), CollapseFrame(3, 1, 1), p);
    CHECK(b.upper / b.lower == doctest::Approx(3.0));
    p.kappa[0] = 0.0;
    CHECK_THROWS_AS(sum_queue_bounds(RealMatrix(3, 0.2), CollapseFrame(3, 1, 1), p), ValidationError);
}

TEST_CASE("moment bound") {
    CHECK(moment_bound({1.0, 1.0, 1.0, 1}) == doctest::Approx(10.0));
    CHECK(moment_bound({1.0, 1.0, 1.0, 2}) == doctest::Approx(132.0));
    CHECK(moment_bound({2.0, 0.0, 2.0, 1}) == doctest::Approx(16.0));
    CHECK_THROWS_AS(moment_bound({0.0, 1.0, 1.0, 1}), ValidationError);
}
