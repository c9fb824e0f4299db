#include <doctest.h>

#include "iqswitch/config.hpp"
#include "iqswitch/error.hpp"

using namespace iqswitch;

TEST_CASE("uniform shorthand") {
    const auto cfg = parse_config(R"({"n": 2, "nu": "uniform", "k": "uniform", "eps": 0.1, "seed": 7})");
    CHECK(cfg.spec.n() == 2);
    CHECK(cfg.spec.nu() == RealMatrix(2, 0.5));
    CHECK(cfg.spec.k() == RealMatrix(2, 0.5));
    CHECK(cfg.seed == 7);
    CHECK(cfg.spec.a_max() == 1);
}

TEST_CASE("explicit matrices are reordered canonically") {
    const auto cfg = parse_config(R"({
        "n": 3,
        "nu": [[0.16666666666666666, 0.3333333333333333, 0.16666666666666666],
               [0.16666666666666666, 0.3333333333333333, 0.16666666666666666],
               [0.3333333333333333, 0.3333333333333333, 0.3333333333333333]],
        "k": "nu", "normalize_k": false, "eps": 0.05,
        "dist": {"kind": "binomial", "trials": 2}
    })");
    CHECK(cfg.row_order == std::vector<int>{2, 0, 1});
    CHECK(cfg.col_order == std::vector<int>{1, 0, 2});
    CHECK(cfg.spec.nu()(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(cfg.spec.k().total() == doctest::Approx(7.0 / 3.0));
    CHECK(cfg.spec.a_max() == 2);
    CHECK(cfg.spec.normalization() == KNormalization::as_given);
}

TEST_CASE("validation messages name the field or invariant") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"n": 2, "nu": [[0.6, 0.6], [0.4, 0.4]]})"),
                         doctest::Contains("capacity region violated: row 1"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"n": 2, "nu": "uniform", "bogus": 1})"), doctest::Contains("bogus"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"n": 2, "nu": [[0.5, 0.5]]})"), doctest::Contains("nu"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"n": 1, "nu": "uniform"})"), doctest::Contains("n:"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"n": 2, "nu": "uniform", "dist": {"kind": "poisson"}})"),
                         doctest::Contains("dist.kind"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"n": 2, "nu": "uniform", "dist": {"kind": "binomial"}})"),
                         doctest::Contains("dist.trials"), ValidationError);
    CHECK_THROWS_AS(parse_config("{not json"), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("user pmf") {
    const auto cfg = parse_config(R"({"n": 2, "nu": [[0.9, 0.0], [0.0, 0.9]], "k": "nu", "eps": 0.0,
                                      "dist": {"kind": "pmf", "pmfs": [[[0.3025, 0.495, 0.2025], [1.0]],
                                                                       [[1.0], [0.3025, 0.495, 0.2025]]]}})");
    CHECK(cfg.spec.a_max() == 2);
    CHECK(cfg.spec.dist(0, 0).variance() == doctest::Approx(0.495));
}
