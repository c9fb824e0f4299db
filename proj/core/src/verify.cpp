#include "iqswitch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "iqswitch/error.hpp"
#include "iqswitch/geometry.hpp"
#include "iqswitch/rng.hpp"
#include "iqswitch/scheduler.hpp"

namespace iqswitch {

namespace {

std::vector<CollapseFrame> frames_up_to(std::size_t max_n) {
    std::vector<CollapseFrame> out;
    for (std::size_t n = 2; n <= max_n; ++n) {
        for (std::size_t n1 = 0; n1 < n; ++n1)
            for (std::size_t n2 = 0; n2 < n; ++n2) out.emplace_back(n, n1, n2);
        out.emplace_back(n, n, n);
    }
    return out;
}

RealMatrix random_matrix(std::size_t n, Rng& rng, bool nonnegative) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    RealMatrix x(n);
    for (auto& v : x.flat()) v = nonnegative ? std::abs(gauss(rng)) : gauss(rng);
    return x;
}

double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a.flat()[k] - b.flat()[k]));
    return worst;
}

struct Tracker {
    CheckResult r;
    Tracker(std::string name, double tol) { r.name = std::move(name), r.tolerance = tol; }
    void add(double residual) {
        ++r.cases;
        if (!(residual <= r.worst_residual)) r.worst_residual = std::isnan(residual) ? INFINITY : residual;
    }
    CheckResult done() {
        r.passed = r.worst_residual <= r.tolerance;
        return r;
    }
};

}  // namespace

std::vector<CheckResult> run_geometry_checks(const VerifyOptions& opts) {
    if (opts.max_n < 2 || opts.max_n > kBruteForceMaxN)
        throw ValidationError("verify: max-n must lie in [2, " + std::to_string(kBruteForceMaxN) + "]");
    Rng rng(derive_seed(opts.seed, {0x7e1f}));
    const auto frames = frames_up_to(opts.max_n);

    Tracker unit_norm("unit projection norm = zeta/n", 1e-12);
    Tracker oracle("closed form vs basis oracle", 1e-10);
    Tracker expansion("norm expansion in w, W", 1e-10);
    Tracker dims("dimension count", 1e-10);
    Tracker kkt("cone projection optimality", kConeKktTol);
    Tracker orthant("cone = subspace on the orthant", 1e-8);

    for (const auto& frame : frames) {
        const std::size_t n = frame.n();
        const auto basis = orthonormal_basis(frame);
        RealMatrix z = zeta(frame);
        z(0, 0) += opts.zeta_perturbation;

        dims.add(basis.size() == frame.dimension() ? 0.0 : 1.0);
        double zsum = 0.0;
        for (const double v : z.flat()) zsum += v;
        dims.add(std::abs(zsum - static_cast<double>(n * frame.dimension())));

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double sq = 0.0;
                for (const auto& f : basis) sq += f(i, j) * f(i, j);
                unit_norm.add(std::abs(sq - z(i, j) / static_cast<double>(n)));
            }
        }

        for (std::size_t t = 0; t < opts.trials; ++t) {
            const RealMatrix x = random_matrix(n, rng, false);
            const Decomposition d = project_subspace(x, frame);
            oracle.add(max_abs_diff(d.parallel, project_onto_basis(x, basis)));
            double wsq = 0.0, wtsq = 0.0;
            for (const double v : d.w) wsq += v * v;
            for (const double v : d.w_tilde) wtsq += v * v;
            const double nd = static_cast<double>(n);
            expansion.add(std::abs(norm_squared(d.parallel) - (nd * wsq + nd * wtsq + 2.0 * d.W * d.W_tilde)));

            const Decomposition c = project_cone(x, frame);
            double worst = std::abs(inner(c.perp, c.parallel));
            for (const auto& g : frame.generators()) worst = std::max(worst, inner(c.perp, g));
            for (const double v : c.w) worst = std::max(worst, -v);
            for (const double v : c.w_tilde) worst = std::max(worst, -v);
            kkt.add(worst);

            if (!frame.complete()) {
                const RealMatrix y = random_matrix(n, rng, true);
                const Decomposition ys = project_subspace(y, frame);
                if (std::all_of(ys.parallel.flat().begin(), ys.parallel.flat().end(), [](double v) { return v >= 0.0; }))
                    orthant.add(max_abs_diff(ys.parallel, project_cone(y, frame).parallel));
            }
        }
    }

    Tracker matching("maxweight = enumeration", 0.0);
    MaxWeightScheduler scheduler;
    for (std::size_t n = 2; n <= opts.max_n; ++n) {
        std::uniform_int_distribution<std::uint64_t> entry(0, 20);
        for (std::size_t t = 0; t < opts.trials; ++t) {
            QueueMatrix q(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) q(i, j) = entry(rng);
            const auto s = scheduler.schedule(q, rng);
            const auto best = maxweight_bruteforce(q).max_weight;
            const auto got = integer_weight(q, s);
            matching.add(s.is_maximal() ? std::abs(static_cast<double>(best) - static_cast<double>(got)) : 1.0);
        }
    }

    return {unit_norm.done(), oracle.done(), expansion.done(), dims.done(), kkt.done(), orthant.done(), matching.done()};
}

}  // namespace iqswitch
