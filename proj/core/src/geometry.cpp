#include "iqswitch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "iqswitch/error.hpp"

namespace iqswitch {

CollapseFrame::CollapseFrame(std::size_t n, std::size_t n1, std::size_t n2) : n_(n), n1_(n1), n2_(n2) {
    if (n == 0) throw ValidationError("frame: n must be positive");
    if (n1 > n || n2 > n) throw ValidationError("frame: n1, n2 must not exceed n");
    if ((n1 == n) != (n2 == n))
        throw ValidationError("frame: inconsistent saturation (n1 = n forces n2 = n and vice versa)");
}

std::vector<RealMatrix> CollapseFrame::generators() const {
    std::vector<RealMatrix> g;
    g.reserve(n1_ + n2_);
    for (std::size_t i = 0; i < n1_; ++i) g.push_back(row_indicator(n_, i));
    for (std::size_t j = 0; j < n2_; ++j) g.push_back(col_indicator(n_, j));
    return g;
}

namespace {

void check_dims(const RealMatrix& x, const CollapseFrame& frame) {
    if (x.n() != frame.n()) throw ValidationError("projection: dimension mismatch");
}

void fill_parallel(Decomposition& d, const RealMatrix& x) {
    const std::size_t n = x.n();
    d.parallel = RealMatrix(n);
    d.perp = RealMatrix(n);
    d.W = 0.0;
    d.W_tilde = 0.0;
    for (const double v : d.w) d.W += v;
    for (const double v : d.w_tilde) d.W_tilde += v;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d.parallel(i, j) = d.w[i] + d.w_tilde[j];
            d.perp(i, j) = x(i, j) - d.parallel(i, j);
        }
    }
}

// Coefficients (w, w~) of the projection onto S from row sums R and column
// sums C. Incomplete frames solve the orthogonality system
//   n w_i + W~ = R_i (i <= n1),  n w~_j + W = C_j (j <= n2)
// through its aggregated 2x2 form. Complete frames split the constant
// T/n^2 evenly between the two sides.
void subspace_coefficients(std::span<const double> rows, std::span<const double> cols, const CollapseFrame& frame,
                           std::span<double> w, std::span<double> w_tilde) {
    const double n = static_cast<double>(frame.n());
    std::fill(w.begin(), w.end(), 0.0);
    std::fill(w_tilde.begin(), w_tilde.end(), 0.0);
    if (frame.complete()) {
        double total = 0.0;
        for (const double r : rows) total += r;
        const double half = total / (2.0 * n * n);
        for (std::size_t i = 0; i < frame.n(); ++i) {
            w[i] = rows[i] / n - half;
            w_tilde[i] = cols[i] / n - half;
        }
        return;
    }
    const double n1 = static_cast<double>(frame.n1());
    const double n2 = static_cast<double>(frame.n2());
    double sat_rows = 0.0, sat_cols = 0.0;
    for (std::size_t i = 0; i < frame.n1(); ++i) sat_rows += rows[i];
    for (std::size_t j = 0; j < frame.n2(); ++j) sat_cols += cols[j];
    const double denom = n * n - n1 * n2;
    const double W = (n * sat_rows - n1 * sat_cols) / denom;
    const double W_tilde = (n * sat_cols - n2 * sat_rows) / denom;
    for (std::size_t i = 0; i < frame.n1(); ++i) w[i] = (rows[i] - W_tilde) / n;
    for (std::size_t j = 0; j < frame.n2(); ++j) w_tilde[j] = (cols[j] - W) / n;
}

}  // namespace

Decomposition project_subspace(const RealMatrix& x, const CollapseFrame& frame) {
    check_dims(x, frame);
    const std::size_t n = x.n();
    std::vector<double> rows(n), cols(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] = x.row_sum(i);
        cols[i] = x.col_sum(i);
    }
    Decomposition d;
    d.w.assign(n, 0.0);
    d.w_tilde.assign(n, 0.0);
    subspace_coefficients(rows, cols, frame, d.w, d.w_tilde);
    fill_parallel(d, x);
    return d;
}

Decomposition project_cone(const RealMatrix& x, const CollapseFrame& frame) {
    check_dims(x, frame);
    const std::size_t n = x.n();
    const std::size_t m = frame.n1() + frame.n2();
    Decomposition d;
    d.w.assign(n, 0.0);
    d.w_tilde.assign(n, 0.0);
    if (m == 0) {
        fill_parallel(d, x);
        return d;
    }

    // Generator g < n1 is e^(g); otherwise e~^(g - n1).
    auto is_row = [&](std::size_t g) { return g < frame.n1(); };
    Eigen::MatrixXd gram(m, m);
    Eigen::VectorXd b(m);
    for (std::size_t a = 0; a < m; ++a) {
        b(a) = is_row(a) ? x.row_sum(a) : x.col_sum(a - frame.n1());
        for (std::size_t c = 0; c < m; ++c) {
            if (is_row(a) != is_row(c)) gram(a, c) = 1.0;
            else gram(a, c) = (a == c) ? static_cast<double>(n) : 0.0;
        }
    }

    // Lawson-Hanson active set on min 1/2 c'Gc - b'c, c >= 0.
    const double tol = 1e-13 * (1.0 + b.cwiseAbs().maxCoeff()) * static_cast<double>(n);
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(m);
    std::vector<bool> passive(m, false);
    const std::size_t cap = 100 * m;
    std::size_t iterations = 0;

    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<Eigen::Index> idx;
        for (std::size_t a = 0; a < m; ++a)
            if (passive[a]) idx.push_back(static_cast<Eigen::Index>(a));
        const auto k = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd sub(k, k);
        Eigen::VectorXd rhs(k);
        for (Eigen::Index r = 0; r < k; ++r) {
            rhs(r) = b(idx[r]);
            for (Eigen::Index c = 0; c < k; ++c) sub(r, c) = gram(idx[r], idx[c]);
        }
        const Eigen::VectorXd sol = sub.ldlt().solve(rhs);
        z = Eigen::VectorXd::Zero(m);
        for (Eigen::Index r = 0; r < k; ++r) z(idx[r]) = sol(r);
    };

    for (;;) {
        const Eigen::VectorXd grad = b - gram * coef;
        std::size_t best = m;
        double best_val = tol;
        for (std::size_t a = 0; a < m; ++a) {
            if (!passive[a] && grad(a) > best_val) {
                best_val = grad(a);
                best = a;
            }
        }
        if (best == m) break;
        passive[best] = true;

        for (;;) {
            if (++iterations > cap) throw std::runtime_error("project_cone: NNLS did not converge within iteration cap");
            Eigen::VectorXd z;
            solve_passive(z);
            bool feasible = true;
            for (std::size_t a = 0; a < m; ++a)
                if (passive[a] && z(a) <= 0.0) feasible = false;
            if (feasible) {
                coef = z;
                break;
            }
            double step = 1.0;
            for (std::size_t a = 0; a < m; ++a) {
                if (passive[a] && z(a) <= 0.0) step = std::min(step, coef(a) / (coef(a) - z(a)));
            }
            coef += step * (z - coef);
            for (std::size_t a = 0; a < m; ++a) {
                if (passive[a] && coef(a) <= tol) {
                    passive[a] = false;
                    coef(a) = 0.0;
                }
            }
        }
    }

    for (std::size_t a = 0; a < m; ++a) {
        if (is_row(a)) d.w[a] = coef(a);
        else d.w_tilde[a - frame.n1()] = coef(a);
    }
    fill_parallel(d, x);
    return d;
}

RealMatrix zeta(const CollapseFrame& frame) {
    const std::size_t n = frame.n();
    const double nd = static_cast<double>(n);
    if (frame.complete()) return RealMatrix(n, (2.0 * nd - 1.0) / nd);
    const double n1 = static_cast<double>(frame.n1());
    const double n2 = static_cast<double>(frame.n2());
    const double denom = nd * nd - n1 * n2;
    RealMatrix z(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const bool sat_row = i < frame.n1();
            const bool sat_col = j < frame.n2();
            if (sat_row && sat_col) z(i, j) = 2.0 - (2.0 * nd - n1 - n2) / denom;
            else if (sat_row) z(i, j) = 1.0 + n2 / denom;
            else if (sat_col) z(i, j) = 1.0 + n1 / denom;
        }
    }
    return z;
}

std::vector<RealMatrix> orthonormal_basis(const CollapseFrame& frame) {
    std::vector<RealMatrix> basis;
    for (RealMatrix v : frame.generators()) {
        const double scale = std::sqrt(norm_squared(v));
        // Modified Gram-Schmidt, two passes for stability.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& f : basis) {
                const double c = inner(v, f);
                auto vf = v.flat();
                const auto ff = f.flat();
                for (std::size_t k = 0; k < vf.size(); ++k) vf[k] -= c * ff[k];
            }
        }
        const double len = std::sqrt(norm_squared(v));
        if (len <= 1e-9 * scale) continue;  // dependent generator
        for (auto& e : v.flat()) e /= len;
        basis.push_back(std::move(v));
    }
    return basis;
}

RealMatrix project_onto_basis(const RealMatrix& x, const std::vector<RealMatrix>& basis) {
    RealMatrix out(x.n());
    for (const auto& f : basis) {
        const double c = inner(x, f);
        auto of = out.flat();
        const auto ff = f.flat();
        for (std::size_t k = 0; k < of.size(); ++k) of[k] += c * ff[k];
    }
    return out;
}

PerpNormTracker::PerpNormTracker(const CollapseFrame& frame)
    : frame_(frame), rows_(frame.n()), cols_(frame.n()) {}

double PerpNormTracker::subspace(std::span<const std::uint64_t> q) {
    const std::size_t n = frame_.n();
    if (q.size() != n * n) throw ValidationError("perp norm: dimension mismatch");
    std::fill(rows_.begin(), rows_.end(), 0.0);
    std::fill(cols_.begin(), cols_.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = static_cast<double>(q[i * n + j]);
            rows_[i] += v;
            cols_[j] += v;
        }
    }
    double w[64], wt[64];
    std::vector<double> wbuf, wtbuf;
    std::span<double> ws(w, n), wts(wt, n);
    if (n > 64) {
        wbuf.resize(n);
        wtbuf.resize(n);
        ws = wbuf;
        wts = wtbuf;
    }
    subspace_coefficients(rows_, cols_, frame_, ws, wts);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double r = static_cast<double>(q[i * n + j]) - ws[i] - wts[j];
            sq += r * r;
        }
    }
    return std::sqrt(sq);
}

double PerpNormTracker::cone(std::span<const std::uint64_t> q) const {
    const std::size_t n = frame_.n();
    RealMatrix x(n);
    auto xf = x.flat();
    for (std::size_t k = 0; k < xf.size(); ++k) xf[k] = static_cast<double>(q[k]);
    return std::sqrt(norm_squared(project_cone(x, frame_).perp));
}

}  // namespace iqswitch
