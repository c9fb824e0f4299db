#ifndef IQSWITCH_GEOMETRY_HPP
#define IQSWITCH_GEOMETRY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "iqswitch/matrix.hpp"

namespace iqswitch {

// Saturated rows 1..n1 and columns 1..n2 (canonical order). Spans the
// collapse subspace S = span{e^(i), e~^(j)} and cone K = cone{e^(i), e~^(j)}.
class CollapseFrame {
public:
    // Throws ValidationError unless (n1 < n and n2 < n) or n1 = n2 = n.
    CollapseFrame(std::size_t n, std::size_t n1, std::size_t n2);

    std::size_t n() const noexcept { return n_; }
    std::size_t n1() const noexcept { return n1_; }
    std::size_t n2() const noexcept { return n2_; }
    bool complete() const noexcept { return n1_ == n_ && n2_ == n_; }
    // n1 + n2, or 2n - 1 when complete (the generators are then dependent).
    std::size_t dimension() const noexcept { return complete() ? 2 * n_ - 1 : n1_ + n2_; }

    // e^(1..n1) followed by e~^(1..n2).
    std::vector<RealMatrix> generators() const;

    bool operator==(const CollapseFrame&) const = default;

private:
    std::size_t n_, n1_, n2_;
};

// x = parallel + perp with parallel_ij = w_i + w~_j.
struct Decomposition {
    RealMatrix parallel;
    RealMatrix perp;
    std::vector<double> w;        // zero for i > n1
    std::vector<double> w_tilde;  // zero for j > n2
    double W = 0.0;               // sum of w
    double W_tilde = 0.0;         // sum of w~
};

// Orthogonal projection onto S in closed form, O(n^2).
Decomposition project_subspace(const RealMatrix& x, const CollapseFrame& frame);

inline constexpr double kConeKktTol = 1e-8;

// Euclidean projection onto K by active-set nonnegative least squares on the
// generator coefficients. Throws std::runtime_error past the iteration cap.
Decomposition project_cone(const RealMatrix& x, const CollapseFrame& frame);

// zeta_ij = n * ||chi^(ij)_parallel S||^2. Incomplete frames use the block
// formula; complete frames return the constant (2n - 1) / n.
RealMatrix zeta(const CollapseFrame& frame);

// Gram-Schmidt over the generators; dimension() matrices.
std::vector<RealMatrix> orthonormal_basis(const CollapseFrame& frame);

// sum_l <x, f_l> f_l for an orthonormal list f.
RealMatrix project_onto_basis(const RealMatrix& x, const std::vector<RealMatrix>& basis);

// ||x_perp S|| for integer queue vectors without allocating per call.
class PerpNormTracker {
public:
    explicit PerpNormTracker(const CollapseFrame& frame);

    double subspace(std::span<const std::uint64_t> q);
    // Cone version; allocates, meant for optional tracking.
    double cone(std::span<const std::uint64_t> q) const;

private:
    CollapseFrame frame_;
    std::vector<double> rows_, cols_;
};

}  // namespace iqswitch

#endif  // IQSWITCH_GEOMETRY_HPP
