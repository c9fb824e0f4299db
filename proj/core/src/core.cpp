#include "iqswitch/core.hpp"

#include <limits>
#include <string>

#include "iqswitch/error.hpp"

namespace iqswitch {

QueueMatrix::QueueMatrix(std::size_t n) : q_(n) {
    if (n == 0) throw ValidationError("QueueMatrix: n must be positive");
}

QueueMatrix::QueueMatrix(SquareMatrix<QueueCount> q) : q_(std::move(q)) {
    if (q_.n() == 0) throw ValidationError("QueueMatrix: n must be positive");
}

ScheduleMatrix::ScheduleMatrix(SquareMatrix<std::uint8_t> s) : s_(std::move(s)) {
    const std::size_t n = s_.n();
    if (n == 0) throw ValidationError("ScheduleMatrix: n must be positive");
    std::vector<int> col(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        int row = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto v = s_(i, j);
            if (v > 1) throw ValidationError("infeasible schedule: entry (" + std::to_string(i + 1) + "," +
                                             std::to_string(j + 1) + ") is not 0/1");
            row += v;
            col[j] += v;
        }
        if (row > 1) throw ValidationError("infeasible schedule: row " + std::to_string(i + 1) + " sum exceeds 1");
    }
    for (std::size_t j = 0; j < n; ++j)
        if (col[j] > 1) throw ValidationError("infeasible schedule: column " + std::to_string(j + 1) + " sum exceeds 1");
}

ScheduleMatrix ScheduleMatrix::empty(std::size_t n) { return ScheduleMatrix(SquareMatrix<std::uint8_t>(n)); }

ScheduleMatrix ScheduleMatrix::from_permutation(const std::vector<int>& perm) {
    SquareMatrix<std::uint8_t> s(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] < 0 || static_cast<std::size_t>(perm[i]) >= perm.size())
            throw ValidationError("from_permutation: index out of range");
        s(i, static_cast<std::size_t>(perm[i])) = 1;
    }
    return ScheduleMatrix(std::move(s));
}

bool ScheduleMatrix::is_maximal() const {
    for (std::size_t i = 0; i < n(); ++i)
        if (s_.row_sum(i) != 1 || s_.col_sum(i) != 1) return false;
    return true;
}

std::vector<int> ScheduleMatrix::to_permutation() const {
    std::vector<int> perm(n(), -1);
    for (std::size_t i = 0; i < n(); ++i)
        for (std::size_t j = 0; j < n(); ++j)
            if (s_(i, j)) perm[i] = static_cast<int>(j);
    return perm;
}

bool ScheduleMatrix::contains(const ScheduleMatrix& other) const {
    if (other.n() != n()) return false;
    for (std::size_t i = 0; i < n(); ++i)
        for (std::size_t j = 0; j < n(); ++j)
            if (other(i, j) > (*this)(i, j)) return false;
    return true;
}

std::uint64_t integer_weight(const QueueMatrix& q, const ScheduleMatrix& s) {
    if (q.n() != s.n()) throw ValidationError("weight: dimension mismatch");
    std::uint64_t w = 0;
    for (std::size_t i = 0; i < q.n(); ++i)
        for (std::size_t j = 0; j < q.n(); ++j)
            if (s(i, j)) w += q(i, j);
    return w;
}

namespace {

void check_step_inputs(const QueueMatrix& q, const ArrivalMatrix& a, const ScheduleMatrix& s, std::uint64_t a_max) {
    if (a.n() != q.n() || s.n() != q.n()) throw ValidationError("step: dimension mismatch");
    const auto fa = a.flat();
    for (std::size_t k = 0; k < fa.size(); ++k)
        if (fa[k] > a_max)
            throw ValidationError("step: arrival " + std::to_string(fa[k]) + " exceeds a_max " + std::to_string(a_max));
}

}  // namespace

StepOutcome step(const QueueMatrix& q, const ArrivalMatrix& a, const ScheduleMatrix& s, std::uint64_t a_max) {
    check_step_inputs(q, a, s, a_max);
    const std::size_t n = q.n();
    StepOutcome out{q, SquareMatrix<std::uint8_t>(n), SquareMatrix<std::uint8_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const QueueCount level = q(i, j);
            const std::uint64_t arrivals = a(i, j);
            if (level > std::numeric_limits<QueueCount>::max() - arrivals)
                throw SimulationError("step: queue overflow");
            const QueueCount loaded = level + arrivals;
            if (s(i, j) && loaded == 0) {
                out.unused(i, j) = 1;
                out.next_q(i, j) = 0;
            } else if (s(i, j)) {
                out.departures(i, j) = 1;
                out.next_q(i, j) = loaded - 1;
            } else {
                out.next_q(i, j) = loaded;
            }
        }
    }
    return out;
}

StepCounts apply_step(QueueMatrix& q, const ArrivalMatrix& a, const ScheduleMatrix& s, std::uint64_t a_max) {
    check_step_inputs(q, a, s, a_max);
    StepCounts counts;
    const std::size_t n = q.n();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t arrivals = a(i, j);
            QueueCount& level = q(i, j);
            if (level > std::numeric_limits<QueueCount>::max() - arrivals)
                throw SimulationError("step: queue overflow");
            level += arrivals;
            counts.arrivals += arrivals;
            if (s(i, j)) {
                if (level == 0) {
                    ++counts.unused;
                } else {
                    --level;
                    ++counts.departures;
                }
            }
        }
    }
    return counts;
}

ScheduleMatrix complete_to_maximal(const ScheduleMatrix& s) {
    const std::size_t n = s.n();
    SquareMatrix<std::uint8_t> out = s.values();
    std::vector<bool> col_used(n, false);
    std::vector<bool> row_used(n, false);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (out(i, j)) {
                row_used[i] = true;
                col_used[j] = true;
            }
    // Every free row has a free column because the counts match.
    for (std::size_t i = 0; i < n; ++i) {
        if (row_used[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (!col_used[j]) {
                out(i, j) = 1;
                col_used[j] = true;
                break;
            }
        }
    }
    return ScheduleMatrix(std::move(out));
}

}  // namespace iqswitch
