#ifndef IQSWITCH_CORE_HPP
#define IQSWITCH_CORE_HPP

#include <cstdint>
#include <vector>

#include "iqswitch/matrix.hpp"

namespace iqswitch {

using QueueCount = std::uint64_t;
using ArrivalMatrix = SquareMatrix<std::uint64_t>;

// Queue lengths q(t): n x n nonnegative packet counts.
class QueueMatrix {
public:
    explicit QueueMatrix(std::size_t n);
    explicit QueueMatrix(SquareMatrix<QueueCount> q);

    std::size_t n() const noexcept { return q_.n(); }
    QueueCount operator()(std::size_t i, std::size_t j) const noexcept { return q_(i, j); }
    QueueCount& operator()(std::size_t i, std::size_t j) noexcept { return q_(i, j); }

    const SquareMatrix<QueueCount>& values() const noexcept { return q_; }
    QueueCount total() const { return q_.total(); }

    bool operator==(const QueueMatrix&) const = default;

private:
    SquareMatrix<QueueCount> q_;
};

// A feasible schedule: 0/1 entries with every row and column sum at most one.
class ScheduleMatrix {
public:
    // Throws ValidationError if `s` is not a feasible schedule.
    explicit ScheduleMatrix(SquareMatrix<std::uint8_t> s);

    static ScheduleMatrix empty(std::size_t n);
    // perm[i] = output port matched to input i.
    static ScheduleMatrix from_permutation(const std::vector<int>& perm);

    std::size_t n() const noexcept { return s_.n(); }
    std::uint8_t operator()(std::size_t i, std::size_t j) const noexcept { return s_(i, j); }
    const SquareMatrix<std::uint8_t>& values() const noexcept { return s_; }

    // Every row and column sum equals one.
    bool is_maximal() const;
    // Only meaningful for maximal schedules.
    std::vector<int> to_permutation() const;

    bool contains(const ScheduleMatrix& other) const;

    bool operator==(const ScheduleMatrix&) const = default;

private:
    SquareMatrix<std::uint8_t> s_;
};

template <typename T>
double weight(const QueueMatrix& q, const T& s) {
    double w = 0.0;
    for (std::size_t i = 0; i < q.n(); ++i)
        for (std::size_t j = 0; j < q.n(); ++j) w += static_cast<double>(q(i, j)) * s(i, j);
    return w;
}

std::uint64_t integer_weight(const QueueMatrix& q, const ScheduleMatrix& s);

struct StepOutcome {
    QueueMatrix next_q;
    SquareMatrix<std::uint8_t> unused;
    SquareMatrix<std::uint8_t> departures;
};

// One slot of q(t+1) = [q + a - s]^+ = q + a - s + u.
// Throws ValidationError on dimension mismatch or a_ij > a_max, and
// SimulationError if a queue would overflow 64 bits.
StepOutcome step(const QueueMatrix& q, const ArrivalMatrix& a, const ScheduleMatrix& s,
                 std::uint64_t a_max = UINT64_MAX);

struct StepCounts {
    std::uint64_t arrivals = 0;
    std::uint64_t departures = 0;
    std::uint64_t unused = 0;
};

// In-place form of step() for the simulation hot loop. Same checks.
StepCounts apply_step(QueueMatrix& q, const ArrivalMatrix& a, const ScheduleMatrix& s, std::uint64_t a_max);

// Extends a feasible schedule to a permutation by greedy row-major
// augmentation. Existing links are kept.
ScheduleMatrix complete_to_maximal(const ScheduleMatrix& s);

}  // namespace iqswitch

#endif  // IQSWITCH_CORE_HPP
