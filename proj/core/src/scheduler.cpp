#include "iqswitch/scheduler.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <string>

#include "iqswitch/error.hpp"

namespace iqswitch {

const Permutation& AssignmentSolver::solve(const SquareMatrix<std::int64_t>& cost) {
    const int n = static_cast<int>(cost.n());
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

    // 1-based potentials; column 0 is the virtual root of each augmenting tree.
    u_.assign(n + 1, 0);
    v_.assign(n + 1, 0);
    p_.assign(n + 1, 0);
    way_.assign(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p_[0] = i;
        int j0 = 0;
        minv_.assign(n + 1, kInf);
        used_.assign(n + 1, 0);
        do {
            used_[j0] = 1;
            const int i0 = p_[j0];
            std::int64_t delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used_[j]) continue;
                const std::int64_t cur = cost(i0 - 1, j - 1) - u_[i0] - v_[j];
                if (cur < minv_[j]) {
                    minv_[j] = cur;
                    way_[j] = j0;
                }
                if (minv_[j] < delta) {
                    delta = minv_[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used_[j]) {
                    u_[p_[j]] += delta;
                    v_[j] -= delta;
                } else {
                    minv_[j] -= delta;
                }
            }
            j0 = j1;
        } while (p_[j0] != 0);
        do {
            const int j1 = way_[j0];
            p_[j0] = p_[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    result_.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p_[j] != 0) result_[p_[j] - 1] = j - 1;
    return result_;
}

ScheduleMatrix MaxWeightScheduler::schedule(const QueueMatrix& q, Rng& rng) {
    const std::size_t n = q.n();
    row_label_.resize(n);
    col_label_.resize(n);
    std::iota(row_label_.begin(), row_label_.end(), 0);
    std::iota(col_label_.begin(), col_label_.end(), 0);
    std::shuffle(row_label_.begin(), row_label_.end(), rng);
    std::shuffle(col_label_.begin(), col_label_.end(), rng);

    QueueCount top = 0;
    for (const auto v : q.values().flat()) top = std::max(top, v);
    if (top > static_cast<QueueCount>(std::numeric_limits<std::int64_t>::max() / 4))
        throw SimulationError("maxweight: queue length exceeds solver range");

    // Maximization as minimization of (max - q) >= 0 in the relabeled frame.
    if (cost_.n() != n) cost_ = SquareMatrix<std::int64_t>(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            cost_(a, b) = static_cast<std::int64_t>(top - q(row_label_[a], col_label_[b]));

    const Permutation& relabeled = solver_.solve(cost_);

    SquareMatrix<std::uint8_t> s(n);
    for (std::size_t a = 0; a < n; ++a) {
        if (relabeled[a] < 0) continue;
        s(row_label_[a], col_label_[relabeled[a]]) = 1;
    }
    ScheduleMatrix result(std::move(s));
    if (!result.is_maximal()) {
        ScheduleMatrix completed = complete_to_maximal(result);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (completed(i, j) && !result(i, j) && q(i, j) != 0)
                    throw SimulationError("maxweight: completion added a nonempty link");
        return completed;
    }
    return result;
}

ScheduleMatrix maxweight(const QueueMatrix& q, Rng& rng) {
    MaxWeightScheduler scheduler;
    return scheduler.schedule(q, rng);
}

BruteForceResult maxweight_bruteforce(const QueueMatrix& q) {
    const std::size_t n = q.n();
    if (n > kBruteForceMaxN)
        throw ValidationError("maxweight_bruteforce: n=" + std::to_string(n) + " too large for enumeration (max " +
                              std::to_string(kBruteForceMaxN) + ")");
    Permutation perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    BruteForceResult result;
    bool first = true;
    do {
        std::uint64_t w = 0;
        for (std::size_t i = 0; i < n; ++i) w += q(i, static_cast<std::size_t>(perm[i]));
        if (first || w > result.max_weight) {
            result.max_weight = w;
            result.argmax.clear();
            result.argmax.push_back(perm);
            first = false;
        } else if (w == result.max_weight) {
            result.argmax.push_back(perm);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return result;
}

const Permutation& sample_argmax(const BruteForceResult& result, Rng& rng) {
    assert(!result.argmax.empty());
    std::uniform_int_distribution<std::size_t> pick(0, result.argmax.size() - 1);
    return result.argmax[pick(rng)];
}

}  // namespace iqswitch
