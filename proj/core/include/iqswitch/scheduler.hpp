#ifndef IQSWITCH_SCHEDULER_HPP
#define IQSWITCH_SCHEDULER_HPP

#include <cstdint>
#include <vector>

#include "iqswitch/core.hpp"
#include "iqswitch/rng.hpp"

namespace iqswitch {

using Permutation = std::vector<int>;

// Minimum-cost perfect assignment on an n x n integer cost matrix,
// O(n^3) shortest augmenting paths with potentials. Exact on integers.
class AssignmentSolver {
public:
    // Returns perm with perm[row] = column.
    const Permutation& solve(const SquareMatrix<std::int64_t>& cost);

private:
    std::vector<std::int64_t> u_, v_, minv_;
    std::vector<int> p_, way_;
    std::vector<char> used_;
    Permutation result_;
};

// MaxWeight: picks a permutation maximizing <q, s>. Ties are broken by
// relabeling rows and columns with two uniform random permutations before
// solving, which is exactly uniform when q is constant and label-symmetric
// otherwise.
class MaxWeightScheduler {
public:
    ScheduleMatrix schedule(const QueueMatrix& q, Rng& rng);

private:
    AssignmentSolver solver_;
    std::vector<int> row_label_, col_label_;
    SquareMatrix<std::int64_t> cost_;
};

ScheduleMatrix maxweight(const QueueMatrix& q, Rng& rng);

struct BruteForceResult {
    std::uint64_t max_weight = 0;
    std::vector<Permutation> argmax;  // lexicographic order
};

inline constexpr std::size_t kBruteForceMaxN = 8;

// Enumerates all n! permutations. Throws ValidationError for n > 8.
BruteForceResult maxweight_bruteforce(const QueueMatrix& q);

// Exactly uniform draw from the argmax set.
const Permutation& sample_argmax(const BruteForceResult& result, Rng& rng);

}  // namespace iqswitch

#endif  // IQSWITCH_SCHEDULER_HPP
