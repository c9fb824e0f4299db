#ifndef IQSWITCH_MATRIX_HPP
#define IQSWITCH_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace iqswitch {

// Dense n x n matrix in row-major order. Switch state, rates and schedules
// are all vectors in R^{n^2} that are easier to read as matrices.
template <typename T>
class SquareMatrix {
public:
    using value_type = T;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

    SquareMatrix(std::initializer_list<std::initializer_list<T>> rows) : n_(rows.size()) {
        data_.reserve(n_ * n_);
        for (const auto& row : rows) {
            if (row.size() != n_) {
                throw std::invalid_argument("SquareMatrix: ragged initializer");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static SquareMatrix identity(std::size_t n) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t size() const noexcept { return data_.size(); }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    std::span<T> flat() noexcept { return data_; }
    std::span<const T> flat() const noexcept { return data_; }

    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }

    T row_sum(std::size_t i) const {
        const auto r = row(i);
        return std::accumulate(r.begin(), r.end(), T{});
    }

    T col_sum(std::size_t j) const {
        T s{};
        for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
        return s;
    }

    T total() const { return std::accumulate(data_.begin(), data_.end(), T{}); }

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

using RealMatrix = SquareMatrix<double>;

template <typename T, typename U>
double inner(const SquareMatrix<T>& a, const SquareMatrix<U>& b) {
    if (a.n() != b.n()) throw std::invalid_argument("inner: dimension mismatch");
    double s = 0.0;
    const auto fa = a.flat();
    const auto fb = b.flat();
    for (std::size_t k = 0; k < fa.size(); ++k) s += static_cast<double>(fa[k]) * static_cast<double>(fb[k]);
    return s;
}

template <typename T>
double norm_squared(const SquareMatrix<T>& a) {
    return inner(a, a);
}

template <typename T>
RealMatrix to_real(const SquareMatrix<T>& a) {
    RealMatrix out(a.n());
    const auto src = a.flat();
    auto dst = out.flat();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = static_cast<double>(src[k]);
    return out;
}

// Indicator of row i (e^(i)) or column j (e~^(j)).
inline RealMatrix row_indicator(std::size_t n, std::size_t i) {
    RealMatrix m(n);
    for (std::size_t j = 0; j < n; ++j) m(i, j) = 1.0;
    return m;
}

inline RealMatrix col_indicator(std::size_t n, std::size_t j) {
    RealMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = 1.0;
    return m;
}

inline RealMatrix unit_matrix(std::size_t n, std::size_t i, std::size_t j) {
    RealMatrix m(n);
    m(i, j) = 1.0;
    return m;
}

}  // namespace iqswitch

#endif  // IQSWITCH_MATRIX_HPP
