#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

namespace gelpad::linalg {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

// Gaussian elimination with partial pivoting. nullopt when singular.
template <std::size_t N>
std::optional<Vec<N>> solve(Mat<N> a, Vec<N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < N; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (!(std::abs(a[pivot][col]) > 1e-300)) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    Vec<N> x{};
    for (std::size_t i = N; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < N; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    for (double v : x) {
        if (!std::isfinite(v)) return std::nullopt;
    }
    return x;
}

}  // namespace gelpad::linalg
