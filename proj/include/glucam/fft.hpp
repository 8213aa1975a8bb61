#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "glucam/core.hpp"

namespace glucam::fft {

using cd = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 transform. sign = -1 forward, +1 inverse
/// (no scaling).
inline void radix2(std::vector<cd>& a, int sign) {
    const std::size_t n = a.size();
    if (n < 2) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cd u = a[i + j];
                const cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

/// Bluestein chirp-z transform for arbitrary n, via a power-of-two
/// convolution. Chirp angles use k^2 mod 2n to keep the argument small.
inline void bluestein(std::vector<cd>& a, int sign) {
    const std::size_t n = a.size();
    const std::size_t m = next_pow2(2 * n - 1);

    std::vector<cd> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cd(std::cos(ang), std::sin(ang));
    }

    std::vector<cd> x(m, cd(0, 0)), y(m, cd(0, 0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);

    radix2(x, -1);
    radix2(y, -1);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    radix2(x, +1);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * inv_m * chirp[k];
}

inline void transform(std::vector<cd>& a, int sign) {
    if (a.size() < 2) return;
    if (is_pow2(a.size())) {
        radix2(a, sign);
    } else {
        bluestein(a, sign);
    }
}

}  // namespace detail

/// Forward DFT, X[k] = sum_j x[j] exp(-2*pi*i*j*k/n). No scaling.
inline void fft_inplace(std::vector<cd>& a) { detail::transform(a, -1); }

/// Inverse DFT with 1/n scaling.
inline void ifft_inplace(std::vector<cd>& a) {
    detail::transform(a, +1);
    const double inv_n = 1.0 / static_cast<double>(a.size());
    for (cd& v : a) v *= inv_n;
}

}  // namespace glucam::fft
