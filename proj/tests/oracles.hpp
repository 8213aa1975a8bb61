// Independent reference implementations used by the unit and acceptance
// suites. Each one is a deliberate re-derivation of its production
// counterpart: dense long-double algebra instead of banded solves, normal
// equations instead of SVD projection, halfplane tables instead of
// hand-written conditionals. They share no code with include/glucam.
#pragma once

#include <cmath>
#include <vector>

#include "glucam/clinical.hpp"
#include "glucam/preprocess.hpp"
#include "glucam/regression.hpp"

namespace oracles {

/// ALS baseline via a full-matrix long-double Cholesky with the identical
/// weight iteration.
inline std::vector<double> dense_als(const std::vector<double>& y, const glucam::AlsConfig& cfg) {
    const std::size_t n = y.size();
    using ld = long double;

    std::vector<std::vector<ld>> penalty(n, std::vector<ld>(n, 0.0L));
    const ld st[3] = {1.0L, -2.0L, 1.0L};
    for (std::size_t r = 0; r + 2 < n; ++r)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                penalty[r + static_cast<std::size_t>(a)][r + static_cast<std::size_t>(b)] +=
                    static_cast<ld>(cfg.lambda) * st[a] * st[b];

    std::vector<ld> w(n, 1.0L), z(n, 0.0L), z_prev;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        std::vector<std::vector<ld>> a = penalty;
        std::vector<ld> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i][i] += w[i];
            rhs[i] = w[i] * static_cast<ld>(y[i]);
        }

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                ld s = a[i][j];
                for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
                a[i][j] = (i == j) ? std::sqrt(s) : s / a[j][j];
            }
        }
        z_prev = z;
        for (std::size_t i = 0; i < n; ++i) {
            ld s = rhs[i];
            for (std::size_t k = 0; k < i; ++k) s -= a[i][k] * z[k];
            z[i] = s / a[i][i];
        }
        for (std::size_t i = n; i-- > 0;) {
            ld s = z[i];
            for (std::size_t k = i + 1; k < n; ++k) s -= a[k][i] * z[k];
            z[i] = s / a[i][i];
        }

        if (iter > 0) {
            ld delta = 0.0L;
            for (std::size_t i = 0; i < n; ++i)
                delta = std::max(delta, std::abs(z[i] - z_prev[i]));
            if (delta < static_cast<ld>(cfg.tol)) break;
        }
        for (std::size_t i = 0; i < n; ++i)
            w[i] = static_cast<ld>(y[i]) > z[i] ? static_cast<ld>(cfg.p)
                                                : 1.0L - static_cast<ld>(cfg.p);
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(z[i]);
    return out;
}

/// OLS with intercept on standardized predictors: normal equations
/// assembled by hand and solved by Gaussian elimination with partial
/// pivoting in long double.
inline Eigen::VectorXd ols_predict(const glucam::Dataset& train, const Eigen::MatrixXd& x_new) {
    using ld = long double;
    const std::size_t n = static_cast<std::size_t>(train.n());
    const std::size_t p = static_cast<std::size_t>(train.p());
    const std::size_t q = p + 1;  // intercept column first

    std::vector<ld> mu(p, 0.0L), sigma(p, 0.0L);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i)
            mu[j] += static_cast<ld>(
                train.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        mu[j] /= static_cast<ld>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const ld d = static_cast<ld>(train.X(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j))) -
                         mu[j];
            sigma[j] += d * d;
        }
        sigma[j] = std::sqrt(sigma[j] / static_cast<ld>(n - 1));
    }

    const auto std_at = [&](const Eigen::MatrixXd& m, std::size_t i, std::size_t j) {
        return (static_cast<ld>(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) -
                mu[j]) /
               sigma[j];
    };

    std::vector<std::vector<ld>> a(q, std::vector<ld>(q, 0.0L));
    std::vector<ld> b(q, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<ld> row(q);
        row[0] = 1.0L;
        for (std::size_t j = 0; j < p; ++j) row[j + 1] = std_at(train.X, i, j);
        for (std::size_t r = 0; r < q; ++r) {
            b[r] += row[r] * static_cast<ld>(train.y(static_cast<Eigen::Index>(i)));
            for (std::size_t c = 0; c < q; ++c) a[r][c] += row[r] * row[c];
        }
    }

    for (std::size_t col = 0; col < q; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < q; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < q; ++r) {
            const ld f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < q; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<ld> beta(q);
    for (std::size_t r = q; r-- > 0;) {
        ld s = b[r];
        for (std::size_t c = r + 1; c < q; ++c) s -= a[r][c] * beta[c];
        beta[r] = s / a[r][r];
    }

    Eigen::VectorXd out(x_new.rows());
    for (std::size_t i = 0; i < static_cast<std::size_t>(x_new.rows()); ++i) {
        ld acc = beta[0];
        for (std::size_t j = 0; j < p; ++j) acc += beta[j + 1] * std_at(x_new, i, j);
        out(static_cast<Eigen::Index>(i)) = static_cast<double>(acc);
    }
    return out;
}

/// Error-grid regions as halfplane tables with the declared boundary
/// ownership (ties to the more benign zone).
namespace clarke_detail {

struct Halfplane {
    double cr, cp, c0;  // cr*ref + cp*pred + c0  (op)  0
    bool strict;

    bool holds(double r, double p) const {
        const double v = cr * r + cp * p + c0;
        return strict ? v > 0.0 : v >= 0.0;
    }
};

using Region = std::vector<Halfplane>;

struct ZoneRegions {
    glucam::ClarkeZone zone;
    std::vector<Region> regions;
};

inline const std::vector<ZoneRegions>& table() {
    static const double third = 175.0 / 3.0;
    static const std::vector<ZoneRegions> t{
        {glucam::ClarkeZone::A,
         {
             {{-0.8, 1.0, 0.0, false}, {1.2, -1.0, 0.0, false}},   // 20% band
             {{-1.0, 0.0, 70.0, true}, {0.0, -1.0, 70.0, false}},  // low box, ref < 70
         }},
        {glucam::ClarkeZone::C,
         {
             {{1.0, 0.0, -70.0, false}, {-1.0, 0.0, 290.0, true}, {-1.0, 1.0, -110.0, true}},
             {{-1.0, 0.0, 180.0, false}, {1.4, -1.0, -182.0, true}},
         }},
        {glucam::ClarkeZone::D,
         {
             {{1.0, 0.0, -240.0, true}, {0.0, 1.0, -70.0, false}, {0.0, -1.0, 180.0, true}},
             {{-1.0, 0.0, third, false}, {0.0, 1.0, -70.0, false}, {0.0, -1.0, 180.0, false}},
             {{1.0, 0.0, -third, false},
              {-1.0, 0.0, 70.0, true},
              {-1.2, 1.0, 0.0, false},
              {0.0, -1.0, 180.0, false}},
         }},
        {glucam::ClarkeZone::E,
         {
             {{-1.0, 0.0, 70.0, true}, {0.0, 1.0, -180.0, true}},
             {{1.0, 0.0, -180.0, true}, {0.0, -1.0, 70.0, true}},
         }},
    };
    return t;
}

}  // namespace clarke_detail

inline glucam::ClarkeZone clarke_zone(double r, double p) {
    for (const auto& entry : clarke_detail::table()) {
        for (const auto& region : entry.regions) {
            bool all = true;
            for (const auto& h : region) all = all && h.holds(r, p);
            if (all) return entry.zone;
        }
    }
    return glucam::ClarkeZone::B;
}

}  // namespace oracles
