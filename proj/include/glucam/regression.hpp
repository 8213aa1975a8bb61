#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glucam/core.hpp"
#include "glucam/rng.hpp"

namespace glucam {

/// Trial matrix for calibration: one row per trial, one column per schema
/// feature, with reference glucose in mg/dL.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> trial_ids;
    std::string schema_id;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }

    void validate() const {
        if (X.rows() < 2) fail(ErrorKind::insufficient_data, "dataset needs at least 2 trials");
        if (y.size() != X.rows()) fail(ErrorKind::shape, "y length does not match row count");
        if (trial_ids.size() != static_cast<std::size_t>(X.rows()))
            fail(ErrorKind::shape, "trial_ids length does not match row count");
        if (!X.allFinite() || !y.allFinite())
            fail(ErrorKind::range, "dataset contains non-finite entries");
    }

    Dataset rows(const std::vector<Eigen::Index>& idx) const {
        Dataset out;
        out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
        out.y.resize(static_cast<Eigen::Index>(idx.size()));
        out.schema_id = schema_id;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            out.X.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
            out.y(static_cast<Eigen::Index>(i)) = y(idx[i]);
            out.trial_ids.push_back(trial_ids[static_cast<std::size_t>(idx[i])]);
        }
        return out;
    }
};

/// Principal-component regression model: standardization constants, the
/// retained loading directions, and the regression in score space.
struct PcrModel {
    Eigen::VectorXd mu;       // column means
    Eigen::VectorXd sigma;    // column sample standard deviations
    Eigen::MatrixXd loadings; // p x k, orthonormal columns
    Eigen::VectorXd beta_pc;  // k coefficients
    double intercept = 0.0;   // mg/dL
    int k = 0;
    std::string schema_id;
};

enum class SplitBy { trial, subject };

inline const char* split_by_name(SplitBy s) { return s == SplitBy::trial ? "trial" : "subject"; }

inline SplitBy split_by_from_name(const std::string& name) {
    if (name == "trial") return SplitBy::trial;
    if (name == "subject") return SplitBy::subject;
    fail(ErrorKind::config, "unknown split mode: " + name);
}

namespace detail {

/// Fisher-Yates with the project RNG; <random> distributions are not
/// portable across standard libraries.
inline void shuffle_indices(std::vector<Eigen::Index>& idx, std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
        std::swap(idx[i - 1], idx[j]);
    }
}

/// Subject identity is the trial_id prefix before the first '_'; ids
/// without one are their own subject.
inline std::string subject_of(const std::string& trial_id) {
    const std::size_t pos = trial_id.find('_');
    return pos == std::string::npos ? trial_id : trial_id.substr(0, pos);
}

}  // namespace detail

/// Seeded shuffle of trials; the first ceil(n * train_frac) go to training.
/// With SplitBy::subject, whole subjects are assigned in shuffled order
/// until the training quota is met, so no subject straddles the split.
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_frac,
                                                    std::uint64_t seed,
                                                    SplitBy by = SplitBy::trial) {
    ds.validate();
    if (!(train_frac > 0.0 && train_frac < 1.0))
        fail(ErrorKind::split, "train_frac must be in (0, 1)");
    const Eigen::Index n = ds.n();
    const Eigen::Index train_size =
        static_cast<Eigen::Index>(std::ceil(static_cast<double>(n) * train_frac));

    std::vector<Eigen::Index> train_idx, test_idx;
    if (by == SplitBy::trial) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        detail::shuffle_indices(order, seed);
        train_idx.assign(order.begin(), order.begin() + train_size);
        test_idx.assign(order.begin() + train_size, order.end());
    } else {
        std::vector<std::string> subjects;
        for (const std::string& id : ds.trial_ids) {
            const std::string s = detail::subject_of(id);
            if (std::find(subjects.begin(), subjects.end(), s) == subjects.end())
                subjects.push_back(s);
        }
        std::vector<Eigen::Index> order(subjects.size());
        for (std::size_t i = 0; i < subjects.size(); ++i)
            order[i] = static_cast<Eigen::Index>(i);
        detail::shuffle_indices(order, seed);
        for (Eigen::Index s : order) {
            const std::string& subject = subjects[static_cast<std::size_t>(s)];
            const bool to_train = static_cast<Eigen::Index>(train_idx.size()) < train_size;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (detail::subject_of(ds.trial_ids[static_cast<std::size_t>(i)]) == subject)
                    (to_train ? train_idx : test_idx).push_back(i);
            }
        }
        std::sort(train_idx.begin(), train_idx.end());
        std::sort(test_idx.begin(), test_idx.end());
    }

    if (train_idx.size() < 2 || test_idx.empty())
        fail(ErrorKind::split, "degenerate split: " + std::to_string(train_idx.size()) +
                                   " train / " + std::to_string(test_idx.size()) + " test");
    return {ds.rows(train_idx), ds.rows(test_idx)};
}

namespace detail {

struct Standardized {
    Eigen::MatrixXd X;
    Eigen::VectorXd mu;
    Eigen::VectorXd sigma;
};

inline Standardized standardize_columns(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows(), p = X.cols();
    Standardized out;
    out.mu = X.colwise().mean();
    out.sigma.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double var =
            (X.col(j).array() - out.mu(j)).square().sum() / static_cast<double>(n - 1);
        out.sigma(j) = std::sqrt(var);
        if (!(out.sigma(j) > 0.0))
            fail(ErrorKind::scale, "constant feature column " + std::to_string(j) +
                                       " cannot be standardized");
    }
    out.X = (X.rowwise() - out.mu.transpose()).array().rowwise() /
            out.sigma.transpose().array();
    return out;
}

/// Sign convention: the largest-magnitude entry of each loading column is
/// made positive (first such entry on ties), so refits are bit-identical.
inline void fix_loading_signs(Eigen::MatrixXd& loadings) {
    for (Eigen::Index j = 0; j < loadings.cols(); ++j) {
        Eigen::Index arg = 0;
        double best = 0.0;
        for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
            const double a = std::abs(loadings(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (loadings(arg, j) < 0.0) loadings.col(j) = -loadings.col(j);
    }
}

}  // namespace detail

/// Rank of the standardized training matrix: singular values above the
/// usual max(n,p)*eps*s_max cutoff.
inline int effective_rank(const Eigen::VectorXd& singular_values, Eigen::Index n, Eigen::Index p) {
    if (singular_values.size() == 0) return 0;
    const double cutoff = static_cast<double>(std::max(n, p)) *
                          std::numeric_limits<double>::epsilon() * singular_values(0);
    int r = 0;
    for (Eigen::Index i = 0; i < singular_values.size(); ++i)
        if (singular_values(i) > cutoff) ++r;
    return r;
}

/// Fits PCR: center and scale columns, take the top-k right singular
/// directions of the standardized matrix, then regress y on the component
/// scores. Scores are centered, so the intercept is mean(y).
inline PcrModel pcr_train(const Dataset& train, int k) {
    train.validate();
    const Eigen::Index n = train.n(), p = train.p();
    if (k < 1) fail(ErrorKind::rank, "component count must be >= 1");
    if (k > std::min<Eigen::Index>(n - 1, p))
        fail(ErrorKind::rank, "k = " + std::to_string(k) + " exceeds min(n-1, p) = " +
                                  std::to_string(std::min<Eigen::Index>(n - 1, p)));

    detail::Standardized std_x = detail::standardize_columns(train.X);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(std_x.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (k > effective_rank(svd.singularValues(), n, p))
        fail(ErrorKind::rank, "k = " + std::to_string(k) + " exceeds the rank of the training matrix");

    PcrModel model;
    model.mu = std_x.mu;
    model.sigma = std_x.sigma;
    model.loadings = svd.matrixV().leftCols(k);
    detail::fix_loading_signs(model.loadings);
    model.k = k;
    model.schema_id = train.schema_id;
    model.intercept = train.y.mean();

    const Eigen::MatrixXd scores = std_x.X * model.loadings;  // n x k, centered
    const Eigen::VectorXd centered_y = train.y.array() - model.intercept;
    model.beta_pc.resize(k);
    for (int j = 0; j < k; ++j) {
        // score columns are orthogonal, so each coefficient is independent
        model.beta_pc(j) = scores.col(j).dot(centered_y) / scores.col(j).squaredNorm();
    }
    return model;
}

/// Predictions in mg/dL for rows laid out like the training features.
inline Eigen::VectorXd pcr_predict(const PcrModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.mu.size())
        fail(ErrorKind::shape, "feature count " + std::to_string(X.cols()) +
                                   " does not match model (" + std::to_string(model.mu.size()) + ")");
    if (!X.allFinite()) fail(ErrorKind::range, "prediction input contains non-finite entries");
    const Eigen::MatrixXd x_std = (X.rowwise() - model.mu.transpose()).array().rowwise() /
                                  model.sigma.transpose().array();
    return ((x_std * model.loadings) * model.beta_pc).array() + model.intercept;
}

inline Eigen::VectorXd pcr_predict(const PcrModel& model, const Dataset& ds) {
    if (!ds.schema_id.empty() && !model.schema_id.empty() && ds.schema_id != model.schema_id)
        fail(ErrorKind::schema, "feature schema '" + ds.schema_id + "' does not match model schema '" +
                                    model.schema_id + "'");
    return pcr_predict(model, ds.X);
}

/// Residual summary for held-out predictions. `sep` is the bias-corrected
/// standard deviation of the residuals; `rmsep` keeps the bias in.
struct SepResult {
    double sep = 0.0;
    double rmsep = 0.0;
    double bias = 0.0;  // mean residual
    std::size_t n = 0;
};

inline SepResult sep(const std::vector<double>& y_pred, const std::vector<double>& y_ref) {
    if (y_pred.size() != y_ref.size())
        fail(ErrorKind::shape, "prediction and reference lengths differ");
    const std::size_t m = y_pred.size();
    if (m < 2) fail(ErrorKind::insufficient_data, "SEP needs at least 2 pairs");

    std::vector<double> e(m);
    for (std::size_t i = 0; i < m; ++i) e[i] = y_pred[i] - y_ref[i];
    SepResult r;
    r.n = m;
    r.bias = mean(e);
    double ss = 0.0, ss_centered = 0.0;
    for (double v : e) {
        ss += v * v;
        ss_centered += (v - r.bias) * (v - r.bias);
    }
    r.rmsep = std::sqrt(ss / static_cast<double>(m));
    r.sep = std::sqrt(ss_centered / static_cast<double>(m - 1));
    return r;
}

inline SepResult sep(const Eigen::VectorXd& y_pred, const Eigen::VectorXd& y_ref) {
    return sep(std::vector<double>(y_pred.data(), y_pred.data() + y_pred.size()),
               std::vector<double>(y_ref.data(), y_ref.data() + y_ref.size()));
}

struct SweepPoint {
    int k = 0;
    double sep = 0.0;
    double rmsep = 0.0;
};

/// Trains and scores PCR for k = 1..k_max against the held-out set.
inline std::vector<SweepPoint> sweep_components(const Dataset& train, const Dataset& test,
                                                int k_max) {
    train.validate();
    test.validate();
    if (k_max < 1) fail(ErrorKind::rank, "k_max must be >= 1");

    std::vector<SweepPoint> out;
    out.reserve(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        const PcrModel model = pcr_train(train, k);
        const SepResult r = sep(pcr_predict(model, test), test.y);
        out.push_back({k, r.sep, r.rmsep});
    }
    return out;
}

}  // namespace glucam
