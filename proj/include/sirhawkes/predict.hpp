#pragma once

#include "sirhawkes/cascades.hpp"
#include "sirhawkes/fit.hpp"
#include "sirhawkes/gbm.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sirhawkes {

inline constexpr double kDefaultObservationWindow = 3600.0;
inline constexpr double kSigmaCap = 50.0;

/// Regression inputs from one fitted model: the SIR-view parameters, the
/// fitted N and the branching factor. C_t and the window are carried along
/// but are not features.
struct PredictionFeatures {
    std::string cascade_id;
    KernelFamily family = KernelFamily::Exp;
    std::vector<std::string> names;
    Eigen::VectorXd values;
    std::int64_t C_t = 0;
    double t_obs = 0.0;
    double N_hat = 0.0;
};

// exp: beta, gamma, rho, N, nstar; others add theta in place of gamma, and
// c for the offset families.
[[nodiscard]] std::vector<std::string> feature_names(KernelFamily family);

// std::nullopt when any fitted quantity is non-finite.
[[nodiscard]] std::optional<PredictionFeatures> extract_features(const FitResult& fit, const Cascade& observed,
                                                                 double t_obs);

// C_t + sigma (N - C_t).
[[nodiscard]] double predict_size(double sigma, std::int64_t C_t, double N);

// max(N_hat - C_t, 1): the remaining population a sigma is a fraction of.
[[nodiscard]] double effective_room(std::int64_t C_t, double N_hat);

// (C_inf - C_t) / effective_room, capped at kSigmaCap.
[[nodiscard]] double sigma_target(std::int64_t C_inf, std::int64_t C_t, double N_hat);

// C_t + sigma * effective_room; the inverse of sigma_target when uncapped.
[[nodiscard]] double predict_from_fit(double sigma, std::int64_t C_t, double N_hat);

[[nodiscard]] double are(double predicted, std::int64_t true_size);
[[nodiscard]] double combine_predictions(const std::vector<double>& predictions);
[[nodiscard]] double median(std::vector<double> v);

struct SigmaModel {
    GradientBoostedTrees regressor;
    std::vector<std::string> feature_names;
    std::uint64_t seed = 0;

    [[nodiscard]] double predict(const Eigen::VectorXd& features) const;
};

// Requires at least 20 rows.
[[nodiscard]] SigmaModel train_sigma(const Eigen::MatrixXd& X, const Eigen::VectorXd& sigma,
                                     const GbmConfig& gbm = {}, std::uint64_t seed = 0);

struct CvConfig {
    int folds = 10;
    int train_folds = 4;  // consecutive folds per rotation; the rest are tested
    std::uint64_t seed = 0;
    GbmConfig gbm;
    unsigned jobs = 1;
};

struct CvRow {
    Eigen::VectorXd features;
    std::int64_t C_t = 0;
    double N_hat = 0.0;
    std::int64_t C_inf = 0;
};

struct CvResult {
    std::vector<int> fold_of;         // per row
    std::vector<double> sigma_hat;    // mean over the rotations that tested the row
    std::vector<double> size_hat;     // predict_from_fit(sigma_hat, C_t, N_hat)
    std::vector<double> are;          // per row
    std::vector<std::vector<double>> rotation_are;  // test AREs of each rotation
};

/// Rotation r trains on folds r..r+train_folds-1 (mod folds) and predicts the
/// others; every row is tested folds - train_folds times.
[[nodiscard]] CvResult cross_validate(const std::vector<CvRow>& rows, const CvConfig& cfg);

}  // namespace sirhawkes
