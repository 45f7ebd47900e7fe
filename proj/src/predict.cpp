#include "sirhawkes/predict.hpp"

#include "sirhawkes/errors.hpp"
#include "sirhawkes/parallel.hpp"
#include "sirhawkes/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sirhawkes {

std::vector<std::string> feature_names(KernelFamily family) {
    std::vector<std::string> names{"beta", family == KernelFamily::Exp ? "gamma" : "theta"};
    if (has_offset(family)) names.emplace_back("c");
    names.insert(names.end(), {"rho", "N", "nstar"});
    return names;
}

std::optional<PredictionFeatures> extract_features(const FitResult& fit, const Cascade& observed, double t_obs) {
    PredictionFeatures f;
    f.cascade_id = observed.id;
    f.family = fit.params.kernel.family;
    f.names = feature_names(f.family);
    f.C_t = static_cast<std::int64_t>(observed.size());
    f.t_obs = t_obs;
    f.N_hat = fit.params.N;
    const SirSpec& s = fit.sir_view;
    std::vector<double> v{s.beta, s.recovery.theta};
    if (has_offset(f.family)) v.push_back(s.recovery.c);
    v.insert(v.end(), {fit.params.rho, fit.params.N, fit.branching_factor()});
    f.values = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    if (!f.values.allFinite()) return std::nullopt;
    return f;
}

double predict_size(double sigma, std::int64_t C_t, double N) {
    if (C_t < 1) throw PreconditionError("C_t must be >= 1");
    const double c = static_cast<double>(C_t);
    return c + sigma * (N - c);
}

double effective_room(std::int64_t C_t, double N_hat) { return std::max(N_hat - static_cast<double>(C_t), 1.0); }

double sigma_target(std::int64_t C_inf, std::int64_t C_t, double N_hat) {
    return std::min(static_cast<double>(C_inf - C_t) / effective_room(C_t, N_hat), kSigmaCap);
}

double predict_from_fit(double sigma, std::int64_t C_t, double N_hat) {
    return predict_size(sigma, C_t, static_cast<double>(C_t) + effective_room(C_t, N_hat));
}

double are(double predicted, std::int64_t true_size) {
    if (true_size < 1) throw PreconditionError("true size must be >= 1");
    const double t = static_cast<double>(true_size);
    return std::abs(predicted - t) / t;
}

double combine_predictions(const std::vector<double>& predictions) {
    if (predictions.size() < 2) throw PreconditionError("combining needs at least 2 predictions");
    return std::accumulate(predictions.begin(), predictions.end(), 0.0) / static_cast<double>(predictions.size());
}

double median(std::vector<double> v) {
    if (v.empty()) throw PreconditionError("median of an empty sample");
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

double SigmaModel::predict(const Eigen::VectorXd& features) const { return regressor.predict(features.transpose()); }

SigmaModel train_sigma(const Eigen::MatrixXd& X, const Eigen::VectorXd& sigma, const GbmConfig& gbm,
                       std::uint64_t seed) {
    if (X.rows() < 20) throw InsufficientSampleError("sigma training needs at least 20 cascades");
    SigmaModel m;
    m.seed = seed;
    m.regressor.fit(X, sigma, gbm);
    return m;
}

CvResult cross_validate(const std::vector<CvRow>& rows, const CvConfig& cfg) {
    if (cfg.folds < 2 || cfg.train_folds < 1 || cfg.train_folds >= cfg.folds)
        throw PreconditionError("need 1 <= train_folds < folds");
    const std::size_t n = rows.size();
    if (n < static_cast<std::size_t>(cfg.folds)) throw InsufficientSampleError("fewer rows than folds");
    const Eigen::Index dim = rows.front().features.size();

    // Shuffled round-robin fold assignment.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.seed);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    CvResult out;
    out.fold_of.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) out.fold_of[order[k]] = static_cast<int>(k % static_cast<std::size_t>(cfg.folds));

    const auto rotations = static_cast<std::size_t>(cfg.folds);
    std::vector<std::vector<double>> sigma_by_rotation(rotations, std::vector<double>(n, 0.0));
    parallel_for(rotations, cfg.jobs, [&](std::size_t r) {
        auto in_train = [&](int fold) {
            const int offset = (fold - static_cast<int>(r) + cfg.folds) % cfg.folds;
            return offset < cfg.train_folds;
        };
        std::vector<std::size_t> train;
        for (std::size_t i = 0; i < n; ++i)
            if (in_train(out.fold_of[i])) train.push_back(i);
        Eigen::MatrixXd X(static_cast<Eigen::Index>(train.size()), dim);
        Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));
        for (std::size_t k = 0; k < train.size(); ++k) {
            const CvRow& row = rows[train[k]];
            X.row(static_cast<Eigen::Index>(k)) = row.features.transpose();
            y[static_cast<Eigen::Index>(k)] = sigma_target(row.C_inf, row.C_t, row.N_hat);
        }
        GradientBoostedTrees model;
        model.fit(X, y, cfg.gbm);
        for (std::size_t i = 0; i < n; ++i)
            if (!in_train(out.fold_of[i])) sigma_by_rotation[r][i] = model.predict(rows[i].features.transpose());
    });

    const double tested = static_cast<double>(cfg.folds - cfg.train_folds);
    out.sigma_hat.assign(n, 0.0);
    out.rotation_are.assign(rotations, {});
    for (std::size_t r = 0; r < rotations; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const int offset = (out.fold_of[i] - static_cast<int>(r) + cfg.folds) % cfg.folds;
            if (offset < cfg.train_folds) continue;
            out.sigma_hat[i] += sigma_by_rotation[r][i] / tested;
            const double size = predict_from_fit(sigma_by_rotation[r][i], rows[i].C_t, rows[i].N_hat);
            out.rotation_are[r].push_back(are(size, rows[i].C_inf));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.size_hat.push_back(predict_from_fit(out.sigma_hat[i], rows[i].C_t, rows[i].N_hat));
        out.are.push_back(are(out.size_hat.back(), rows[i].C_inf));
    }
    return out;
}

}  // namespace sirhawkes
