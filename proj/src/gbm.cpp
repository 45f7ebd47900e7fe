#include "sirhawkes/gbm.hpp"

#include "sirhawkes/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sirhawkes {

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

Split best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& r, const std::vector<Eigen::Index>& rows,
                 int min_leaf) {
    Split best;
    const auto n = rows.size();
    double total = 0.0;
    for (auto i : rows) total += r[i];
    const double base = total * total / static_cast<double>(n);
    std::vector<Eigen::Index> order(rows);
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return X(a, f) < X(b, f); });
        double left = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            left += r[order[k]];
            const double x0 = X(order[k], f);
            const double x1 = X(order[k + 1], f);
            if (!(x0 < x1)) continue;
            const auto nl = static_cast<double>(k + 1);
            const auto nr = static_cast<double>(n - k - 1);
            if (nl < min_leaf || nr < min_leaf) continue;
            const double right = total - left;
            const double gain = left * left / nl + right * right / nr - base;
            if (gain > best.gain + 1e-12 * std::max(1.0, std::abs(base))) {
                best = {static_cast<int>(f), 0.5 * (x0 + x1), gain};
            }
        }
    }
    return best;
}

}  // namespace

int GradientBoostedTrees::grow(Tree& tree, const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                               std::vector<Eigen::Index>& rows, int depth, const GbmConfig& cfg) {
    const int id = static_cast<int>(tree.size());
    tree.push_back({});
    double mean = 0.0;
    for (auto i : rows) mean += r[i];
    mean /= static_cast<double>(rows.size());
    tree[id].value = mean;
    if (depth == 0 || rows.size() < 2) return id;
    const Split s = best_split(X, r, rows, cfg.min_leaf);
    if (s.feature < 0) return id;
    std::vector<Eigen::Index> left;
    std::vector<Eigen::Index> right;
    for (auto i : rows) (X(i, s.feature) < s.threshold ? left : right).push_back(i);
    tree[id].feature = s.feature;
    tree[id].threshold = s.threshold;
    const int l = grow(tree, X, r, left, depth - 1, cfg);
    const int rr = grow(tree, X, r, right, depth - 1, cfg);
    tree[id].left = l;
    tree[id].right = rr;
    return id;
}

double GradientBoostedTrees::evaluate(const Tree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    int node = 0;
    while (tree[node].feature >= 0) node = x[tree[node].feature] < tree[node].threshold ? tree[node].left : tree[node].right;
    return tree[node].value;
}

void GradientBoostedTrees::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbmConfig& cfg) {
    if (X.rows() != y.size() || X.rows() == 0) throw PreconditionError("GBM needs a non-empty design matrix matching y");
    if (cfg.rounds < 0 || cfg.depth < 0 || !(cfg.learning_rate > 0.0) || cfg.min_leaf < 1)
        throw PreconditionError("invalid GBM configuration");
    if (!X.allFinite() || !y.allFinite()) throw PreconditionError("GBM inputs must be finite");
    trees_.clear();
    rate_ = cfg.learning_rate;
    base_ = y.mean();
    Eigen::VectorXd fitted = Eigen::VectorXd::Constant(y.size(), base_);
    std::vector<Eigen::Index> all(static_cast<std::size_t>(X.rows()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    for (int m = 0; m < cfg.rounds; ++m) {
        const Eigen::VectorXd residual = y - fitted;
        Tree tree;
        std::vector<Eigen::Index> rows = all;
        grow(tree, X, residual, rows, cfg.depth, cfg);
        for (Eigen::Index i = 0; i < X.rows(); ++i) fitted[i] += rate_ * evaluate(tree, X.row(i));
        trees_.push_back(std::move(tree));
    }
}

double GradientBoostedTrees::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    double v = base_;
    for (const auto& t : trees_) v += rate_ * evaluate(t, x);
    return v;
}

Eigen::VectorXd GradientBoostedTrees::predict_all(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict(X.row(i));
    return out;
}

}  // namespace sirhawkes
