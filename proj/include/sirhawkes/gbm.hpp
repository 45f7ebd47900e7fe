#pragma once

#include <Eigen/Core>

#include <vector>

namespace sirhawkes {

struct GbmConfig {
    int rounds = 200;
    int depth = 2;
    double learning_rate = 0.1;
    int min_leaf = 1;
};

/// Least-squares gradient boosting over axis-aligned regression trees.
/// Training is deterministic: exact split search, ties resolved by the lowest
/// feature index and threshold.
class GradientBoostedTrees {
public:
    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbmConfig& cfg = {});
    [[nodiscard]] double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
    [[nodiscard]] Eigen::VectorXd predict_all(const Eigen::MatrixXd& X) const;
    [[nodiscard]] std::size_t n_trees() const { return trees_.size(); }

private:
    struct Node {
        int feature = -1;  // -1 for leaves
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    using Tree = std::vector<Node>;

    static int grow(Tree& tree, const Eigen::MatrixXd& X, const Eigen::VectorXd& r, std::vector<Eigen::Index>& rows,
                    int depth, const GbmConfig& cfg);
    static double evaluate(const Tree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x);

    double base_ = 0.0;
    double rate_ = 0.1;
    std::vector<Tree> trees_;
};

}  // namespace sirhawkes
