#pragma once

#include "biclab/features.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace biclab {

struct TreeParams {
    std::size_t min_leaf = 2;
    std::size_t max_depth = 12;
    double min_gain_ratio = 0.0;
    /// Error-based (pessimistic) subtree replacement after growth.
    bool prune = false;
    double prune_confidence = 0.25;

    friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

/// Binary threshold tree over the nine numeric features. Internal nodes send
/// `value <= threshold` left and `value > threshold` right.
class DecisionTree {
public:
    struct Node {
        /// -1 marks a leaf.
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        std::uint64_t easy = 0;
        std::uint64_t hard = 0;

        [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }

        friend bool operator==(const Node&, const Node&) = default;
    };

    /// Validates structure; throws std::invalid_argument on a malformed tree.
    DecisionTree(std::vector<Node> nodes, TreeParams params);

    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const Node& root() const { return nodes_.front(); }
    [[nodiscard]] const TreeParams& params() const noexcept { return params_; }
    [[nodiscard]] std::size_t depth() const;
    [[nodiscard]] std::size_t leaf_count() const;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::vector<Node> nodes_;
    TreeParams params_;
};

struct Prediction {
    Label label;
    /// Laplace-smoothed HARD fraction of the reached leaf.
    double hard_probability;
};

enum class Comparator { le, gt };

struct Condition {
    std::size_t feature;
    Comparator cmp;
    double threshold;

    [[nodiscard]] bool holds(const FeatureVector& fv) const;
    friend bool operator==(const Condition&, const Condition&) = default;
};

struct Rule {
    std::vector<Condition> conditions;
    Label predicted;
    /// Training vectors that reached the leaf.
    std::uint64_t support;
    /// Fraction of those carrying the predicted label.
    double confidence;

    [[nodiscard]] bool matches(const FeatureVector& fv) const;
};

/// ROC operating point in the usual orientation: HARD is predicted when the
/// score is at least `threshold`.
struct RocPoint {
    double threshold;
    /// EASY vectors predicted HARD / all EASY.
    double false_alarm_rate;
    /// HARD vectors predicted HARD / all HARD.
    double hit_rate;

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct PrPoint {
    double threshold;
    double recall;
    double precision;

    friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

struct RocCurve {
    std::vector<RocPoint> roc;
    std::vector<PrPoint> pr;
    double auc;
};

struct EvalReport {
    std::uint64_t hard_as_hard = 0;
    std::uint64_t hard_as_easy = 0;
    std::uint64_t easy_as_easy = 0;
    std::uint64_t easy_as_hard = 0;
    /// HARD mistaken for EASY, over all HARD (NaN when there is no HARD vector).
    double fpr = 0.0;
    /// EASY mistaken for HARD, over all EASY (NaN when there is no EASY vector).
    double fnr = 0.0;
    double accuracy = 0.0;
    /// False when the dataset holds a single class; the curves are then empty.
    bool roc_defined = false;
    std::vector<RocPoint> roc_points;
    std::vector<PrPoint> pr_points;
    std::optional<double> auc;
};

struct DatasetSplit {
    std::vector<FeatureVector> train;
    std::vector<FeatureVector> test;
};

struct CrossValidation {
    std::vector<EvalReport> folds;
    DecisionTree best_tree;
    std::size_t best_fold;
};

/// C4.5-style induction: thresholds at midpoints between consecutive distinct
/// values, gain-ratio selection. Throws std::invalid_argument on an empty
/// dataset or an unlabeled vector.
[[nodiscard]] DecisionTree train_c45(std::span<const FeatureVector> dataset, const TreeParams& params = {});

[[nodiscard]] Prediction predict(const DecisionTree& tree, const FeatureVector& fv);

/// One rule per leaf, in left-to-right leaf order.
[[nodiscard]] std::vector<Rule> extract_rules(const DecisionTree& tree);

/// Sweeps the HARD threshold over every distinct score, preceded by +inf.
/// Throws std::invalid_argument unless both classes are present.
[[nodiscard]] RocCurve roc_from_scores(std::span<const double> scores, std::span<const Label> labels);

[[nodiscard]] EvalReport evaluate(const DecisionTree& tree, std::span<const FeatureVector> dataset);

/// Seeded, label-stratified partition; `train_fraction` of each class goes to
/// the training side.
[[nodiscard]] DatasetSplit split_dataset(std::span<const FeatureVector> dataset, double train_fraction,
                                         std::uint64_t seed);

/// Stratified k-fold cross-validation. The best tree has the highest fold
/// accuracy, ties broken by lower FPR, then by lower fold index.
[[nodiscard]] CrossValidation kfold_cv(std::span<const FeatureVector> dataset, std::size_t k,
                                       const TreeParams& params, std::uint64_t seed);

/// Indented human-readable rendering, one node per line.
[[nodiscard]] std::string to_text(const DecisionTree& tree);
[[nodiscard]] std::string to_text(const Rule& rule);

[[nodiscard]] nlohmann::json to_json(const DecisionTree& tree);
[[nodiscard]] DecisionTree tree_from_json(const nlohmann::json& j);

[[nodiscard]] std::string roc_csv(const EvalReport& report);
[[nodiscard]] std::string pr_csv(const EvalReport& report);

} // namespace biclab
