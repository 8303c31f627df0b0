#include "biclab/dtree.hpp"

#include "biclab/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace biclab {

namespace {

    constexpr double gain_epsilon = 1e-12;

    auto entropy(double a, double b) -> double
    {
        double n = a + b;
        double h = 0.0;
        for (double c : {a, b})
            if (c > 0)
                h -= (c / n) * std::log2(c / n);
        return h;
    }

    auto format_double(double x) -> std::string
    {
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        if (std::isnan(x))
            return "nan";
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, p);
    }

    /// Upper-tail standard normal quantile by bisection on erfc.
    auto normal_upper_quantile(double tail) -> double
    {
        double lo = 0.0, hi = 10.0;
        for (int it = 0; it < 200; ++it) {
            double mid = (lo + hi) / 2;
            if (0.5 * std::erfc(mid / std::sqrt(2.0)) > tail)
                lo = mid;
            else
                hi = mid;
        }
        return (lo + hi) / 2;
    }

    /// Extra errors predicted for a leaf with `n` cases and `e` observed
    /// errors at confidence `cf` (binomial upper limit, as in C4.5).
    auto added_errors(double n, double e, double cf) -> double
    {
        if (e < 1e-6)
            return n * (1 - std::exp(std::log(cf) / n));
        if (e < 0.9999) {
            double v0 = n * (1 - std::exp(std::log(cf) / n));
            return v0 + e * (added_errors(n, 1.0, cf) - v0);
        }
        if (e + 0.5 >= n)
            return 0.67 * (n - e);
        double z = normal_upper_quantile(cf);
        double coeff = z * z;
        double pr = (e + 0.5 + coeff / 2 + std::sqrt(coeff * ((e + 0.5) * (1 - (e + 0.5) / n) + coeff / 4)))
                    / (n + coeff);
        return n * pr - e;
    }

    struct SplitChoice {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
        double ratio = 0.0;
    };

    class Builder {
    public:
        Builder(std::span<const FeatureVector> data, const TreeParams& params) : data_(data), params_(params) {}

        auto grow(std::vector<std::size_t>& idx, std::size_t depth) -> int
        {
            std::uint64_t easy = 0, hard = 0;
            for (auto i : idx)
                (data_[i].label == Label::hard ? hard : easy) += 1;

            auto self = static_cast<int>(nodes_.size());
            nodes_.push_back({-1, 0.0, -1, -1, easy, hard});

            if (easy == 0 || hard == 0 || idx.size() < 2 * params_.min_leaf || depth >= params_.max_depth)
                return self;

            auto choice = best_split(idx, easy, hard);
            if (choice.feature < 0 || choice.ratio < params_.min_gain_ratio)
                return self;

            std::vector<std::size_t> left, right;
            for (auto i : idx)
                (data_[i].feature(static_cast<std::size_t>(choice.feature)) <= choice.threshold ? left : right)
                    .push_back(i);

            auto l = grow(left, depth + 1);
            auto r = grow(right, depth + 1);
            auto& node = nodes_[static_cast<std::size_t>(self)];
            node.feature = choice.feature;
            node.threshold = choice.threshold;
            node.left = l;
            node.right = r;
            return self;
        }

        auto take() -> std::vector<DecisionTree::Node> { return std::move(nodes_); }

    private:
        /// Per feature, the threshold with the largest information gain; across
        /// features, the largest gain ratio among candidates whose gain is at
        /// least the average candidate gain.
        auto best_split(const std::vector<std::size_t>& idx, std::uint64_t easy, std::uint64_t hard) -> SplitChoice
        {
            const auto n = static_cast<double>(idx.size());
            const double base = entropy(static_cast<double>(easy), static_cast<double>(hard));

            std::vector<SplitChoice> candidates;
            std::vector<std::pair<double, Label>> column(idx.size());
            for (std::size_t f = 0; f < FeatureVector::feature_count; ++f) {
                for (std::size_t k = 0; k < idx.size(); ++k)
                    column[k] = {data_[idx[k]].feature(f), data_[idx[k]].label};
                std::stable_sort(column.begin(), column.end(),
                                 [](const auto& a, const auto& b) { return a.first < b.first; });

                SplitChoice best;
                double left_easy = 0, left_hard = 0;
                for (std::size_t k = 1; k < column.size(); ++k) {
                    (column[k - 1].second == Label::hard ? left_hard : left_easy) += 1;
                    if (column[k - 1].first == column[k].first)
                        continue;
                    if (k < params_.min_leaf || column.size() - k < params_.min_leaf)
                        continue;
                    double right_easy = static_cast<double>(easy) - left_easy;
                    double right_hard = static_cast<double>(hard) - left_hard;
                    double nl = static_cast<double>(k);
                    double gain = base - (nl / n) * entropy(left_easy, left_hard)
                                  - ((n - nl) / n) * entropy(right_easy, right_hard);
                    if (gain > best.gain + gain_epsilon) {
                        double mid = column[k - 1].first + (column[k].first - column[k - 1].first) / 2;
                        if (!(mid < column[k].first))
                            mid = column[k - 1].first;
                        best = {static_cast<int>(f), mid, gain, gain / entropy(nl, n - nl)};
                    }
                }
                if (best.feature >= 0)
                    candidates.push_back(best);
            }
            if (candidates.empty())
                return {};

            double avg = 0;
            for (const auto& c : candidates)
                avg += c.gain;
            avg /= static_cast<double>(candidates.size());

            SplitChoice chosen;
            for (const auto& c : candidates)
                if (c.gain >= avg - gain_epsilon && (chosen.feature < 0 || c.ratio > chosen.ratio + gain_epsilon))
                    chosen = c;
            return chosen;
        }

        std::span<const FeatureVector> data_;
        const TreeParams& params_;
        std::vector<DecisionTree::Node> nodes_;
    };

    /// Returns the estimated error count of the (possibly collapsed) subtree.
    auto prune_node(std::vector<DecisionTree::Node>& nodes, int at, double cf) -> double
    {
        auto& node = nodes[static_cast<std::size_t>(at)];
        double n = static_cast<double>(node.easy + node.hard);
        double e = static_cast<double>(std::min(node.easy, node.hard));
        double as_leaf = e + added_errors(n, e, cf);
        if (node.is_leaf())
            return as_leaf;

        double subtree = prune_node(nodes, node.left, cf) + prune_node(nodes, node.right, cf);
        auto& again = nodes[static_cast<std::size_t>(at)];
        if (as_leaf <= subtree + 0.1) {
            again.feature = -1;
            again.threshold = 0.0;
            again.left = again.right = -1;
            return as_leaf;
        }
        return subtree;
    }

    /// Re-lays reachable nodes out in pre-order.
    auto compact(const std::vector<DecisionTree::Node>& nodes) -> std::vector<DecisionTree::Node>
    {
        std::vector<DecisionTree::Node> out;
        std::function<int(int)> copy = [&](int at) -> int {
            auto self = static_cast<int>(out.size());
            out.push_back(nodes[static_cast<std::size_t>(at)]);
            if (!out.back().is_leaf()) {
                auto l = copy(nodes[static_cast<std::size_t>(at)].left);
                auto r = copy(nodes[static_cast<std::size_t>(at)].right);
                out[static_cast<std::size_t>(self)].left = l;
                out[static_cast<std::size_t>(self)].right = r;
            }
            return self;
        };
        copy(0);
        return out;
    }

    auto leaf_for(const DecisionTree& tree, const FeatureVector& fv) -> const DecisionTree::Node&
    {
        const auto* node = &tree.root();
        while (!node->is_leaf()) {
            auto next = fv.feature(static_cast<std::size_t>(node->feature)) <= node->threshold ? node->left
                                                                                                : node->right;
            node = &tree.nodes()[static_cast<std::size_t>(next)];
        }
        return *node;
    }

    auto leaf_label(const DecisionTree::Node& n) -> Label
    {
        return n.hard > n.easy ? Label::hard : Label::easy;
    }

    auto rate(std::uint64_t num, std::uint64_t den) -> double
    {
        return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                        : static_cast<double>(num) / static_cast<double>(den);
    }

    void require_labeled(std::span<const FeatureVector> dataset)
    {
        if (dataset.empty())
            throw std::invalid_argument("dataset is empty");
        for (const auto& fv : dataset)
            if (fv.label == Label::unlabeled)
                throw std::invalid_argument("dataset contains an unlabeled feature vector");
    }
}

DecisionTree::DecisionTree(std::vector<Node> nodes, TreeParams params) : nodes_(std::move(nodes)), params_(params)
{
    if (nodes_.empty())
        throw std::invalid_argument("decision tree has no nodes");
    const auto count = static_cast<int>(nodes_.size());
    for (int i = 0; i < count; ++i) {
        const auto& n = nodes_[static_cast<std::size_t>(i)];
        if (n.is_leaf()) {
            if (n.easy + n.hard == 0)
                throw std::invalid_argument("leaf " + std::to_string(i) + " has no class counts");
            continue;
        }
        if (n.feature >= static_cast<int>(FeatureVector::feature_count))
            throw std::invalid_argument("node " + std::to_string(i) + " has an invalid feature index");
        if (n.left <= i || n.right <= i || n.left >= count || n.right >= count)
            throw std::invalid_argument("node " + std::to_string(i) + " has invalid children");
    }
    if (depth() > params_.max_depth)
        throw std::invalid_argument("tree deeper than its max_depth");
}

auto DecisionTree::depth() const -> std::size_t
{
    std::function<std::size_t(int)> d = [&](int at) -> std::size_t {
        const auto& n = nodes_[static_cast<std::size_t>(at)];
        return n.is_leaf() ? 0 : 1 + std::max(d(n.left), d(n.right));
    };
    return d(0);
}

auto DecisionTree::leaf_count() const -> std::size_t
{
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

auto Condition::holds(const FeatureVector& fv) const -> bool
{
    auto x = fv.feature(feature);
    return cmp == Comparator::le ? x <= threshold : x > threshold;
}

auto Rule::matches(const FeatureVector& fv) const -> bool
{
    return std::all_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.holds(fv); });
}

auto train_c45(std::span<const FeatureVector> dataset, const TreeParams& params) -> DecisionTree
{
    require_labeled(dataset);
    if (params.min_leaf == 0)
        throw std::invalid_argument("min_leaf must be positive");

    std::vector<std::size_t> idx(dataset.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Builder builder(dataset, params);
    builder.grow(idx, 0);
    auto nodes = builder.take();
    if (params.prune) {
        prune_node(nodes, 0, params.prune_confidence);
        nodes = compact(nodes);
    }
    return DecisionTree(std::move(nodes), params);
}

auto predict(const DecisionTree& tree, const FeatureVector& fv) -> Prediction
{
    const auto& leaf = leaf_for(tree, fv);
    double p = (static_cast<double>(leaf.hard) + 1.0) / (static_cast<double>(leaf.easy + leaf.hard) + 2.0);
    return {leaf_label(leaf), p};
}

auto extract_rules(const DecisionTree& tree) -> std::vector<Rule>
{
    std::vector<Rule> rules;
    std::vector<Condition> path;
    std::function<void(int)> walk = [&](int at) {
        const auto& n = tree.nodes()[static_cast<std::size_t>(at)];
        if (n.is_leaf()) {
            auto label = leaf_label(n);
            auto total = n.easy + n.hard;
            auto agree = label == Label::hard ? n.hard : n.easy;
            rules.push_back({path, label, total, static_cast<double>(agree) / static_cast<double>(total)});
            return;
        }
        auto f = static_cast<std::size_t>(n.feature);
        path.push_back({f, Comparator::le, n.threshold});
        walk(n.left);
        path.back().cmp = Comparator::gt;
        walk(n.right);
        path.pop_back();
    };
    walk(0);
    return rules;
}

auto roc_from_scores(std::span<const double> scores, std::span<const Label> labels) -> RocCurve
{
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores and labels differ in length");
    std::uint64_t pos = 0, neg = 0;
    for (auto l : labels) {
        if (l == Label::hard)
            ++pos;
        else if (l == Label::easy)
            ++neg;
        else
            throw std::invalid_argument("ROC needs labeled data");
    }
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("ROC undefined for a single-class dataset");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.roc.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::uint64_t tp = 0, fp = 0;
    for (std::size_t k = 0; k < order.size();) {
        double s = scores[order[k]];
        while (k < order.size() && scores[order[k]] == s) {
            (labels[order[k]] == Label::hard ? tp : fp) += 1;
            ++k;
        }
        curve.roc.push_back({s, rate(fp, neg), rate(tp, pos)});
        curve.pr.push_back({s, rate(tp, pos), rate(tp, tp + fp)});
    }

    curve.auc = 0.0;
    for (std::size_t k = 1; k < curve.roc.size(); ++k) {
        const auto& a = curve.roc[k - 1];
        const auto& b = curve.roc[k];
        curve.auc += (b.false_alarm_rate - a.false_alarm_rate) * (a.hit_rate + b.hit_rate) / 2;
    }
    return curve;
}

auto evaluate(const DecisionTree& tree, std::span<const FeatureVector> dataset) -> EvalReport
{
    require_labeled(dataset);
    EvalReport rep;
    std::vector<double> scores;
    std::vector<Label> labels;
    scores.reserve(dataset.size());
    labels.reserve(dataset.size());
    for (const auto& fv : dataset) {
        auto p = predict(tree, fv);
        scores.push_back(p.hard_probability);
        labels.push_back(fv.label);
        if (fv.label == Label::hard)
            (p.label == Label::hard ? rep.hard_as_hard : rep.hard_as_easy) += 1;
        else
            (p.label == Label::easy ? rep.easy_as_easy : rep.easy_as_hard) += 1;
    }
    auto hard_n = rep.hard_as_hard + rep.hard_as_easy;
    auto easy_n = rep.easy_as_easy + rep.easy_as_hard;
    rep.fpr = rate(rep.hard_as_easy, hard_n);
    rep.fnr = rate(rep.easy_as_hard, easy_n);
    rep.accuracy = rate(rep.hard_as_hard + rep.easy_as_easy, hard_n + easy_n);
    rep.roc_defined = hard_n > 0 && easy_n > 0;
    if (rep.roc_defined) {
        auto curve = roc_from_scores(scores, labels);
        rep.roc_points = std::move(curve.roc);
        rep.pr_points = std::move(curve.pr);
        rep.auc = curve.auc;
    }
    return rep;
}

namespace {
    /// Per-class index lists in dataset order, each shuffled.
    auto shuffled_by_class(std::span<const FeatureVector> dataset, SplitMix64& rng)
        -> std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
    {
        std::vector<std::size_t> easy, hard;
        for (std::size_t i = 0; i < dataset.size(); ++i)
            (dataset[i].label == Label::hard ? hard : easy).push_back(i);
        shuffle(std::span(easy), rng);
        shuffle(std::span(hard), rng);
        return {std::move(easy), std::move(hard)};
    }
}

auto split_dataset(std::span<const FeatureVector> dataset, double train_fraction, std::uint64_t seed) -> DatasetSplit
{
    require_labeled(dataset);
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train fraction must lie in (0, 1)");

    SplitMix64 rng(seed);
    auto [easy, hard] = shuffled_by_class(dataset, rng);
    std::vector<bool> in_train(dataset.size(), false);
    for (const auto* cls : {&easy, &hard}) {
        auto take = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(cls->size()) + 0.5));
        for (std::size_t k = 0; k < take; ++k)
            in_train[(*cls)[k]] = true;
    }

    DatasetSplit split;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        (in_train[i] ? split.train : split.test).push_back(dataset[i]);
    return split;
}

auto kfold_cv(std::span<const FeatureVector> dataset, std::size_t k, const TreeParams& params, std::uint64_t seed)
    -> CrossValidation
{
    require_labeled(dataset);
    if (k < 2 || k > dataset.size())
        throw std::invalid_argument("k-fold needs 2 <= k <= dataset size");

    SplitMix64 rng(seed);
    auto [easy, hard] = shuffled_by_class(dataset, rng);
    std::vector<std::size_t> fold_of(dataset.size());
    std::size_t dealt = 0;
    for (const auto* cls : {&easy, &hard})
        for (auto i : *cls)
            fold_of[i] = dealt++ % k;

    std::vector<EvalReport> reports;
    std::optional<DecisionTree> best;
    std::size_t best_fold = 0;
    auto worse_fpr = [](double a, double b) {
        // NaN ranks last
        if (std::isnan(a))
            return !std::isnan(b);
        return !std::isnan(b) && a > b;
    };
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<FeatureVector> train, test;
        for (std::size_t i = 0; i < dataset.size(); ++i)
            (fold_of[i] == f ? test : train).push_back(dataset[i]);
        auto tree = train_c45(train, params);
        auto rep = evaluate(tree, test);
        bool take = !best || rep.accuracy > reports[best_fold].accuracy
                    || (rep.accuracy == reports[best_fold].accuracy && worse_fpr(reports[best_fold].fpr, rep.fpr));
        reports.push_back(std::move(rep));
        if (take) {
            best = std::move(tree);
            best_fold = f;
        }
    }
    return {std::move(reports), std::move(*best), best_fold};
}

auto to_text(const DecisionTree& tree) -> std::string
{
    std::string out;
    std::function<void(int, std::size_t)> walk = [&](int at, std::size_t indent) {
        const auto& n = tree.nodes()[static_cast<std::size_t>(at)];
        out.append(indent * 2, ' ');
        if (n.is_leaf()) {
            out += "leaf: ";
            out += to_string(leaf_label(n));
            out += " (" + std::to_string(n.easy) + ", " + std::to_string(n.hard) + ")\n";
            return;
        }
        out += FeatureVector::feature_name(static_cast<std::size_t>(n.feature));
        out += " <= " + format_double(n.threshold) + "\n";
        walk(n.left, indent + 1);
        walk(n.right, indent + 1);
    };
    walk(0, 0);
    return out;
}

auto to_text(const Rule& rule) -> std::string
{
    std::string out = "IF";
    if (rule.conditions.empty())
        out += " true";
    for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
        const auto& c = rule.conditions[i];
        out += i == 0 ? " " : " AND ";
        out += FeatureVector::feature_name(c.feature);
        out += c.cmp == Comparator::le ? " <= " : " > ";
        out += format_double(c.threshold);
    }
    out += " THEN ";
    out += to_string(rule.predicted);
    out += " (support " + std::to_string(rule.support) + ", confidence " + format_double(rule.confidence) + ")";
    return out;
}

auto to_json(const DecisionTree& tree) -> nlohmann::json
{
    const auto& p = tree.params();
    nlohmann::json j;
    j["params"] = {{"min_leaf", p.min_leaf},
                   {"max_depth", p.max_depth},
                   {"min_gain_ratio", p.min_gain_ratio},
                   {"prune", p.prune},
                   {"prune_confidence", p.prune_confidence}};
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : tree.nodes())
        j["nodes"].push_back({{"feature", n.feature},
                              {"threshold", n.threshold},
                              {"left", n.left},
                              {"right", n.right},
                              {"easy", n.easy},
                              {"hard", n.hard}});
    return j;
}

auto tree_from_json(const nlohmann::json& j) -> DecisionTree
{
    TreeParams p;
    const auto& jp = j.at("params");
    p.min_leaf = jp.at("min_leaf").get<std::size_t>();
    p.max_depth = jp.at("max_depth").get<std::size_t>();
    p.min_gain_ratio = jp.at("min_gain_ratio").get<double>();
    p.prune = jp.at("prune").get<bool>();
    p.prune_confidence = jp.at("prune_confidence").get<double>();

    std::vector<DecisionTree::Node> nodes;
    for (const auto& jn : j.at("nodes"))
        nodes.push_back({jn.at("feature").get<int>(), jn.at("threshold").get<double>(), jn.at("left").get<int>(),
                         jn.at("right").get<int>(), jn.at("easy").get<std::uint64_t>(),
                         jn.at("hard").get<std::uint64_t>()});
    return DecisionTree(std::move(nodes), p);
}

auto roc_csv(const EvalReport& report) -> std::string
{
    std::string out = "threshold,fpr,tpr\n";
    for (const auto& p : report.roc_points)
        out += format_double(p.threshold) + "," + format_double(p.false_alarm_rate) + "," + format_double(p.hit_rate)
               + "\n";
    return out;
}

auto pr_csv(const EvalReport& report) -> std::string
{
    std::string out = "threshold,recall,precision\n";
    for (const auto& p : report.pr_points)
        out += format_double(p.threshold) + "," + format_double(p.recall) + "," + format_double(p.precision) + "\n";
    return out;
}

} // namespace biclab
