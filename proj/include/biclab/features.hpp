#pragma once

#include "biclab/bigraph.hpp"
#include "biclab/solver.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace biclab {

/// Non-negative reduced fraction.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    /// Throws std::invalid_argument on a zero denominator.
    [[nodiscard]] static Rational make(std::uint64_t num, std::uint64_t den);
    /// Parses "123" or "1.250000"; the result is exact.
    [[nodiscard]] static Rational parse_decimal(std::string_view s);

    [[nodiscard]] double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    /// Fixed-point rendering rounded half-up at `digits` fractional digits.
    [[nodiscard]] std::string to_decimal(int digits = 6) const;

    friend bool operator==(const Rational&, const Rational&) = default;
};

enum class Label { easy, hard, unlabeled };

[[nodiscard]] const char* to_string(Label l);
[[nodiscard]] Label parse_label(std::string_view s);

/// Minimum gram entry for a pair to count as a 2-weight (2-size) biclique.
inline constexpr std::uint32_t default_pair_threshold = 2;

struct FeatureVector {
    static constexpr std::size_t feature_count = 9;

    std::uint64_t u_card = 0;
    std::uint64_t v_card = 0;
    std::uint64_t e_card = 0;
    std::uint64_t comb_estimate = 0;
    Rational social_degree;
    std::uint64_t weight_max = 0;
    std::uint64_t size_max = 0;
    std::uint64_t freq_weight2 = 0;
    std::uint64_t freq_size2 = 0;
    Label label = Label::unlabeled;

    /// Feature i in CSV column order: u, v, e, comb, social, wmax, zmax, fw2, fs2.
    [[nodiscard]] double feature(std::size_t i) const;
    [[nodiscard]] static std::string_view feature_name(std::size_t i);

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Feature indices, for readability at call sites.
namespace feature {
    inline constexpr std::size_t u_card = 0;
    inline constexpr std::size_t v_card = 1;
    inline constexpr std::size_t e_card = 2;
    inline constexpr std::size_t comb = 3;
    inline constexpr std::size_t social = 4;
    inline constexpr std::size_t weight_max = 5;
    inline constexpr std::size_t size_max = 6;
    inline constexpr std::size_t freq_weight2 = 7;
    inline constexpr std::size_t freq_size2 = 8;
}

struct OrderParameter {
    Rational pi;
    /// log2(pi), or -infinity when pi = 0.
    double pi_log2;

    [[nodiscard]] bool is_zero() const noexcept { return pi.num == 0; }
};

/// Product of the three largest strictly-lower-triangular entries of gram(Q);
/// fewer entries multiply what is there, none gives 0.
[[nodiscard]] std::uint64_t comb_estimate(const GramMatrix& gram_u);

/// (|U||V|)/w. Throws std::invalid_argument when w = 0.
[[nodiscard]] Rational social_degree(std::uint64_t u_card, std::uint64_t v_card, std::uint64_t w);

[[nodiscard]] std::uint64_t count_weight2(const GramMatrix& gram_u, std::uint32_t threshold = default_pair_threshold);
[[nodiscard]] std::uint64_t count_size2(const GramMatrix& gram_v, std::uint32_t threshold = default_pair_threshold);

/// w defaults to |E|.
[[nodiscard]] FeatureVector extract_features(const BipartiteGraph& g, std::optional<std::uint64_t> w = std::nullopt,
                                             std::uint32_t pair_threshold = default_pair_threshold);

[[nodiscard]] OrderParameter order_parameter(const FeatureVector& fv);

inline constexpr std::uint64_t default_label_budget = 1'000'000;

struct LabelOutcome {
    Label label;
    SolveReport report;
};

/// Size-maximal search at z = z_max; EASY when it completes within the budget.
[[nodiscard]] LabelOutcome label_instance(const BipartiteGraph& g, const SearchBudget& budget);

[[nodiscard]] std::string feature_csv_header();
[[nodiscard]] std::string to_csv_row(const FeatureVector& fv);
/// Parses a whole FeatureVector CSV (header required); throws ParseError.
[[nodiscard]] std::vector<FeatureVector> parse_feature_csv(std::string_view text);

} // namespace biclab
