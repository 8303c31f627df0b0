#pragma once

#include "biclab/bigraph.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace biclab {

/// Hardware-independent search budget, counted in explored combinations.
class SearchBudget {
public:
    SearchBudget() = default;

    [[nodiscard]] static SearchBudget unlimited() { return {}; }
    /// Throws std::invalid_argument for a zero budget.
    [[nodiscard]] static SearchBudget of(std::uint64_t max_combinations);

    [[nodiscard]] bool bounded() const noexcept { return max_.has_value(); }
    [[nodiscard]] std::optional<std::uint64_t> max_combinations() const noexcept { return max_; }
    [[nodiscard]] bool allows(std::uint64_t explored) const noexcept { return !max_ || explored < *max_; }

    friend bool operator==(const SearchBudget&, const SearchBudget&) = default;

private:
    std::optional<std::uint64_t> max_;
};

/// How candidate V' sets are screened against the blacklist.
enum class BlacklistMode {
    /// Skip V' when any blacklisted set is a subset of it.
    subset,
    /// Skip V' only when V' itself is blacklisted (exact membership).
    literal,
    /// No blacklist at all; every candidate is explored.
    off,
};

struct SolveOptions {
    BlacklistMode blacklist = BlacklistMode::subset;
    /// Answer requests with z above the gram-derived z_max as NoSolution at zero cost.
    bool guarantee_check = false;
};

struct SolveReport {
    std::optional<Biclique> found;
    std::uint64_t combinations_explored = 0;
    /// Saturates at 2^64 - 1 on very large candidate spaces.
    std::uint64_t blacklist_skips = 0;
    std::size_t max_r_reached = 0;
    bool budget_exhausted = false;

    friend bool operator==(const SolveReport&, const SolveReport&) = default;
};

enum class Verdict { yes, no, unknown };

struct Decision {
    Verdict verdict;
    SolveReport report;
};

/// Backtracking search over C(V, r), r = 2..z, in lexicographic order,
/// returning the first V' of size z with |adjacent_to(V')| >= 2 together with
/// its full common neighbourhood.
[[nodiscard]] SolveReport find_biclique(const BipartiteGraph& g, std::size_t z, const SearchBudget& budget,
                                        const SolveOptions& options = {});

/// Same traversal, but keeps the heaviest size-z witness (ties: lexicographically
/// smallest v-set) and stops early once it reaches the gram(Qᵀ) weight bound.
[[nodiscard]] SolveReport find_max_weight_of_size(const BipartiteGraph& g, std::size_t z,
                                                  const SearchBudget& budget,
                                                  const SolveOptions& options = {});

/// Is there a biclique with weight >= t and size >= z? t = 1 and z = 1 are
/// answered from degrees at zero cost; t = 0 or z = 0 throws.
[[nodiscard]] Decision decide(const BipartiteGraph& g, std::size_t t, std::size_t z, const SearchBudget& budget,
                              const SolveOptions& options = {});

/// z_max: the largest off-diagonal entry of a U-side gram matrix.
[[nodiscard]] std::size_t size_max_via_gram(const GramMatrix& gram_u);

/// Weight of the heaviest size-2 biclique, an upper bound on the weight of
/// every biclique of size >= 2. Expects a V-side gram matrix.
[[nodiscard]] std::size_t weight_upper_bound(const GramMatrix& gram_v, std::size_t z);

/// Exhaustive enumeration of every non-empty V' ⊆ V. Exponential; refuses
/// graphs with more than `max_v` v-vertices.
struct OracleProfile {
    /// Entry s is the largest |N(V')| over all V' with |V'| = s (entry 0 is |U|).
    std::vector<std::size_t> best_weight_by_size;
    /// Size-maximal, then weight-maximal, biclique with weight >= 2.
    std::optional<Biclique> best;

    [[nodiscard]] bool answer(std::size_t t, std::size_t z) const;
    /// Largest size over bicliques of weight >= 2, 0 if none.
    [[nodiscard]] std::size_t size_max() const;
};

struct OracleResult {
    bool answer;
    std::optional<Biclique> best;
};

inline constexpr std::size_t default_oracle_cap = 20;

[[nodiscard]] OracleProfile brute_force_profile(const BipartiteGraph& g, std::size_t max_v = default_oracle_cap);
[[nodiscard]] OracleResult brute_force_oracle(const BipartiteGraph& g, std::size_t t, std::size_t z,
                                              std::size_t max_v = default_oracle_cap);

/// Number of r-subsets of an n-set, saturating at 2^64 - 1.
[[nodiscard]] std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t r);

/// Line-oriented "key value" rendering; stable across runs.
[[nodiscard]] std::string to_text(const SolveReport& report);
[[nodiscard]] const char* to_string(Verdict v);
[[nodiscard]] const char* to_string(BlacklistMode m);
[[nodiscard]] BlacklistMode parse_blacklist_mode(const std::string& s);

} // namespace biclab
