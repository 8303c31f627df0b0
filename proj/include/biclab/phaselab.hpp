#pragma once

#include "biclab/bigraph.hpp"
#include "biclab/features.hpp"
#include "biclab/rng.hpp"
#include "biclab/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace biclab {

/// File-system failure, carrying the offending path in its message.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Each (u, v) pair becomes an edge independently with `edge_prob`.
struct UniformGenerator {
    std::size_t u_n;
    std::size_t v_n;
    double edge_prob;

    friend bool operator==(const UniformGenerator&, const UniformGenerator&) = default;
};

/// `w_observations` draws of (actor, target): actor uniform over `u_pool`,
/// target rank k in 1..v_pool with probability proportional to k^-exponent.
struct PowerLawGenerator {
    std::size_t u_pool;
    std::size_t v_pool;
    std::size_t w_observations;
    double exponent;

    friend bool operator==(const PowerLawGenerator&, const PowerLawGenerator&) = default;
};

using Generator = std::variant<UniformGenerator, PowerLawGenerator>;

inline constexpr double default_bin_width = 0.25;

struct EnsembleConfig {
    Generator generator;
    std::size_t instance_count = 1;
    std::uint64_t seed = 0;
    std::vector<std::size_t> z_values;
    SearchBudget budget;
    double bin_width = default_bin_width;
    BlacklistMode blacklist = BlacklistMode::subset;

    friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const EnsembleConfig& config);

/// JSON mirror of EnsembleConfig. `budget` is an integer or null (unlimited);
/// `generator.kind` is "uniform" or "powerlaw".
[[nodiscard]] nlohmann::json to_json(const EnsembleConfig& config);
[[nodiscard]] EnsembleConfig config_from_json(const nlohmann::json& j);

/// Stream seed for one instance: the first SplitMix64 output of `seed`,
/// XOR the instance index. Mixing first keeps ensembles whose seeds differ
/// only in low bits from sharing instances.
[[nodiscard]] constexpr std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t instance) noexcept
{
    return SplitMix64(seed).next() ^ instance;
}

/// Retry `attempt` of a stream draws from state seed XOR (attempt * golden gamma).
[[nodiscard]] std::uint64_t substream_seed(std::uint64_t stream_seed, std::uint64_t attempt) noexcept;

inline constexpr std::size_t max_generation_attempts = 64;

/// Row-major Bernoulli draws. An edgeless draw is retried on the next
/// substream; after max_generation_attempts a std::runtime_error is thrown.
[[nodiscard]] BipartiteGraph gen_uniform(std::size_t u_n, std::size_t v_n, double edge_prob, std::uint64_t seed);

/// Builds the graph with observation-log semantics, so unobserved vertices
/// are absent and `w` counts every draw.
[[nodiscard]] ObservedGraph gen_powerlaw(std::size_t u_pool, std::size_t v_pool, std::size_t w_observations,
                                         double exponent, std::uint64_t seed);

/// Instance `index` of an ensemble, with its w (|E| for uniform graphs).
[[nodiscard]] ObservedGraph generate_instance(const EnsembleConfig& config, std::size_t index);

struct InstanceRun {
    std::size_t instance;
    std::size_t z;
    std::size_t v_card;
    std::size_t z_max;
    double pi_log2;
    std::uint64_t cost;
    bool solvable;
    bool unknown;
};

struct SweepBin {
    std::size_t z;
    /// True for the π = 0 bin; its bounds are both -inf.
    bool underflow;
    double bin_low;
    double bin_high;
    std::uint64_t n;
    std::uint64_t n_unknown;
    std::uint64_t cost_p25;
    std::uint64_t cost_p50;
    std::uint64_t cost_p90;
    /// Solved over n; budget-exhausted runs never count as solved.
    Rational p_solvable;

    friend bool operator==(const SweepBin&, const SweepBin&) = default;
};

struct SweepResult {
    std::vector<SweepBin> bins;
    /// Every (instance, z) run, ordered by instance then z.
    std::vector<InstanceRun> runs;
};

struct DistanceRow {
    int d;
    std::uint64_t n;
    std::uint64_t total_cost;
    Rational mean_cost;
    /// d >= 0: a biclique of the requested size is guaranteed to exist.
    bool solvable_regime;

    friend bool operator==(const DistanceRow&, const DistanceRow&) = default;
};

struct InstanceDistance {
    std::size_t instance;
    std::size_t z_max;
    std::size_t v_card;
    /// (d, cost) for every requested d that is feasible for this instance.
    std::vector<std::pair<int, std::uint64_t>> costs;
};

struct DistanceSweepResult {
    std::vector<DistanceRow> rows;
    std::vector<InstanceDistance> instances;
    /// Instances with z_max < 2, which admit no request at all.
    std::uint64_t skipped = 0;
};

struct SweepOptions {
    std::size_t jobs = 1;
    /// Called once per finished instance, serialised but in completion order.
    std::function<void(std::size_t instance)> on_instance;
};

/// Nearest-rank percentile of an ascending, non-empty sample.
[[nodiscard]] std::uint64_t nearest_rank(const std::vector<std::uint64_t>& sorted, unsigned percent);

[[nodiscard]] SweepResult run_sweep(const EnsembleConfig& config, const SweepOptions& options = {});

/// Aggregates per-run records into bins; independent of record order.
[[nodiscard]] std::vector<SweepBin> aggregate_sweep(std::vector<InstanceRun> runs, double bin_width);

[[nodiscard]] DistanceSweepResult run_distance_sweep(const EnsembleConfig& config, const std::vector<int>& d_values,
                                                     const SweepOptions& options = {});

[[nodiscard]] std::string sweep_csv(const std::vector<SweepBin>& bins);
[[nodiscard]] std::vector<SweepBin> parse_sweep_csv(std::string_view text);
[[nodiscard]] std::string distance_csv(const std::vector<DistanceRow>& rows);
[[nodiscard]] std::vector<DistanceRow> parse_distance_csv(std::string_view text);

/// Throws IoError naming the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
void write_distance_csv(const DistanceSweepResult& result, const std::filesystem::path& path);

} // namespace biclab
