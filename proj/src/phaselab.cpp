#include "biclab/phaselab.hpp"

#include "biclab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace biclab {

namespace {

    void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body)
    {
        jobs = std::max<std::size_t>(1, std::min(jobs, count));
        if (jobs == 1) {
            for (std::size_t i = 0; i < count; ++i)
                body(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> workers;
        workers.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w)
            workers.emplace_back([&] {
                for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    try {
                        body(i);
                    }
                    catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next.store(count);
                    }
                }
            });
        for (auto& t : workers)
            t.join();
        if (failure)
            std::rethrow_exception(failure);
    }

    auto format_fixed(double x) -> std::string
    {
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 6);
        std::string s(buf, p);
        if (s == "-0.000000")
            s = "0.000000";
        return s;
    }

    auto parse_double(std::string_view s, std::size_t line) -> double
    {
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        double x = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw ParseError(line, "expected a number, got '" + std::string(s) + "'");
        return x;
    }

    template <typename Int>
    auto parse_int(std::string_view s, std::size_t line) -> Int
    {
        Int x{};
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw ParseError(line, "expected an integer, got '" + std::string(s) + "'");
        return x;
    }

    auto parse_rational(std::string_view s, std::size_t line) -> Rational
    {
        try {
            return Rational::parse_decimal(s);
        }
        catch (const std::invalid_argument& e) {
            throw ParseError(line, e.what());
        }
    }

    /// Splits CSV text into rows of fields after checking the header.
    auto csv_rows(std::string_view text, std::string_view header, std::size_t columns)
        -> std::vector<std::pair<std::size_t, std::vector<std::string_view>>>
    {
        std::vector<std::pair<std::size_t, std::vector<std::string_view>>> rows;
        bool seen_header = false;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos < text.size()) {
            auto nl = text.find('\n', pos);
            auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() : nl + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);
            if (line.empty())
                continue;
            if (!seen_header) {
                if (line != header)
                    throw ParseError(line_no, "expected header '" + std::string(header) + "'");
                seen_header = true;
                continue;
            }
            std::vector<std::string_view> fields;
            std::size_t start = 0;
            while (true) {
                auto c = line.find(',', start);
                fields.push_back(line.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start));
                if (c == std::string_view::npos)
                    break;
                start = c + 1;
            }
            if (fields.size() != columns)
                throw ParseError(line_no, "expected " + std::to_string(columns) + " columns, got "
                                              + std::to_string(fields.size()));
            rows.emplace_back(line_no, std::move(fields));
        }
        if (!seen_header)
            throw ParseError(0, "CSV is missing its header");
        return rows;
    }

    constexpr std::string_view sweep_header = "z,bin_low,bin_high,n,n_unknown,cost_p25,cost_p50,cost_p90,p_solvable";
    constexpr std::string_view distance_header = "d,n,mean_cost";

    struct BinKey {
        std::size_t z;
        bool underflow;
        std::int64_t index;

        friend auto operator<=>(const BinKey& a, const BinKey& b)
        {
            if (auto c = a.z <=> b.z; c != 0)
                return c;
            // the underflow bin sorts first
            if (a.underflow != b.underflow)
                return a.underflow ? std::strong_ordering::less : std::strong_ordering::greater;
            return a.index <=> b.index;
        }
        friend bool operator==(const BinKey&, const BinKey&) = default;
    };
}

void validate(const EnsembleConfig& config)
{
    std::visit(
        [](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, UniformGenerator>) {
                if (g.u_n == 0 || g.v_n == 0)
                    throw std::invalid_argument("uniform generator needs u_n, v_n >= 1");
                if (!(g.edge_prob > 0.0 && g.edge_prob < 1.0))
                    throw std::invalid_argument("edge_prob must lie in (0, 1)");
            }
            else {
                if (g.u_pool < 2 || g.v_pool < 2)
                    throw std::invalid_argument("power-law pools must hold at least 2 labels");
                if (g.w_observations == 0)
                    throw std::invalid_argument("w_observations must be positive");
                if (!(g.exponent > 1.0))
                    throw std::invalid_argument("power-law exponent must exceed 1");
            }
        },
        config.generator);
    if (config.instance_count == 0)
        throw std::invalid_argument("instance_count must be positive");
    for (auto z : config.z_values)
        if (z < 2)
            throw std::invalid_argument("every z value must be at least 2");
    if (!(config.bin_width > 0.0))
        throw std::invalid_argument("bin_width must be positive");
}

auto to_json(const EnsembleConfig& config) -> nlohmann::json
{
    nlohmann::json gen = std::visit(
        [](const auto& g) -> nlohmann::json {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, UniformGenerator>)
                return {{"kind", "uniform"}, {"u_n", g.u_n}, {"v_n", g.v_n}, {"edge_prob", g.edge_prob}};
            else
                return {{"kind", "powerlaw"},
                        {"u_pool", g.u_pool},
                        {"v_pool", g.v_pool},
                        {"w_observations", g.w_observations},
                        {"exponent", g.exponent}};
        },
        config.generator);

    nlohmann::json j;
    j["generator"] = gen;
    j["instance_count"] = config.instance_count;
    j["seed"] = config.seed;
    j["z_values"] = config.z_values;
    if (auto b = config.budget.max_combinations())
        j["budget"] = *b;
    else
        j["budget"] = nullptr;
    j["bin_width"] = config.bin_width;
    j["blacklist"] = to_string(config.blacklist);
    return j;
}

auto config_from_json(const nlohmann::json& j) -> EnsembleConfig
{
    EnsembleConfig c;
    const auto& g = j.at("generator");
    auto kind = g.at("kind").get<std::string>();
    if (kind == "uniform")
        c.generator = UniformGenerator{g.at("u_n").get<std::size_t>(), g.at("v_n").get<std::size_t>(),
                                       g.at("edge_prob").get<double>()};
    else if (kind == "powerlaw")
        c.generator = PowerLawGenerator{g.at("u_pool").get<std::size_t>(), g.at("v_pool").get<std::size_t>(),
                                        g.at("w_observations").get<std::size_t>(), g.at("exponent").get<double>()};
    else
        throw std::invalid_argument("unknown generator kind '" + kind + "'");

    c.instance_count = j.at("instance_count").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.z_values = j.at("z_values").get<std::vector<std::size_t>>();
    if (j.contains("budget") && !j.at("budget").is_null())
        c.budget = SearchBudget::of(j.at("budget").get<std::uint64_t>());
    c.bin_width = j.value("bin_width", default_bin_width);
    c.blacklist = parse_blacklist_mode(j.value("blacklist", std::string("subset")));
    validate(c);
    return c;
}

auto substream_seed(std::uint64_t stream_seed, std::uint64_t attempt) noexcept -> std::uint64_t
{
    return stream_seed ^ (attempt * SplitMix64::golden_gamma);
}

auto gen_uniform(std::size_t u_n, std::size_t v_n, double edge_prob, std::uint64_t seed) -> BipartiteGraph
{
    validate(EnsembleConfig{UniformGenerator{u_n, v_n, edge_prob}, 1, seed, {}, {}, default_bin_width,
                            BlacklistMode::subset});
    std::vector<Edge> edges;
    for (std::size_t attempt = 0; attempt < max_generation_attempts; ++attempt) {
        SplitMix64 rng(substream_seed(seed, attempt));
        edges.clear();
        for (std::uint32_t i = 0; i < u_n; ++i)
            for (std::uint32_t j = 0; j < v_n; ++j)
                if (rng.next_unit() < edge_prob)
                    edges.push_back({i, j});
        if (!edges.empty())
            return BipartiteGraph(u_n, v_n, edges);
    }
    throw std::runtime_error("uniform generator drew no edges in " + std::to_string(max_generation_attempts)
                             + " attempts");
}

auto gen_powerlaw(std::size_t u_pool, std::size_t v_pool, std::size_t w_observations, double exponent,
                  std::uint64_t seed) -> ObservedGraph
{
    validate(EnsembleConfig{PowerLawGenerator{u_pool, v_pool, w_observations, exponent}, 1, seed, {}, {},
                            default_bin_width, BlacklistMode::subset});

    std::vector<double> cumulative(v_pool);
    double total = 0.0;
    for (std::size_t k = 0; k < v_pool; ++k) {
        total += std::pow(static_cast<double>(k + 1), -exponent);
        cumulative[k] = total;
    }

    SplitMix64 rng(seed);
    ObservationLog log;
    log.records.reserve(w_observations);
    for (std::size_t n = 0; n < w_observations; ++n) {
        auto actor = rng.next_below(u_pool);
        auto x = rng.next_unit() * total;
        auto rank = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), x)
                                             - cumulative.begin());
        rank = std::min(rank, v_pool - 1);
        log.records.emplace_back("a" + std::to_string(actor), "t" + std::to_string(rank));
    }
    return ObservedGraph{build_graph(log), log.w()};
}

auto generate_instance(const EnsembleConfig& config, std::size_t index) -> ObservedGraph
{
    auto seed = instance_seed(config.seed, index);
    return std::visit(
        [&](const auto& g) -> ObservedGraph {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, UniformGenerator>) {
                auto graph = gen_uniform(g.u_n, g.v_n, g.edge_prob, seed);
                auto w = graph.edge_count();
                return ObservedGraph{std::move(graph), w};
            }
            else
                return gen_powerlaw(g.u_pool, g.v_pool, g.w_observations, g.exponent, seed);
        },
        config.generator);
}

auto nearest_rank(const std::vector<std::uint64_t>& sorted, unsigned percent) -> std::uint64_t
{
    if (sorted.empty())
        throw std::invalid_argument("percentile of an empty sample");
    // rank = ceil(percent/100 * n), clamped to [1, n]
    auto n = sorted.size();
    auto rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

auto aggregate_sweep(std::vector<InstanceRun> runs, double bin_width) -> std::vector<SweepBin>
{
    struct Acc {
        std::vector<std::uint64_t> costs;
        std::uint64_t unknown = 0;
        std::uint64_t solved = 0;
    };
    std::map<BinKey, Acc> acc;
    for (const auto& r : runs) {
        BinKey key{r.z, std::isinf(r.pi_log2), 0};
        if (!key.underflow)
            key.index = static_cast<std::int64_t>(std::floor(r.pi_log2 / bin_width));
        auto& a = acc[key];
        a.costs.push_back(r.cost);
        if (r.unknown)
            ++a.unknown;
        else if (r.solvable)
            ++a.solved;
    }

    std::vector<SweepBin> bins;
    bins.reserve(acc.size());
    for (auto& [key, a] : acc) {
        std::sort(a.costs.begin(), a.costs.end());
        SweepBin b{};
        b.z = key.z;
        b.underflow = key.underflow;
        if (key.underflow)
            b.bin_low = b.bin_high = -std::numeric_limits<double>::infinity();
        else {
            b.bin_low = static_cast<double>(key.index) * bin_width;
            b.bin_high = static_cast<double>(key.index + 1) * bin_width;
        }
        b.n = a.costs.size();
        b.n_unknown = a.unknown;
        b.cost_p25 = nearest_rank(a.costs, 25);
        b.cost_p50 = nearest_rank(a.costs, 50);
        b.cost_p90 = nearest_rank(a.costs, 90);
        b.p_solvable = Rational::make(a.solved, b.n);
        bins.push_back(b);
    }
    return bins;
}

auto run_sweep(const EnsembleConfig& config, const SweepOptions& options) -> SweepResult
{
    validate(config);
    std::vector<std::vector<InstanceRun>> per_instance(config.instance_count);
    std::mutex progress;
    SolveOptions solve_opts{config.blacklist, false};

    parallel_for(config.instance_count, options.jobs, [&](std::size_t i) {
        auto og = generate_instance(config, i);
        auto fv = extract_features(og.graph, og.w);
        auto op = order_parameter(fv);
        auto& out = per_instance[i];
        for (auto z : config.z_values) {
            auto rep = find_max_weight_of_size(og.graph, z, config.budget, solve_opts);
            out.push_back({i, z, og.graph.v_count(), static_cast<std::size_t>(fv.size_max), op.pi_log2,
                           rep.combinations_explored, rep.found.has_value(), rep.budget_exhausted});
        }
        if (options.on_instance) {
            std::lock_guard lock(progress);
            options.on_instance(i);
        }
    });

    SweepResult result;
    for (auto& runs : per_instance)
        result.runs.insert(result.runs.end(), runs.begin(), runs.end());
    result.bins = aggregate_sweep(result.runs, config.bin_width);
    return result;
}

auto run_distance_sweep(const EnsembleConfig& config, const std::vector<int>& d_values, const SweepOptions& options)
    -> DistanceSweepResult
{
    validate(config);
    std::set<int> ds(d_values.begin(), d_values.end());
    std::vector<std::optional<InstanceDistance>> per_instance(config.instance_count);
    std::mutex progress;
    SolveOptions solve_opts{config.blacklist, true};

    parallel_for(config.instance_count, options.jobs, [&](std::size_t i) {
        auto og = generate_instance(config, i);
        const auto& g = og.graph;
        auto z_max = static_cast<std::int64_t>(size_max_via_gram(gram(adjacency_matrix(g))));
        if (z_max >= 2) {
            InstanceDistance rec{i, static_cast<std::size_t>(z_max), g.v_count(), {}};
            for (auto d : ds) {
                auto z = z_max - d;
                if (z < 2 || z > static_cast<std::int64_t>(g.v_count()))
                    continue;
                auto rep = find_max_weight_of_size(g, static_cast<std::size_t>(z), config.budget, solve_opts);
                rec.costs.emplace_back(d, rep.combinations_explored);
            }
            per_instance[i] = std::move(rec);
        }
        if (options.on_instance) {
            std::lock_guard lock(progress);
            options.on_instance(i);
        }
    });

    DistanceSweepResult result;
    std::map<int, std::pair<std::uint64_t, std::uint64_t>> totals;
    for (auto& rec : per_instance) {
        if (!rec) {
            ++result.skipped;
            continue;
        }
        for (auto [d, cost] : rec->costs) {
            auto& t = totals[d];
            t.first += 1;
            t.second += cost;
        }
        result.instances.push_back(std::move(*rec));
    }
    for (auto [d, t] : totals)
        result.rows.push_back({d, t.first, t.second, Rational::make(t.second, t.first), d >= 0});
    return result;
}

auto sweep_csv(const std::vector<SweepBin>& bins) -> std::string
{
    std::string out(sweep_header);
    out += '\n';
    for (const auto& b : bins) {
        out += std::to_string(b.z) + ',' + format_fixed(b.bin_low) + ',' + format_fixed(b.bin_high) + ','
               + std::to_string(b.n) + ',' + std::to_string(b.n_unknown) + ',' + std::to_string(b.cost_p25) + ','
               + std::to_string(b.cost_p50) + ',' + std::to_string(b.cost_p90) + ','
               + b.p_solvable.to_decimal(6) + '\n';
    }
    return out;
}

auto parse_sweep_csv(std::string_view text) -> std::vector<SweepBin>
{
    std::vector<SweepBin> bins;
    for (const auto& [line, f] : csv_rows(text, sweep_header, 9)) {
        SweepBin b{};
        b.z = parse_int<std::size_t>(f[0], line);
        b.bin_low = parse_double(f[1], line);
        b.bin_high = parse_double(f[2], line);
        b.underflow = std::isinf(b.bin_low);
        b.n = parse_int<std::uint64_t>(f[3], line);
        b.n_unknown = parse_int<std::uint64_t>(f[4], line);
        b.cost_p25 = parse_int<std::uint64_t>(f[5], line);
        b.cost_p50 = parse_int<std::uint64_t>(f[6], line);
        b.cost_p90 = parse_int<std::uint64_t>(f[7], line);
        b.p_solvable = parse_rational(f[8], line);
        bins.push_back(b);
    }
    return bins;
}

auto distance_csv(const std::vector<DistanceRow>& rows) -> std::string
{
    std::string out(distance_header);
    out += '\n';
    for (const auto& r : rows)
        out += std::to_string(r.d) + ',' + std::to_string(r.n) + ',' + r.mean_cost.to_decimal(6) + '\n';
    return out;
}

auto parse_distance_csv(std::string_view text) -> std::vector<DistanceRow>
{
    std::vector<DistanceRow> rows;
    for (const auto& [line, f] : csv_rows(text, distance_header, 3)) {
        DistanceRow r{};
        r.d = parse_int<int>(f[0], line);
        r.n = parse_int<std::uint64_t>(f[1], line);
        r.mean_cost = parse_rational(f[2], line);
        r.solvable_regime = r.d >= 0;
        rows.push_back(r);
    }
    return rows;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

auto read_text_file(const std::filesystem::path& path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError("failed reading '" + path.string() + "'");
    return ss.str();
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path)
{
    write_text_file(path, sweep_csv(result.bins));
}

void write_distance_csv(const DistanceSweepResult& result, const std::filesystem::path& path)
{
    write_text_file(path, distance_csv(result.rows));
}

} // namespace biclab
