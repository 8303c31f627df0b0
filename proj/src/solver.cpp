#include "biclab/solver.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>

namespace biclab {

namespace {

    constexpr auto saturated = std::numeric_limits<std::uint64_t>::max();

    auto sat_add(std::uint64_t a, std::uint64_t b) -> std::uint64_t
    {
        return a > saturated - b ? saturated : a + b;
    }

    /// 0-based position of `combo` among all |combo|-subsets of {0..n-1} in
    /// lexicographic order.
    auto lex_rank(std::span<const std::uint32_t> combo, std::size_t n) -> std::uint64_t
    {
        std::uint64_t rank = 0;
        std::int64_t prev = -1;
        auto r = combo.size();
        for (std::size_t i = 0; i < r; ++i) {
            for (auto j = static_cast<std::uint64_t>(prev + 1); j < combo[i]; ++j)
                rank = sat_add(rank, binomial_saturating(n - 1 - j, r - 1 - i));
            prev = combo[i];
        }
        return rank;
    }

    enum class Goal { first_hit, max_weight };

    struct SearchSpec {
        std::size_t z;
        std::size_t accept_weight;
        Goal goal;
        std::size_t weight_bound;
    };

    /// Tracks the outcome at r = z. Returns true when the search may stop.
    class Acceptor {
    public:
        explicit Acceptor(const SearchSpec& spec) : spec_(spec) {}

        auto offer(std::span<const std::uint32_t> v_set, const BitRow& common, std::size_t weight) -> bool
        {
            if (weight < spec_.accept_weight)
                return false;
            if (spec_.goal == Goal::first_hit) {
                best_ = Biclique{common.indices(), {v_set.begin(), v_set.end()}};
                return true;
            }
            if (!best_ || weight > best_->weight()) {
                best_ = Biclique{common.indices(), {v_set.begin(), v_set.end()}};
                return weight >= spec_.weight_bound;
            }
            return false;
        }

        auto take() -> std::optional<Biclique> { return std::move(best_); }

    private:
        const SearchSpec& spec_;
        std::optional<Biclique> best_;
    };

    /// Sorted, fixed-width sets of v-indices with their common neighbourhoods.
    struct Level {
        std::size_t width = 0;
        std::vector<std::uint32_t> flat;
        std::vector<BitRow> common;

        [[nodiscard]] auto count() const -> std::size_t { return common.size(); }
        [[nodiscard]] auto set(std::size_t i) const -> std::span<const std::uint32_t>
        {
            return {flat.data() + i * width, width};
        }

        [[nodiscard]] auto contains(std::span<const std::uint32_t> key) const -> bool
        {
            std::size_t lo = 0, hi = count();
            while (lo < hi) {
                auto mid = lo + (hi - lo) / 2;
                auto s = set(mid);
                if (std::lexicographical_compare(s.begin(), s.end(), key.begin(), key.end()))
                    lo = mid + 1;
                else
                    hi = mid;
            }
            if (lo == count())
                return false;
            auto s = set(lo);
            return std::equal(s.begin(), s.end(), key.begin(), key.end());
        }

        void push(std::span<const std::uint32_t> s, BitRow n)
        {
            flat.insert(flat.end(), s.begin(), s.end());
            common.push_back(std::move(n));
        }
    };

    /// Subset-pruned traversal. A size-r candidate contains a blacklisted set
    /// iff one of its (r-1)-subsets was pruned or blacklisted in the previous
    /// round, so candidates are generated only from pairs of surviving
    /// (r-1)-sets that share an (r-2)-prefix, then checked against the
    /// remaining (r-1)-subsets. Joining sorted survivors in order yields the
    /// candidates in lexicographic order.
    auto search_subset(const BipartiteGraph& g, const SearchSpec& spec, const SearchBudget& budget) -> SolveReport
    {
        SolveReport report;
        Acceptor acceptor(spec);
        const auto n = g.v_count();

        Level level{1, {}, {}};
        for (std::uint32_t j = 0; j < n; ++j)
            level.push(std::span<const std::uint32_t>(&j, 1), g.v_column(j));

        std::vector<std::uint32_t> cand;
        std::vector<std::uint32_t> sub;
        for (std::size_t r = 2; r <= spec.z; ++r) {
            report.max_r_reached = r;
            const bool last_round = (r == spec.z);
            std::uint64_t explored_r = 0;
            Level next{r, {}, {}};

            const auto prefix = r - 2;
            std::size_t group_begin = 0;
            while (group_begin < level.count()) {
                auto group_end = group_begin + 1;
                while (group_end < level.count()
                       && std::equal(level.set(group_begin).begin(), level.set(group_begin).begin() + prefix,
                                     level.set(group_end).begin()))
                    ++group_end;

                for (auto i = group_begin; i < group_end; ++i) {
                    for (auto k = i + 1; k < group_end; ++k) {
                        auto head = level.set(i);
                        auto tail = level.set(k).back();
                        cand.assign(head.begin(), head.end());
                        cand.push_back(tail);

                        bool pruned = false;
                        for (std::size_t omit = 0; omit + 2 < r && !pruned; ++omit) {
                            sub.clear();
                            for (std::size_t p = 0; p < r; ++p)
                                if (p != omit)
                                    sub.push_back(cand[p]);
                            pruned = !level.contains(sub);
                        }
                        if (pruned)
                            continue;

                        if (!budget.allows(report.combinations_explored)) {
                            report.budget_exhausted = true;
                            report.blacklist_skips = sat_add(report.blacklist_skips, lex_rank(cand, n) - explored_r);
                            return report;
                        }
                        ++report.combinations_explored;
                        ++explored_r;

                        auto common = level.common[i] & g.v_column(tail);
                        auto weight = common.count();
                        if (weight < 2)
                            continue;
                        if (last_round) {
                            if (acceptor.offer(cand, common, weight)) {
                                report.blacklist_skips
                                    = sat_add(report.blacklist_skips, lex_rank(cand, n) - (explored_r - 1));
                                report.found = acceptor.take();
                                return report;
                            }
                        }
                        else
                            next.push(cand, std::move(common));
                    }
                }
                group_begin = group_end;
            }

            report.blacklist_skips = sat_add(report.blacklist_skips, binomial_saturating(n, r) - explored_r);
            level = std::move(next);
        }
        report.found = acceptor.take();
        return report;
    }

    /// Plain lexicographic enumeration; `literal` keeps an exact-membership
    /// blacklist, otherwise nothing is ever skipped.
    auto search_enumerate(const BipartiteGraph& g, const SearchSpec& spec, const SearchBudget& budget, bool literal)
        -> SolveReport
    {
        SolveReport report;
        Acceptor acceptor(spec);
        const auto n = g.v_count();
        std::set<std::vector<std::uint32_t>> blacklist;

        for (std::size_t r = 2; r <= spec.z; ++r) {
            report.max_r_reached = r;
            const bool last_round = (r == spec.z);
            std::vector<std::uint32_t> combo(r);
            for (std::size_t p = 0; p < r; ++p)
                combo[p] = static_cast<std::uint32_t>(p);

            while (true) {
                if (literal && blacklist.contains(combo))
                    report.blacklist_skips = sat_add(report.blacklist_skips, 1);
                else {
                    if (!budget.allows(report.combinations_explored)) {
                        report.budget_exhausted = true;
                        return report;
                    }
                    ++report.combinations_explored;
                    BitRow common = g.v_column(combo[0]);
                    for (std::size_t p = 1; p < r; ++p)
                        common &= g.v_column(combo[p]);
                    auto weight = common.count();
                    if (weight < 2) {
                        if (literal)
                            blacklist.insert(combo);
                    }
                    else if (last_round && acceptor.offer(combo, common, weight)) {
                        report.found = acceptor.take();
                        return report;
                    }
                }

                // advance to the next r-combination in lexicographic order
                std::size_t p = r;
                while (p > 0 && combo[p - 1] == n - r + p - 1)
                    --p;
                if (p == 0)
                    break;
                ++combo[p - 1];
                for (auto q = p; q < r; ++q)
                    combo[q] = combo[q - 1] + 1;
            }
        }
        report.found = acceptor.take();
        return report;
    }

    auto z_max_of(const BipartiteGraph& g) -> std::size_t
    {
        return size_max_via_gram(gram(adjacency_matrix(g)));
    }

    auto run(const BipartiteGraph& g, const SearchSpec& spec, const SearchBudget& budget,
             const SolveOptions& options) -> SolveReport
    {
        if (spec.z < 2)
            throw std::invalid_argument("biclique size z must be at least 2");
        if (spec.z > g.v_count())
            return {};
        if (options.guarantee_check && spec.z > z_max_of(g))
            return {};

        switch (options.blacklist) {
        case BlacklistMode::subset:
            return search_subset(g, spec, budget);
        case BlacklistMode::literal:
            return search_enumerate(g, spec, budget, true);
        case BlacklistMode::off:
            return search_enumerate(g, spec, budget, false);
        }
        throw std::logic_error("unknown blacklist mode");
    }
}

auto SearchBudget::of(std::uint64_t max_combinations) -> SearchBudget
{
    if (max_combinations == 0)
        throw std::invalid_argument("a bounded search budget must be positive");
    SearchBudget b;
    b.max_ = max_combinations;
    return b;
}

auto binomial_saturating(std::uint64_t n, std::uint64_t r) -> std::uint64_t
{
    if (r > n)
        return 0;
    r = std::min(r, n - r);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        acc = acc * (n - r + i) / i;
        if (acc > saturated)
            return saturated;
    }
    return static_cast<std::uint64_t>(acc);
}

auto find_biclique(const BipartiteGraph& g, std::size_t z, const SearchBudget& budget, const SolveOptions& options)
    -> SolveReport
{
    return run(g, SearchSpec{z, 2, Goal::first_hit, 0}, budget, options);
}

auto find_max_weight_of_size(const BipartiteGraph& g, std::size_t z, const SearchBudget& budget,
                             const SolveOptions& options) -> SolveReport
{
    if (z < 2)
        throw std::invalid_argument("biclique size z must be at least 2");
    auto bound = weight_upper_bound(gram_t(adjacency_matrix(g)), z);
    return run(g, SearchSpec{z, 2, Goal::max_weight, bound}, budget, options);
}

auto decide(const BipartiteGraph& g, std::size_t t, std::size_t z, const SearchBudget& budget,
            const SolveOptions& options) -> Decision
{
    if (t == 0 || z == 0)
        throw std::invalid_argument("decide needs t >= 1 and z >= 1");
    if (t == 1) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < g.u_count(); ++i)
            best = std::max(best, g.u_degree(i));
        return {best >= z ? Verdict::yes : Verdict::no, {}};
    }
    if (z == 1) {
        std::size_t best = 0;
        for (std::size_t j = 0; j < g.v_count(); ++j)
            best = std::max(best, g.v_degree(j));
        return {best >= t ? Verdict::yes : Verdict::no, {}};
    }

    auto report = run(g, SearchSpec{z, t, Goal::first_hit, 0}, budget, options);
    Verdict v = report.found ? Verdict::yes : (report.budget_exhausted ? Verdict::unknown : Verdict::no);
    return {v, std::move(report)};
}

auto size_max_via_gram(const GramMatrix& gram_u) -> std::size_t
{
    if (gram_u.side() != GramSide::u_side)
        throw std::invalid_argument("size_max_via_gram expects gram(Q), not gram(Qᵀ)");
    return gram_u.max_off_diagonal();
}

auto weight_upper_bound(const GramMatrix& gram_v, std::size_t z) -> std::size_t
{
    if (gram_v.side() != GramSide::v_side)
        throw std::invalid_argument("weight_upper_bound expects gram(Qᵀ), not gram(Q)");
    if (z < 2)
        throw std::invalid_argument("weight_upper_bound needs z >= 2");
    return gram_v.max_off_diagonal();
}

auto OracleProfile::answer(std::size_t t, std::size_t z) const -> bool
{
    for (auto s = z; s < best_weight_by_size.size(); ++s)
        if (best_weight_by_size[s] >= t)
            return true;
    return false;
}

auto OracleProfile::size_max() const -> std::size_t
{
    return best ? best->size() : 0;
}

auto brute_force_profile(const BipartiteGraph& g, std::size_t max_v) -> OracleProfile
{
    const auto n = g.v_count();
    if (n > max_v || n > 30)
        throw std::invalid_argument("brute-force oracle refuses |V| = " + std::to_string(n) + " (cap "
                                    + std::to_string(std::min<std::size_t>(max_v, 30)) + ")");

    std::vector<std::uint32_t> nbr_mask(g.u_count(), 0);
    for (std::size_t i = 0; i < g.u_count(); ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (g.has_edge(i, j))
                nbr_mask[i] |= std::uint32_t{1} << j;

    OracleProfile prof;
    prof.best_weight_by_size.assign(n + 1, 0);
    prof.best_weight_by_size[0] = g.u_count();

    std::vector<std::uint32_t> best_v;
    std::size_t best_weight = 0;
    std::uint32_t best_mask = 0;
    std::vector<std::uint32_t> members;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
        std::size_t weight = 0;
        for (auto nm : nbr_mask)
            if ((mask & ~nm) == 0)
                ++weight;
        auto size = static_cast<std::size_t>(std::popcount(mask));
        prof.best_weight_by_size[size] = std::max(prof.best_weight_by_size[size], weight);
        if (weight < 2)
            continue;

        members.clear();
        for (std::uint32_t j = 0; j < n; ++j)
            if (mask >> j & 1U)
                members.push_back(j);
        bool better = best_v.empty() || size > best_v.size()
                      || (size == best_v.size() && (weight > best_weight || (weight == best_weight && members < best_v)));
        if (better) {
            best_v = members;
            best_weight = weight;
            best_mask = mask;
        }
    }

    if (!best_v.empty()) {
        Biclique b;
        b.v_set = best_v;
        for (std::uint32_t i = 0; i < nbr_mask.size(); ++i)
            if ((best_mask & ~nbr_mask[i]) == 0)
                b.u_set.push_back(i);
        prof.best = std::move(b);
    }
    return prof;
}

auto brute_force_oracle(const BipartiteGraph& g, std::size_t t, std::size_t z, std::size_t max_v) -> OracleResult
{
    auto prof = brute_force_profile(g, max_v);
    return {prof.answer(t, z), std::move(prof.best)};
}

auto to_string(Verdict v) -> const char*
{
    switch (v) {
    case Verdict::yes:
        return "YES";
    case Verdict::no:
        return "NO";
    case Verdict::unknown:
        return "UNKNOWN";
    }
    return "?";
}

auto to_string(BlacklistMode m) -> const char*
{
    switch (m) {
    case BlacklistMode::subset:
        return "subset";
    case BlacklistMode::literal:
        return "literal";
    case BlacklistMode::off:
        return "off";
    }
    return "?";
}

auto parse_blacklist_mode(const std::string& s) -> BlacklistMode
{
    if (s == "subset")
        return BlacklistMode::subset;
    if (s == "literal")
        return BlacklistMode::literal;
    if (s == "off")
        return BlacklistMode::off;
    throw std::invalid_argument("unknown blacklist mode '" + s + "'");
}

auto to_text(const SolveReport& report) -> std::string
{
    auto join = [](const std::vector<std::uint32_t>& xs) {
        std::string s;
        for (auto x : xs) {
            s += ' ';
            s += std::to_string(x);
        }
        return s;
    };

    std::string out;
    out += "outcome ";
    out += report.found ? "FOUND" : "NO_SOLUTION";
    out += '\n';
    if (report.found) {
        out += "weight " + std::to_string(report.found->weight()) + '\n';
        out += "size " + std::to_string(report.found->size()) + '\n';
        out += "u_set" + join(report.found->u_set) + '\n';
        out += "v_set" + join(report.found->v_set) + '\n';
    }
    out += "combinations_explored " + std::to_string(report.combinations_explored) + '\n';
    out += "blacklist_skips " + std::to_string(report.blacklist_skips) + '\n';
    out += "max_r_reached " + std::to_string(report.max_r_reached) + '\n';
    out += std::string("budget_exhausted ") + (report.budget_exhausted ? "true" : "false") + '\n';
    return out;
}

} // namespace biclab
