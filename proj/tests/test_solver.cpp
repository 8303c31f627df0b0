#include "biclab/solver.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace biclab;
using namespace biclab::testing;

namespace {

struct Trace {
    bool found = false;
    std::vector<std::uint32_t> v_set;
    std::size_t weight = 0;
    std::uint64_t explored = 0;
    std::uint64_t skipped = 0;
};

bool every_proper_subset_alive(const Matrix& m, const std::vector<std::uint32_t>& s)
{
    const auto r = s.size();
    for (std::uint32_t mask = 1; mask + 1 < (1U << r); ++mask) {
        if (std::popcount(mask) < 2)
            continue;
        std::vector<std::uint32_t> sub;
        for (std::size_t p = 0; p < r; ++p)
            if (mask >> p & 1U)
                sub.push_back(s[p]);
        if (common_u(m, sub).size() < 2)
            return false;
    }
    return true;
}

/// Level-by-level lexicographic walk, straight from the definition of
/// subset pruning.
Trace trace(const Matrix& m, std::size_t z, std::size_t accept, bool max_weight, std::size_t bound)
{
    Trace t;
    const auto n = m.front().size();
    if (z > n)
        return t;
    for (std::size_t r = 2; r <= z; ++r) {
        std::vector<std::uint32_t> combo(r);
        for (std::size_t p = 0; p < r; ++p)
            combo[p] = static_cast<std::uint32_t>(p);
        while (true) {
            if (!every_proper_subset_alive(m, combo))
                ++t.skipped;
            else {
                ++t.explored;
                auto w = common_u(m, combo).size();
                if (r == z && w >= 2 && w >= accept) {
                    if (!max_weight)
                        return {true, combo, w, t.explored, t.skipped};
                    if (!t.found || w > t.weight) {
                        t.found = true;
                        t.v_set = combo;
                        t.weight = w;
                        if (w >= bound)
                            return t;
                    }
                }
            }
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
    return t;
}

std::size_t max_off_diag(const std::vector<std::vector<std::uint32_t>>& g)
{
    std::uint32_t best = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t k = 0; k < i; ++k)
            best = std::max(best, g[i][k]);
    return best;
}

BipartiteGraph two_blocks()
{
    std::vector<Edge> e;
    for (std::uint32_t u = 0; u < 2; ++u)
        for (std::uint32_t v = 0; v < 3; ++v) {
            e.push_back({u, v});
            e.push_back({u + 2, v + 3});
        }
    return BipartiteGraph(4, 6, e);
}

BipartiteGraph weighted_fixture()
{
    // {u0,u1,u2} x {v0,v1} plus {u0,u1} x {v2}
    std::vector<Edge> e{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}, {0, 2}, {1, 2}};
    return BipartiteGraph(3, 3, e);
}

} // namespace

TEST_CASE("find_biclique on complete graphs")
{
    auto r = find_biclique(complete(4, 4), 3, SearchBudget::unlimited());
    REQUIRE(r.found);
    CHECK(r.found->weight() == 4);
    CHECK(r.found->size() == 3);
    CHECK(r.found->v_set == std::vector<std::uint32_t>{0, 1, 2});
    CHECK(r.combinations_explored == 7);
    CHECK(r.max_r_reached == 3);
    CHECK_FALSE(r.budget_exhausted);
}

TEST_CASE("find_biclique when no pair shares a neighbour")
{
    std::vector<Edge> e{{0, 0}, {1, 1}, {2, 2}};
    auto r = find_biclique(BipartiteGraph(3, 3, e), 2, SearchBudget::unlimited());
    CHECK_FALSE(r.found);
    CHECK(r.combinations_explored == 3);
}

TEST_CASE("two disjoint K23 blocks have no size-4 biclique")
{
    auto g = two_blocks();
    auto r = find_biclique(g, 4, SearchBudget::unlimited());
    CHECK_FALSE(r.found);
    CHECK(brute_force_profile(g).size_max() == 3);
}

TEST_CASE("find_max_weight_of_size")
{
    auto k = find_max_weight_of_size(complete(4, 4), 3, SearchBudget::unlimited());
    REQUIRE(k.found);
    CHECK(k.found->weight() == 4);
    CHECK(k.combinations_explored == 7);

    auto w = find_max_weight_of_size(weighted_fixture(), 2, SearchBudget::unlimited());
    REQUIRE(w.found);
    CHECK(w.found->weight() == 3);
    CHECK(w.found->v_set == std::vector<std::uint32_t>{0, 1});

    auto g = two_blocks();
    CHECK_FALSE(find_max_weight_of_size(g, 4, SearchBudget::unlimited()).found);
    CHECK_THROWS_AS((void)find_max_weight_of_size(g, 1, SearchBudget::unlimited()), std::invalid_argument);
}

TEST_CASE("decide fixtures")
{
    auto k33 = complete(3, 3);
    auto unlimited = SearchBudget::unlimited();
    CHECK(decide(k33, 3, 3, unlimited).verdict == Verdict::yes);
    CHECK(decide(k33, 4, 3, unlimited).verdict == Verdict::no);
    CHECK(decide(k33, 1, 3, unlimited).verdict == Verdict::yes);
    CHECK(decide(k33, 1, 4, unlimited).verdict == Verdict::no);
    CHECK(decide(k33, 3, 1, unlimited).verdict == Verdict::yes);
    CHECK(decide(k33, 4, 1, unlimited).verdict == Verdict::no);
    CHECK(decide(k33, 1, 3, unlimited).report.combinations_explored == 0);
    CHECK_THROWS_AS((void)decide(k33, 0, 2, unlimited), std::invalid_argument);
    CHECK_THROWS_AS((void)decide(k33, 2, 0, unlimited), std::invalid_argument);
}

TEST_CASE("decide on a fixed 8x8 graph matches the exhaustive oracle")
{
    std::mt19937_64 rng(8);
    auto g = random_graph(rng, 8, 8, 0.5);
    auto ex = exhaustive(to_matrix(g));
    for (std::size_t t = 2; t <= 6; ++t)
        for (std::size_t z = 2; z <= 6; ++z) {
            auto d = decide(g, t, z, SearchBudget::unlimited());
            CHECK((d.verdict == Verdict::yes) == ex.answer(t, z));
        }
}

TEST_CASE("gram-derived quantities")
{
    auto gu = gram(adjacency_matrix(complete(2, 5)));
    CHECK(size_max_via_gram(gu) == 5);
    std::vector<Edge> diag{{0, 0}, {1, 1}};
    auto q = adjacency_matrix(BipartiteGraph(2, 2, diag));
    CHECK(size_max_via_gram(gram(q)) == 0);
    CHECK(weight_upper_bound(gram_t(q), 2) == 0);
    CHECK(weight_upper_bound(gram_t(adjacency_matrix(complete(4, 4))), 3) == 4);
    CHECK(weight_upper_bound(gram_t(adjacency_matrix(weighted_fixture())), 2) == 3);

    CHECK_THROWS_AS((void)size_max_via_gram(gram_t(q)), std::invalid_argument);
    CHECK_THROWS_AS((void)weight_upper_bound(gram(q), 2), std::invalid_argument);
    CHECK_THROWS_AS((void)weight_upper_bound(gram_t(q), 1), std::invalid_argument);
}

TEST_CASE("brute-force oracle fixtures")
{
    CHECK(brute_force_oracle(complete(3, 3), 3, 3).answer);
    std::vector<Edge> pairs{{0, 0}, {1, 1}};
    CHECK_FALSE(brute_force_oracle(BipartiteGraph(2, 2, pairs), 2, 2).answer);
    CHECK_THROWS_AS((void)brute_force_profile(complete(2, 21)), std::invalid_argument);
    CHECK_THROWS_AS((void)brute_force_profile(complete(2, 6), 5), std::invalid_argument);
}

TEST_CASE("brute-force profile agrees with recursive enumeration")
{
    std::mt19937_64 rng(9);
    for (int n = 0; n < 150; ++n) {
        auto g = random_graph(rng, 1 + rng() % 9, 1 + rng() % 9, 0.2 + 0.1 * static_cast<double>(rng() % 7));
        auto prof = brute_force_profile(g);
        auto ex = exhaustive(to_matrix(g));
        REQUIRE(prof.best_weight_by_size == ex.best);
        CHECK(prof.size_max() == ex.size_max());
        if (prof.best)
            CHECK(prof.best->is_valid_in(g));
    }
}

TEST_CASE("cost counts follow the definition of subset pruning")
{
    std::mt19937_64 rng(10);
    for (int n = 0; n < 300; ++n) {
        auto g = random_graph(rng, 2 + rng() % 7, 2 + rng() % 7, 0.2 + 0.1 * static_cast<double>(rng() % 7));
        auto m = to_matrix(g);
        auto bound = max_off_diag(product_gram(transpose(m)));
        for (std::size_t z = 2; z <= 5; ++z) {
            auto want = trace(m, z, 2, false, 0);
            auto got = find_biclique(g, z, SearchBudget::unlimited());
            REQUIRE(got.found.has_value() == want.found);
            CHECK(got.combinations_explored == want.explored);
            CHECK(got.blacklist_skips == want.skipped);
            if (want.found)
                CHECK(got.found->v_set == want.v_set);

            auto want_max = trace(m, z, 2, true, bound);
            auto got_max = find_max_weight_of_size(g, z, SearchBudget::unlimited());
            REQUIRE(got_max.found.has_value() == want_max.found);
            CHECK(got_max.combinations_explored == want_max.explored);
            CHECK(got_max.blacklist_skips == want_max.skipped);
            if (want_max.found) {
                CHECK(got_max.found->v_set == want_max.v_set);
                CHECK(got_max.found->weight() == want_max.weight);
            }

            for (std::size_t t = 3; t <= 4; ++t) {
                auto want_t = trace(m, z, t, false, 0);
                auto got_t = decide(g, t, z, SearchBudget::unlimited());
                CHECK((got_t.verdict == Verdict::yes) == want_t.found);
                CHECK(got_t.report.combinations_explored == want_t.explored);
            }
        }
    }
}

TEST_CASE("witnesses are complete and meet the request")
{
    std::mt19937_64 rng(12);
    for (int n = 0; n < 200; ++n) {
        auto g = random_graph(rng, 2 + rng() % 9, 2 + rng() % 9, 0.6);
        auto m = to_matrix(g);
        for (std::size_t t = 2; t <= 5; ++t)
            for (std::size_t z = 2; z <= 5; ++z) {
                auto d = decide(g, t, z, SearchBudget::unlimited());
                if (d.verdict != Verdict::yes)
                    continue;
                REQUIRE(d.report.found);
                const auto& b = *d.report.found;
                CHECK(b.is_valid_in(g));
                CHECK(b.weight() >= t);
                CHECK(b.size() >= z);
                CHECK(b.u_set == common_u(m, b.v_set));
            }
    }
}

TEST_CASE("YES is monotone towards smaller requests")
{
    std::mt19937_64 rng(13);
    for (int n = 0; n < 100; ++n) {
        auto g = random_graph(rng, 3 + rng() % 7, 3 + rng() % 7, 0.55);
        for (std::size_t t = 2; t <= 6; ++t)
            for (std::size_t z = 2; z <= 6; ++z) {
                if (decide(g, t, z, SearchBudget::unlimited()).verdict != Verdict::yes)
                    continue;
                for (std::size_t t2 = 2; t2 <= t; ++t2)
                    for (std::size_t z2 = 2; z2 <= z; ++z2)
                        CHECK(decide(g, t2, z2, SearchBudget::unlimited()).verdict == Verdict::yes);
            }
    }
}

TEST_CASE("blacklist modes agree on verdicts and order costs")
{
    std::mt19937_64 rng(14);
    for (int n = 0; n < 200; ++n) {
        auto g = random_graph(rng, 2 + rng() % 9, 2 + rng() % 9, 0.1 + 0.1 * static_cast<double>(rng() % 9));
        for (std::size_t z = 2; z <= 6; ++z) {
            auto sub = find_max_weight_of_size(g, z, SearchBudget::unlimited(), {BlacklistMode::subset});
            auto lit = find_max_weight_of_size(g, z, SearchBudget::unlimited(), {BlacklistMode::literal});
            auto off = find_max_weight_of_size(g, z, SearchBudget::unlimited(), {BlacklistMode::off});
            CHECK(sub.found == off.found);
            CHECK(lit.found == off.found);
            CHECK(sub.combinations_explored <= lit.combinations_explored);
            CHECK(lit.combinations_explored <= off.combinations_explored);
            std::uint64_t all = 0;
            for (std::size_t r = 2; r <= std::min(z, g.v_count()); ++r)
                all += choose(g.v_count(), r);
            CHECK(sub.combinations_explored <= all);
            if (!off.found && z <= g.v_count())
                CHECK(off.combinations_explored == all);
        }
    }
}

TEST_CASE("blacklisted sets have dead supersets")
{
    std::mt19937_64 rng(15);
    for (int n = 0; n < 100; ++n) {
        auto g = random_graph(rng, 3 + rng() % 6, 3 + rng() % 6, 0.4);
        auto m = to_matrix(g);
        const auto v = g.v_count();
        for (std::uint32_t mask = 1; mask < (1U << v); ++mask) {
            std::vector<std::uint32_t> s;
            for (std::uint32_t j = 0; j < v; ++j)
                if (mask >> j & 1U)
                    s.push_back(j);
            if (s.size() < 2 || adjacent_to(g, s).size() >= 2)
                continue;
            for (std::uint32_t extra = 0; extra < v; ++extra) {
                if (mask >> extra & 1U)
                    continue;
                auto sup = s;
                sup.push_back(extra);
                std::sort(sup.begin(), sup.end());
                CHECK(common_u(m, sup).size() < 2);
            }
        }
    }
}

TEST_CASE("budget exhaustion")
{
    auto g = complete(6, 10);
    auto r = find_biclique(g, 5, SearchBudget::of(10));
    CHECK(r.budget_exhausted);
    CHECK_FALSE(r.found);
    CHECK(r.combinations_explored == 10);

    auto d = decide(g, 2, 5, SearchBudget::of(10));
    CHECK(d.verdict == Verdict::unknown);

    auto enough = find_biclique(g, 5, SearchBudget::of(1000));
    CHECK(enough.found);
    CHECK_FALSE(enough.budget_exhausted);

    CHECK_THROWS_AS((void)SearchBudget::of(0), std::invalid_argument);
    CHECK_FALSE(SearchBudget::unlimited().bounded());
    CHECK(SearchBudget::of(3).allows(2));
    CHECK_FALSE(SearchBudget::of(3).allows(3));
}

TEST_CASE("a budget of exactly the needed cost suffices")
{
    std::mt19937_64 rng(16);
    for (int n = 0; n < 100; ++n) {
        auto g = random_graph(rng, 4 + rng() % 6, 4 + rng() % 6, 0.5);
        auto full = find_max_weight_of_size(g, 3, SearchBudget::unlimited());
        if (full.combinations_explored == 0)
            continue;
        auto exact = find_max_weight_of_size(g, 3, SearchBudget::of(full.combinations_explored));
        CHECK(exact == full);
        if (full.combinations_explored > 1) {
            auto tight = find_max_weight_of_size(g, 3, SearchBudget::of(full.combinations_explored - 1));
            CHECK(tight.budget_exhausted);
        }
    }
}

TEST_CASE("guarantee check and oversize requests")
{
    auto g = two_blocks();
    SolveOptions guarded{BlacklistMode::subset, true};
    auto r = find_max_weight_of_size(g, 4, SearchBudget::unlimited(), guarded);
    CHECK_FALSE(r.found);
    CHECK(r.combinations_explored == 0);
    CHECK(r.max_r_reached == 0);

    auto big = find_biclique(complete(3, 3), 9, SearchBudget::unlimited());
    CHECK_FALSE(big.found);
    CHECK(big.combinations_explored == 0);
}

TEST_CASE("reports are deterministic and render stably")
{
    std::mt19937_64 rng(17);
    auto g = random_graph(rng, 9, 9, 0.5);
    auto a = find_max_weight_of_size(g, 3, SearchBudget::unlimited());
    auto b = find_max_weight_of_size(g, 3, SearchBudget::unlimited());
    CHECK(a == b);
    CHECK(to_text(a) == to_text(b));

    auto k = find_biclique(complete(4, 4), 3, SearchBudget::unlimited());
    CHECK(to_text(k)
          == "outcome FOUND\nweight 4\nsize 3\nu_set 0 1 2 3\nv_set 0 1 2\ncombinations_explored 7\n"
             "blacklist_skips 0\nmax_r_reached 3\nbudget_exhausted false\n");
}

TEST_CASE("saturating binomial")
{
    CHECK(binomial_saturating(5, 2) == 10);
    CHECK(binomial_saturating(5, 6) == 0);
    CHECK(binomial_saturating(62, 31) == 465428353255261088ULL);
    CHECK(binomial_saturating(200, 100) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("mode names")
{
    for (auto m : {BlacklistMode::subset, BlacklistMode::literal, BlacklistMode::off})
        CHECK(parse_blacklist_mode(to_string(m)) == m);
    CHECK_THROWS_AS((void)parse_blacklist_mode("fuzzy"), std::invalid_argument);
    CHECK(std::string(to_string(Verdict::unknown)) == "UNKNOWN");
}
