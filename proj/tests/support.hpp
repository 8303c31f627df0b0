#pragma once

// Independent reference implementations for the test suites. Everything here
// works on plain boolean matrices and never touches BitRow or the solver.

#include "biclab/bigraph.hpp"
#include "biclab/features.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace biclab::testing {

using Matrix = std::vector<std::vector<bool>>;

inline auto to_matrix(const BipartiteGraph& g) -> Matrix
{
    Matrix m(g.u_count(), std::vector<bool>(g.v_count(), false));
    for (const auto& e : g.edges())
        m[e.u][e.v] = true;
    return m;
}

inline auto from_matrix(const Matrix& m) -> BipartiteGraph
{
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < m.size(); ++i)
        for (std::uint32_t j = 0; j < m[i].size(); ++j)
            if (m[i][j])
                edges.push_back({i, j});
    return BipartiteGraph(m.size(), m.front().size(), edges);
}

inline auto complete(std::size_t u, std::size_t v) -> BipartiteGraph
{
    return from_matrix(Matrix(u, std::vector<bool>(v, true)));
}

/// Uniform random graph with possibly isolated vertices, at least one edge.
inline auto random_graph(std::mt19937_64& rng, std::size_t u, std::size_t v, double p) -> BipartiteGraph
{
    std::bernoulli_distribution coin(p);
    Matrix m(u, std::vector<bool>(v, false));
    bool any = false;
    for (auto& row : m)
        for (std::size_t j = 0; j < v; ++j)
            any |= (row[j] = coin(rng));
    if (!any)
        m[0][0] = true;
    return from_matrix(m);
}

/// Row i of Q times row k of Q, as a triple loop.
inline auto product_gram(const Matrix& q) -> std::vector<std::vector<std::uint32_t>>
{
    std::vector<std::vector<std::uint32_t>> out(q.size(), std::vector<std::uint32_t>(q.size(), 0));
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t k = 0; k < q.size(); ++k)
            for (std::size_t j = 0; j < q[i].size(); ++j)
                out[i][k] += (q[i][j] && q[k][j]) ? 1 : 0;
    return out;
}

inline auto transpose(const Matrix& q) -> Matrix
{
    Matrix t(q.front().size(), std::vector<bool>(q.size(), false));
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < q[i].size(); ++j)
            t[j][i] = q[i][j];
    return t;
}

/// Common neighbourhood of a set of v-indices, checked vertex by vertex.
inline auto common_u(const Matrix& q, const std::vector<std::uint32_t>& vs) -> std::vector<std::uint32_t>
{
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < q.size(); ++i) {
        bool all = true;
        for (auto v : vs)
            all = all && q[i][v];
        if (all)
            out.push_back(i);
    }
    return out;
}

struct Exhaustive {
    /// best[s] = largest common neighbourhood over V' with |V'| = s.
    std::vector<std::size_t> best;

    [[nodiscard]] bool answer(std::size_t t, std::size_t z) const
    {
        for (std::size_t s = z; s < best.size(); ++s)
            if (best[s] >= t)
                return true;
        return false;
    }

    [[nodiscard]] std::size_t size_max() const
    {
        std::size_t z = 0;
        for (std::size_t s = 1; s < best.size(); ++s)
            if (best[s] >= 2)
                z = s;
        return z;
    }
};

/// Recursive enumeration of all subsets of V.
inline auto exhaustive(const Matrix& q) -> Exhaustive
{
    const std::size_t n = q.front().size();
    Exhaustive ex{std::vector<std::size_t>(n + 1, 0)};
    ex.best[0] = q.size();
    std::vector<std::uint32_t> pick;
    auto rec = [&](auto&& self, std::uint32_t next) -> void {
        if (!pick.empty()) {
            auto w = common_u(q, pick).size();
            if (w > ex.best[pick.size()])
                ex.best[pick.size()] = w;
        }
        for (std::uint32_t j = next; j < n; ++j) {
            pick.push_back(j);
            self(self, j + 1);
            pick.pop_back();
        }
    };
    rec(rec, 0);
    return ex;
}

inline auto choose(std::uint64_t n, std::uint64_t r) -> std::uint64_t
{
    if (r > n)
        return 0;
    std::uint64_t c = 1;
    for (std::uint64_t i = 1; i <= r; ++i)
        c = c * (n - r + i) / i;
    return c;
}

struct Planted {
    std::vector<FeatureVector> noisy;
    std::vector<FeatureVector> clean;
};

/// HARD iff zmax > 3 and v > 57; the other seven features are unrelated
/// noise. A `flip` fraction of labels is inverted in `noisy`.
inline auto planted_dataset(std::size_t n, double flip, std::uint64_t seed) -> Planted
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> v_dist(20, 100), z_dist(1, 8), small(1, 60), big(1, 5000);
    std::bernoulli_distribution flipper(flip);
    Planted out;
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector fv;
        fv.u_card = small(rng);
        fv.v_card = v_dist(rng);
        fv.e_card = big(rng);
        fv.comb_estimate = big(rng);
        fv.social_degree = Rational::make(small(rng), 7);
        fv.weight_max = small(rng);
        fv.size_max = z_dist(rng);
        fv.freq_weight2 = small(rng);
        fv.freq_size2 = small(rng);
        fv.label = fv.size_max > 3 && fv.v_card > 57 ? Label::hard : Label::easy;
        out.clean.push_back(fv);
        if (flipper(rng))
            fv.label = fv.label == Label::hard ? Label::easy : Label::hard;
        out.noisy.push_back(fv);
    }
    return out;
}

} // namespace biclab::testing
