#include "biclab/features.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace biclab;
using namespace biclab::testing;

namespace {

GramMatrix lower_u3(std::uint32_t a, std::uint32_t b, std::uint32_t c)
{
    // entries (1,0)=a, (2,0)=b, (2,1)=c
    return GramMatrix(3, GramSide::u_side, {9, a, b, a, 9, c, b, c, 9});
}

/// Top-three product by sorting every pairwise intersection.
std::uint64_t comb_oracle(const Matrix& m)
{
    auto g = product_gram(m);
    std::vector<std::uint64_t> below;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t k = 0; k < i; ++k)
            below.push_back(g[i][k]);
    if (below.empty())
        return 0;
    std::sort(below.rbegin(), below.rend());
    std::uint64_t p = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, below.size()); ++i)
        p *= below[i];
    return p;
}

} // namespace

TEST_CASE("rational arithmetic and rendering")
{
    CHECK(Rational::make(6, 4) == Rational{3, 2});
    CHECK(Rational::make(0, 7) == Rational{0, 1});
    CHECK_THROWS_AS((void)Rational::make(1, 0), std::invalid_argument);
    CHECK(Rational::make(1, 3).to_decimal() == "0.333333");
    CHECK(Rational::make(2, 3).to_decimal() == "0.666667");
    CHECK(Rational::make(1, 2000000).to_decimal() == "0.000001");
    CHECK(Rational::make(1, 2).to_decimal(0) == "1");
    CHECK(Rational::make(12, 1).to_decimal() == "12.000000");
    CHECK(Rational::parse_decimal("1.250000") == Rational{5, 4});
    CHECK(Rational::parse_decimal("7") == Rational{7, 1});
    CHECK_THROWS_AS((void)Rational::parse_decimal("1.2x"), std::invalid_argument);
    CHECK_THROWS_AS((void)Rational::parse_decimal(""), std::invalid_argument);
}

TEST_CASE("comb estimate")
{
    CHECK(comb_estimate(gram(adjacency_matrix(complete(4, 4)))) == 64);
    CHECK(comb_estimate(GramMatrix(2, GramSide::u_side, {5, 3, 3, 4})) == 3);
    CHECK(comb_estimate(lower_u3(2, 1, 1)) == 2);
    CHECK(comb_estimate(GramMatrix(1, GramSide::u_side, {4})) == 0);
}

TEST_CASE("social degree")
{
    CHECK(social_degree(10, 10, 100) == Rational{1, 1});
    CHECK(social_degree(3, 4, 6) == Rational{2, 1});
    CHECK_THROWS_AS((void)social_degree(3, 4, 0), std::invalid_argument);
}

TEST_CASE("pair counts")
{
    auto k33 = adjacency_matrix(complete(3, 3));
    CHECK(count_weight2(gram(k33)) == 3);
    CHECK(count_size2(gram_t(k33)) == 3);
    std::vector<Edge> diag{{0, 0}, {1, 1}};
    CHECK(count_weight2(gram(adjacency_matrix(BipartiteGraph(2, 2, diag)))) == 0);
    CHECK(count_weight2(lower_u3(3, 2, 1)) == 2);
    CHECK(count_weight2(lower_u3(3, 2, 1), 1) == 3);
    CHECK(count_weight2(lower_u3(3, 2, 1), 3) == 1);
    CHECK_THROWS_AS((void)count_weight2(gram_t(k33)), std::invalid_argument);
    CHECK_THROWS_AS((void)count_size2(gram(k33)), std::invalid_argument);
}

TEST_CASE("feature vector of K22")
{
    auto fv = extract_features(complete(2, 2), 4);
    CHECK(fv.u_card == 2);
    CHECK(fv.v_card == 2);
    CHECK(fv.e_card == 4);
    CHECK(fv.comb_estimate == 2);
    CHECK(fv.social_degree == Rational{1, 1});
    CHECK(fv.weight_max == 2);
    CHECK(fv.size_max == 2);
    CHECK(fv.freq_weight2 == 1);
    CHECK(fv.freq_size2 == 1);
    CHECK(fv.label == Label::unlabeled);
}

TEST_CASE("a star with an isolated vertex has pi = 0")
{
    std::vector<Edge> e;
    for (std::uint32_t j = 0; j < 5; ++j)
        e.push_back({0, j});
    auto fv = extract_features(BipartiteGraph(2, 5, e));
    CHECK(fv.size_max == 0);
    auto op = order_parameter(fv);
    CHECK(op.is_zero());
    CHECK(std::isinf(op.pi_log2));
    CHECK(op.pi_log2 < 0);
}

TEST_CASE("order parameter")
{
    FeatureVector fv;
    fv.size_max = 5;
    fv.v_card = 5;
    auto one = order_parameter(fv);
    CHECK(one.pi == Rational{1, 1});
    CHECK(one.pi_log2 == 0.0);

    fv.size_max = 3;
    fv.v_card = 8;
    auto p = order_parameter(fv);
    CHECK(p.pi == Rational{3, 8});
    CHECK(p.pi_log2 == doctest::Approx(-1.415037).epsilon(1e-6));
    // falls in the [-1.5, -1.25) bin
    CHECK(std::floor(p.pi_log2 / 0.25) * 0.25 == -1.5);

    fv.v_card = 0;
    CHECK_THROWS_AS((void)order_parameter(fv), std::invalid_argument);
}

TEST_CASE("features from an observation log equal independent recomputation")
{
    std::mt19937_64 rng(21);
    for (int n = 0; n < 60; ++n) {
        std::string log;
        const int w = 20 + static_cast<int>(rng() % 80);
        for (int r = 0; r < w; ++r)
            log += "a" + std::to_string(rng() % 12) + " t" + std::to_string(rng() % 20) + "\n";
        auto og = from_observation_log(log);
        auto fv = extract_features(og.graph, og.w);
        auto m = to_matrix(og.graph);
        auto gu = product_gram(m);
        auto gv = product_gram(transpose(m));
        std::uint64_t zmax = 0, wmax = 0, fw2 = 0, fs2 = 0;
        for (std::size_t i = 0; i < gu.size(); ++i)
            for (std::size_t k = 0; k < i; ++k) {
                zmax = std::max<std::uint64_t>(zmax, gu[i][k]);
                fw2 += gu[i][k] >= 2;
            }
        for (std::size_t i = 0; i < gv.size(); ++i)
            for (std::size_t k = 0; k < i; ++k) {
                wmax = std::max<std::uint64_t>(wmax, gv[i][k]);
                fs2 += gv[i][k] >= 2;
            }
        CHECK(fv.u_card == m.size());
        CHECK(fv.v_card == m.front().size());
        CHECK(fv.size_max == zmax);
        CHECK(fv.weight_max == wmax);
        CHECK(fv.freq_weight2 == fw2);
        CHECK(fv.freq_size2 == fs2);
        CHECK(fv.comb_estimate == comb_oracle(m));
        CHECK(fv.social_degree == Rational::make(fv.u_card * fv.v_card, static_cast<std::uint64_t>(w)));
        CHECK(extract_features(og.graph, og.w) == fv);
    }
}

TEST_CASE("w defaults to the edge count")
{
    std::mt19937_64 rng(22);
    auto g = random_graph(rng, 7, 9, 0.3);
    auto fv = extract_features(g);
    CHECK(fv.social_degree == Rational::make(63, g.edge_count()));
}

TEST_CASE("size_max and weight_max from gram equal brute force")
{
    std::mt19937_64 rng(23);
    for (int n = 0; n < 200; ++n) {
        auto g = random_graph(rng, 2 + rng() % 9, 2 + rng() % 9, 0.1 + 0.1 * static_cast<double>(rng() % 9));
        auto fv = extract_features(g);
        auto ex = exhaustive(to_matrix(g));
        CHECK(fv.size_max == ex.size_max());
        // heaviest biclique of size >= 2
        std::size_t wmax = ex.best.size() > 2 ? ex.best[2] : 0;
        CHECK(fv.weight_max == wmax);
    }
}

TEST_CASE("pi lies in [0,1] and equals 1 exactly for a dominating pair")
{
    std::mt19937_64 rng(24);
    for (int n = 0; n < 300; ++n) {
        auto g = random_graph(rng, 2 + rng() % 6, 1 + rng() % 6, 0.5 + 0.1 * static_cast<double>(rng() % 5));
        auto op = order_parameter(extract_features(g));
        CHECK(op.pi.value() >= 0.0);
        CHECK(op.pi.value() <= 1.0);
        bool pair_covers = false;
        for (std::size_t i = 0; i < g.u_count(); ++i)
            for (std::size_t k = i + 1; k < g.u_count(); ++k)
                pair_covers = pair_covers || (g.u_degree(i) == g.v_count() && g.u_degree(k) == g.v_count());
        CHECK((op.pi == Rational{1, 1}) == pair_covers);
    }
}

TEST_CASE("labelling")
{
    CHECK(label_instance(complete(3, 3), SearchBudget::of(1'000'000)).label == Label::easy);

    std::mt19937_64 rng(25);
    auto dense = random_graph(rng, 40, 40, 0.6);
    auto hard = label_instance(dense, SearchBudget::of(1000));
    CHECK(hard.label == Label::hard);
    CHECK(hard.report.budget_exhausted);

    for (int n = 0; n < 30; ++n) {
        auto g = random_graph(rng, 8, 8, 0.5);
        CHECK(label_instance(g, SearchBudget::unlimited()).label == Label::easy);
    }
}

TEST_CASE("raising the budget never turns EASY into HARD")
{
    std::mt19937_64 rng(26);
    for (int n = 0; n < 60; ++n) {
        auto g = random_graph(rng, 6 + rng() % 8, 6 + rng() % 8, 0.5);
        bool was_easy = false;
        for (std::uint64_t b : {1, 5, 20, 100, 500, 5000}) {
            auto l = label_instance(g, SearchBudget::of(b)).label;
            if (was_easy)
                CHECK(l == Label::easy);
            was_easy = was_easy || l == Label::easy;
        }
    }
}

TEST_CASE("feature CSV")
{
    FeatureVector a = extract_features(complete(2, 2), 4);
    a.label = Label::hard;
    FeatureVector b = extract_features(complete(3, 4), 48);
    CHECK(b.social_degree == Rational{1, 4});
    CHECK(to_csv_row(b) == "3,4,12,64,0.250000,3,4,3,6,UNLABELED");

    auto text = feature_csv_header() + "\n" + to_csv_row(a) + "\r\n" + to_csv_row(b) + "\n";
    auto back = parse_feature_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == a);
    CHECK(back[1] == b);

    CHECK(parse_feature_csv(feature_csv_header() + "\n").empty());
    CHECK_THROWS_AS((void)parse_feature_csv(""), ParseError);
    CHECK_THROWS_AS((void)parse_feature_csv("u,v\n"), ParseError);
    try {
        (void)parse_feature_csv(feature_csv_header() + "\n" + to_csv_row(a) + "\n1,2,3\n");
        FAIL("expected ParseError");
    }
    catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS((void)parse_feature_csv(feature_csv_header() + "\n1,1,1,1,1.0,1,1,1,1,MAYBE\n"), ParseError);
    CHECK_THROWS_AS((void)parse_feature_csv(feature_csv_header() + "\n-1,1,1,1,1.0,1,1,1,1,EASY\n"), ParseError);
}

TEST_CASE("feature accessors")
{
    FeatureVector fv = extract_features(complete(3, 4), 48);
    CHECK(FeatureVector::feature_name(feature::size_max) == "zmax");
    CHECK(FeatureVector::feature_name(feature::v_card) == "v");
    CHECK(fv.feature(feature::size_max) == 4.0);
    CHECK(fv.feature(feature::social) == 0.25);
    CHECK_THROWS_AS((void)fv.feature(9), std::out_of_range);
}
