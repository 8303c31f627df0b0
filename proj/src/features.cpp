#include "biclab/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace biclab {

namespace {
    constexpr std::array<std::string_view, FeatureVector::feature_count> feature_names
        = {"u", "v", "e", "comb", "social", "wmax", "zmax", "fw2", "fs2"};

    auto parse_u64(std::string_view s, std::size_t line) -> std::uint64_t
    {
        std::uint64_t out = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw ParseError(line, "expected a non-negative integer, got '" + std::string(s) + "'");
        return out;
    }

    auto split_commas(std::string_view line) -> std::vector<std::string_view>
    {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        while (true) {
            auto c = line.find(',', start);
            out.push_back(line.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start));
            if (c == std::string_view::npos)
                break;
            start = c + 1;
        }
        return out;
    }

    auto count_at_least(const GramMatrix& g, std::uint32_t threshold) -> std::uint64_t
    {
        auto lower = g.lower_triangle();
        return static_cast<std::uint64_t>(
            std::count_if(lower.begin(), lower.end(), [&](std::uint32_t x) { return x >= threshold; }));
    }
}

auto Rational::make(std::uint64_t num, std::uint64_t den) -> Rational
{
    if (den == 0)
        throw std::invalid_argument("rational with zero denominator");
    auto g = std::gcd(num, den);
    if (g == 0)
        g = 1;
    return {num / g, den / g};
}

auto Rational::parse_decimal(std::string_view s) -> Rational
{
    auto dot = s.find('.');
    auto int_part = s.substr(0, dot);
    auto frac_part = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
        throw std::invalid_argument("empty decimal");
    if (frac_part.size() > 18)
        throw std::invalid_argument("too many fractional digits in '" + std::string(s) + "'");

    auto digits = [&](std::string_view d) -> std::uint64_t {
        if (d.empty())
            return 0;
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(d.data(), d.data() + d.size(), v);
        if (ec != std::errc{} || p != d.data() + d.size())
            throw std::invalid_argument("malformed decimal '" + std::string(s) + "'");
        return v;
    };

    std::uint64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i)
        scale *= 10;
    auto whole = digits(int_part);
    if (whole > std::numeric_limits<std::uint64_t>::max() / scale)
        throw std::invalid_argument("decimal out of range '" + std::string(s) + "'");
    return make(whole * scale + digits(frac_part), scale);
}

auto Rational::to_decimal(int digits) const -> std::string
{
    unsigned __int128 scale = 1;
    for (int i = 0; i < digits; ++i)
        scale *= 10;
    unsigned __int128 scaled = (static_cast<unsigned __int128>(num) * scale * 2 + den) / (2 * static_cast<unsigned __int128>(den));
    auto whole = static_cast<std::uint64_t>(scaled / scale);
    auto frac = static_cast<std::uint64_t>(scaled % scale);

    std::string out = std::to_string(whole);
    if (digits > 0) {
        auto f = std::to_string(frac);
        out += '.';
        out.append(static_cast<std::size_t>(digits) - f.size(), '0');
        out += f;
    }
    return out;
}

auto to_string(Label l) -> const char*
{
    switch (l) {
    case Label::easy:
        return "EASY";
    case Label::hard:
        return "HARD";
    case Label::unlabeled:
        return "UNLABELED";
    }
    return "?";
}

auto parse_label(std::string_view s) -> Label
{
    if (s == "EASY")
        return Label::easy;
    if (s == "HARD")
        return Label::hard;
    if (s == "UNLABELED" || s.empty())
        return Label::unlabeled;
    throw std::invalid_argument("unknown label '" + std::string(s) + "'");
}

auto FeatureVector::feature(std::size_t i) const -> double
{
    switch (i) {
    case feature::u_card:
        return static_cast<double>(u_card);
    case feature::v_card:
        return static_cast<double>(v_card);
    case feature::e_card:
        return static_cast<double>(e_card);
    case feature::comb:
        return static_cast<double>(comb_estimate);
    case feature::social:
        return social_degree.value();
    case feature::weight_max:
        return static_cast<double>(weight_max);
    case feature::size_max:
        return static_cast<double>(size_max);
    case feature::freq_weight2:
        return static_cast<double>(freq_weight2);
    case feature::freq_size2:
        return static_cast<double>(freq_size2);
    default:
        throw std::out_of_range("feature index " + std::to_string(i));
    }
}

auto FeatureVector::feature_name(std::size_t i) -> std::string_view
{
    return feature_names.at(i);
}

auto comb_estimate(const GramMatrix& gram_u) -> std::uint64_t
{
    auto lower = gram_u.lower_triangle();
    if (lower.empty())
        return 0;
    auto top = std::min<std::size_t>(3, lower.size());
    std::partial_sort(lower.begin(), lower.begin() + static_cast<std::ptrdiff_t>(top), lower.end(),
                      std::greater<>());
    std::uint64_t product = 1;
    for (std::size_t i = 0; i < top; ++i)
        product *= lower[i];
    return product;
}

auto social_degree(std::uint64_t u_card, std::uint64_t v_card, std::uint64_t w) -> Rational
{
    if (w == 0)
        throw std::invalid_argument("social degree needs w > 0");
    return Rational::make(u_card * v_card, w);
}

auto count_weight2(const GramMatrix& gram_u, std::uint32_t threshold) -> std::uint64_t
{
    if (gram_u.side() != GramSide::u_side)
        throw std::invalid_argument("count_weight2 expects gram(Q)");
    return count_at_least(gram_u, threshold);
}

auto count_size2(const GramMatrix& gram_v, std::uint32_t threshold) -> std::uint64_t
{
    if (gram_v.side() != GramSide::v_side)
        throw std::invalid_argument("count_size2 expects gram(Qᵀ)");
    return count_at_least(gram_v, threshold);
}

auto extract_features(const BipartiteGraph& g, std::optional<std::uint64_t> w, std::uint32_t pair_threshold)
    -> FeatureVector
{
    auto q = adjacency_matrix(g);
    auto gu = gram(q);
    auto gv = gram_t(q);

    FeatureVector fv;
    fv.u_card = g.u_count();
    fv.v_card = g.v_count();
    fv.e_card = g.edge_count();
    fv.comb_estimate = comb_estimate(gu);
    fv.social_degree = social_degree(fv.u_card, fv.v_card, w.value_or(g.edge_count()));
    fv.weight_max = gv.max_off_diagonal();
    fv.size_max = size_max_via_gram(gu);
    fv.freq_weight2 = count_weight2(gu, pair_threshold);
    fv.freq_size2 = count_size2(gv, pair_threshold);
    return fv;
}

auto order_parameter(const FeatureVector& fv) -> OrderParameter
{
    if (fv.v_card == 0)
        throw std::invalid_argument("order parameter needs |V| >= 1");
    auto pi = Rational::make(fv.size_max, fv.v_card);
    double lg = pi.num == 0 ? -std::numeric_limits<double>::infinity()
                            : std::log2(static_cast<double>(pi.num)) - std::log2(static_cast<double>(pi.den));
    return {pi, lg};
}

auto label_instance(const BipartiteGraph& g, const SearchBudget& budget) -> LabelOutcome
{
    auto z_max = size_max_via_gram(gram(adjacency_matrix(g)));
    if (z_max < 2)
        return {Label::easy, {}};
    auto report = find_max_weight_of_size(g, z_max, budget);
    return {report.budget_exhausted ? Label::hard : Label::easy, std::move(report)};
}

auto feature_csv_header() -> std::string
{
    return "u,v,e,comb,social,wmax,zmax,fw2,fs2,label";
}

auto to_csv_row(const FeatureVector& fv) -> std::string
{
    std::string out;
    for (auto x : {fv.u_card, fv.v_card, fv.e_card, fv.comb_estimate}) {
        out += std::to_string(x);
        out += ',';
    }
    out += fv.social_degree.to_decimal(6);
    for (auto x : {fv.weight_max, fv.size_max, fv.freq_weight2, fv.freq_size2}) {
        out += ',';
        out += std::to_string(x);
    }
    out += ',';
    out += to_string(fv.label);
    return out;
}

auto parse_feature_csv(std::string_view text) -> std::vector<FeatureVector>
{
    std::vector<FeatureVector> out;
    std::size_t line_no = 0;
    bool seen_header = false;
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
            if (line != feature_csv_header())
                throw ParseError(line_no, "expected header '" + feature_csv_header() + "'");
            seen_header = true;
            continue;
        }
        auto cols = split_commas(line);
        if (cols.size() != 10)
            throw ParseError(line_no, "expected 10 columns, got " + std::to_string(cols.size()));
        FeatureVector fv;
        fv.u_card = parse_u64(cols[0], line_no);
        fv.v_card = parse_u64(cols[1], line_no);
        fv.e_card = parse_u64(cols[2], line_no);
        fv.comb_estimate = parse_u64(cols[3], line_no);
        try {
            fv.social_degree = Rational::parse_decimal(cols[4]);
            fv.label = parse_label(cols[9]);
        }
        catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
        fv.weight_max = parse_u64(cols[5], line_no);
        fv.size_max = parse_u64(cols[6], line_no);
        fv.freq_weight2 = parse_u64(cols[7], line_no);
        fv.freq_size2 = parse_u64(cols[8], line_no);
        out.push_back(fv);
    }
    if (!seen_header)
        throw ParseError(0, "feature CSV is missing its header");
    return out;
}

} // namespace biclab
