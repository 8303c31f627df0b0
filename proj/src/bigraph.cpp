#include "biclab/bigraph.hpp"

#include <algorithm>
#include <unordered_map>

namespace biclab {

namespace {

    constexpr std::string_view declaration_prefix = "#%";

    auto split_ws(std::string_view s) -> std::vector<std::string_view>
    {
        std::vector<std::string_view> out;
        std::size_t i = 0;
        while (i < s.size()) {
            while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
                ++i;
            std::size_t j = i;
            while (j < s.size() && s[j] != ' ' && s[j] != '\t')
                ++j;
            if (j > i)
                out.push_back(s.substr(i, j - i));
            i = j;
        }
        return out;
    }

    auto trim(std::string_view s) -> std::string_view
    {
        auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
        while (!s.empty() && is_ws(s.front()))
            s.remove_prefix(1);
        while (!s.empty() && is_ws(s.back()))
            s.remove_suffix(1);
        return s;
    }

    class LabelIndex {
    public:
        auto intern(const std::string& label) -> std::uint32_t
        {
            auto [it, inserted] = index_.try_emplace(label, static_cast<std::uint32_t>(labels_.size()));
            if (inserted)
                labels_.push_back(label);
            return it->second;
        }

        [[nodiscard]] auto size() const -> std::size_t { return labels_.size(); }
        auto take_labels() -> std::vector<std::string> { return std::move(labels_); }

    private:
        std::unordered_map<std::string, std::uint32_t> index_;
        std::vector<std::string> labels_;
    };
}

ParseError::ParseError(std::size_t line, const std::string& message) :
    std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
    line_(line)
{
}

BipartiteGraph::BipartiteGraph(std::size_t u_count, std::size_t v_count, std::span<const Edge> edges,
                               std::vector<std::string> u_labels, std::vector<std::string> v_labels) :
    u_labels_(std::move(u_labels)),
    v_labels_(std::move(v_labels))
{
    if (u_count == 0 || v_count == 0)
        throw std::invalid_argument("bipartite graph needs at least one vertex on each side");
    if (u_labels_.empty() != v_labels_.empty())
        throw std::invalid_argument("labels must be given for both sides or neither");
    if (!u_labels_.empty() && (u_labels_.size() != u_count || v_labels_.size() != v_count))
        throw std::invalid_argument("label table size does not match vertex count");

    u_rows_.assign(u_count, BitRow(v_count));
    v_cols_.assign(v_count, BitRow(u_count));
    for (const auto& e : edges) {
        if (e.u >= u_count || e.v >= v_count)
            throw std::invalid_argument("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v)
                                        + ") out of range");
        if (!u_rows_[e.u].test(e.v)) {
            u_rows_[e.u].set(e.v);
            v_cols_[e.v].set(e.u);
            ++edge_count_;
        }
    }
}

auto BipartiteGraph::edges() const -> std::vector<Edge>
{
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (std::uint32_t i = 0; i < u_rows_.size(); ++i)
        u_rows_[i].for_each_set([&](std::uint32_t j) { out.push_back({i, j}); });
    return out;
}

auto BipartiteGraph::u_label(std::size_t i) const -> std::string
{
    if (i >= u_count())
        throw std::out_of_range("u index out of range");
    return u_labels_.empty() ? "u" + std::to_string(i) : u_labels_[i];
}

auto BipartiteGraph::v_label(std::size_t j) const -> std::string
{
    if (j >= v_count())
        throw std::out_of_range("v index out of range");
    return v_labels_.empty() ? "v" + std::to_string(j) : v_labels_[j];
}

AdjacencyMatrix::AdjacencyMatrix(std::vector<BitRow> rows) :
    rows_(std::move(rows)),
    cols_(rows_.empty() ? 0 : rows_.front().size())
{
    for (const auto& r : rows_)
        if (r.size() != cols_)
            throw std::invalid_argument("adjacency rows differ in width");
}

auto AdjacencyMatrix::transpose() const -> AdjacencyMatrix
{
    std::vector<BitRow> cols(cols_, BitRow(rows_.size()));
    for (std::size_t i = 0; i < rows_.size(); ++i)
        rows_[i].for_each_set([&](std::uint32_t j) { cols[j].set(i); });
    return AdjacencyMatrix(std::move(cols));
}

GramMatrix::GramMatrix(std::size_t order, GramSide side, std::vector<std::uint32_t> entries) :
    order_(order),
    side_(side),
    entries_(std::move(entries))
{
    if (entries_.size() != order_ * order_)
        throw std::invalid_argument("gram matrix entry count does not match order");
}

auto GramMatrix::max_off_diagonal() const -> std::uint32_t
{
    std::uint32_t best = 0;
    for (std::size_t k = 1; k < order_; ++k)
        for (std::size_t l = 0; l < k; ++l)
            best = std::max(best, entries_[k * order_ + l]);
    return best;
}

auto GramMatrix::lower_triangle() const -> std::vector<std::uint32_t>
{
    std::vector<std::uint32_t> out;
    out.reserve(order_ * (order_ - 1) / 2);
    for (std::size_t k = 1; k < order_; ++k)
        for (std::size_t l = 0; l < k; ++l)
            out.push_back(entries_[k * order_ + l]);
    return out;
}

auto Biclique::is_valid_in(const BipartiteGraph& g) const -> bool
{
    if (u_set.empty() || v_set.empty())
        return false;
    if (!std::is_sorted(u_set.begin(), u_set.end()) || !std::is_sorted(v_set.begin(), v_set.end()))
        return false;
    if (std::adjacent_find(u_set.begin(), u_set.end()) != u_set.end()
        || std::adjacent_find(v_set.begin(), v_set.end()) != v_set.end())
        return false;
    if (u_set.back() >= g.u_count() || v_set.back() >= g.v_count())
        return false;
    for (auto i : u_set)
        for (auto j : v_set)
            if (!g.has_edge(i, j))
                return false;
    return true;
}

auto parse_observation_log(std::string_view text) -> ObservationLog
{
    ObservationLog log;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        auto line = trim(raw);
        if (line.empty())
            continue;
        if (line.starts_with(declaration_prefix)) {
            auto tokens = split_ws(line.substr(declaration_prefix.size()));
            if (tokens.size() != 2 || (tokens[0] != "u" && tokens[0] != "v"))
                throw ParseError(line_no, "malformed vertex declaration, expected '#% u|v <label>'");
            (tokens[0] == "u" ? log.declared_u : log.declared_v).emplace_back(tokens[1]);
            continue;
        }
        if (line.front() == '#')
            continue;
        auto tokens = split_ws(line);
        if (tokens.size() != 2)
            throw ParseError(line_no, "expected '<u-label> <v-label>', got " + std::to_string(tokens.size())
                                          + " token(s)");
        log.records.emplace_back(std::string(tokens[0]), std::string(tokens[1]));
    }
    return log;
}

auto build_graph(const ObservationLog& log) -> BipartiteGraph
{
    if (log.records.empty())
        throw ParseError(0, "graph has no edges");

    LabelIndex us, vs;
    std::vector<Edge> edges;
    edges.reserve(log.records.size());
    for (const auto& [a, b] : log.records) {
        auto i = us.intern(a);
        auto j = vs.intern(b);
        edges.push_back({i, j});
    }
    for (const auto& a : log.declared_u)
        us.intern(a);
    for (const auto& b : log.declared_v)
        vs.intern(b);

    auto u_n = us.size();
    auto v_n = vs.size();
    return BipartiteGraph(u_n, v_n, edges, us.take_labels(), vs.take_labels());
}

auto from_edge_list(std::string_view text) -> BipartiteGraph
{
    return build_graph(parse_observation_log(text));
}

auto from_observation_log(std::string_view text) -> ObservedGraph
{
    auto log = parse_observation_log(text);
    auto w = log.w();
    return ObservedGraph{build_graph(log), w};
}

auto to_edge_list(const BipartiteGraph& g) -> std::string
{
    std::vector<std::string> lines;
    lines.reserve(g.edge_count());
    for (const auto& e : g.edges())
        lines.push_back(g.u_label(e.u) + " " + g.v_label(e.v));
    for (std::size_t i = 0; i < g.u_count(); ++i)
        if (g.u_row(i).none())
            lines.push_back(std::string(declaration_prefix) + " u " + g.u_label(i));
    for (std::size_t j = 0; j < g.v_count(); ++j)
        if (g.v_column(j).none())
            lines.push_back(std::string(declaration_prefix) + " v " + g.v_label(j));
    std::sort(lines.begin(), lines.end());

    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

auto adjacency_matrix(const BipartiteGraph& g) -> AdjacencyMatrix
{
    std::vector<BitRow> rows;
    rows.reserve(g.u_count());
    for (std::size_t i = 0; i < g.u_count(); ++i)
        rows.push_back(g.u_row(i));
    return AdjacencyMatrix(std::move(rows));
}

namespace {
    auto row_gram(const AdjacencyMatrix& m, GramSide side) -> GramMatrix
    {
        auto n = m.rows();
        std::vector<std::uint32_t> entries(n * n, 0);
        for (std::size_t k = 0; k < n; ++k) {
            entries[k * n + k] = static_cast<std::uint32_t>(m.row(k).count());
            for (std::size_t l = 0; l < k; ++l) {
                auto c = static_cast<std::uint32_t>(m.row(k).intersection_count(m.row(l)));
                entries[k * n + l] = c;
                entries[l * n + k] = c;
            }
        }
        return GramMatrix(n, side, std::move(entries));
    }
}

auto gram(const AdjacencyMatrix& q) -> GramMatrix
{
    return row_gram(q, GramSide::u_side);
}

auto gram_t(const AdjacencyMatrix& q) -> GramMatrix
{
    return row_gram(q.transpose(), GramSide::v_side);
}

auto adjacent_to(const BipartiteGraph& g, std::span<const std::uint32_t> v_subset) -> std::vector<std::uint32_t>
{
    if (v_subset.empty())
        throw std::invalid_argument("adjacent_to needs a non-empty v-subset");
    for (auto j : v_subset)
        if (j >= g.v_count())
            throw std::out_of_range("v index " + std::to_string(j) + " out of range");

    BitRow common = g.v_column(v_subset.front());
    for (auto j : v_subset.subspan(1))
        common &= g.v_column(j);
    return common.indices();
}

} // namespace biclab
