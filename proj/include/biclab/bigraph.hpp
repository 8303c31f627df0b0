#pragma once

#include "biclab/bitrow.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace biclab {

/// Thrown by the text readers; carries the 1-based line of the offending input.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Edge {
    std::uint32_t u;
    std::uint32_t v;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// G = (U, V, E) with dense indices. Immutable after construction.
///
/// Adjacency is kept twice: one bit row over V per u-vertex, and one bit
/// column over U per v-vertex. The column form is what common-neighbourhood
/// queries intersect.
class BipartiteGraph {
public:
    /// Throws std::invalid_argument if a count is zero, an edge is out of
    /// range, or a non-empty label table has the wrong length. Duplicate
    /// edges collapse.
    BipartiteGraph(std::size_t u_count, std::size_t v_count, std::span<const Edge> edges,
                   std::vector<std::string> u_labels = {},
                   std::vector<std::string> v_labels = {});

    [[nodiscard]] std::size_t u_count() const noexcept { return u_rows_.size(); }
    [[nodiscard]] std::size_t v_count() const noexcept { return v_cols_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edge_count_; }

    /// N(u_i) as a bit set over V.
    [[nodiscard]] const BitRow& u_row(std::size_t i) const { return u_rows_.at(i); }
    /// N(v_j) as a bit set over U.
    [[nodiscard]] const BitRow& v_column(std::size_t j) const { return v_cols_.at(j); }

    [[nodiscard]] bool has_edge(std::size_t i, std::size_t j) const
    {
        return u_rows_.at(i).test(j);
    }

    [[nodiscard]] std::size_t u_degree(std::size_t i) const { return u_rows_.at(i).count(); }
    [[nodiscard]] std::size_t v_degree(std::size_t j) const { return v_cols_.at(j).count(); }

    /// Edges sorted by (u, v).
    [[nodiscard]] std::vector<Edge> edges() const;

    [[nodiscard]] bool has_labels() const noexcept { return !u_labels_.empty(); }
    /// Stored label, or "u<i>" / "v<j>" when the graph carries no labels.
    [[nodiscard]] std::string u_label(std::size_t i) const;
    [[nodiscard]] std::string v_label(std::size_t j) const;

    friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

private:
    std::vector<BitRow> u_rows_;
    std::vector<BitRow> v_cols_;
    std::size_t edge_count_ = 0;
    std::vector<std::string> u_labels_;
    std::vector<std::string> v_labels_;
};

/// Binary |U| x |V| matrix Q.
class AdjacencyMatrix {
public:
    explicit AdjacencyMatrix(std::vector<BitRow> rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] int entry(std::size_t i, std::size_t j) const { return rows_.at(i).test(j) ? 1 : 0; }
    [[nodiscard]] const BitRow& row(std::size_t i) const { return rows_.at(i); }
    [[nodiscard]] AdjacencyMatrix transpose() const;

    friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

private:
    std::vector<BitRow> rows_;
    std::size_t cols_ = 0;
};

enum class GramSide { u_side, v_side };

/// Q·Qᵀ (U-side) or Qᵀ·Q (V-side). Off-diagonal entries are common
/// neighbourhood sizes, diagonal entries are degrees.
class GramMatrix {
public:
    GramMatrix(std::size_t order, GramSide side, std::vector<std::uint32_t> entries);

    [[nodiscard]] std::size_t order() const noexcept { return order_; }
    [[nodiscard]] GramSide side() const noexcept { return side_; }
    [[nodiscard]] std::uint32_t entry(std::size_t k, std::size_t l) const
    {
        return entries_.at(k * order_ + l);
    }
    /// Largest entry strictly below the diagonal, 0 when order < 2.
    [[nodiscard]] std::uint32_t max_off_diagonal() const;
    /// Strictly lower-triangular entries in row-major order.
    [[nodiscard]] std::vector<std::uint32_t> lower_triangle() const;

    friend bool operator==(const GramMatrix&, const GramMatrix&) = default;

private:
    std::size_t order_;
    GramSide side_;
    std::vector<std::uint32_t> entries_;
};

struct Biclique {
    std::vector<std::uint32_t> u_set;
    std::vector<std::uint32_t> v_set;

    [[nodiscard]] std::size_t weight() const noexcept { return u_set.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return v_set.size(); }

    /// Both sets non-empty, sorted, in range, and fully connected in `g`.
    [[nodiscard]] bool is_valid_in(const BipartiteGraph& g) const;

    friend bool operator==(const Biclique&, const Biclique&) = default;
};

/// Raw (actor, target) observations; repetitions are kept.
struct ObservationLog {
    std::vector<std::pair<std::string, std::string>> records;
    /// Vertices declared with a `#% u <label>` / `#% v <label>` line. These
    /// survive serialisation of graphs with isolated vertices.
    std::vector<std::string> declared_u;
    std::vector<std::string> declared_v;

    [[nodiscard]] std::size_t w() const noexcept { return records.size(); }
};

struct ObservedGraph {
    BipartiteGraph graph;
    std::size_t w;
};

[[nodiscard]] ObservationLog parse_observation_log(std::string_view text);

/// Labels get dense indices in first-appearance order; declared-only vertices
/// follow in declaration order. Throws ParseError(0, ...) if there are no edges.
[[nodiscard]] BipartiteGraph build_graph(const ObservationLog& log);

[[nodiscard]] BipartiteGraph from_edge_list(std::string_view text);
[[nodiscard]] ObservedGraph from_observation_log(std::string_view text);

/// One "<u-label> <v-label>" line per edge plus one declaration line per
/// isolated vertex, all lines sorted bytewise.
[[nodiscard]] std::string to_edge_list(const BipartiteGraph& g);

[[nodiscard]] AdjacencyMatrix adjacency_matrix(const BipartiteGraph& g);
[[nodiscard]] GramMatrix gram(const AdjacencyMatrix& q);
[[nodiscard]] GramMatrix gram_t(const AdjacencyMatrix& q);

/// { u : v_subset ⊆ N(u) }, sorted. Throws std::invalid_argument on an empty
/// subset and std::out_of_range on a bad index.
[[nodiscard]] std::vector<std::uint32_t> adjacent_to(const BipartiteGraph& g,
                                                     std::span<const std::uint32_t> v_subset);

} // namespace biclab
