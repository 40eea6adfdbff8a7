#pragma once

#include "sumprod/rational.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sumprod {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Graph G inside A1 x A2, stored over element indices with both row and
/// column adjacency. Edges are kept sorted and unique.
class BipartiteGraph {
public:
    BipartiteGraph() = default;
    BipartiteGraph(std::size_t n_left, std::size_t n_right, std::vector<Edge> edges);
    static BipartiteGraph full(std::size_t n_left, std::size_t n_right);

    std::size_t n_left() const { return n_left_; }
    std::size_t n_right() const { return n_right_; }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return edges_.empty(); }
    std::span<const Edge> edges() const { return edges_; }

    std::span<const std::uint32_t> row(std::size_t left) const;
    std::span<const std::uint32_t> column(std::size_t right) const;
    std::size_t row_degree(std::size_t left) const { return row(left).size(); }
    std::size_t column_degree(std::size_t right) const { return column(right).size(); }
    bool has_edge(std::size_t left, std::size_t right) const;

    /// G(x) = {x' : (x, x') in G or (x', x) in G}, for graphs whose two
    /// sides index the same set. Sorted, unique.
    std::vector<std::uint32_t> fiber(std::size_t x) const;

    /// |G| / (N1 N2).
    Rational density() const;

    /// Edges with both endpoints kept; indices are unchanged.
    BipartiteGraph restrict_to(std::span<const std::uint32_t> left_keep,
                               std::span<const std::uint32_t> right_keep) const;
    BipartiteGraph transpose() const;

    bool is_subgraph_of(const BipartiteGraph& other) const;

    friend bool operator==(const BipartiteGraph& a, const BipartiteGraph& b) {
        return a.n_left_ == b.n_left_ && a.n_right_ == b.n_right_ && a.edges_ == b.edges_;
    }

private:
    std::size_t n_left_ = 0;
    std::size_t n_right_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> row_offsets_, row_adj_;
    std::vector<std::uint32_t> col_offsets_, col_adj_;
};

}  // namespace sumprod
