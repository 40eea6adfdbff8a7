#include "sumprod/bipartite_graph.hpp"

#include "sumprod/errors.hpp"

#include <algorithm>

namespace sumprod {

BipartiteGraph::BipartiteGraph(std::size_t n_left, std::size_t n_right, std::vector<Edge> edges)
    : n_left_(n_left), n_right_(n_right), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const auto& [l, r] : edges_)
        if (l >= n_left_ || r >= n_right_) throw InvalidArgument("edge endpoint out of range");

    row_offsets_.assign(n_left_ + 1, 0);
    col_offsets_.assign(n_right_ + 1, 0);
    for (const auto& [l, r] : edges_) {
        ++row_offsets_[l + 1];
        ++col_offsets_[r + 1];
    }
    for (std::size_t i = 0; i < n_left_; ++i) row_offsets_[i + 1] += row_offsets_[i];
    for (std::size_t j = 0; j < n_right_; ++j) col_offsets_[j + 1] += col_offsets_[j];

    row_adj_.resize(edges_.size());
    col_adj_.resize(edges_.size());
    std::vector<std::uint32_t> col_fill(col_offsets_.begin(), col_offsets_.end() - 1);
    // edges_ is sorted by (left, right), so rows fill in order and each
    // column list receives lefts in ascending order.
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto [l, r] = edges_[e];
        row_adj_[e] = r;
        col_adj_[col_fill[r]++] = l;
    }
}

BipartiteGraph BipartiteGraph::full(std::size_t n_left, std::size_t n_right) {
    std::vector<Edge> e;
    e.reserve(n_left * n_right);
    for (std::uint32_t i = 0; i < n_left; ++i)
        for (std::uint32_t j = 0; j < n_right; ++j) e.emplace_back(i, j);
    return BipartiteGraph(n_left, n_right, std::move(e));
}

std::span<const std::uint32_t> BipartiteGraph::row(std::size_t left) const {
    return {row_adj_.data() + row_offsets_[left], row_offsets_[left + 1] - row_offsets_[left]};
}

std::span<const std::uint32_t> BipartiteGraph::column(std::size_t right) const {
    return {col_adj_.data() + col_offsets_[right], col_offsets_[right + 1] - col_offsets_[right]};
}

bool BipartiteGraph::has_edge(std::size_t left, std::size_t right) const {
    if (left >= n_left_) return false;
    auto r = row(left);
    return std::binary_search(r.begin(), r.end(), static_cast<std::uint32_t>(right));
}

std::vector<std::uint32_t> BipartiteGraph::fiber(std::size_t x) const {
    std::vector<std::uint32_t> out;
    if (x < n_left_) {
        auto r = row(x);
        out.assign(r.begin(), r.end());
    }
    if (x < n_right_) {
        auto c = column(x);
        std::vector<std::uint32_t> merged;
        std::set_union(out.begin(), out.end(), c.begin(), c.end(), std::back_inserter(merged));
        out = std::move(merged);
    }
    return out;
}

Rational BipartiteGraph::density() const {
    if (n_left_ == 0 || n_right_ == 0) return Rational(0);
    return Rational(static_cast<std::int64_t>(edges_.size()),
                    static_cast<std::int64_t>(n_left_ * n_right_));
}

BipartiteGraph BipartiteGraph::restrict_to(std::span<const std::uint32_t> left_keep,
                                           std::span<const std::uint32_t> right_keep) const {
    std::vector<char> lk(n_left_, 0), rk(n_right_, 0);
    for (auto i : left_keep) lk.at(i) = 1;
    for (auto j : right_keep) rk.at(j) = 1;
    std::vector<Edge> e;
    for (const auto& [l, r] : edges_)
        if (lk[l] && rk[r]) e.emplace_back(l, r);
    return BipartiteGraph(n_left_, n_right_, std::move(e));
}

BipartiteGraph BipartiteGraph::transpose() const {
    std::vector<Edge> e;
    e.reserve(edges_.size());
    for (const auto& [l, r] : edges_) e.emplace_back(r, l);
    return BipartiteGraph(n_right_, n_left_, std::move(e));
}

bool BipartiteGraph::is_subgraph_of(const BipartiteGraph& other) const {
    if (n_left_ != other.n_left_ || n_right_ != other.n_right_) return false;
    return std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

}  // namespace sumprod
