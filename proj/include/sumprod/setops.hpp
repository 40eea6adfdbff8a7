#pragma once
// Sumset and product-set kernels, representation functions, additive
// energies, graph-restricted sumsets and doubling constants.

#include "sumprod/bipartite_graph.hpp"
#include "sumprod/exponent_lattice.hpp"

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sumprod {

/// Exact counts; representation numbers routinely pass 2^53.
using Count = unsigned __int128;

std::string to_string(Count c);
double to_double(Count c);

/// Sorted, deduplicated finite set of integers.
class IntSet {
public:
    IntSet() = default;
    IntSet(std::initializer_list<std::int64_t> values);
    explicit IntSet(std::vector<std::int64_t> values);
    static IntSet from_sorted(std::vector<std::int64_t> values);

    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }
    std::int64_t operator[](std::size_t i) const { return v_[i]; }
    std::int64_t min() const { return v_.front(); }
    std::int64_t max() const { return v_.back(); }
    const std::vector<std::int64_t>& values() const { return v_; }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }
    bool contains(std::int64_t x) const;

    /// Elements as unsigned values; throws NonPositiveElement if any is < 1.
    std::vector<std::uint64_t> positive_values() const;

    friend bool operator==(const IntSet&, const IntSet&) = default;

private:
    std::vector<std::int64_t> v_;
};

/// Default cap on the size of any intermediate k-fold set.
inline constexpr std::size_t kDefaultBudget = 10'000'000;

IntSet sumset(const IntSet& x, const IntSet& y, std::size_t budget = kDefaultBudget);
ExpSet sumset(const ExpSet& x, const ExpSet& y, std::size_t budget = kDefaultBudget);

/// k-fold sumset {x1 + ... + xk}. Throws BudgetExceeded when an
/// intermediate set would pass `budget` elements.
IntSet iterated_sumset(const IntSet& s, int k, std::size_t budget = kDefaultBudget);
ExpSet iterated_sumset(const ExpSet& s, int k, std::size_t budget = kDefaultBudget);

/// k-fold product set, held in exponent space.
struct ProductSet {
    PrimeBasis basis;
    ExpSet exponents;

    std::size_t size() const { return exponents.size(); }
    std::vector<BigInt> values() const;
    /// Throws Overflow when some product does not fit in int64.
    IntSet to_int_set() const;
};

ProductSet product_set(const IntSet& a, int k, std::size_t budget = kDefaultBudget);

IntSet graph_sumset(const IntSet& a1, const IntSet& a2, const BipartiteGraph& g);
ExpSet graph_sumset(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g);

/// K(G) = |A1 +_G A2| / sqrt(N1 N2).
double doubling_constant(const IntSet& a1, const IntSet& a2, const BipartiteGraph& g);
double doubling_constant(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g);

enum class CountEngine { Auto, Hash, Convolution };

/// n -> r_h(n; A), restricted to the support hA, ascending in n.
struct RepresentationCounts {
    std::vector<std::int64_t> support;
    std::vector<Count> counts;
    CountEngine engine_used = CountEngine::Auto;

    Count at(std::int64_t n) const;
    Count total() const;
};

RepresentationCounts representation_counts(const IntSet& a, int h,
                                           CountEngine engine = CountEngine::Auto);

/// CSV with header "n,count".
void write_counts_csv(std::ostream& os, const RepresentationCounts& rc);

/// E_h(A) = sum_n r_h(n; A)^2.
Count additive_energy(const IntSet& a, int h, CountEngine engine = CountEngine::Auto);

/// Cauchy-Schwarz: |hA| >= N^{2h} / E_h(A).
struct EnergyBound {
    Count energy = 0;
    std::size_t sumset_size = 0;
    double lower_bound = 0;
    bool holds = false;
};
EnergyBound energy_sumset_bound(const IntSet& a, int h);

IntSet difference_set(const IntSet& s);

/// Finite set of signed lattice points (differences of exponent vectors),
/// sorted lexicographically.
struct SignedLatticeSet {
    PrimeBasis basis;
    std::vector<std::vector<std::int64_t>> elements;
    std::size_t size() const { return elements.size(); }
};

SignedLatticeSet difference_set(const ExpSet& s);

/// A/A through the lattice: the exponent vectors of all quotients a/b.
SignedLatticeSet quotient_set(const IntSet& a);

struct RuzsaReport {
    std::size_t n = 0;
    std::size_t difference_size = 0;  // |A - A| in the lattice, = |A/A|
    std::size_t sumset_size = 0;      // |A + A| in the lattice, = |A.A|
    double doubling = 0;              // K = |A + A| / |A|
    double bound = 0;                 // K^2 N
    bool holds = false;               // |A - A| <= K^2 N, checked exactly
};
RuzsaReport ruzsa_audit(const IntSet& a);

/// CSV with header "k,sumset_size,productset_size".
struct GrowthRow {
    int k = 0;
    std::size_t sumset_size = 0;
    std::size_t productset_size = 0;
};
void write_growth_csv(std::ostream& os, std::span<const GrowthRow> rows);

}  // namespace sumprod
