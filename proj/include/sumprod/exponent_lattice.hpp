#pragma once
// Prime-exponent lattice: positive integers as exponent vectors over a
// finite prime basis, so that multiplication becomes vector addition.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sumprod {

using BigInt = boost::multiprecision::cpp_int;
using Exponent = std::uint32_t;

/// Strictly increasing, nonempty list of distinct primes.
class PrimeBasis {
public:
    PrimeBasis() = default;
    explicit PrimeBasis(std::vector<std::uint64_t> primes);

    std::size_t size() const { return primes_.size(); }
    bool empty() const { return primes_.empty(); }
    std::uint64_t operator[](std::size_t i) const { return primes_[i]; }
    const std::vector<std::uint64_t>& primes() const { return primes_; }

    /// Position of p in the basis, or size() when absent.
    std::size_t index_of(std::uint64_t p) const;

    PrimeBasis sub_basis(std::span<const std::size_t> indices) const;
    PrimeBasis union_with(const PrimeBasis& other) const;

    friend bool operator==(const PrimeBasis&, const PrimeBasis&) = default;

private:
    std::vector<std::uint64_t> primes_;
};

using ExponentVector = std::vector<Exponent>;

bool is_prime(std::uint64_t n);

/// Exponents of n over `basis`. Throws CofactorRemains when n has a prime
/// factor outside the basis.
ExponentVector factorize(std::uint64_t n, const PrimeBasis& basis);

/// Product of basis[i]^v[i], exact.
BigInt evaluate(std::span<const Exponent> v, const PrimeBasis& basis);

/// Sorted distinct prime factors of n (trial division; n <= 2^64).
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

/// Finite set of exponent vectors over a shared basis, kept in
/// lexicographic order with no duplicates. Elements are stored flat,
/// row-major, `dim()` exponents per element.
class ExpSet {
public:
    ExpSet() = default;
    /// Sorts and deduplicates.
    ExpSet(PrimeBasis basis, std::vector<ExponentVector> elements);
    /// Takes an already sorted, deduplicated flat buffer.
    static ExpSet from_sorted_flat(PrimeBasis basis, std::vector<Exponent> flat);

    const PrimeBasis& basis() const { return basis_; }
    std::size_t dim() const { return basis_.size(); }
    std::size_t size() const { return dim() == 0 ? 0 : flat_.size() / dim(); }
    bool empty() const { return size() == 0; }

    std::span<const Exponent> operator[](std::size_t i) const {
        return {flat_.data() + i * dim(), dim()};
    }
    const std::vector<Exponent>& flat() const { return flat_; }
    std::vector<ExponentVector> elements() const;

    bool contains(std::span<const Exponent> v) const;
    /// Index of v, or size() when absent.
    std::size_t find(std::span<const Exponent> v) const;

    /// Subset selected by (sorted or unsorted) element indices.
    ExpSet subset(std::span<const std::size_t> indices) const;

    /// Re-index onto a larger basis containing this one.
    ExpSet reindex(const PrimeBasis& wider) const;

    friend bool operator==(const ExpSet&, const ExpSet&) = default;

private:
    PrimeBasis basis_;
    std::vector<Exponent> flat_;
};

struct Embedding {
    PrimeBasis basis;
    ExpSet set;
};

/// Maps a set of positive integers into the lattice over the sorted union of
/// their prime factors. Duplicates in `values` are collapsed. The set {1} has
/// no prime factors and is embedded over the basis [2].
Embedding embed_set(std::span<const std::uint64_t> values);

/// Coordinate restriction onto `indices` (0-based, any order; duplicates
/// ignored). Throws EmptyIndexSet for an empty index list.
ExpSet project(const ExpSet& s, std::span<const std::size_t> indices);

/// True when the restriction to `indices` separates all elements of s.
bool is_injective_on(const ExpSet& s, std::span<const std::size_t> indices);

// Text form: first line "basis p1 p2 ...", then one element per line with
// space-separated exponents.
void write_text(std::ostream& os, const ExpSet& s);
ExpSet read_text(std::istream& is);
std::string to_text(const ExpSet& s);
ExpSet from_text(const std::string& text);

}  // namespace sumprod
