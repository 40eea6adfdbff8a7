#include "sumprod/exponent_lattice.hpp"

#include "sumprod/errors.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace sumprod {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d <= n / d; d += 2)
        if (n % d == 0) return false;
    return true;
}

PrimeBasis::PrimeBasis(std::vector<std::uint64_t> primes) : primes_(std::move(primes)) {
    if (primes_.empty()) throw InvalidArgument("prime basis must be nonempty");
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        if (!is_prime(primes_[i]))
            throw InvalidArgument(std::to_string(primes_[i]) + " is not prime");
        if (i > 0 && primes_[i] <= primes_[i - 1])
            throw InvalidArgument("prime basis must be strictly increasing");
    }
}

std::size_t PrimeBasis::index_of(std::uint64_t p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return primes_.size();
    return static_cast<std::size_t>(it - primes_.begin());
}

PrimeBasis PrimeBasis::sub_basis(std::span<const std::size_t> indices) const {
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<std::uint64_t> out;
    out.reserve(idx.size());
    for (auto i : idx) {
        if (i >= primes_.size()) throw InvalidArgument("basis index out of range");
        out.push_back(primes_[i]);
    }
    return PrimeBasis(std::move(out));
}

PrimeBasis PrimeBasis::union_with(const PrimeBasis& other) const {
    std::vector<std::uint64_t> out;
    std::set_union(primes_.begin(), primes_.end(), other.primes_.begin(),
                   other.primes_.end(), std::back_inserter(out));
    return PrimeBasis(std::move(out));
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    if (n < 2) return out;
    for (std::uint64_t d = 2; d <= n / d; d += (d == 2 ? 1 : 2)) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

ExponentVector factorize(std::uint64_t n, const PrimeBasis& basis) {
    if (n == 0) throw NonPositiveElement("cannot factorize 0");
    ExponentVector v(basis.size(), 0);
    for (std::size_t i = 0; i < basis.size() && n > 1; ++i) {
        const auto p = basis[i];
        while (n % p == 0) {
            n /= p;
            ++v[i];
        }
    }
    if (n != 1)
        throw CofactorRemains("cofactor " + std::to_string(n) + " has primes outside the basis");
    return v;
}

BigInt evaluate(std::span<const Exponent> v, const PrimeBasis& basis) {
    if (v.size() != basis.size()) throw InvalidArgument("exponent vector length differs from basis");
    BigInt out = 1;
    for (std::size_t i = 0; i < v.size(); ++i) out *= boost::multiprecision::pow(BigInt(basis[i]), v[i]);
    return out;
}

namespace {

std::vector<Exponent> sorted_unique_flat(std::vector<ExponentVector>& elements, std::size_t dim) {
    for (const auto& e : elements)
        if (e.size() != dim) throw InvalidArgument("exponent vector length differs from basis");
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    std::vector<Exponent> flat;
    flat.reserve(elements.size() * dim);
    for (const auto& e : elements) flat.insert(flat.end(), e.begin(), e.end());
    return flat;
}

bool lex_less(std::span<const Exponent> a, std::span<const Exponent> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

ExpSet::ExpSet(PrimeBasis basis, std::vector<ExponentVector> elements) : basis_(std::move(basis)) {
    flat_ = sorted_unique_flat(elements, basis_.size());
}

ExpSet ExpSet::from_sorted_flat(PrimeBasis basis, std::vector<Exponent> flat) {
    ExpSet s;
    s.basis_ = std::move(basis);
    if (s.basis_.empty() ? !flat.empty() : flat.size() % s.basis_.size() != 0)
        throw InvalidArgument("flat buffer does not match basis size");
    s.flat_ = std::move(flat);
    return s;
}

std::vector<ExponentVector> ExpSet::elements() const {
    std::vector<ExponentVector> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        auto e = (*this)[i];
        out.emplace_back(e.begin(), e.end());
    }
    return out;
}

std::size_t ExpSet::find(std::span<const Exponent> v) const {
    if (v.size() != dim()) return size();
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (lex_less((*this)[mid], v))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < size() && std::equal(v.begin(), v.end(), (*this)[lo].begin())) return lo;
    return size();
}

bool ExpSet::contains(std::span<const Exponent> v) const { return find(v) != size(); }

ExpSet ExpSet::subset(std::span<const std::size_t> indices) const {
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<Exponent> flat;
    flat.reserve(idx.size() * dim());
    for (auto i : idx) {
        if (i >= size()) throw InvalidArgument("subset index out of range");
        auto e = (*this)[i];
        flat.insert(flat.end(), e.begin(), e.end());
    }
    return from_sorted_flat(basis_, std::move(flat));
}

ExpSet ExpSet::reindex(const PrimeBasis& wider) const {
    std::vector<std::size_t> pos(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        pos[i] = wider.index_of(basis_[i]);
        if (pos[i] == wider.size()) throw InvalidArgument("target basis does not contain source basis");
    }
    std::vector<ExponentVector> out;
    out.reserve(size());
    for (std::size_t k = 0; k < size(); ++k) {
        ExponentVector v(wider.size(), 0);
        auto e = (*this)[k];
        for (std::size_t i = 0; i < dim(); ++i) v[pos[i]] = e[i];
        out.push_back(std::move(v));
    }
    return ExpSet(wider, std::move(out));
}

Embedding embed_set(std::span<const std::uint64_t> values) {
    if (values.empty()) throw InvalidArgument("embed_set needs a nonempty set");
    std::vector<std::uint64_t> primes;
    for (auto n : values) {
        if (n == 0) throw NonPositiveElement("embed_set requires positive integers");
        auto f = prime_factors(n);
        primes.insert(primes.end(), f.begin(), f.end());
    }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    if (primes.empty()) primes.push_back(2);
    PrimeBasis basis(std::move(primes));
    std::vector<ExponentVector> elems;
    elems.reserve(values.size());
    for (auto n : values) elems.push_back(factorize(n, basis));
    ExpSet set(basis, std::move(elems));
    return {std::move(basis), std::move(set)};
}

ExpSet project(const ExpSet& s, std::span<const std::size_t> indices) {
    if (indices.empty()) throw EmptyIndexSet("projection needs at least one coordinate");
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    PrimeBasis sub = s.basis().sub_basis(idx);
    std::vector<ExponentVector> out;
    out.reserve(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        auto e = s[k];
        ExponentVector v;
        v.reserve(idx.size());
        for (auto i : idx) v.push_back(e[i]);
        out.push_back(std::move(v));
    }
    return ExpSet(std::move(sub), std::move(out));
}

bool is_injective_on(const ExpSet& s, std::span<const std::size_t> indices) {
    if (indices.empty()) return s.size() <= 1;
    return project(s, indices).size() == s.size();
}

void write_text(std::ostream& os, const ExpSet& s) {
    os << "basis";
    for (auto p : s.basis().primes()) os << ' ' << p;
    os << '\n';
    for (std::size_t k = 0; k < s.size(); ++k) {
        auto e = s[k];
        for (std::size_t i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i];
        os << '\n';
    }
}

ExpSet read_text(std::istream& is) {
    std::string line;
    while (std::getline(is, line) && line.find_first_not_of(" \t\r") == std::string::npos) {}
    std::istringstream header(line);
    std::string tag;
    header >> tag;
    if (tag != "basis") throw ParseError("expected 'basis' header line");
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p; header >> p;) primes.push_back(p);
    PrimeBasis basis(std::move(primes));
    std::vector<ExponentVector> elems;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        ExponentVector v;
        for (long long x; row >> x;) {
            if (x < 0) throw ParseError("negative exponent");
            v.push_back(static_cast<Exponent>(x));
        }
        if (!row.eof()) throw ParseError("malformed exponent row: " + line);
        if (v.size() != basis.size()) throw ParseError("row length differs from basis: " + line);
        elems.push_back(std::move(v));
    }
    return ExpSet(std::move(basis), std::move(elems));
}

std::string to_text(const ExpSet& s) {
    std::ostringstream os;
    write_text(os, s);
    return os.str();
}

ExpSet from_text(const std::string& text) {
    std::istringstream is(text);
    return read_text(is);
}

}  // namespace sumprod
