#include "sumprod/errors.hpp"
#include "sumprod/regularize.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <functional>

namespace sumprod {

namespace {

using boost::multiprecision::cpp_rational;

std::size_t rank_of(std::vector<std::vector<cpp_rational>> m) {
    if (m.empty()) return 0;
    const std::size_t cols = m[0].size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t piv = rank;
        while (piv < m.size() && m[piv][c] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t r = rank + 1; r < m.size(); ++r) {
            if (m[r][c] == 0) continue;
            const cpp_rational f = m[r][c] / m[rank][c];
            for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
        }
        ++rank;
    }
    return rank;
}

BsgReport bsg_core(std::size_t n, const BipartiteGraph& g, const Rational& delta,
                   const std::function<std::size_t(const IndexSet&)>& difference_size) {
    if (g.n_left() != n || g.n_right() != n) throw InvalidArgument("graph must live on A x A");
    if (n == 0) throw InvalidArgument("bsg_extract needs a nonempty set");
    const auto N = static_cast<std::int64_t>(n);
    if (!exceeds(static_cast<std::int64_t>(g.edge_count()), delta, N * N))
        throw DensityTooLow("|G| is not above delta |A|^2");

    const Rational half = delta / 2;
    std::vector<std::vector<std::uint32_t>> nb(n);
    std::vector<char> popular(n, 0);
    bool any = false;
    for (std::size_t v = 0; v < n; ++v) {
        nb[v] = g.fiber(v);
        if (static_cast<std::int64_t>(nb[v].size()) * half.denominator() < half.numerator() * N) continue;
        popular[v] = 1;
        any = true;
    }
    if (!any) std::fill(popular.begin(), popular.end(), 1);

    BsgReport rep;
    std::size_t best = 0;
    bool chosen = false;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!popular[v]) continue;
        std::size_t c = 0;
        for (auto u : nb[v]) c += static_cast<std::size_t>(popular[u]);
        if (!chosen || c > best) {
            chosen = true;
            best = c;
            rep.pivot = v;
        }
    }
    for (auto u : nb[rep.pivot])
        if (popular[u]) rep.subset.push_back(u);
    if (rep.subset.empty()) rep.subset.push_back(rep.pivot);

    // Keep the members of S that see a (δ/2)-fraction of S.
    std::vector<char> in_s(n, 0);
    for (auto u : rep.subset) in_s[u] = 1;
    IndexSet filtered;
    for (auto u : rep.subset) {
        std::int64_t c = 0;
        for (auto w : nb[u]) c += in_s[w];
        if (c * half.denominator() >= half.numerator() * static_cast<std::int64_t>(rep.subset.size()))
            filtered.push_back(u);
    }
    if (!filtered.empty()) rep.subset = std::move(filtered);

    std::fill(in_s.begin(), in_s.end(), 0);
    for (auto u : rep.subset) in_s[u] = 1;
    std::size_t inside = 0;
    for (const auto& [l, r] : g.edges()) inside += static_cast<std::size_t>(in_s[l] && in_s[r]);
    const double dn = static_cast<double>(n);
    rep.delta_prime = static_cast<double>(rep.subset.size()) / dn;
    rep.k_prime = static_cast<double>(difference_size(rep.subset)) / dn;
    rep.edge_fraction = static_cast<double>(inside) / (dn * dn);
    return rep;
}

}  // namespace

BsgReport bsg_extract(const ExpSet& a, const BipartiteGraph& g, const Rational& delta) {
    return bsg_core(a.size(), g, delta, [&](const IndexSet& s) {
        return difference_set(a.subset(std::vector<std::size_t>(s.begin(), s.end()))).size();
    });
}

BsgReport bsg_extract(const IntSet& a, const BipartiteGraph& g, const Rational& delta) {
    return bsg_core(a.size(), g, delta, [&](const IndexSet& s) {
        std::vector<std::int64_t> v;
        for (auto i : s) v.push_back(a[i]);
        return difference_set(IntSet(std::move(v))).size();
    });
}

std::size_t freiman_dimension(const ExpSet& s) {
    if (s.empty()) throw InvalidArgument("freiman_dimension needs a nonempty set");
    std::vector<std::vector<cpp_rational>> rows;
    for (std::size_t i = 1; i < s.size(); ++i) {
        std::vector<cpp_rational> r(s.dim());
        for (std::size_t c = 0; c < s.dim(); ++c)
            r[c] = cpp_rational(static_cast<std::int64_t>(s[i][c]) - static_cast<std::int64_t>(s[0][c]));
        rows.push_back(std::move(r));
    }
    return rank_of(std::move(rows));
}

std::vector<std::size_t> select_injective_coords(const ExpSet& s) {
    std::vector<std::size_t> idx(s.dim());
    for (std::size_t c = 0; c < idx.size(); ++c) idx[c] = c;
    if (idx.empty()) return idx;
    for (std::size_t c = s.dim(); c-- > 0;) {
        if (idx.size() == 1) break;
        std::vector<std::size_t> trial;
        for (auto k : idx)
            if (k != c) trial.push_back(k);
        if (is_injective_on(s, trial)) idx = std::move(trial);
    }
    return idx;
}

FreimanAudit freiman_audit(const ExpSet& s) {
    if (s.empty()) throw InvalidArgument("freiman_audit needs a nonempty set");
    FreimanAudit a;
    a.dimension = freiman_dimension(s);
    a.sumset_size = sumset(s, s).size();
    const auto n = static_cast<std::int64_t>(s.size());
    const auto d = static_cast<std::int64_t>(a.dimension);
    const auto ss = static_cast<std::int64_t>(a.sumset_size);
    a.doubling = static_cast<double>(ss) / static_cast<double>(n);
    a.lemma_holds = ss >= (d + 1) * n - d * (d + 1) / 2;
    a.relaxed_holds = d * n <= 2 * ss - 2 * n;
    a.naive_holds = (d + 1) * n <= ss;
    a.ceil_holds = d + 1 <= (ss + n - 1) / n;
    a.relaxed_margin = 2 * a.doubling - 2 - static_cast<double>(d);
    a.naive_margin = a.doubling - 1 - static_cast<double>(d);
    a.pass = a.lemma_holds && a.relaxed_holds;
    return a;
}

}  // namespace sumprod
