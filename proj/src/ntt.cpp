#include "ntt.hpp"

#include <array>
#include <bit>

namespace sumprod::detail {

namespace {

struct Modulus {
    std::uint32_t p;
    std::uint32_t root;  // primitive root
};

// p - 1 divisible by 2^25 for all three.
constexpr std::array<Modulus, 3> kModuli{{{167772161u, 3u}, {469762049u, 3u}, {2013265921u, 31u}}};

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1;
    b %= p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

// Montgomery form with R = 2^32; valid for p < 2^31.
struct Mont {
    std::uint32_t p, neg_inv;
    explicit Mont(std::uint32_t mod) : p(mod) {
        std::uint32_t inv = mod;
        for (int i = 0; i < 5; ++i) inv *= 2 - mod * inv;
        neg_inv = 0u - inv;
    }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        const std::uint64_t t = std::uint64_t{a} * b;
        const std::uint32_t m = static_cast<std::uint32_t>(t) * neg_inv;
        const auto u = static_cast<std::uint32_t>((t + std::uint64_t{m} * p) >> 32);
        return u >= p ? u - p : u;
    }
    std::uint32_t to(std::uint64_t a) const { return static_cast<std::uint32_t>((a % p << 32) % p); }
};

void ntt(std::vector<std::uint32_t>& a, bool inverse, const Modulus& m) {
    const std::size_t n = a.size();
    const std::uint64_t p = m.p;
    const Mont mont(m.p);
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<std::uint32_t> w;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::uint64_t wl = pow_mod(m.root, (p - 1) / len, p);
        if (inverse) wl = pow_mod(wl, p - 2, p);
        const std::size_t half = len / 2;
        w.resize(half);
        // twiddles kept in Montgomery form so mul() returns plain residues
        const std::uint32_t wl_m = mont.to(wl);
        w[0] = mont.to(1);
        for (std::size_t k = 1; k < half; ++k) w[k] = mont.mul(w[k - 1], wl_m);
        const std::uint32_t pp = m.p;
        for (std::size_t i = 0; i < n; i += len) {
            std::uint32_t* lo = a.data() + i;
            std::uint32_t* hi = lo + half;
            for (std::size_t k = 0; k < half; ++k) {
                const std::uint32_t u = lo[k];
                const std::uint32_t v = mont.mul(hi[k], w[k]);
                const std::uint32_t s = u + v;
                lo[k] = s >= pp ? s - pp : s;
                hi[k] = u >= v ? u - v : u + pp - v;
            }
        }
    }
    if (inverse) {
        const std::uint32_t inv_n = mont.to(pow_mod(n, p - 2, p));
        for (auto& x : a) x = mont.mul(x, inv_n);
    }
}

}  // namespace

std::vector<unsigned __int128> indicator_power(const std::vector<std::uint32_t>& support,
                                               std::uint32_t max_offset, int h) {
    const std::size_t out_len = static_cast<std::size_t>(h) * max_offset + 1;
    const std::size_t n = std::bit_ceil(out_len);

    std::array<std::vector<std::uint32_t>, 3> residues;
    for (std::size_t mi = 0; mi < kModuli.size(); ++mi) {
        const auto& m = kModuli[mi];
        std::vector<std::uint32_t> a(n, 0);
        for (auto s : support) a[s] = 1;
        ntt(a, false, m);
        for (auto& x : a) x = static_cast<std::uint32_t>(pow_mod(x, static_cast<std::uint64_t>(h), m.p));
        ntt(a, true, m);
        a.resize(out_len);
        residues[mi] = std::move(a);
    }

    // Garner: x = r0 + p0 * (y1 + p1 * y2).
    const std::uint64_t p0 = kModuli[0].p, p1 = kModuli[1].p, p2 = kModuli[2].p;
    const std::uint64_t inv_p0_mod_p1 = pow_mod(p0, p1 - 2, p1);
    const std::uint64_t p0p1_mod_p2 = p0 % p2 * (p1 % p2) % p2;
    const std::uint64_t inv_p0p1_mod_p2 = pow_mod(p0p1_mod_p2, p2 - 2, p2);

    std::vector<unsigned __int128> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        const std::uint64_t r0 = residues[0][i], r1 = residues[1][i], r2 = residues[2][i];
        const std::uint64_t y1 = (r1 + p1 - r0 % p1) % p1 * inv_p0_mod_p1 % p1;
        const std::uint64_t x01_mod_p2 = (r0 + p0 % p2 * y1) % p2;
        const std::uint64_t y2 = (r2 + p2 - x01_mod_p2) % p2 * inv_p0p1_mod_p2 % p2;
        out[i] = static_cast<unsigned __int128>(r0) +
                 static_cast<unsigned __int128>(p0) *
                     (static_cast<unsigned __int128>(y1) + static_cast<unsigned __int128>(p1) * y2);
    }
    return out;
}

}  // namespace sumprod::detail
