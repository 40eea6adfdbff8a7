#pragma once
// Lower bounds for Λ_q constants of finite integer sets: L^q norms of
// trigonometric polynomials on a grid, a multistart projected-gradient
// search over unit coefficient vectors, and the dilate-sum ratio check.

#include "sumprod/setops.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sumprod {

using Complex = std::complex<double>;

/// Smallest M making the grid average of |F|^q exact for q = 2h.
std::size_t exact_grid_threshold(const IntSet& a, int h);

/// Default grid: 4 h d + 1 for even q (d = max - min), 1 when d = 0.
/// Returns 0 for non-even q, meaning "choose adaptively".
std::size_t default_grid(const IntSet& a, double q);

/// (sum_j |F(j/M)|^q / M)^{1/q} with F(θ) = sum_n c_n e^{2πinθ}.
/// With require_exact, throws GridTooCoarse unless q = 2h and M > h d.
double trig_norm(const IntSet& a, std::span<const Complex> c, double q, std::size_t M,
                 bool require_exact = false);

/// Same, on the default grid; for non-even q the grid is doubled until the
/// relative change drops below 1e-8.
double trig_norm(const IntSet& a, std::span<const Complex> c, double q);

struct LambdaEstimate {
    IntSet set;
    double q = 2;
    double lower = 0;
    std::optional<double> upper;
    std::vector<Complex> certificate;
    std::size_t M = 1;
    int restarts = 0;
    int iterations = 0;      // total over restarts
    int unconverged = 0;     // restarts that hit the iteration cap
    std::uint64_t seed = 0;
    std::vector<double> trace;  // objective per accepted step, winning restart
};

LambdaEstimate lambda_lower_bound(const IntSet& a, double q, int restarts = 32, int max_iters = 500,
                                  std::uint64_t seed = 0);

/// (E_h(A) / N^h)^{1/(2h)}: the uniform-coefficient L^{2h} norm.
double lambda_uniform_even(const IntSet& a, int h);

/// sqrt(N).
double lambda_trivial_upper(const IntSet& a, double q);

/// One summand F_α(p1^α1 ... pk^αk θ) of the dilate sum.
struct DilateTerm {
    std::vector<std::uint32_t> alpha;
    IntSet freqs;
    std::vector<Complex> coeffs;  // empty means all ones
};

struct Prop1Report {
    int k = 0;
    double q = 0;
    int trials = 0;
    double ratio = 0;  // max over trials of LHS / (sum ||F_α||_q^2)^{1/2}
    double c_est = 0;  // ratio^{1/k} / q
    double lhs = 0;    // at the maximizing trial
    double rhs = 0;
};

/// Trial 0 uses the given coefficients; later trials draw random complex
/// coefficients for every term. Throws CoprimalityViolated when a support
/// frequency shares a factor with one of the primes.
Prop1Report prop1_ratio(std::span<const std::uint64_t> primes, std::span<const DilateTerm> terms, double q,
                        int trials = 1, std::uint64_t seed = 0);

}  // namespace sumprod
