#include "sumprod/lambda_q.hpp"

#include "rng.hpp"
#include "sumprod/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace sumprod {

namespace {

constexpr std::size_t kMaxGrid = std::size_t{1} << 26;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Returns h when q = 2h for a positive integer h, else 0.
int even_order(double q) {
    const double h = q / 2;
    if (h >= 1 && h == std::floor(h) && h < 1e6) return static_cast<int>(h);
    return 0;
}

std::uint64_t span_of(const IntSet& a) {
    return a.empty() ? 0 : static_cast<std::uint64_t>(a.max() - a.min());
}

void check_grid(std::size_t M) {
    if (M < 1) throw InvalidArgument("grid size must be >= 1");
    if (M > kMaxGrid) throw InvalidArgument("grid size " + std::to_string(M) + " is too large");
}

// Evaluates F on the grid j/M by one inverse FFT, and the ascent direction
// mean_j |F_j|^{q-2} F_j e^{-2πinθ_j} by one forward FFT.
class GridEvaluator {
public:
    GridEvaluator(const IntSet& a, std::size_t M) : M_(M) {
        check_grid(M);
        for (auto n : a) slot_.push_back(static_cast<std::size_t>(static_cast<std::uint64_t>(n - a.min()) % M));
        buf_ = fftw_alloc_complex(M);
        out_ = fftw_alloc_complex(M);
        std::lock_guard lock(planner_mutex());
        backward_ = fftw_plan_dft_1d(static_cast<int>(M), buf_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
        forward_ = fftw_plan_dft_1d(static_cast<int>(M), buf_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~GridEvaluator() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(backward_);
        fftw_destroy_plan(forward_);
        fftw_free(buf_);
        fftw_free(out_);
    }
    GridEvaluator(const GridEvaluator&) = delete;
    GridEvaluator& operator=(const GridEvaluator&) = delete;

    std::size_t grid() const { return M_; }

    // mean_j |F(j/M)|^q; keeps F for gradient().
    double power_mean(std::span<const Complex> c, double q) {
        std::memset(buf_, 0, sizeof(fftw_complex) * M_);
        for (std::size_t i = 0; i < slot_.size(); ++i) {
            buf_[slot_[i]][0] += c[i].real();
            buf_[slot_[i]][1] += c[i].imag();
        }
        fftw_execute_dft(backward_, buf_, out_);
        values_.resize(M_);
        const int h = even_order(q);
        double sum = 0;
        for (std::size_t j = 0; j < M_; ++j) {
            values_[j] = Complex(out_[j][0], out_[j][1]);
            const double a2 = std::norm(values_[j]);
            double v = 1;
            if (h > 0)
                for (int e = 0; e < h; ++e) v *= a2;
            else
                v = std::pow(a2, q / 2);
            sum += v;
        }
        return sum / static_cast<double>(M_);
    }

    void gradient(double q, std::vector<Complex>& g) {
        for (std::size_t j = 0; j < M_; ++j) {
            const double a2 = std::norm(values_[j]);
            const double w = q == 2 ? 1.0 : (a2 == 0 ? 0.0 : std::pow(a2, q / 2 - 1));
            buf_[j][0] = w * values_[j].real();
            buf_[j][1] = w * values_[j].imag();
        }
        fftw_execute_dft(forward_, buf_, out_);
        g.resize(slot_.size());
        for (std::size_t i = 0; i < slot_.size(); ++i)
            g[i] = Complex(out_[slot_[i]][0], out_[slot_[i]][1]) / static_cast<double>(M_);
    }

private:
    std::size_t M_;
    std::vector<std::size_t> slot_;
    std::vector<Complex> values_;
    fftw_complex* buf_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan backward_ = nullptr;
    fftw_plan forward_ = nullptr;
};

double norm_from_mean(double mean, double q) { return std::pow(mean, 1.0 / q); }

double l2(std::span<const Complex> c) {
    double s = 0;
    for (const auto& z : c) s += std::norm(z);
    return std::sqrt(s);
}

// Doubling search from `start` until the relative change drops below 1e-8.
std::size_t adaptive_grid(const IntSet& a, std::span<const Complex> c, double q, std::size_t start) {
    std::size_t M = std::max<std::size_t>(start, 1);
    GridEvaluator first(a, M);
    double prev = norm_from_mean(first.power_mean(c, q), q);
    while (2 * M <= kMaxGrid) {
        GridEvaluator ev(a, 2 * M);
        const double cur = norm_from_mean(ev.power_mean(c, q), q);
        M *= 2;
        if (std::abs(cur - prev) <= 1e-8 * std::max(std::abs(cur), 1e-300)) break;
        prev = cur;
    }
    return M;
}

// Smallest 2,3,5,7-smooth integer >= n; FFTW is much faster on these.
std::size_t smooth_at_least(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

std::size_t optimizer_grid(const IntSet& a, double q) {
    if (even_order(q) > 0) return smooth_at_least(default_grid(a, q));
    std::vector<Complex> uniform(a.size(), Complex(1.0 / std::sqrt(static_cast<double>(a.size())), 0));
    const int h = static_cast<int>(std::ceil(q / 2));
    return std::min(kMaxGrid, 2 * adaptive_grid(a, uniform, q, 4 * static_cast<std::size_t>(h) * span_of(a) + 1));
}

struct RestartResult {
    double objective = 0;  // mean |F|^q
    std::vector<Complex> c;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

void normalize(std::vector<Complex>& c) {
    const double n = l2(c);
    for (auto& z : c) z /= n;
}

RestartResult ascend(GridEvaluator& ev, std::vector<Complex> c, double q, int max_iters) {
    RestartResult r;
    normalize(c);
    double phi = ev.power_mean(c, q);
    r.trace.push_back(norm_from_mean(phi, q));
    std::vector<Complex> g, t(c.size()), trial(c.size());
    double eta = 1.0;
    for (; r.iterations < max_iters; ++r.iterations) {
        ev.power_mean(c, q);  // refresh F for c
        ev.gradient(q, g);
        // <c, g> = mean |F|^q, so the radial part has real weight phi.
        double tn2 = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            t[i] = g[i] - phi * c[i];
            tn2 += std::norm(t[i]);
        }
        const double tn = std::sqrt(tn2);
        if (tn <= 1e-10 * phi) {
            r.converged = true;
            break;
        }
        eta = std::min(eta * 4, 1e6);
        bool improved = false;
        double next = phi;
        for (int halving = 0; halving < 60; ++halving, eta /= 2) {
            for (std::size_t i = 0; i < c.size(); ++i) trial[i] = c[i] + (eta / phi) * t[i];
            normalize(trial);
            next = ev.power_mean(trial, q);
            if (next > phi) {
                improved = true;
                break;
            }
        }
        if (!improved) {
            r.converged = true;
            break;
        }
        const double gain = (next - phi) / phi;
        c.swap(trial);
        phi = next;
        r.trace.push_back(norm_from_mean(phi, q));
        if (gain < 1e-15) {
            r.converged = true;
            ++r.iterations;
            break;
        }
    }
    r.objective = phi;
    r.c = std::move(c);
    return r;
}

std::vector<Complex> starting_point(std::size_t n, int restart, std::uint64_t seed) {
    std::vector<Complex> c(n, Complex(1, 0));
    if (restart == 0) return c;
    std::mt19937_64 rng(detail::derive_seed(seed, static_cast<std::uint64_t>(restart)));
    std::uniform_real_distribution<double> phase(0, 2 * M_PI);
    for (auto& z : c) z = std::polar(1.0, phase(rng));
    return c;
}

}  // namespace

std::size_t exact_grid_threshold(const IntSet& a, int h) {
    return static_cast<std::size_t>(h) * span_of(a) + 1;
}

std::size_t default_grid(const IntSet& a, double q) {
    const int h = even_order(q);
    if (h == 0) return 0;
    const std::uint64_t d = span_of(a);
    if (d == 0) return 1;
    return 4 * static_cast<std::size_t>(h) * d + 1;
}

double trig_norm(const IntSet& a, std::span<const Complex> c, double q, std::size_t M, bool require_exact) {
    if (q < 2) throw InvalidArgument("q must be >= 2");
    if (c.size() != a.size()) throw InvalidArgument("coefficient count does not match the set");
    if (require_exact) {
        const int h = even_order(q);
        if (h == 0) throw GridTooCoarse("exact quadrature needs an even integer q");
        if (M < exact_grid_threshold(a, h))
            throw GridTooCoarse("M = " + std::to_string(M) + " is not above h*d = " +
                                std::to_string(exact_grid_threshold(a, h) - 1));
    }
    if (a.empty()) return 0;
    GridEvaluator ev(a, M);
    return norm_from_mean(ev.power_mean(c, q), q);
}

double trig_norm(const IntSet& a, std::span<const Complex> c, double q) {
    if (q < 2) throw InvalidArgument("q must be >= 2");
    if (a.empty()) return 0;
    std::size_t M = default_grid(a, q);
    if (M == 0) M = adaptive_grid(a, c, q, 4 * static_cast<std::size_t>(std::ceil(q / 2)) * span_of(a) + 1);
    return trig_norm(a, c, q, M);
}

LambdaEstimate lambda_lower_bound(const IntSet& a, double q, int restarts, int max_iters, std::uint64_t seed) {
    if (q < 2) throw InvalidArgument("q must be >= 2");
    if (a.empty()) throw InvalidArgument("lambda needs a nonempty set");
    if (restarts < 1) throw InvalidArgument("restarts must be >= 1");
    LambdaEstimate est;
    est.set = a;
    est.q = q;
    est.seed = seed;
    est.restarts = restarts;
    est.M = optimizer_grid(a, q);
    est.upper = lambda_trivial_upper(a, q);

    std::vector<RestartResult> results(static_cast<std::size_t>(restarts));
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(restarts)));
    auto run = [&](unsigned w) {
        GridEvaluator ev(a, est.M);
        for (int r = static_cast<int>(w); r < restarts; r += static_cast<int>(workers))
            results[static_cast<std::size_t>(r)] = ascend(ev, starting_point(a.size(), r, seed), q, max_iters);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& th : pool) th.join();
    }

    std::size_t best = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
        est.iterations += results[r].iterations;
        if (!results[r].converged) ++est.unconverged;
        if (results[r].objective > results[best].objective) best = r;
    }
    est.certificate = std::move(results[best].c);
    est.trace = std::move(results[best].trace);
    est.lower = trig_norm(a, est.certificate, q, est.M);
    return est;
}

double lambda_uniform_even(const IntSet& a, int h) {
    if (h < 1) throw InvalidArgument("h must be >= 1");
    if (a.empty()) throw InvalidArgument("lambda needs a nonempty set");
    const double e = to_double(additive_energy(a, h));
    const double n = static_cast<double>(a.size());
    return std::exp((std::log(e) - h * std::log(n)) / (2.0 * h));
}

double lambda_trivial_upper(const IntSet& a, double) { return std::sqrt(static_cast<double>(a.size())); }

Prop1Report prop1_ratio(std::span<const std::uint64_t> primes, std::span<const DilateTerm> terms, double q,
                        int trials, std::uint64_t seed) {
    if (q < 2) throw InvalidArgument("q must be >= 2");
    if (primes.empty()) throw InvalidArgument("need at least one prime");
    if (terms.empty()) throw InvalidArgument("need at least one term");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    for (auto p : primes)
        if (!is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not prime");

    // Composite frequencies n p^α; coprimality makes them pairwise distinct.
    std::vector<std::int64_t> composite;
    std::vector<std::pair<std::size_t, std::size_t>> origin;  // (term, index in term)
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto& term = terms[t];
        if (term.alpha.size() != primes.size()) throw InvalidArgument("alpha length must match the prime list");
        if (!term.coeffs.empty() && term.coeffs.size() != term.freqs.size())
            throw InvalidArgument("coefficient count does not match the support");
        __int128 scale = 1;
        for (std::size_t i = 0; i < primes.size(); ++i)
            for (std::uint32_t e = 0; e < term.alpha[i]; ++e) {
                scale *= primes[i];
                if (scale > (static_cast<__int128>(1) << 40)) throw Overflow("dilation factor too large");
            }
        for (std::size_t j = 0; j < term.freqs.size(); ++j) {
            const std::int64_t n = term.freqs[j];
            for (auto p : primes)
                if (std::gcd(static_cast<std::uint64_t>(n < 0 ? -n : n), p) != 1)
                    throw CoprimalityViolated("frequency " + std::to_string(n) + " shares a factor with " +
                                              std::to_string(p));
            const __int128 f = scale * n;
            if (f > (static_cast<__int128>(1) << 40) || f < -(static_cast<__int128>(1) << 40))
                throw Overflow("composite frequency too large");
            composite.push_back(static_cast<std::int64_t>(f));
            origin.emplace_back(t, j);
        }
    }
    IntSet support(composite);
    if (support.size() != composite.size()) throw CoprimalityViolated("composite frequencies collide");
    std::vector<std::size_t> pos(composite.size());
    for (std::size_t i = 0; i < composite.size(); ++i)
        pos[i] = static_cast<std::size_t>(std::lower_bound(support.begin(), support.end(), composite[i]) -
                                          support.begin());

    Prop1Report rep;
    rep.k = static_cast<int>(primes.size());
    rep.q = q;
    rep.trials = trials;
    std::vector<std::vector<Complex>> coeffs(terms.size());
    for (int trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(detail::derive_seed(seed, static_cast<std::uint64_t>(trial)));
        std::normal_distribution<double> gauss;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            coeffs[t].resize(terms[t].freqs.size());
            for (std::size_t j = 0; j < coeffs[t].size(); ++j) {
                if (trial == 0)
                    coeffs[t][j] = terms[t].coeffs.empty() ? Complex(1, 0) : terms[t].coeffs[j];
                else
                    coeffs[t][j] = Complex(gauss(rng), gauss(rng));
            }
        }
        std::vector<Complex> full(support.size());
        for (std::size_t i = 0; i < composite.size(); ++i) full[pos[i]] = coeffs[origin[i].first][origin[i].second];
        const double lhs = trig_norm(support, full, q);
        double rhs2 = 0;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const double n = trig_norm(terms[t].freqs, coeffs[t], q);
            rhs2 += n * n;
        }
        const double rhs = std::sqrt(rhs2);
        if (rhs > 0 && (trial == 0 || lhs / rhs > rep.ratio)) {
            rep.ratio = lhs / rhs;
            rep.lhs = lhs;
            rep.rhs = rhs;
        }
    }
    rep.c_est = std::pow(rep.ratio, 1.0 / rep.k) / q;
    return rep;
}

}  // namespace sumprod
