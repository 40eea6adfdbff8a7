#include "sumprod/bounds.hpp"

#include "sumprod/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sumprod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// floored log of a value given by its log: max(log x, 1)
double flog(double log_x) { return std::max(log_x, 1.0); }

// floored loglog of N, from log N
double loglog(double log_n) { return flog(std::log(flog(log_n))); }

double log_add(double a, double b) {
    const double m = std::max(a, b);
    if (m == -kInf) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double param(const std::map<std::string, double>& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw InvalidArgument("missing parameter " + key);
    return it->second;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::vector<double> axis(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * f;
    }
    return v;
}

std::vector<double> geometric_axis(double lo, double hi, int n) {
    auto e = axis(std::log(lo), std::log(hi), n);
    for (auto& x : e) x = std::exp(x);
    return e;
}

bool close_or_above(double a, double b) { return a >= b - 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

}  // namespace

// ------------------------------------------------------------------ config

BoundsConfig parse_config(std::istream& is) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(e.what());
    }
    BoundsConfig cfg;
    for (const auto& [key, node] : tree) {
        if (!node.empty()) throw InvalidSpec("sections are not supported: " + key);
        double v = 0;
        try {
            v = node.get_value<double>();
        } catch (const pt::ptree_bad_data&) {
            throw InvalidSpec("bad value for " + key);
        }
        if (key == "C") cfg.C = v;
        else if (key == "C0") cfg.C0 = v;
        else if (key == "cq_factor") cfg.cq_factor = v;
        else if (key == "q") cfg.q = v;
        else if (key == "Nbar") cfg.Nbar = v;
        else if (key == "c") cfg.c = v;
        else if (key == "grid") cfg.grid = static_cast<int>(v);
        else if (key == "remark_C") cfg.remark_C = v;
        else throw InvalidSpec("unknown key " + key);
    }
    if (cfg.grid < 2) throw InvalidSpec("grid must be at least 2");
    if (cfg.q < 2) throw InvalidSpec("q must be at least 2");
    if (cfg.Nbar <= 1) throw InvalidSpec("Nbar must exceed 1");
    return cfg;
}

BoundsConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpec("cannot open config " + path);
    return parse_config(in);
}

std::map<std::string, double> config_values(const BoundsConfig& cfg) {
    return {{"C", cfg.C},       {"C0", cfg.C0}, {"cq_factor", cfg.cq_factor},
            {"q", cfg.q},       {"Nbar", cfg.Nbar}, {"c", cfg.c},
            {"grid", cfg.grid}, {"remark_C", cfg.remark_C}};
}

// ------------------------------------------------------------------ pairs

double AdmissiblePair::phi(double n, double delta, double k) const {
    return std::exp(log_phi(std::log(n), std::log(delta), std::log(k)));
}

double AdmissiblePair::psi(double n, double delta, double k) const {
    return std::exp(log_psi(std::log(n), std::log(delta), std::log(k)));
}

AdmissiblePair base_pair(double q, double C) {
    if (!(q >= 2)) throw InvalidArgument("base_pair needs q >= 2");
    if (!(C > 0)) throw InvalidArgument("base_pair needs C > 0");
    AdmissiblePair p;
    p.log_phi = [C](double ln, double ld, double lk) { return C * (ld - lk) + ln; };
    const double lq = std::log(q);
    p.log_psi = [C, lq](double ln, double ld, double lk) {
        return std::min(lq * std::exp(C * (lk - ld)), 0.5 * ln);
    };
    p.params = {{"q", q}, {"C", C}};
    p.provenance = "base";
    return p;
}

AdmissiblePair lemma43_pair(double gamma, double q, double C) {
    if (!(gamma > 0 && gamma < 1)) throw InvalidArgument("lemma43_pair needs 0 < gamma < 1");
    if (!(q >= 2) || !(C > 0)) throw InvalidArgument("lemma43_pair needs q >= 2, C > 0");
    AdmissiblePair p;
    p.log_phi = [C](double ln, double ld, double lk) {
        const double x = lk - ld;
        return -C * x * std::log(flog(x)) + ln;
    };
    const double lq = std::log(q);
    p.log_psi = [C, gamma, lq](double ln, double ld, double lk) {
        return lq * std::pow(flog(lk - ld), C / gamma) + gamma * ln;
    };
    p.params = {{"q", q}, {"C", C}, {"gamma", gamma}};
    p.provenance = "lemma43";
    return p;
}

RecursionParams lemma43_schedule(double gamma, double delta, double K, int grid) {
    if (!(gamma > 0 && gamma < 1)) throw InvalidArgument("gamma must lie in (0, 1)");
    if (!(delta > 0 && delta <= 1) || !(K > 0)) throw InvalidArgument("need 0 < delta <= 1 and K > 0");
    RecursionParams r;
    const double lkd = flog(std::log(K / delta));
    r.ell = std::max(0, static_cast<int>(std::ceil(std::log2(lkd) - 1e-12)));
    r.t = std::ldexp(1.0, r.ell);
    r.gamma = gamma;
    r.tau = gamma;
    r.log_A = std::log(r.t) / gamma;
    r.grid = grid;
    return r;
}

FactorLogs lemma51_factors(double log_n, double log_delta, const std::map<std::string, double>& p) {
    const double A1 = param(p, "A1"), A2 = param(p, "A2"), A3 = param(p, "A3");
    const double B1 = param(p, "B1"), B2 = param(p, "B2"), B3 = param(p, "B3");
    const double ll = loglog(log_n);
    const double l2011 = std::log(20.0 / 11.0);
    FactorLogs f;
    f.u = ll * (0.9 * A3 * ll - 20 * A1 - 6 * A2 * ll - 40);
    f.v = (6 * A1 - l2011 * A2 + 40) * log_delta;
    f.u_prime = ll * (20 * B1 + 6 * B2 * ll - 0.9 * B3 * ll);
    f.v_prime = (-6 * B1 + l2011 * B2) * log_delta;
    return f;
}

AdmissiblePair lemma51_pair(double tau, double gamma, double Nbar, const BoundsConfig& cfg) {
    if (!(tau > 0 && tau < 0.5) || !(gamma > 0 && gamma < 0.5))
        throw InvalidArgument("lemma51_pair needs 0 < tau, gamma < 1/2");
    if (!(Nbar > 1)) throw InvalidArgument("lemma51_pair needs Nbar > 1");
    static const double grid[] = {1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128};

    const double lnbar = std::log(Nbar);
    std::map<std::string, double> p = {{"tau", tau},  {"gamma", gamma}, {"Nbar", Nbar},
                                       {"C0", cfg.C0}, {"c", cfg.c},    {"q", cfg.q}};
    p["A1"] = cfg.C0 * loglog(lnbar);
    p["B1"] = std::pow(flog(lnbar), 1 - cfg.c * gamma);
    if (!(p["A1"] > 0) || !(p["B1"] > 0)) throw ConstantSearchFailed("A1 and B1 must be positive");

    const auto log_ns = geometric_axis(flog(lnbar), 1e3 * flog(lnbar), 10);
    const auto log_ds = axis(std::log(1e-6), 0.0, 10);

    // A multipliers, then B multipliers, smallest first
    std::string failing;
    auto search = [&](const char* m2, const char* m3, const char* k1, const char* k2, const char* k3, bool lower) {
        for (double a : grid) {
            for (double b : grid) {
                p[k2] = a * p[k1];
                p[k3] = b * p[k2];
                p[m2] = a;
                p[m3] = b;
                bool ok = true;
                for (double ln : log_ns) {
                    for (double ld : log_ds) {
                        const auto f = lemma51_factors(ln, ld, p);
                        const bool good = lower ? (f.u >= 0 && f.v >= 0) : (f.u_prime <= 0 && f.v_prime <= 0);
                        if (!good) {
                            ok = false;
                            failing = std::string(lower ? "u, v" : "u', v'") + " at log N = " + fmt(ln) +
                                      ", log delta = " + fmt(ld);
                            break;
                        }
                    }
                    if (!ok) break;
                }
                if (ok) return true;
            }
        }
        return false;
    };
    p["B2"] = p["B3"] = p["A2"] = p["A3"] = 0;
    if (!search("a2", "a3", "A1", "A2", "A3", true)) throw ConstantSearchFailed("A multipliers: " + failing);
    if (!search("b2", "b3", "B1", "B2", "B3", false)) throw ConstantSearchFailed("B multipliers: " + failing);
    p["v_exponent"] = 6 * p["A1"] - std::log(20.0 / 11.0) * p["A2"] + 40;
    p["v_prime_exponent"] = -6 * p["B1"] + std::log(20.0 / 11.0) * p["B2"];

    // The pair is only admissible for large N: phi(N)/N and psi need
    // log N / loglog N >= 2 max(A3 / tau, B3 / gamma).
    const double M = 2 * std::max(p["A3"] / tau, p["B3"] / gamma);
    double x = std::max(M * std::log(std::max(M, std::exp(1.0))), flog(lnbar));
    for (int i = 0; i < 200; ++i) x = std::max(M * std::log(x), flog(lnbar));
    while (x / std::log(x) < M) x *= 1.0001;
    p["log_n_min"] = x;
    p["log_n_max"] = 100 * x;
    p["log_kd_max"] = 1e-6 * x;

    const double A1 = p["A1"], A2 = p["A2"], A3 = p["A3"], B1 = p["B1"], B2 = p["B2"], B3 = p["B3"];
    AdmissiblePair out;
    out.log_phi = [=](double ln, double ld, double lk) {
        const double ll = loglog(ln);
        return -A1 * lk + A2 * ll * ld + A3 * ll * ll + (1 - tau) * ln;
    };
    out.log_psi = [=](double ln, double ld, double lk) {
        const double ll = loglog(ln);
        return B1 * lk - B2 * ll * ld - B3 * ll * ll + gamma * ln;
    };
    out.params = std::move(p);
    out.provenance = "lemma51";
    return out;
}

// ------------------------------------------------------------------ sampler

SampleDomain sample_domain(const AdmissiblePair& p) {
    SampleDomain d;
    if (auto it = p.params.find("log_n_min"); it != p.params.end()) d.log_n_min = it->second;
    if (auto it = p.params.find("log_n_max"); it != p.params.end()) d.log_n_max = it->second;
    if (auto it = p.params.find("log_kd_max"); it != p.params.end()) d.log_kd_max = it->second;
    return d;
}

bool AdmissibilityReport::pass() const {
    return phi_increasing_n && phi_increasing_delta && phi_decreasing_k && psi_increasing_n && psi_increasing_k &&
           scaling;
}

AdmissibilityReport check_admissible(const AdmissiblePair& p, const SampleDomain& d, int points) {
    if (points < 2) throw InvalidArgument("need at least 2 points per axis");
    if (!(d.log_n_min > 0) || !(d.log_n_max > d.log_n_min) || !(d.log_kd_max > 0))
        throw InvalidArgument("bad sample domain");
    const auto ln = geometric_axis(d.log_n_min, d.log_n_max, points);
    const auto ld = axis(-d.log_kd_max / 2, 0.0, points);
    const auto lk = axis(0.0, d.log_kd_max / 2, points);
    const auto n = static_cast<std::size_t>(points);

    std::vector<double> phi(n * n * n), psi(n * n * n);
    auto at = [n](std::size_t i, std::size_t j, std::size_t k) { return (i * n + j) * n + k; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                phi[at(i, j, k)] = p.log_phi(ln[i], ld[j], lk[k]);
                psi[at(i, j, k)] = p.log_psi(ln[i], ld[j], lk[k]);
            }

    AdmissibilityReport r;
    r.samples = n * n * n;
    auto fail = [&](bool& flag, const char* what, std::size_t i, std::size_t j, std::size_t k) {
        if (flag && r.first_failure.empty())
            r.first_failure = std::string(what) + " at log N = " + fmt(ln[i]) + ", log delta = " + fmt(ld[j]) +
                              ", log K = " + fmt(lk[k]);
        flag = false;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                const auto c = at(i, j, k);
                if (i + 1 < n) {
                    if (!close_or_above(phi[at(i + 1, j, k)], phi[c])) fail(r.phi_increasing_n, "phi in N", i, j, k);
                    if (!close_or_above(psi[at(i + 1, j, k)], psi[c])) fail(r.psi_increasing_n, "psi in N", i, j, k);
                    for (std::size_t i2 = i + 1; i2 < n; ++i2)
                        if (!close_or_above(phi[c] - ln[i], phi[at(i2, j, k)] - ln[i2]))
                            fail(r.scaling, "scaling", i2, j, k);
                }
                if (j + 1 < n && !close_or_above(phi[at(i, j + 1, k)], phi[c]))
                    fail(r.phi_increasing_delta, "phi in delta", i, j, k);
                if (k + 1 < n) {
                    if (!close_or_above(phi[c], phi[at(i, j, k + 1)])) fail(r.phi_decreasing_k, "phi in K", i, j, k);
                    if (!close_or_above(psi[at(i, j, k + 1)], psi[c])) fail(r.psi_increasing_k, "psi in K", i, j, k);
                }
            }
    return r;
}

AdmissibilityReport check_admissible(const AdmissiblePair& p, int points) {
    return check_admissible(p, sample_domain(p), points);
}

// ------------------------------------------------------------------ transform

TransformPoint transform_eval(const AdmissiblePair& p, double log_n, double log_delta, double log_k, int grid,
                              double cq_factor) {
    if (grid < 2) throw InvalidArgument("grid must be at least 2");
    if (!(log_n >= 0) || !(log_delta <= 0)) throw InvalidArgument("need N >= 1 and delta <= 1");
    const double lk_floor = std::log(flog(log_k));
    const double lkd_floor = std::log(flog(log_k - log_delta));

    const double n_lo = log_n + 40 * (log_delta - lk_floor);  // N'N'' above this
    const double n_sum_hi = 20 * (log_k - log_delta) + 0.5 * log_n;
    const double d_lo = log_delta - 6 * lkd_floor;
    const double k_hi = -6 * log_delta + 20 * lk_floor + log_k;

    const auto an = axis(0.0, log_n, grid);
    const auto ad = axis(d_lo, 0.0, grid);
    const auto ak = axis(0.0, std::max(k_hi, 0.0), grid);
    const double eps = 1e-12 * std::max(1.0, log_n);

    using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;
    Pairs pn, pd, pk;
    const auto g = static_cast<std::size_t>(grid);
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = 0; b < g; ++b) {
            const double s = an[a] + an[b];
            if (s <= log_n + eps && s > n_lo && log_add(an[a], an[b]) < n_sum_hi) pn.emplace_back(a, b);
            if (ad[a] + ad[b] > d_lo) pd.emplace_back(a, b);
            if (ak[a] + ak[b] < k_hi) pk.emplace_back(a, b);
        }
    if (pn.empty() || pd.empty() || pk.empty())
        throw EmptyFeasibleSet("no grid point at log N = " + fmt(log_n) + ", log delta = " + fmt(log_delta) +
                               ", log K = " + fmt(log_k));

    std::vector<double> tphi(g * g * g), tpsi(g * g * g);
    auto at = [g](std::size_t i, std::size_t j, std::size_t k) { return (i * g + j) * g + k; };
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j)
            for (std::size_t k = 0; k < g; ++k) {
                tphi[at(i, j, k)] = p.log_phi(an[i], ad[j], ak[k]);
                tpsi[at(i, j, k)] = p.log_psi(an[i], ad[j], ak[k]);
            }

    TransformPoint r;
    double lo = kInf, hi = -kInf;
    std::array<std::size_t, 6> amin{}, amax{};
    for (const auto& [n1, n2] : pn)
        for (const auto& [d1, d2] : pd)
            for (const auto& [k1, k2] : pk) {
                const double f = tphi[at(n1, d1, k1)] + tphi[at(n2, d2, k2)];
                const double s = tpsi[at(n1, d1, k1)] + tpsi[at(n2, d2, k2)];
                if (f < lo) {
                    lo = f;
                    amin = {n1, n2, d1, d2, k1, k2};
                }
                if (s > hi) {
                    hi = s;
                    amax = {n1, n2, d1, d2, k1, k2};
                }
            }
    r.feasible = pn.size() * pd.size() * pk.size();
    r.log_phi = lo;
    r.log_psi = std::log(cq_factor * param(p.params, "q")) + hi;
    auto unpack = [&](const std::array<std::size_t, 6>& a) {
        return std::vector<double>{an[a[0]], an[a[1]], ad[a[2]], ad[a[3]], ak[a[4]], ak[a[5]]};
    };
    r.argmin = unpack(amin);
    r.argmax = unpack(amax);
    return r;
}

AdmissiblePair transform_pair(const AdmissiblePair& p, int grid, double cq_factor) {
    if (grid < 2) throw InvalidArgument("grid must be at least 2");
    param(p.params, "q");
    AdmissiblePair out;
    out.log_phi = [p, grid, cq_factor](double ln, double ld, double lk) {
        return transform_eval(p, ln, ld, lk, grid, cq_factor).log_phi;
    };
    out.log_psi = [p, grid, cq_factor](double ln, double ld, double lk) {
        return transform_eval(p, ln, ld, lk, grid, cq_factor).log_psi;
    };
    out.params = p.params;
    out.params["grid"] = grid;
    out.params["cq_factor"] = cq_factor;
    out.provenance = "transform(" + p.provenance + ")";
    return out;
}

// ------------------------------------------------------------------ Lambda, k(b)

double compute_Lambda(double tau, double gamma, double /*q*/, const LambdaConstants& k) {
    if (!(tau > 0) || !(gamma > 0)) throw InvalidArgument("compute_Lambda needs tau, gamma > 0");
    return 2 * k.A1 / tau + k.A2 + k.B1 + 2 * k.B2 / gamma;
}

LambdaConsequences lambda_consequences(double Lambda, double tau, double gamma, const LambdaConstants& k) {
    LambdaConsequences c;
    c.over_A1 = Lambda > 2 * k.A1 / tau;
    c.over_B1 = Lambda > k.B1;
    c.over_B2 = Lambda * gamma / (2 * k.B2) > 1;
    return c;
}

double lambda_of_b(int b, const BoundsConfig& cfg) {
    if (b < 1) throw InvalidArgument("b must be at least 1");
    const double t = 1.0 / (100.0 * b);
    BoundsConfig local = cfg;
    local.q = 4.0 * b;
    const auto pair = lemma51_pair(t / 2, t / 2, cfg.Nbar, local);
    LambdaConstants k{pair.params.at("A1"), pair.params.at("A2"), pair.params.at("B1"), pair.params.at("B2")};
    return compute_Lambda(t, t, local.q, k);
}

KofB compute_k_of_b(int b, const std::function<double(int)>& Lambda_fn, double remark_C) {
    if (b < 1) throw InvalidArgument("b must be at least 1");
    if (!(remark_C > 1)) throw InvalidArgument("remark constant must exceed 1");
    KofB r;
    r.b = b;
    r.q = 4.0 * b;
    r.gamma = 1.0 / (100.0 * b);
    r.Lambda = Lambda_fn(b);
    r.log2_k = std::ceil(100.0 * b * r.Lambda);
    if (r.log2_k < 64) r.k = std::uint64_t{1} << static_cast<int>(r.log2_k);
    const double b4 = std::pow(static_cast<double>(b), 4);
    r.remark_log2_k = b4 * std::log2(remark_C);
    if (r.remark_log2_k < 64) r.remark_k = static_cast<std::uint64_t>(std::llround(std::pow(remark_C, b4)));
    return r;
}

KofB compute_k_of_b(int b, const BoundsConfig& cfg) {
    return compute_k_of_b(b, [&cfg](int bb) { return lambda_of_b(bb, cfg); }, cfg.remark_C);
}

// ------------------------------------------------------------------ chain

ChainResult pigeonhole_chain(const std::vector<Count>& sizes, int b) {
    if (sizes.size() < 2) throw ChainTooShort("need |A| and at least one doubling");
    if (sizes[0] == 0) throw InvalidArgument("empty set");
    for (std::size_t j = 1; j < sizes.size(); ++j)
        if (sizes[j] < sizes[j - 1]) throw InvalidArgument("chain must be non-decreasing");
    ChainResult r;
    r.ell = sizes.size() - 1;
    for (std::size_t j = 0; j < r.ell; ++j) r.trail.push_back(to_double(sizes[j + 1]) / to_double(sizes[j]));
    r.ell0 = static_cast<std::size_t>(std::min_element(r.trail.begin(), r.trail.end()) - r.trail.begin());
    r.k0 = std::uint64_t{1} << r.ell0;
    r.ratio = r.trail[r.ell0];
    const double ell = static_cast<double>(r.ell);
    const double n = to_double(sizes[0]);
    r.geometric_mean = std::exp((std::log(to_double(sizes.back())) - std::log(n)) / ell);
    r.bound = std::exp((b - 1) * std::log(n) / ell);
    r.below_power = std::log(to_double(sizes.back())) < b * std::log(n);
    return r;
}

DriverReport theorem_driver(const IntSet& a, int b, int max_level, std::size_t budget) {
    if (a.empty()) throw InvalidArgument("theorem_driver needs a nonempty set");
    if (max_level < 1) throw InvalidArgument("max_level must be at least 1");
    const auto values = a.positive_values();
    auto emb = embed_set(values);

    DriverReport r;
    r.N = a.size();
    r.b = b;
    const double logn = std::log(static_cast<double>(r.N));
    auto exponent = [&](std::size_t s) { return r.N > 1 ? std::log(static_cast<double>(s)) / logn : 0.0; };

    IntSet s = a;
    ExpSet p = emb.set;
    r.rows.push_back({1, s.size(), p.size(), exponent(s.size()), exponent(p.size())});
    // k-fold sets grow one summand at a time; |S| N per step beats |S|^2
    std::uint64_t k = 1;
    for (int level = 1; level <= max_level && !r.budget_hit; ++level) {
        const std::uint64_t target = std::uint64_t{1} << level;
        try {
            for (; k < target; ++k) {
                IntSet s2 = sumset(s, a, budget);
                ExpSet p2 = sumset(p, emb.set, budget);
                s = std::move(s2);
                p = std::move(p2);
            }
        } catch (const BudgetExceeded&) {
            r.budget_hit = true;
            break;
        }
        r.rows.push_back({target, s.size(), p.size(), exponent(s.size()), exponent(p.size())});
    }

    if (r.rows.size() >= 2) {
        std::vector<Count> sizes;
        for (const auto& row : r.rows) sizes.push_back(row.product_size);
        r.chain = pigeonhole_chain(sizes, b);
        r.b_set_size = r.rows[r.chain->ell0].product_size;
    }

    if (r.N <= 1) {
        r.verdict = "degenerate";
    } else if (r.rows.size() < 2) {
        r.verdict = "incomplete";
    } else {
        const auto& last = r.rows.back();
        if (last.sum_size > last.product_size) r.verdict = "sum horn";
        else if (last.sum_size < last.product_size) r.verdict = "product horn";
        else r.verdict = "tie";
    }
    return r;
}

}  // namespace sumprod
