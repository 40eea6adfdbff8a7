#pragma once
// Evaluators for the bound calculus: admissible pairs (phi, psi), the
// factorization transform, the iterated pair, the large-N pair, Lambda,
// k(b) and the doubling chain. Everything is evaluated in log space.

#include "sumprod/setops.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sumprod {

/// Free constants. Every field can be set from a key = value file.
struct BoundsConfig {
    double C = 2;          // exponent constant of the base and iterated pairs
    double C0 = 2;         // A1 = C0 loglog Nbar
    double cq_factor = 2;  // the transform's Cq is cq_factor * q
    double q = 4;
    double Nbar = 1e6;
    double c = 1;          // B1 = (log Nbar)^(1 - c gamma)
    int grid = 16;         // points per axis in the transform
    double remark_C = 2;   // k(b) = remark_C^(b^4)
};

BoundsConfig parse_config(std::istream& is);
BoundsConfig load_config(const std::string& path);
std::map<std::string, double> config_values(const BoundsConfig& cfg);

/// log phi or log psi as a function of (log N, log delta, log K).
using LogEvaluator = std::function<double(double log_n, double log_delta, double log_k)>;

struct AdmissiblePair {
    LogEvaluator log_phi, log_psi;
    std::map<std::string, double> params;
    std::string provenance;

    double phi(double n, double delta, double k) const;  // may be inf or 0
    double psi(double n, double delta, double k) const;
};

/// phi = (delta/K)^C N, psi = min(q^((K/delta)^C), N^(1/2)).
AdmissiblePair base_pair(double q, double C);

/// Iterated pair:
///   phi = (delta/K)^(C loglog(K/delta)) N,  psi = q^((log(K/delta))^(C/gamma)) N^gamma.
AdmissiblePair lemma43_pair(double gamma, double q = 4, double C = 2);

/// Schedule of the iteration at a given (delta, K), with the ~ taken as =.
struct RecursionParams {
    int ell = 0;
    double t = 1;      // 2^ell
    double gamma = 0;
    double tau = 0;
    double log_A = 0;  // gamma^-1 log t
    int grid = 16;
};
RecursionParams lemma43_schedule(double gamma, double delta, double K, int grid = 16);

/// Large-N pair
///   phi = K^-A1 delta^(A2 llN) e^(A3 llN^2) N^(1-tau)
///   psi = K^B1 delta^(-B2 llN) e^(-B3 llN^2) N^gamma
/// with A1 = C0 ll Nbar, B1 = (log Nbar)^(1 - c gamma), and A2, A3, B2, B3
/// found by multiplier search. Throws ConstantSearchFailed.
AdmissiblePair lemma51_pair(double tau, double gamma, double Nbar, const BoundsConfig& cfg = {});

/// log u, log v, log u', log v' at (N, delta) for the given constants.
struct FactorLogs {
    double u = 0, v = 0, u_prime = 0, v_prime = 0;
};
FactorLogs lemma51_factors(double log_n, double log_delta, const std::map<std::string, double>& params);

/// Sampling domain for the admissibility check.
struct SampleDomain {
    double log_n_min = 0.6931471805599453, log_n_max = 27.631021115928547;
    double log_kd_max = 6.907755278982137;  // ln(K/delta) range
};
SampleDomain sample_domain(const AdmissiblePair& p);

struct AdmissibilityReport {
    std::size_t samples = 0;
    bool phi_increasing_n = true, phi_increasing_delta = true, phi_decreasing_k = true;
    bool psi_increasing_n = true, psi_increasing_k = true;
    bool scaling = true;  // phi(N)/N non-increasing in N
    std::string first_failure;
    bool pass() const;
};

/// points^3 log-spaced samples over (N, delta, K).
AdmissibilityReport check_admissible(const AdmissiblePair& p, const SampleDomain& d, int points = 10);
AdmissibilityReport check_admissible(const AdmissiblePair& p, int points = 10);

/// Grid extrema of the transformed pair at one point.
struct TransformPoint {
    double log_phi = 0;  // min of log phi(N') + log phi(N'')
    double log_psi = 0;  // log Cq + max of log psi(N') + log psi(N'')
    std::size_t feasible = 0;
    std::vector<double> argmin;  // log N', log N'', log d', log d'', log K', log K''
    std::vector<double> argmax;
};

/// Throws EmptyFeasibleSet when no grid tuple satisfies the constraints.
TransformPoint transform_eval(const AdmissiblePair& p, double log_n, double log_delta, double log_k, int grid = 16,
                              double cq_factor = 2);

/// The transformed pair; evaluators call transform_eval.
AdmissiblePair transform_pair(const AdmissiblePair& p, int grid = 16, double cq_factor = 2);

struct LambdaConstants {
    double A1 = 0, A2 = 0, B1 = 0, B2 = 0;
};

/// Lambda = 2 A1 / tau + A2 + B1 + 2 B2 / gamma.
double compute_Lambda(double tau, double gamma, double q, const LambdaConstants& k);

struct LambdaConsequences {
    bool over_A1 = false;  // Lambda > 2 A1 / tau
    bool over_B1 = false;  // Lambda > B1
    bool over_B2 = false;  // Lambda gamma / (2 B2) > 1
    bool all() const { return over_A1 && over_B1 && over_B2; }
};
LambdaConsequences lambda_consequences(double Lambda, double tau, double gamma, const LambdaConstants& k);

/// Lambda(b) from the large-N pair at (tau, gamma) / 2 with tau = gamma = 1/(100 b), q = 4 b.
double lambda_of_b(int b, const BoundsConfig& cfg = {});

struct KofB {
    int b = 0;
    double q = 0, gamma = 0, Lambda = 0;
    double log2_k = 0;
    std::optional<std::uint64_t> k;  // when log2 k < 64
    double remark_log2_k = 0;        // b^4 log2 C
    std::optional<std::uint64_t> remark_k;
};
KofB compute_k_of_b(int b, const std::function<double(int)>& Lambda_fn, double remark_C = 2);
KofB compute_k_of_b(int b, const BoundsConfig& cfg = {});

struct ChainResult {
    std::size_t ell = 0;
    std::size_t ell0 = 0;
    std::uint64_t k0 = 1;          // 2^ell0
    double ratio = 0;              // |2 k0 A| / |k0 A|
    std::vector<double> trail;     // consecutive ratios
    double geometric_mean = 0;     // (sizes[ell] / sizes[0])^(1/ell)
    double bound = 0;              // N^((b-1)/ell)
    bool below_power = false;      // sizes[ell] < N^b
};

/// sizes[j] = |2^j A|, j = 0..ell. Throws ChainTooShort for ell < 1 and
/// InvalidArgument for a decreasing chain.
ChainResult pigeonhole_chain(const std::vector<Count>& sizes, int b);

struct DriverRow {
    std::uint64_t k = 1;
    std::size_t sum_size = 0, product_size = 0;
    double sum_exponent = 0, product_exponent = 0;  // log base N
};

struct DriverReport {
    std::size_t N = 0;
    int b = 0;
    std::vector<DriverRow> rows;      // k = 1, 2, 4, ...
    std::optional<ChainResult> chain; // over the product side
    std::size_t b_set_size = 0;       // |A^(k0)|
    std::string verdict;              // sum horn, product horn, tie, degenerate, incomplete
    bool budget_hit = false;
};

/// Doubling chain for both kA and A^(k) up to k = 2^max_level, pigeonhole on
/// the product side and a verdict from the exponents at the largest k reached.
DriverReport theorem_driver(const IntSet& a, int b, int max_level = 4, std::size_t budget = kDefaultBudget);

}  // namespace sumprod
