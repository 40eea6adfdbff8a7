#pragma once
// Set-family generators, growth experiments and the verification suite.

#include "sumprod/rational.hpp"
#include "sumprod/setops.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sumprod {

enum class FamilyKind { AP, GP, MultiplicativeGrid, RandomInterval, Explicit };

struct FamilySpec {
    FamilyKind kind = FamilyKind::Explicit;
    std::int64_t start = 1, step = 1;      // ap
    std::uint64_t base = 2;                // gp
    std::size_t n = 0;                     // ap, gp, random
    std::vector<std::uint64_t> primes;     // grid
    std::vector<int> exponent_bounds;      // grid: exponents 0..e-1
    std::uint64_t width = 0;               // random: values in [1, width]
    std::uint64_t seed = 0;                // random
    std::vector<std::int64_t> values;      // explicit
};

/// Text forms: ap:start,step,n  gp:base,n  grid:2^3,3^3  random:n,width
/// explicit:1,2,5  (multiplicative_grid and random_interval are accepted as
/// long names). Throws InvalidSpec.
FamilySpec parse_family(const std::string& text, std::uint64_t seed = 0);
std::string to_string(const FamilySpec& s);

/// Deterministic; the result has the requested cardinality or InvalidSpec.
IntSet generate_family(const FamilySpec& s);

struct ExperimentRow {
    int k = 1;
    std::size_t sum_size = 0, product_size = 0;
    double sum_exponent = 0, product_exponent = 0;  // log base N
    std::optional<std::size_t> subset_product_size;  // |A1^(k)| in subset mode
};

struct ExperimentResult {
    std::string family;
    std::size_t N = 0;
    std::vector<ExperimentRow> rows;
    std::string verdict;  // sum horn, product horn, tie, degenerate, incomplete
    bool budget_hit = false;
    bool monotone = true;       // both size columns non-decreasing in k
    bool stars_and_bars = true; // |kA| <= C(N+k-1, k)
    bool subset_dominated = true;  // |A1^(k)| <= |A^(k)|
    std::size_t subset_size = 0;
    double runtime_seconds = 0;
    bool ok() const { return monotone && stars_and_bars && subset_dominated; }
};

struct ExperimentOptions {
    int k_max = 4;
    std::size_t budget = kDefaultBudget;
    double subset_delta = 0;  // > 0: also track a random A1 with |A1| = ceil(N^delta)
    std::uint64_t seed = 0;
};

/// Exact |kA| and |A^(k)| for k = 1..k_max. A budget hit keeps the rows done
/// so far and sets budget_hit.
ExperimentResult run_growth_experiment(const FamilySpec& spec, const ExperimentOptions& opt);

/// CSV "k,sum_exponent,product_exponent".
void write_exponent_csv(std::ostream& os, const ExperimentResult& r);
/// CSV "k,sumset_size,productset_size".
void write_experiment_csv(std::ostream& os, const ExperimentResult& r);

/// Two random n-element sets over the first `primes` primes (exponents
/// 0..5) and a random bipartite graph with edge probability
/// min(1, 1.5 delta). Deterministic under seed.
struct RegularizationInstance {
    ExpSet a1, a2;
    BipartiteGraph g;
    Rational delta;
};
RegularizationInstance random_regularization_instance(std::size_t n, std::size_t primes, const Rational& delta,
                                                      std::uint64_t seed);

enum class Scale { Tiny, Small, Full };
Scale parse_scale(const std::string& s);
std::string to_string(Scale s);

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;  // measured values
};

struct VerifyReport {
    std::uint64_t seed = 0;
    Scale scale = Scale::Tiny;
    std::vector<VerifyCheck> checks;
    bool pass() const;
};

/// Runs every module invariant at the given scale. `tamper` negates the
/// Parseval check so that the suite must fail.
VerifyReport verify_suite(std::uint64_t seed, Scale scale, bool tamper = false);

}  // namespace sumprod
