#pragma once
// Density, fiber and graph regularization of a dense bipartite graph between
// two sets in the exponent lattice, with a measured-inequality ledger at every
// stage. Also: Fact 1 extraction, a BSG-style extraction heuristic, Freiman
// dimension and injective coordinate selection.

#include "sumprod/bipartite_graph.hpp"
#include "sumprod/exponent_lattice.hpp"
#include "sumprod/rational.hpp"
#include "sumprod/setops.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sumprod {

/// Sorted element indices into an ExpSet.
using IndexSet = std::vector<std::uint32_t>;

/// One measured inequality. `relation` is one of ">", ">=", "<", "<=", "~".
/// With has_constant the inequality carries an unspecified constant c or C,
/// so only the measured ratio is meaningful: a lower bound passes when the
/// ratio is positive and finite, an upper bound when it is finite.
struct LedgerEntry {
    std::string key;
    double lhs = 0;
    double rhs = 0;
    double ratio = 0;  // lhs / rhs; may be inf or nan
    std::string relation;
    bool has_constant = false;
    bool pass = false;
};

struct Ledger {
    std::vector<LedgerEntry> entries;

    void add(std::string key, double lhs, double rhs, std::string relation, bool has_constant);
    const LedgerEntry* find(const std::string& key) const;
    bool all_pass() const;
};

/// Keys, lhs, rhs and pass flags match (values to relative tolerance).
bool ledgers_agree(const Ledger& a, const Ledger& b, double tol = 1e-9, std::string* why = nullptr);

/// max(ln x, 1): the logarithms in the bounds are floored at 1.
double floored_log(double x);

// ------------------------------------------------------------------ Step 1

struct Removal {
    int side = 0;  // 1 or 2
    std::uint32_t index = 0;
};

struct DensityRegularization {
    IndexSet left, right;  // A1', A2'
    std::vector<Removal> removed;
    Rational delta;
    Ledger ledger;  // 3.9, 3.10, 3.11, 3.12
};

/// Greedy removal of the smallest-index violating row, then column, until
/// every row has more than (δ/4)|A2'| edges into A2' and every column more
/// than (δ/4)|A1'|. Throws DensityTooLow unless |G| > δ N1 N2.
DensityRegularization step1_density_regularize(const BipartiteGraph& g, const Rational& delta);

Ledger step1_ledger(const BipartiteGraph& g, const IndexSet& left, const IndexSet& right, const Rational& delta);

/// F' = {z in F : |G ∩ (E x {z})| > (α/2)|E|}, with E on the left side and
/// F on the right. Throws HypothesisFails unless |G ∩ (E x F)| > α|E||F|.
IndexSet fact1_extract(const IndexSet& e, const IndexSet& f, const BipartiteGraph& g, const Rational& alpha);

// ------------------------------------------------------------------ Step 2

/// Fibers of a subset over the first `prefix` coordinates: runs of indices
/// sharing that prefix (the set is in lexicographic order).
std::vector<IndexSet> fibers(const ExpSet& s, const IndexSet& subset, std::size_t prefix);

struct FiberProfile {
    std::vector<std::size_t> n1, n2;  // indexed by t' = 0..t
    std::size_t split = 0;
};

FiberProfile fiber_profile(const ExpSet& a1, const IndexSet& s1, const ExpSet& a2, const IndexSet& s2);

/// Largest t' with (n1(t') + n2(t'))^4 >= N1 N2 (N_i = n_i(0)).
std::size_t choose_split(const FiberProfile& p);

// ------------------------------------------------------------------ Steps 3-4

struct DyadicResult {
    std::size_t m = 0;        // fibers kept have size in [m, 2m)
    IndexSet kept;
    std::size_t fibers_kept = 0;
    double total = 0;         // weight before
    double retained = 0;      // weight after
    std::size_t classes = 0;  // nonempty dyadic classes
    std::size_t max_fiber = 0;
};

/// Keeps the dyadic fiber-size class of largest total weight (ties to the
/// smaller class). Empty `weights` means cardinality; otherwise weights are
/// indexed by element index of `s`.
DyadicResult dyadic_fiber_regularize(const ExpSet& s, const IndexSet& subset, std::size_t prefix,
                                     const std::vector<double>& weights = {});

// ------------------------------------------------------------------ Steps 3-5

using BasePair = std::pair<std::uint32_t, std::uint32_t>;  // fiber indices

/// One pass of Steps 1-5 on (A1, A2, G). Sets are in the working orientation:
/// when `swapped`, A1/A2 and the graph are exchanged relative to the input.
struct LevelReport {
    bool swapped = false;
    Rational delta;
    double K = 0;  // K(G) of the input graph
    std::size_t N1 = 0, N2 = 0;

    DensityRegularization step1;
    FiberProfile profile;
    std::size_t split = 0;
    bool forced_split = false;

    std::uint32_t xbar_fiber = 0;  // index into fibers(A1', split)
    IndexSet xbar_elements;        // E
    IndexSet a2_dprime;            // A2''
    IndexSet a2_bar, a2_bbar;
    DyadicResult dyadic2;
    std::size_t m2 = 0, M2 = 0;
    IndexSet a1_bar, a1_bbar;
    DyadicResult dyadic1;
    std::size_t m1 = 0, M1 = 0;

    std::vector<IndexSet> fibers1, fibers2;  // fibers of the regular sets
    std::vector<BasePair> g1;                // base pairs with fiber edges
    std::vector<BasePair> g1_prime;          // fiber-density class
    std::vector<BasePair> g1_dprime;         // after the L0 cutoff
    std::vector<BasePair> g10;               // fiber-sumset class
    bool l0_cutoff_applied = true;
    Rational delta0, delta1;
    double L = 0, L0 = 0, K0 = 0;
    std::vector<Edge> g_tilde;  // edges of G over G_{1,0}

    Ledger ledger;
};

/// Steps 1-5. With `forced_split` the split t' is fixed instead of chosen.
LevelReport regularize_level(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g, const Rational& delta,
                             std::optional<std::size_t> forced_split = std::nullopt);

/// Step 7 for one base pair (x1, x2) of G_{1,0}.
struct BaseRefinement {
    BasePair base;
    bool degenerate = false;
    std::size_t ell1 = 1, ell2 = 1;    // inner fiber scales
    std::size_t mbar1 = 0, mbar2 = 0;  // inner regular set sizes
    std::size_t max_inner_fiber = 0;   // max |A_i(x_i, z_i)|
    Rational delta3{1};
    std::size_t k10_size = 0;
    double K_k10 = 0, L_inner = 0;
    std::shared_ptr<LevelReport> inner;  // null when degenerate
    std::vector<Edge> k_tilde;           // in the working orientation of the outer level
    Ledger ledger;                       // 3.62.1, 3.62.2, 3.63, 3.64, 3.65, 3.66
};

BaseRefinement step7_refine(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g, const LevelReport& level,
                            const BasePair& base);

struct RegularizationReport {
    LevelReport level;
    std::vector<BaseRefinement> step7;
    BipartiteGraph final_graph;  // G', in the input orientation
    bool contained = false;      // G' subset of G
};

/// Steps 1-5 followed by Step 7 on every base pair of G_{1,0}.
RegularizationReport regularize(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g, const Rational& delta);

// ------------------------------------------------------------------ auditor

struct AuditReport {
    Ledger level;                    // recomputed Steps 1-5 ledger
    std::vector<Ledger> step7;       // recomputed per base pair
    bool rows_ok = false, columns_ok = false, blocks_ok = false;
    bool fibers_ok = false, dyadic_ok = false, containment_ok = false;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Recomputes every ledger entry of `report` from its sets, with code that
/// does not go through the constructor, and checks the structural claims.
AuditReport audit_regularization(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g, const Rational& delta,
                                 const RegularizationReport& report, std::uint64_t seed = 0);

// ------------------------------------------------------------------ structure

struct BsgReport {
    IndexSet subset;        // A'
    std::uint32_t pivot = 0;
    double delta_prime = 0;  // |A'| / |A|
    double k_prime = 0;      // |A' - A'| / |A|
    double edge_fraction = 0;  // |G ∩ (A' x A')| / |A|^2
};

/// Popular-vertex, common-neighbourhood heuristic; G lives on A x A.
/// Throws DensityTooLow unless |G| > δ|A|^2.
BsgReport bsg_extract(const ExpSet& a, const BipartiteGraph& g, const Rational& delta);
BsgReport bsg_extract(const IntSet& a, const BipartiteGraph& g, const Rational& delta);

/// Affine dimension, by exact rational elimination.
std::size_t freiman_dimension(const ExpSet& s);

/// Greedy-minimal coordinate set on which s is injective: start from all
/// coordinates and drop indices from the last one down while injectivity
/// holds. Returns 0-based indices, ascending.
std::vector<std::size_t> select_injective_coords(const ExpSet& s);

struct FreimanAudit {
    std::size_t dimension = 0;
    std::size_t sumset_size = 0;
    double doubling = 0;
    bool lemma_holds = false;     // |S+S| >= (d+1)|S| - d(d+1)/2, exact
    bool relaxed_holds = false;   // d <= 2 doubling - 2
    bool naive_holds = false;     // d <= doubling - 1
    bool ceil_holds = false;      // d <= ceil(doubling) - 1
    double relaxed_margin = 0, naive_margin = 0;
    bool pass = false;            // lemma and relaxed forms
};

FreimanAudit freiman_audit(const ExpSet& s);

}  // namespace sumprod
