#include "sumprod/serialize.hpp"

#include <cmath>
#include <limits>

namespace sumprod {

namespace {

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json rational_json(const Rational& r) { return to_string(r); }

template <class T>
Json list(const std::vector<T>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(x);
    return a;
}

Json pairs_json(const std::vector<BasePair>& v) {
    Json a = Json::array();
    for (const auto& [x, y] : v) a.push_back({x, y});
    return a;
}

Json dyadic_json(const DyadicResult& d) {
    return {{"m", d.m},
            {"kept", d.kept.size()},
            {"fibers_kept", d.fibers_kept},
            {"total_weight", num(d.total)},
            {"retained_weight", num(d.retained)},
            {"classes", d.classes},
            {"max_fiber", d.max_fiber}};
}

}  // namespace

Json count_json(Count c) {
    if (c <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(c);
    return to_string(c);
}

Json ledger_json(const Ledger& l) {
    Json o = Json::object();
    for (const auto& e : l.entries)
        o[e.key] = {{"lhs", num(e.lhs)},
                    {"rhs", num(e.rhs)},
                    {"measured_ratio", num(e.ratio)},
                    {"pass", e.pass},
                    {"relation", e.relation},
                    {"constant", e.has_constant}};
    return o;
}

Json to_json(const IntSet& s) { return list(s.values()); }

Json to_json(const ExpSet& s) {
    Json el = Json::array();
    for (std::size_t i = 0; i < s.size(); ++i) el.push_back(std::vector<Exponent>(s[i].begin(), s[i].end()));
    return {{"basis", s.basis().primes()}, {"elements", el}};
}

Json to_json(const LambdaEstimate& e) {
    Json cert = Json::array();
    for (const auto& c : e.certificate) cert.push_back({num(c.real()), num(c.imag())});
    return {{"set", to_json(e.set)},
            {"q", e.q},
            {"lower_bound", num(e.lower)},
            {"upper_bound", e.upper ? num(*e.upper) : Json(nullptr)},
            {"grid", e.M},
            {"restarts", e.restarts},
            {"iterations", e.iterations},
            {"unconverged", e.unconverged},
            {"seed", e.seed},
            {"certificate", cert}};
}

Json to_json(const Prop1Report& r) {
    return {{"k", r.k},         {"q", r.q},           {"trials", r.trials}, {"ratio", num(r.ratio)},
            {"c_est", num(r.c_est)}, {"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}};
}

Json to_json(const EnergyBound& e) {
    return {{"energy", count_json(e.energy)},
            {"sumset_size", e.sumset_size},
            {"lower_bound", num(e.lower_bound)},
            {"holds", e.holds}};
}

Json to_json(const RuzsaReport& r) {
    return {{"n", r.n},
            {"difference_size", r.difference_size},
            {"sumset_size", r.sumset_size},
            {"doubling", num(r.doubling)},
            {"bound", num(r.bound)},
            {"holds", r.holds}};
}

Json to_json(const LevelReport& r) {
    return {{"swapped", r.swapped},
            {"delta", rational_json(r.delta)},
            {"K", num(r.K)},
            {"N1", r.N1},
            {"N2", r.N2},
            {"step1", {{"left", r.step1.left.size()}, {"right", r.step1.right.size()}, {"removed", r.step1.removed.size()}}},
            {"profile", {{"n1", r.profile.n1}, {"n2", r.profile.n2}}},
            {"split", r.split},
            {"forced_split", r.forced_split},
            {"xbar_fiber", r.xbar_fiber},
            {"xbar_size", r.xbar_elements.size()},
            {"a2_dprime", r.a2_dprime.size()},
            {"a2_bar", r.a2_bar.size()},
            {"a2_bbar", r.a2_bbar.size()},
            {"dyadic2", dyadic_json(r.dyadic2)},
            {"m2", r.m2},
            {"M2", r.M2},
            {"a1_bar", r.a1_bar.size()},
            {"a1_bbar", r.a1_bbar.size()},
            {"dyadic1", dyadic_json(r.dyadic1)},
            {"m1", r.m1},
            {"M1", r.M1},
            {"g1", r.g1.size()},
            {"g1_prime", r.g1_prime.size()},
            {"g1_dprime", r.g1_dprime.size()},
            {"g10", pairs_json(r.g10)},
            {"l0_cutoff_applied", r.l0_cutoff_applied},
            {"delta0", rational_json(r.delta0)},
            {"delta1", rational_json(r.delta1)},
            {"L", num(r.L)},
            {"L0", num(r.L0)},
            {"K0", num(r.K0)},
            {"g_tilde_edges", r.g_tilde.size()},
            {"ledger", ledger_json(r.ledger)}};
}

Json to_json(const BaseRefinement& r) {
    Json j = {{"base", {r.base.first, r.base.second}},
              {"degenerate", r.degenerate},
              {"ell1", r.ell1},
              {"ell2", r.ell2},
              {"mbar1", r.mbar1},
              {"mbar2", r.mbar2},
              {"max_inner_fiber", r.max_inner_fiber},
              {"delta3", rational_json(r.delta3)},
              {"k10_size", r.k10_size},
              {"K_k10", num(r.K_k10)},
              {"L_inner", num(r.L_inner)},
              {"k_tilde_edges", r.k_tilde.size()},
              {"ledger", ledger_json(r.ledger)}};
    j["inner"] = r.inner ? to_json(*r.inner) : Json(nullptr);
    return j;
}

Json to_json(const RegularizationReport& r) {
    Json s7 = Json::array();
    for (const auto& b : r.step7) s7.push_back(to_json(b));
    return {{"level", to_json(r.level)},
            {"step7", s7},
            {"final_edges", r.final_graph.edge_count()},
            {"contained", r.contained}};
}

Json to_json(const AuditReport& r) {
    Json s7 = Json::array();
    for (const auto& l : r.step7) s7.push_back(ledger_json(l));
    return {{"ok", r.ok()},
            {"rows_ok", r.rows_ok},
            {"columns_ok", r.columns_ok},
            {"blocks_ok", r.blocks_ok},
            {"fibers_ok", r.fibers_ok},
            {"dyadic_ok", r.dyadic_ok},
            {"containment_ok", r.containment_ok},
            {"failures", r.failures},
            {"level", ledger_json(r.level)},
            {"step7", s7}};
}

Json to_json(const FreimanAudit& a) {
    return {{"dimension", a.dimension},
            {"sumset_size", a.sumset_size},
            {"doubling", num(a.doubling)},
            {"lemma_holds", a.lemma_holds},
            {"relaxed_holds", a.relaxed_holds},
            {"naive_holds", a.naive_holds},
            {"ceil_holds", a.ceil_holds},
            {"relaxed_margin", num(a.relaxed_margin)},
            {"naive_margin", num(a.naive_margin)},
            {"pass", a.pass}};
}

Json to_json(const AdmissibilityReport& r) {
    return {{"samples", r.samples},
            {"phi_increasing_n", r.phi_increasing_n},
            {"phi_increasing_delta", r.phi_increasing_delta},
            {"phi_decreasing_k", r.phi_decreasing_k},
            {"psi_increasing_n", r.psi_increasing_n},
            {"psi_increasing_k", r.psi_increasing_k},
            {"scaling", r.scaling},
            {"pass", r.pass()},
            {"first_failure", r.first_failure}};
}

Json to_json(const TransformPoint& t) {
    Json amin = Json::array(), amax = Json::array();
    for (double x : t.argmin) amin.push_back(num(x));
    for (double x : t.argmax) amax.push_back(num(x));
    return {{"log_phi", num(t.log_phi)},
            {"log_psi", num(t.log_psi)},
            {"feasible", t.feasible},
            {"argmin_logs", amin},
            {"argmax_logs", amax}};
}

Json to_json(const RecursionParams& p) {
    return {{"ell", p.ell}, {"t", num(p.t)},         {"gamma", num(p.gamma)},
            {"tau", num(p.tau)}, {"log_A", num(p.log_A)}, {"grid", p.grid}};
}

Json to_json(const KofB& k) {
    return {{"b", k.b},
            {"q", num(k.q)},
            {"gamma", num(k.gamma)},
            {"Lambda", num(k.Lambda)},
            {"log2_k", num(k.log2_k)},
            {"k", k.k ? Json(*k.k) : Json(nullptr)},
            {"remark_log2_k", num(k.remark_log2_k)},
            {"remark_k", k.remark_k ? Json(*k.remark_k) : Json(nullptr)}};
}

Json to_json(const ChainResult& c) {
    Json trail = Json::array();
    for (double x : c.trail) trail.push_back(num(x));
    return {{"ell", c.ell},
            {"ell0", c.ell0},
            {"k0", c.k0},
            {"ratio", num(c.ratio)},
            {"trail", trail},
            {"geometric_mean", num(c.geometric_mean)},
            {"bound", num(c.bound)},
            {"below_power", c.below_power}};
}

Json to_json(const DriverReport& d) {
    Json rows = Json::array();
    for (const auto& r : d.rows)
        rows.push_back({{"k", r.k},
                        {"sumset_size", r.sum_size},
                        {"productset_size", r.product_size},
                        {"sum_exponent", num(r.sum_exponent)},
                        {"product_exponent", num(r.product_exponent)}});
    return {{"N", d.N},
            {"b", d.b},
            {"rows", rows},
            {"chain", d.chain ? to_json(*d.chain) : Json(nullptr)},
            {"b_set_size", d.b_set_size},
            {"verdict", d.verdict},
            {"budget_hit", d.budget_hit}};
}

Json to_json(const ExperimentResult& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json j = {{"k", row.k},
                  {"sumset_size", row.sum_size},
                  {"productset_size", row.product_size},
                  {"sum_exponent", num(row.sum_exponent)},
                  {"product_exponent", num(row.product_exponent)}};
        if (row.subset_product_size) j["subset_productset_size"] = *row.subset_product_size;
        rows.push_back(j);
    }
    Json j = {{"family", r.family},
              {"N", r.N},
              {"rows", rows},
              {"verdict", r.verdict},
              {"budget_hit", r.budget_hit},
              {"monotone", r.monotone},
              {"stars_and_bars", r.stars_and_bars}};
    if (r.subset_size) {
        j["subset_size"] = r.subset_size;
        j["subset_dominated"] = r.subset_dominated;
    }
    return j;
}

Json to_json(const VerifyReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return {{"seed", r.seed}, {"scale", to_string(r.scale)}, {"pass", r.pass()}, {"checks", checks}};
}

}  // namespace sumprod
