#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "endo/model.hpp"
#include "endo/rng.hpp"
#include "endo/saa.hpp"
#include "endo/solver.hpp"
#include "endo/transforms.hpp"

namespace endo {

// Network design + facility protection under random capacity disruption.
// First stage: one protection level per facility, edge openings, budget.
// Second stage: min-cost flow serving client demand, facility outflow capped
// by the realized capacity; a dummy facility absorbs unmet demand at a
// penalty. Four capacity-uncertainty variants share this skeleton.

enum class Variant { Selection, Binomial, Discrete, Normal };
std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct NdfppEvent {
    std::string name;
    double center_lat = 0.0, center_lon = 0.0;
    double r1_km = 0.0, r2_km = 0.0;  // intensity radii (unused for no-disruption)
    double probability = 0.0;
    bool no_disruption = false;
};

struct NdfppInstance {
    std::string name;
    std::uint64_t seed = 0;  // generation seed, echoed into outputs
    Variant variant = Variant::Selection;

    // Nodes 0..n-1 (facilities are a subset; the rest are clients). The dummy
    // facility is implicit with index node_count().
    std::vector<std::string> node_names;
    std::vector<double> node_lat, node_lon;
    std::vector<double> demand;  // b_n; facilities carry 0
    std::vector<int> facilities;

    std::vector<std::array<int, 2>> edges;  // undirected, i < j
    std::vector<double> edge_length_km;     // also the per-unit flow cost of its arcs
    std::vector<double> edge_cost;

    int P = 4;                                         // protection levels 1..P
    std::vector<std::vector<double>> protection_cost;  // [facility][p-1]
    double budget = 0.0;
    double penalty_multiplier = 10.0;  // a

    int W = 2;             // capacity levels 0..W
    double nu_bar = 0.0;   // capacity per level step
    int L = 3;             // disruption intensity levels 1..L

    std::vector<NdfppEvent> events;
    std::vector<std::vector<int>> intensity;  // [event][facility], 0 for no-disruption

    // Variant parameters (all derived cross-impact terms are computed from
    // these base tables, `cross_impact`, and `rho`).
    double cross_impact = 0.3;
    double rho = 1.0;  // 1 + cross_impact*(F-1)
    std::vector<std::vector<std::vector<double>>> phi_bar;  // [event][facility][p-1]
    std::vector<std::vector<std::vector<double>>> mu_bar;   // [event][facility][p-1]
    std::vector<std::vector<double>> sigma_bar;             // [event][facility]
    // Per-level multiplier on the capacity-level likelihoods (size W+1). All
    // ones reproduces the level-independent published setup, which makes the
    // resulting pmf uniform; other profiles re-introduce level dependence.
    std::vector<double> utility_w_profile;

    int node_count() const { return (int)node_names.size(); }
    int facility_count() const { return (int)facilities.size(); }
    bool is_facility(int node) const;
    double total_demand() const;        // B
    double max_transport_cost() const;  // max q over non-dummy arcs
    double dummy_arc_cost() const;      // a * max q
    double nu(int w) const { return nu_bar * w; }

    // Cross-impact tables. Impactor indexing for success probabilities and
    // level likelihoods (base value of the installing facility i); target
    // indexing for Normal means (base value of the affected facility f).
    double phi_tilde(int event, int f, int i, int p) const;
    double u_tilde(int event, int f, int i, int p, int w) const;
    double mu_tilde(int event, int f, int i, int p) const;
    double sigma_tilde(int event, int f) const;
    double u_hat(int event, int f) const;  // upper bound on the likelihood sum

    void validate() const;  // throws std::invalid_argument on structural errors
};

// Directed arc table: two arcs per edge plus dummy->client arcs.
struct NdfppArcs {
    struct Arc {
        int from = 0, to = 0;
        int edge = -1;  // -1 for dummy arcs
        double cost = 0.0;
    };
    std::vector<Arc> arcs;
    int dummy_node = 0;
};
NdfppArcs build_arcs(const NdfppInstance& inst);

// One sampled scenario: an event and the raw exogenous uniforms, stored
// per facility (Selection: P entries; Binomial: W; Discrete/Normal: 1).
struct NdfppScenario {
    int event = 0;
    std::vector<std::vector<double>> u;
};
int draws_per_facility(const NdfppInstance& inst);
NdfppScenario draw_scenario(const NdfppInstance& inst, const RngStream& stream, int index);

// Realized capacity per facility for a fixed first stage (the sampling
// oracle the MILP emissions must reproduce).
struct FirstStageSolution {
    std::vector<int> protection;  // per facility, 0-based level index
    std::vector<char> edge_open;  // per edge
};
bool operator==(const FirstStageSolution& a, const FirstStageSolution& b);
double first_stage_investment(const NdfppInstance& inst, const FirstStageSolution& fs);
std::vector<double> realized_capacities(const NdfppInstance& inst, const FirstStageSolution& fs,
                                        const NdfppScenario& s);

// ---------------------------------------------------------------------------
// Model builders
// ---------------------------------------------------------------------------

struct FirstStageVars {
    std::vector<std::vector<int>> x;  // [facility][p-1]
    std::vector<int> z;               // [edge]
};
FirstStageVars build_first_stage(MipModel& m, const NdfppInstance& inst);

struct SecondStageRefs {
    std::vector<int> flow;  // per arc of build_arcs(inst)
    LinExpr cost;           // sum of q * flow
};
// capacity_expr: per-facility affine capacity; edge_vars empty => skip the
// flow<=B*z gating rows (used when edges are fixed into the arc set).
SecondStageRefs build_second_stage(MipModel& m, const NdfppInstance& inst,
                                   const NdfppArcs& arcs,
                                   const std::vector<LinExpr>& capacity_expr,
                                   const std::vector<int>& edge_vars, const std::string& tag);

// Shared (per-event) variables used by the variant emissions.
struct VariantSharedVars {
    // Binomial: success-probability variable per (event, facility).
    // Discrete: likelihood-sum variable per (event, facility).
    // Normal:   mean-capacity variable per (event, facility).
    std::vector<std::vector<int>> per_event;  // empty for Selection
};
VariantSharedVars emit_variant_shared(MipModel& m, const NdfppInstance& inst,
                                      const FirstStageVars& fsv);

// Capacity expression for every facility under one scenario; appends any
// per-scenario variables/rows (Appendix-style linearizations).
std::vector<LinExpr> emit_variant_capacity(MipModel& m, const NdfppInstance& inst,
                                           const FirstStageVars& fsv,
                                           const VariantSharedVars& shared,
                                           const NdfppScenario& s, double eps,
                                           const std::string& tag);

struct SaaModelRefs {
    FirstStageVars fsv;
    std::vector<SecondStageRefs> stages;
};
// Extensive sampled program: first stage + N second stages + N capacity
// emissions; objective (1/N) * sum of scenario transport costs.
SaaModelRefs build_saa_extensive(MipModel& m, const NdfppInstance& inst,
                                 const std::vector<NdfppScenario>& samples, double eps);

FirstStageSolution extract_first_stage(const NdfppInstance& inst, const FirstStageVars& fsv,
                                       const Assignment& sol);

// ---------------------------------------------------------------------------
// Exact scenario space (Selection / Binomial / Discrete)
// ---------------------------------------------------------------------------

struct ExactScenario {
    int event = 0;
    std::vector<int> levels;  // capacity level per facility
};
// Full support: every (event, level-vector); size |D|*(W+1)^F, capped.
std::vector<ExactScenario> enumerate_scenarios(const NdfppInstance& inst,
                                               std::size_t cap = 1000000);

// P(levels | event, x), optionally joint with the event probability.
double scenario_probability(const NdfppInstance& inst, const FirstStageSolution& fs,
                            const ExactScenario& k, bool joint);

// Second-stage LP value for fixed first stage and fixed capacities; caches
// by capacity vector (levels repeat heavily across events).
class SecondStageEvaluator {
  public:
    SecondStageEvaluator(const NdfppInstance& inst, FirstStageSolution fs);
    double cost(const std::vector<double>& capacities);
    double cost_of_scenario(const NdfppScenario& s);
    int lp_solves() const { return lp_solves_; }

  private:
    const NdfppInstance& inst_;
    FirstStageSolution fs_;
    NdfppArcs arcs_;
    std::map<std::vector<long long>, double> cache_;
    int lp_solves_ = 0;
};

// Exact expected second-stage cost over the enumerated support.
double evaluate_solution_exact(const NdfppInstance& inst, const FirstStageSolution& fs,
                               std::size_t cap = 1000000);

// ---------------------------------------------------------------------------
// DEP baseline (Selection), expected-value problem, VSS
// ---------------------------------------------------------------------------

struct DepModelRefs {
    FirstStageVars fsv;
    std::vector<SecondStageRefs> stages;  // one per enumerated scenario
};
// Extensive form of the original Selection program with decision-dependent
// scenario weights; the probability product is linearized by a sequential
// chain of exact McCormick steps seeded with the scaled scenario cost.
DepModelRefs build_dep_selection(MipModel& m, const NdfppInstance& inst,
                                 std::size_t cap = 1000000);

struct EvModelRefs {
    FirstStageVars fsv;
    SecondStageRefs stage;
};
struct EvOptions {
    // Normal only: follow the published mean-capacity expression verbatim
    // (scales the mean variable by the capacity step). Off interprets the
    // mean variable as a capacity directly.
    bool normal_scale_by_step = true;
};
EvModelRefs build_ev(MipModel& m, const NdfppInstance& inst, const EvOptions& opt = {});

struct VssReport {
    FirstStageSolution ev_solution;
    double ev_objective = 0.0;   // optimum of the mean-value program
    double eev = 0.0;            // expected cost of the EV solution
    double stochastic = 0.0;     // v(x_bar) (exact) or sampled estimate
    double vss_abs = 0.0;        // eev - stochastic
    double vss_rel = 0.0;        // (eev - stochastic)/eev
    bool sampled = false;        // true when estimates (Normal) were used
    int eval_scenarios = 0;
};
// EEV via exact enumeration for Selection/Binomial/Discrete; sampled with
// n_eval common-random-number scenarios for Normal.
VssReport compute_vss(const NdfppInstance& inst, const FirstStageSolution& x_bar,
                      const SolveOptions& sopt, const EvOptions& evopt = {}, int n_eval = 10000,
                      std::uint64_t eval_seed = 0);

// ---------------------------------------------------------------------------
// SAA adapter
// ---------------------------------------------------------------------------

struct NdfppSaaOptions {
    SaaOptions saa;
    SolveOptions solve;
    double eps = 1e-4;
    std::uint64_t seed = 0;
    bool exact_eval = false;  // replace sampled screening values by exact ones
};

class NdfppSaaProblem {
  public:
    using Candidate = FirstStageSolution;
    NdfppSaaProblem(const NdfppInstance& inst, const NdfppSaaOptions& opt);
    std::optional<std::pair<double, Candidate>> solve_training(int replication, int n);
    double first_stage_cost(const Candidate&) { return 0.0; }  // budget is a constraint
    // With exact_eval the per-scenario value is the exact expectation (so the
    // screening mean is exact and its variance collapses to zero).
    double evaluate_scenario(const Candidate& c, int s);
    bool same_candidate(const Candidate& a, const Candidate& b) { return a == b; }

  private:
    const NdfppInstance& inst_;
    NdfppSaaOptions opt_;
    RngStream base_;
    std::vector<FirstStageSolution> keys_;
    std::vector<std::unique_ptr<SecondStageEvaluator>> evals_;
    std::vector<double> exact_values_;
    int key_index(const Candidate& c);
};

struct NdfppRunReport {
    SaaReport saa;
    FirstStageSolution chosen;
    std::optional<double> exact_value;  // enumerable variants only
    double exact_gap_rel = 0.0;         // (exact - lb)/exact when exact_value is set
};
NdfppRunReport run_ndfpp_saa(const NdfppInstance& inst, const NdfppSaaOptions& opt,
                             bool with_exact_value);

}  // namespace endo
