#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "endo/quantiles.hpp"

namespace endo {

struct SaaOptions {
    int replications = 10;     // M independent sampled programs
    int train_scenarios = 50;  // N scenarios per sampled program
    int eval_scenarios = 1000; // N' scenarios in the shared evaluation sample
    double alpha = 0.05;       // one-sided confidence level per bound
};

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;  // variance *of the mean estimator*
};

// Mean of replication optima and sampling variance of that mean:
// var = sum (v_m - mean)^2 / (M (M-1)).
MeanVar lower_bound_stats(const std::vector<double>& replication_objs);

// first_stage_cost + mean of per-scenario costs; variance of the mean:
// var = sum (q_s - mean_q)^2 / (N' (N'-1)).
MeanVar upper_bound_stats(const std::vector<double>& per_scenario_costs,
                          double first_stage_cost);

struct GapStats {
    double gap = 0.0;       // ub.mean - lb.mean (can be negative)
    double var = 0.0;       // lb.var + ub.var
    double stat_gap = 0.0;  // gap + z_alpha * sqrt(var)
};
GapStats gap_stats(const MeanVar& lb, const MeanVar& ub, double alpha);

struct ReplicationEntry {
    int index = 0;
    bool ok = false;          // solved to optimality within limits
    double objective = 0.0;   // sampled-program optimum (valid when ok)
    double eval_value = 0.0;  // first_stage_cost + out-of-sample mean (valid when ok)
};

struct SaaReport {
    int replications = 0, train_scenarios = 0, eval_scenarios = 0;
    double alpha = 0.05;
    std::vector<ReplicationEntry> per_replication;
    int used_replications = 0;  // excluded failed ones (at most one tolerated)
    MeanVar lb;                 // training-average estimate of the optimum
    double lb_ci = 0.0;         // lb.mean - t_{alpha,M_used-1} * sqrt(lb.var)
    int chosen_replication = -1;
    int distinct_candidates = 0;
    double first_stage_cost = 0.0;
    MeanVar ub;                 // out-of-sample estimate for the chosen candidate
    double ub_ci = 0.0;         // ub.mean + z_alpha * sqrt(ub.var)
    GapStats gap;
    double train_time_sec = 0.0, eval_time_sec = 0.0;
};

// Problem adapter contract:
//   struct P {
//     using Candidate = ...;
//     // Solve the sampled program for replication m with n scenarios. Returns
//     // nullopt when the solve fails (infeasible / hit limits).
//     std::optional<std::pair<double, Candidate>> solve_training(int replication, int n);
//     double first_stage_cost(const Candidate&);
//     // Second-stage cost under evaluation scenario s; scenario s carries
//     // identical randomness across candidates (common random numbers).
//     double evaluate_scenario(const Candidate&, int s);
//     bool same_candidate(const Candidate&, const Candidate&);
//   };
template <class Problem>
SaaReport run_saa(Problem& prob, const SaaOptions& opt,
                  typename Problem::Candidate* chosen_out = nullptr) {
    using clock = std::chrono::steady_clock;
    if (opt.replications < 2) throw std::invalid_argument("run_saa: needs >= 2 replications");
    if (opt.eval_scenarios < 2) throw std::invalid_argument("run_saa: needs >= 2 eval scenarios");

    SaaReport rep;
    rep.replications = opt.replications;
    rep.train_scenarios = opt.train_scenarios;
    rep.eval_scenarios = opt.eval_scenarios;
    rep.alpha = opt.alpha;

    auto t0 = clock::now();
    std::vector<typename Problem::Candidate> cands;  // successes only
    std::vector<int> cand_rep;                       // replication index per success
    std::vector<double> objs;
    for (int m = 0; m < opt.replications; ++m) {
        auto res = prob.solve_training(m, opt.train_scenarios);
        ReplicationEntry e;
        e.index = m;
        e.ok = res.has_value();
        if (res) {
            e.objective = res->first;
            objs.push_back(res->first);
            cands.push_back(std::move(res->second));
            cand_rep.push_back(m);
        }
        rep.per_replication.push_back(e);
    }
    rep.used_replications = (int)objs.size();
    if (rep.used_replications < opt.replications - 1 || rep.used_replications < 2)
        throw std::runtime_error("run_saa: too many failed replications");
    rep.lb = lower_bound_stats(objs);
    rep.lb_ci =
        rep.lb.mean - upper_t(opt.alpha, rep.used_replications - 1) * std::sqrt(rep.lb.var);
    rep.train_time_sec = std::chrono::duration<double>(clock::now() - t0).count();

    // Screen candidates on one shared evaluation sample; duplicates evaluated
    // once. Ties go to the lowest replication index (stable order).
    t0 = clock::now();
    std::vector<int> owner_of;                        // success idx -> distinct idx
    std::vector<int> distinct_owner;                  // distinct idx -> success idx
    std::vector<std::vector<double>> distinct_costs;
    std::vector<double> distinct_eval;
    owner_of.resize(cands.size(), -1);
    for (int i = 0; i < (int)cands.size(); ++i) {
        for (int d = 0; d < (int)distinct_owner.size(); ++d)
            if (prob.same_candidate(cands[distinct_owner[d]], cands[i])) {
                owner_of[i] = d;
                break;
            }
        if (owner_of[i] >= 0) continue;
        std::vector<double> costs(opt.eval_scenarios);
        for (int s = 0; s < opt.eval_scenarios; ++s)
            costs[s] = prob.evaluate_scenario(cands[i], s);
        const MeanVar mv = upper_bound_stats(costs, prob.first_stage_cost(cands[i]));
        owner_of[i] = (int)distinct_owner.size();
        distinct_owner.push_back(i);
        distinct_costs.push_back(std::move(costs));
        distinct_eval.push_back(mv.mean);
    }
    rep.distinct_candidates = (int)distinct_owner.size();
    for (int i = 0; i < (int)cands.size(); ++i)
        rep.per_replication[cand_rep[i]].eval_value = distinct_eval[owner_of[i]];

    int best = 0;
    for (int d = 1; d < (int)distinct_owner.size(); ++d)
        if (distinct_eval[d] < distinct_eval[best]) best = d;
    rep.chosen_replication = cand_rep[distinct_owner[best]];
    if (chosen_out) *chosen_out = cands[distinct_owner[best]];
    rep.first_stage_cost = prob.first_stage_cost(cands[distinct_owner[best]]);
    rep.ub = upper_bound_stats(distinct_costs[best], rep.first_stage_cost);
    rep.ub_ci = rep.ub.mean + upper_z(opt.alpha) * std::sqrt(rep.ub.var);
    rep.gap = gap_stats(rep.lb, rep.ub, opt.alpha);
    rep.eval_time_sec = std::chrono::duration<double>(clock::now() - t0).count();
    return rep;
}

}  // namespace endo
