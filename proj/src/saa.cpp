#include "endo/saa.hpp"

#include <cmath>

namespace endo {

MeanVar lower_bound_stats(const std::vector<double>& replication_objs) {
    const int m = (int)replication_objs.size();
    if (m < 2) throw std::invalid_argument("lower_bound_stats: needs >= 2 replications");
    MeanVar out;
    for (double v : replication_objs) out.mean += v;
    out.mean /= m;
    double ss = 0.0;
    for (double v : replication_objs) ss += (v - out.mean) * (v - out.mean);
    out.var = ss / ((double)m * (m - 1));
    return out;
}

MeanVar upper_bound_stats(const std::vector<double>& per_scenario_costs,
                          double first_stage_cost) {
    const int n = (int)per_scenario_costs.size();
    if (n < 2) throw std::invalid_argument("upper_bound_stats: needs >= 2 scenarios");
    double q_mean = 0.0;
    for (double q : per_scenario_costs) q_mean += q;
    q_mean /= n;
    double ss = 0.0;
    for (double q : per_scenario_costs) ss += (q - q_mean) * (q - q_mean);
    MeanVar out;
    out.mean = first_stage_cost + q_mean;
    out.var = ss / ((double)n * (n - 1));
    return out;
}

GapStats gap_stats(const MeanVar& lb, const MeanVar& ub, double alpha) {
    GapStats g;
    g.gap = ub.mean - lb.mean;
    g.var = lb.var + ub.var;
    g.stat_gap = g.gap + upper_z(alpha) * std::sqrt(g.var);
    return g;
}

}  // namespace endo
