#include "endo/ndfpp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "endo/quantiles.hpp"

namespace endo {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Selection: return "selection";
        case Variant::Binomial: return "binomial";
        case Variant::Discrete: return "discrete";
        case Variant::Normal: return "normal";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    if (s == "selection") return Variant::Selection;
    if (s == "binomial") return Variant::Binomial;
    if (s == "discrete") return Variant::Discrete;
    if (s == "normal") return Variant::Normal;
    throw std::invalid_argument("unknown variant: " + s);
}

bool NdfppInstance::is_facility(int node) const {
    return std::find(facilities.begin(), facilities.end(), node) != facilities.end();
}

double NdfppInstance::total_demand() const {
    return std::accumulate(demand.begin(), demand.end(), 0.0);
}

double NdfppInstance::max_transport_cost() const {
    double mx = 0.0;
    for (double l : edge_length_km) mx = std::max(mx, l);
    return mx > 0.0 ? mx : 1.0;
}

double NdfppInstance::dummy_arc_cost() const { return penalty_multiplier * max_transport_cost(); }

namespace {
inline double profile_or_one(const std::vector<double>& prof, int w) {
    return prof.empty() ? 1.0 : prof.at(w);
}
}  // namespace

double NdfppInstance::phi_tilde(int event, int f, int i, int p) const {
    return (i == f ? 1.0 : cross_impact) * phi_bar.at(event).at(i).at(p);
}

double NdfppInstance::u_tilde(int event, int f, int i, int p, int w) const {
    // Level likelihoods reuse the success-probability table of the installing
    // facility, optionally shaped per level.
    return (i == f ? 1.0 : cross_impact) * phi_bar.at(event).at(i).at(p) *
           profile_or_one(utility_w_profile, w);
}

double NdfppInstance::mu_tilde(int event, int f, int i, int p) const {
    return (i == f ? 1.0 : cross_impact) * mu_bar.at(event).at(f).at(p);
}

double NdfppInstance::sigma_tilde(int event, int f) const {
    double s = sigma_bar.at(event).at(f);
    for (int i = 0; i < facility_count(); ++i)
        if (i != f) s += cross_impact * sigma_bar.at(event).at(i);
    return s / rho;
}

double NdfppInstance::u_hat(int event, int f) const {
    double total = 0.0;
    for (int w = 0; w <= W; ++w)
        for (int i = 0; i < facility_count(); ++i) {
            double best = 0.0;
            for (int p = 0; p < P; ++p) best = std::max(best, u_tilde(event, f, i, p, w));
            total += best;
        }
    return total;
}

void NdfppInstance::validate() const {
    const int n = node_count(), nf = facility_count(), ne = (int)edges.size(),
              nd = (int)events.size();
    if ((int)node_lat.size() != n || (int)node_lon.size() != n || (int)demand.size() != n)
        throw std::invalid_argument("instance: node array sizes differ");
    if (nf == 0) throw std::invalid_argument("instance: no facilities");
    for (int f : facilities)
        if (f < 0 || f >= n) throw std::invalid_argument("instance: facility outside nodes");
    for (int f : facilities)
        if (demand[f] != 0.0) throw std::invalid_argument("instance: facility with demand");
    if ((int)edge_length_km.size() != ne || (int)edge_cost.size() != ne)
        throw std::invalid_argument("instance: edge array sizes differ");
    for (const auto& e : edges)
        if (e[0] < 0 || e[1] >= n || e[0] >= e[1])
            throw std::invalid_argument("instance: bad edge endpoints");
    if (P < 1 || W < 0) throw std::invalid_argument("instance: bad P or W");
    if ((int)protection_cost.size() != nf)
        throw std::invalid_argument("instance: protection cost table size");
    for (const auto& row : protection_cost)
        if ((int)row.size() != P) throw std::invalid_argument("instance: protection cost row");
    if (nd == 0) throw std::invalid_argument("instance: no events");
    double psum = 0.0;
    for (const auto& d : events) psum += d.probability;
    if (std::abs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("instance: event probabilities must sum to 1");
    if ((int)intensity.size() != nd) throw std::invalid_argument("instance: intensity table");
    for (const auto& row : intensity)
        if ((int)row.size() != nf) throw std::invalid_argument("instance: intensity row");
    auto check_dfp = [&](const std::vector<std::vector<std::vector<double>>>& t,
                         const char* what) {
        if ((int)t.size() != nd) throw std::invalid_argument(std::string("instance: ") + what);
        for (const auto& per_f : t) {
            if ((int)per_f.size() != nf)
                throw std::invalid_argument(std::string("instance: ") + what);
            for (const auto& per_p : per_f)
                if ((int)per_p.size() != P)
                    throw std::invalid_argument(std::string("instance: ") + what);
        }
    };
    if (variant == Variant::Normal) {
        check_dfp(mu_bar, "mean table shape");
        if ((int)sigma_bar.size() != nd) throw std::invalid_argument("instance: sigma table");
        for (const auto& row : sigma_bar)
            if ((int)row.size() != nf) throw std::invalid_argument("instance: sigma row");
    } else {
        check_dfp(phi_bar, "success probability table shape");
        for (const auto& per_f : phi_bar)
            for (const auto& per_p : per_f)
                for (double v : per_p)
                    if (v < 0.0 || v > 1.0)
                        throw std::invalid_argument("instance: probability outside [0,1]");
    }
    if (!utility_w_profile.empty() && (int)utility_w_profile.size() != W + 1)
        throw std::invalid_argument("instance: level profile must have W+1 entries");
    if (rho <= 0.0) throw std::invalid_argument("instance: rho must be positive");
}

NdfppArcs build_arcs(const NdfppInstance& inst) {
    NdfppArcs out;
    out.dummy_node = inst.node_count();
    for (int e = 0; e < (int)inst.edges.size(); ++e) {
        const auto [i, j] = inst.edges[e];
        out.arcs.push_back({i, j, e, inst.edge_length_km[e]});
        out.arcs.push_back({j, i, e, inst.edge_length_km[e]});
    }
    const double dummy_cost = inst.dummy_arc_cost();
    for (int n = 0; n < inst.node_count(); ++n)
        if (!inst.is_facility(n)) out.arcs.push_back({out.dummy_node, n, -1, dummy_cost});
    return out;
}

int draws_per_facility(const NdfppInstance& inst) {
    switch (inst.variant) {
        case Variant::Selection: return inst.P;
        case Variant::Binomial: return inst.W;
        case Variant::Discrete: return 1;
        case Variant::Normal: return 1;
    }
    return 1;
}

NdfppScenario draw_scenario(const NdfppInstance& inst, const RngStream& stream, int index) {
    const RngStream ss = stream.sub(index);
    NdfppScenario s;
    std::vector<double> probs(inst.events.size());
    for (size_t d = 0; d < inst.events.size(); ++d) probs[d] = inst.events[d].probability;
    s.event = eval_discrete_inverse(probs, ss.u01_open(0));
    const int k = draws_per_facility(inst);
    s.u.resize(inst.facility_count());
    for (int f = 0; f < inst.facility_count(); ++f) {
        s.u[f].resize(k);
        for (int j = 0; j < k; ++j) s.u[f][j] = ss.u01_open(1 + (std::uint64_t)f * k + j);
    }
    return s;
}

bool operator==(const FirstStageSolution& a, const FirstStageSolution& b) {
    return a.protection == b.protection && a.edge_open == b.edge_open;
}

double first_stage_investment(const NdfppInstance& inst, const FirstStageSolution& fs) {
    double c = 0.0;
    for (int f = 0; f < inst.facility_count(); ++f)
        c += inst.protection_cost[f][fs.protection[f]];
    for (int e = 0; e < (int)inst.edges.size(); ++e)
        if (fs.edge_open[e]) c += inst.edge_cost[e];
    return c;
}

namespace {

// Numeric counterparts of the shared decision-dependent quantities at a
// fixed first stage.
double phi_value(const NdfppInstance& inst, const FirstStageSolution& fs, int d, int f) {
    double s = 0.0;
    for (int i = 0; i < inst.facility_count(); ++i)
        s += inst.phi_tilde(d, f, i, fs.protection[i]);
    return s / inst.rho;
}

std::vector<double> level_pmf_discrete(const NdfppInstance& inst, const FirstStageSolution& fs,
                                       int d, int f) {
    std::vector<double> u(inst.W + 1, 0.0);
    double total = 0.0;
    for (int w = 0; w <= inst.W; ++w) {
        for (int i = 0; i < inst.facility_count(); ++i)
            u[w] += inst.u_tilde(d, f, i, fs.protection[i], w);
        total += u[w];
    }
    if (total <= 0.0) throw std::runtime_error("level likelihoods sum to zero");
    for (double& v : u) v /= total;
    return u;
}

double mu_value(const NdfppInstance& inst, const FirstStageSolution& fs, int d, int f) {
    double s = 0.0;
    for (int i = 0; i < inst.facility_count(); ++i)
        s += inst.mu_tilde(d, f, i, fs.protection[i]);
    return s / inst.rho;
}

std::vector<double> binomial_level_pmf(int W, double phi) {
    std::vector<double> pmf(W + 1);
    for (int w = 0; w <= W; ++w) pmf[w] = binomial_pmf(W, phi, w);
    return pmf;
}

}  // namespace

std::vector<double> realized_capacities(const NdfppInstance& inst, const FirstStageSolution& fs,
                                        const NdfppScenario& s) {
    const int d = s.event;
    std::vector<double> cap(inst.facility_count(), 0.0);
    for (int f = 0; f < inst.facility_count(); ++f) {
        switch (inst.variant) {
            case Variant::Selection: {
                const int p = fs.protection[f];
                const int level = eval_discrete_inverse(
                    binomial_level_pmf(inst.W, inst.phi_bar[d][f][p]), s.u[f][p]);
                cap[f] = inst.nu(level);
                break;
            }
            case Variant::Binomial: {
                const double phi = phi_value(inst, fs, d, f);
                int level = 0;
                for (int w = 0; w < inst.W; ++w)
                    if (s.u[f][w] < phi) ++level;
                cap[f] = inst.nu(level);
                break;
            }
            case Variant::Discrete: {
                const int level =
                    eval_discrete_inverse(level_pmf_discrete(inst, fs, d, f), s.u[f][0]);
                cap[f] = inst.nu(level);
                break;
            }
            case Variant::Normal: {
                const double z = std::clamp(normal_quantile(s.u[f][0]), -4.0, 4.0);
                cap[f] = mu_value(inst, fs, d, f) + inst.sigma_tilde(d, f) * z;
                break;
            }
        }
    }
    return cap;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

FirstStageVars build_first_stage(MipModel& m, const NdfppInstance& inst) {
    FirstStageVars v;
    v.x.resize(inst.facility_count());
    LinExpr budget;
    for (int f = 0; f < inst.facility_count(); ++f) {
        LinExpr one;
        for (int p = 0; p < inst.P; ++p) {
            const int id =
                m.add_binary("x_f" + std::to_string(f) + "_p" + std::to_string(p + 1));
            v.x[f].push_back(id);
            one.add(id);
            budget.add(id, inst.protection_cost[f][p]);
        }
        m.add_row("protection_one_f" + std::to_string(f), std::move(one), RowSense::EQ, 1.0);
    }
    for (int e = 0; e < (int)inst.edges.size(); ++e) {
        const int id = m.add_binary("z_e" + std::to_string(e));
        v.z.push_back(id);
        budget.add(id, inst.edge_cost[e]);
    }
    m.add_row("budget", std::move(budget), RowSense::LE, inst.budget);
    return v;
}

SecondStageRefs build_second_stage(MipModel& m, const NdfppInstance& inst,
                                   const NdfppArcs& arcs,
                                   const std::vector<LinExpr>& capacity_expr,
                                   const std::vector<int>& edge_vars, const std::string& tag) {
    SecondStageRefs refs;
    const int n_arcs = (int)arcs.arcs.size();
    refs.flow.reserve(n_arcs);
    for (int a = 0; a < n_arcs; ++a) {
        const int id = m.add_continuous("y" + tag + "_a" + std::to_string(a), 0.0, kInf);
        refs.flow.push_back(id);
        refs.cost.add(id, arcs.arcs[a].cost);
    }
    // Net inflow equals demand at clients; net outflow bounded by realized
    // capacity at facilities.
    for (int node = 0; node < inst.node_count(); ++node) {
        LinExpr net;
        for (int a = 0; a < n_arcs; ++a) {
            if (arcs.arcs[a].to == node) net.add(refs.flow[a], 1.0);
            if (arcs.arcs[a].from == node) net.add(refs.flow[a], -1.0);
        }
        if (inst.is_facility(node)) {
            const int f = (int)(std::find(inst.facilities.begin(), inst.facilities.end(),
                                          node) -
                                inst.facilities.begin());
            LinExpr row = (-1.0) * net - capacity_expr[f];
            m.add_row("capacity" + tag + "_f" + std::to_string(f), std::move(row), RowSense::LE,
                      0.0);
        } else {
            m.add_row("balance" + tag + "_n" + std::to_string(node), std::move(net),
                      RowSense::EQ, inst.demand[node]);
        }
    }
    if (!edge_vars.empty()) {
        const double B = inst.total_demand();
        for (int a = 0; a < n_arcs; ++a) {
            if (arcs.arcs[a].edge < 0) continue;
            LinExpr gate =
                LinExpr::of_var(refs.flow[a]) - B * LinExpr::of_var(edge_vars[arcs.arcs[a].edge]);
            m.add_row("gate" + tag + "_a" + std::to_string(a), std::move(gate), RowSense::LE,
                      0.0);
        }
    }
    return refs;
}

VariantSharedVars emit_variant_shared(MipModel& m, const NdfppInstance& inst,
                                      const FirstStageVars& fsv) {
    VariantSharedVars out;
    if (inst.variant == Variant::Selection) return out;
    out.per_event.resize(inst.events.size());
    for (int d = 0; d < (int)inst.events.size(); ++d) {
        for (int f = 0; f < inst.facility_count(); ++f) {
            const std::string tag = "_d" + std::to_string(d) + "_f" + std::to_string(f);
            if (inst.variant == Variant::Binomial) {
                const int phi = m.add_continuous("phi" + tag, 0.0, 1.0);
                LinExpr def = inst.rho * LinExpr::of_var(phi);
                for (int i = 0; i < inst.facility_count(); ++i)
                    for (int p = 0; p < inst.P; ++p)
                        def.add(fsv.x[i][p], -inst.phi_tilde(d, f, i, p));
                m.add_row("phidef" + tag, std::move(def), RowSense::EQ, 0.0);
                out.per_event[d].push_back(phi);
            } else if (inst.variant == Variant::Discrete) {
                const int ut = m.add_continuous("usum" + tag, 0.0, inst.u_hat(d, f));
                LinExpr def = LinExpr::of_var(ut);
                for (int w = 0; w <= inst.W; ++w)
                    for (int i = 0; i < inst.facility_count(); ++i)
                        for (int p = 0; p < inst.P; ++p)
                            def.add(fsv.x[i][p], -inst.u_tilde(d, f, i, p, w));
                m.add_row("usumdef" + tag, std::move(def), RowSense::EQ, 0.0);
                out.per_event[d].push_back(ut);
            } else {  // Normal
                const int mu = m.add_continuous("mu" + tag, 0.0, kInf);
                LinExpr def = inst.rho * LinExpr::of_var(mu);
                for (int i = 0; i < inst.facility_count(); ++i)
                    for (int p = 0; p < inst.P; ++p)
                        def.add(fsv.x[i][p], -inst.mu_tilde(d, f, i, p));
                m.add_row("mudef" + tag, std::move(def), RowSense::EQ, 0.0);
                out.per_event[d].push_back(mu);
            }
        }
    }
    return out;
}

std::vector<LinExpr> emit_variant_capacity(MipModel& m, const NdfppInstance& inst,
                                           const FirstStageVars& fsv,
                                           const VariantSharedVars& shared,
                                           const NdfppScenario& s, double eps,
                                           const std::string& tag) {
    const int d = s.event;
    std::vector<LinExpr> caps(inst.facility_count());
    for (int f = 0; f < inst.facility_count(); ++f) {
        const std::string ft = tag + "_f" + std::to_string(f);
        switch (inst.variant) {
            case Variant::Selection: {
                // One realized level per protection; pick by the one-hot x.
                for (int p = 0; p < inst.P; ++p) {
                    const int level = eval_discrete_inverse(
                        binomial_level_pmf(inst.W, inst.phi_bar[d][f][p]), s.u[f][p]);
                    caps[f].add(fsv.x[f][p], inst.nu(level));
                }
                break;
            }
            case Variant::Binomial: {
                const int phi = shared.per_event[d][f];
                for (int w = 0; w < inst.W; ++w) {
                    const double theta = s.u[f][w];
                    const int up =
                        m.add_binary("succ" + ft + "_w" + std::to_string(w + 1));
                    LinExpr r1 = theta * LinExpr::of_var(up) - LinExpr::of_var(phi);
                    m.add_row("succ_on" + ft + "_w" + std::to_string(w + 1), std::move(r1),
                              RowSense::LE, -eps);
                    LinExpr r2 = LinExpr::of_var(phi) - LinExpr::of_var(up);
                    m.add_row("succ_off" + ft + "_w" + std::to_string(w + 1), std::move(r2),
                              RowSense::LE, theta);
                    caps[f].add(up, inst.nu_bar);
                }
                break;
            }
            case Variant::Discrete: {
                const int ut = shared.per_event[d][f];
                const double theta = s.u[f][0];
                const double uhat = inst.u_hat(d, f);
                const int R = inst.W + 1;
                std::vector<int> sel(R), cum(R), tau(R);
                for (int w = 0; w < R; ++w) {
                    sel[w] = m.add_binary("lvl" + ft + "_w" + std::to_string(w));
                    cum[w] = m.add_binary("cum" + ft + "_w" + std::to_string(w));
                    tau[w] = mccormick_product(m, cum[w], LinExpr::of_var(ut), uhat,
                                               "tau" + ft + "_w" + std::to_string(w));
                }
                m.fix_var(cum[R - 1], 1.0);
                auto partial = [&](int lo, int hi) {  // sum of likelihoods for levels lo..hi
                    LinExpr e;
                    for (int w = lo; w <= hi; ++w)
                        for (int i = 0; i < inst.facility_count(); ++i)
                            for (int p = 0; p < inst.P; ++p)
                                e.add(fsv.x[i][p], inst.u_tilde(d, f, i, p, w));
                    return e;
                };
                for (int w = 0; w + 1 < R; ++w) {
                    LinExpr below = theta * LinExpr::of_var(tau[w]) - partial(0, w);
                    m.add_row("below" + ft + "_w" + std::to_string(w), std::move(below),
                              RowSense::LE, -eps);
                }
                for (int w = 1; w < R; ++w) {
                    LinExpr above = (1.0 - theta) * LinExpr::of_var(ut) -
                                    (1.0 - theta) * LinExpr::of_var(tau[w - 1]) -
                                    partial(w, inst.W);
                    m.add_row("above" + ft + "_w" + std::to_string(w), std::move(above),
                              RowSense::LE, 0.0);
                }
                for (int w = 0; w + 1 < R; ++w) {
                    LinExpr chain = LinExpr::of_var(cum[w]) - LinExpr::of_var(cum[w + 1]) +
                                    LinExpr::of_var(sel[w + 1]);
                    m.add_row("chain" + ft + "_w" + std::to_string(w), std::move(chain),
                              RowSense::EQ, 0.0);
                }
                LinExpr one;
                for (int w = 0; w < R; ++w) one.add(sel[w]);
                m.add_row("one_level" + ft, std::move(one), RowSense::EQ, 1.0);
                for (int w = 0; w < R; ++w) caps[f].add(sel[w], inst.nu(w));
                break;
            }
            case Variant::Normal: {
                const double z = std::clamp(normal_quantile(s.u[f][0]), -4.0, 4.0);
                caps[f] = LinExpr::of_var(shared.per_event[d][f]);
                caps[f].add(LinExpr(inst.sigma_tilde(d, f) * z));
                break;
            }
        }
    }
    return caps;
}

SaaModelRefs build_saa_extensive(MipModel& m, const NdfppInstance& inst,
                                 const std::vector<NdfppScenario>& samples, double eps) {
    SaaModelRefs refs;
    refs.fsv = build_first_stage(m, inst);
    const VariantSharedVars shared = emit_variant_shared(m, inst, refs.fsv);
    const NdfppArcs arcs = build_arcs(inst);
    const int N = (int)samples.size();
    if (N == 0) throw std::invalid_argument("build_saa_extensive: no samples");
    LinExpr obj;
    for (int s = 0; s < N; ++s) {
        const std::string tag = "_s" + std::to_string(s);
        const auto caps =
            emit_variant_capacity(m, inst, refs.fsv, shared, samples[s], eps, tag);
        refs.stages.push_back(build_second_stage(m, inst, arcs, caps, refs.fsv.z, tag));
        obj.add(refs.stages.back().cost, 1.0 / N);
    }
    m.set_objective(std::move(obj), ObjSense::Minimize);
    return refs;
}

FirstStageSolution extract_first_stage(const NdfppInstance& inst, const FirstStageVars& fsv,
                                       const Assignment& sol) {
    FirstStageSolution fs;
    fs.protection.resize(inst.facility_count(), 0);
    fs.edge_open.resize(inst.edges.size(), 0);
    for (int f = 0; f < inst.facility_count(); ++f) {
        double best = -1.0;
        for (int p = 0; p < inst.P; ++p) {
            const double v = value_of(sol, fsv.x[f][p]);
            if (v > best) {
                best = v;
                fs.protection[f] = p;
            }
        }
    }
    for (int e = 0; e < (int)inst.edges.size(); ++e)
        fs.edge_open[e] = value_of(sol, fsv.z[e]) > 0.5 ? 1 : 0;
    return fs;
}

// ---------------------------------------------------------------------------
// Exact scenario space
// ---------------------------------------------------------------------------

std::vector<ExactScenario> enumerate_scenarios(const NdfppInstance& inst, std::size_t cap) {
    if (inst.variant == Variant::Normal)
        throw std::invalid_argument("enumerate_scenarios: continuous variant");
    const int F = inst.facility_count();
    double count = (double)inst.events.size();
    for (int f = 0; f < F; ++f) count *= (inst.W + 1);
    if (count > (double)cap)
        throw std::runtime_error("enumerate_scenarios: scenario count exceeds cap");
    std::vector<ExactScenario> out;
    out.reserve((std::size_t)count);
    for (int d = 0; d < (int)inst.events.size(); ++d) {
        std::vector<int> lv(F, 0);
        while (true) {
            out.push_back({d, lv});
            int f = F - 1;
            while (f >= 0 && lv[f] == inst.W) lv[f--] = 0;
            if (f < 0) break;
            ++lv[f];
        }
    }
    return out;
}

double scenario_probability(const NdfppInstance& inst, const FirstStageSolution& fs,
                            const ExactScenario& k, bool joint) {
    double p = joint ? inst.events[k.event].probability : 1.0;
    for (int f = 0; f < inst.facility_count(); ++f) {
        switch (inst.variant) {
            case Variant::Selection:
                p *= binomial_pmf(inst.W, inst.phi_bar[k.event][f][fs.protection[f]],
                                  k.levels[f]);
                break;
            case Variant::Binomial:
                p *= binomial_pmf(inst.W, phi_value(inst, fs, k.event, f), k.levels[f]);
                break;
            case Variant::Discrete:
                p *= level_pmf_discrete(inst, fs, k.event, f)[k.levels[f]];
                break;
            case Variant::Normal:
                throw std::invalid_argument("scenario_probability: continuous variant");
        }
    }
    return p;
}

SecondStageEvaluator::SecondStageEvaluator(const NdfppInstance& inst, FirstStageSolution fs)
    : inst_(inst), fs_(std::move(fs)), arcs_(build_arcs(inst)) {}

double SecondStageEvaluator::cost(const std::vector<double>& capacities) {
    std::vector<long long> key(capacities.size());
    for (size_t f = 0; f < capacities.size(); ++f)
        key[f] = (long long)std::llround(capacities[f] * 1e9);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    MipModel m;
    LinExpr obj;
    std::vector<int> ids(arcs_.arcs.size(), -1);
    for (size_t a = 0; a < arcs_.arcs.size(); ++a) {
        const auto& arc = arcs_.arcs[a];
        if (arc.edge >= 0 && !fs_.edge_open[arc.edge]) continue;  // closed edge: no flow
        ids[a] = m.add_continuous("y_a" + std::to_string(a), 0.0, kInf);
        obj.add(ids[a], arc.cost);
    }
    for (int node = 0; node < inst_.node_count(); ++node) {
        LinExpr net;
        for (size_t a = 0; a < arcs_.arcs.size(); ++a) {
            if (ids[a] < 0) continue;
            if (arcs_.arcs[a].to == node) net.add(ids[a], 1.0);
            if (arcs_.arcs[a].from == node) net.add(ids[a], -1.0);
        }
        if (inst_.is_facility(node)) {
            const int f = (int)(std::find(inst_.facilities.begin(), inst_.facilities.end(),
                                          node) -
                                inst_.facilities.begin());
            m.add_row("capacity_f" + std::to_string(f), (-1.0) * net, RowSense::LE,
                      capacities[f]);
        } else {
            m.add_row("balance_n" + std::to_string(node), std::move(net), RowSense::EQ,
                      inst_.demand[node]);
        }
    }
    m.set_objective(std::move(obj), ObjSense::Minimize);
    SolveOptions opt;
    const SolveResult res = solve(m, opt);
    ++lp_solves_;
    if (res.status != SolveStatus::Optimal)
        throw std::runtime_error(std::string("second-stage LP not optimal: ") + to_string(res.status));
    cache_.emplace(std::move(key), res.objective);
    return res.objective;
}

double SecondStageEvaluator::cost_of_scenario(const NdfppScenario& s) {
    return cost(realized_capacities(inst_, fs_, s));
}

double evaluate_solution_exact(const NdfppInstance& inst, const FirstStageSolution& fs,
                               std::size_t cap) {
    const auto scens = enumerate_scenarios(inst, cap);
    SecondStageEvaluator eval(inst, fs);
    double v = 0.0;
    std::vector<double> caps(inst.facility_count());
    for (const auto& k : scens) {
        const double p = scenario_probability(inst, fs, k, true);
        if (p <= 0.0) continue;
        for (int f = 0; f < inst.facility_count(); ++f) caps[f] = inst.nu(k.levels[f]);
        v += p * eval.cost(caps);
    }
    return v;
}

// ---------------------------------------------------------------------------
// DEP baseline (Selection)
// ---------------------------------------------------------------------------

DepModelRefs build_dep_selection(MipModel& m, const NdfppInstance& inst, std::size_t cap) {
    if (inst.variant != Variant::Selection)
        throw std::invalid_argument("build_dep_selection: Selection variant only");
    DepModelRefs refs;
    refs.fsv = build_first_stage(m, inst);
    const NdfppArcs arcs = build_arcs(inst);
    const auto scens = enumerate_scenarios(inst, cap);
    const double cost_ub = inst.total_demand() * inst.dummy_arc_cost();
    LinExpr obj;
    for (int k = 0; k < (int)scens.size(); ++k) {
        const std::string tag = "_k" + std::to_string(k);
        std::vector<LinExpr> caps(inst.facility_count());
        for (int f = 0; f < inst.facility_count(); ++f)
            caps[f] = LinExpr(inst.nu(scens[k].levels[f]));
        refs.stages.push_back(build_second_stage(m, inst, arcs, caps, refs.fsv.z, tag));
        // Decision-dependent weight times scenario cost, linearized as a
        // sequential product: seed with prob_d * cost/cost_ub (affine in the
        // flows, in [0, prob_d]), then one exact McCormick step per facility
        // multiplying by the one-hot level-probability of its protection.
        const double prob_d = inst.events[scens[k].event].probability;
        LinExpr chain = (prob_d / cost_ub) * refs.stages.back().cost;
        for (int f = 0; f < inst.facility_count(); ++f) {
            LinExpr next;
            for (int p = 0; p < inst.P; ++p) {
                const double pw = binomial_pmf(inst.W, inst.phi_bar[scens[k].event][f][p],
                                               scens[k].levels[f]);
                const int tau =
                    mccormick_product(m, refs.fsv.x[f][p], chain, prob_d,
                                      "w" + tag + "_f" + std::to_string(f) + "_p" +
                                          std::to_string(p + 1));
                next.add(tau, pw);
            }
            chain = std::move(next);
        }
        obj.add(chain, cost_ub);
    }
    m.set_objective(std::move(obj), ObjSense::Minimize);
    return refs;
}

// ---------------------------------------------------------------------------
// Expected-value problem and VSS
// ---------------------------------------------------------------------------

EvModelRefs build_ev(MipModel& m, const NdfppInstance& inst, const EvOptions& opt) {
    EvModelRefs refs;
    refs.fsv = build_first_stage(m, inst);
    const NdfppArcs arcs = build_arcs(inst);
    const int F = inst.facility_count();
    std::vector<LinExpr> caps(F);
    switch (inst.variant) {
        case Variant::Selection: {
            for (int f = 0; f < F; ++f)
                for (int p = 0; p < inst.P; ++p) {
                    double zeta = 0.0;
                    for (int d = 0; d < (int)inst.events.size(); ++d)
                        zeta += inst.events[d].probability * inst.nu(inst.W) *
                                inst.phi_bar[d][f][p];
                    caps[f].add(refs.fsv.x[f][p], zeta);
                }
            break;
        }
        case Variant::Binomial: {
            const VariantSharedVars shared = emit_variant_shared(m, inst, refs.fsv);
            for (int f = 0; f < F; ++f)
                for (int d = 0; d < (int)inst.events.size(); ++d)
                    caps[f].add(shared.per_event[d][f],
                                inst.events[d].probability * inst.nu(inst.W));
            break;
        }
        case Variant::Discrete: {
            // Mean level value per (event, facility): a ratio of two affine
            // functions, pinned by cross-multiplying and replacing the
            // products mean*x with exact McCormick blocks.
            for (int d = 0; d < (int)inst.events.size(); ++d)
                for (int f = 0; f < F; ++f) {
                    const std::string tag = "_d" + std::to_string(d) + "_f" + std::to_string(f);
                    const int mean = m.add_continuous("evmean" + tag, 0.0, inst.nu(inst.W));
                    LinExpr row;
                    for (int i = 0; i < F; ++i)
                        for (int p = 0; p < inst.P; ++p) {
                            double usum = 0.0, nusum = 0.0;
                            for (int w = 0; w <= inst.W; ++w) {
                                usum += inst.u_tilde(d, f, i, p, w);
                                nusum += inst.nu(w) * inst.u_tilde(d, f, i, p, w);
                            }
                            const int prod = mccormick_product(
                                m, refs.fsv.x[i][p], LinExpr::of_var(mean), inst.nu(inst.W),
                                "evprod" + tag + "_i" + std::to_string(i) + "_p" +
                                    std::to_string(p + 1));
                            row.add(prod, usum);
                            row.add(refs.fsv.x[i][p], -nusum);
                        }
                    m.add_row("evmeandef" + tag, std::move(row), RowSense::EQ, 0.0);
                    caps[f].add(mean, inst.events[d].probability);
                }
            break;
        }
        case Variant::Normal: {
            const VariantSharedVars shared = emit_variant_shared(m, inst, refs.fsv);
            const double scale = opt.normal_scale_by_step ? inst.nu_bar : 1.0;
            for (int f = 0; f < F; ++f)
                for (int d = 0; d < (int)inst.events.size(); ++d)
                    caps[f].add(shared.per_event[d][f], inst.events[d].probability * scale);
            break;
        }
    }
    refs.stage = build_second_stage(m, inst, arcs, caps, refs.fsv.z, "_ev");
    m.set_objective(refs.stage.cost, ObjSense::Minimize);
    return refs;
}

VssReport compute_vss(const NdfppInstance& inst, const FirstStageSolution& x_bar,
                      const SolveOptions& sopt, const EvOptions& evopt, int n_eval,
                      std::uint64_t eval_seed) {
    VssReport out;
    MipModel m;
    const EvModelRefs refs = build_ev(m, inst, evopt);
    const SolveResult res = solve(m, sopt);
    if (res.status != SolveStatus::Optimal)
        throw std::runtime_error(std::string("mean-value program not solved: ") + to_string(res.status));
    out.ev_solution = extract_first_stage(inst, refs.fsv, res.solution);
    out.ev_objective = res.objective;
    if (inst.variant != Variant::Normal) {
        out.eev = evaluate_solution_exact(inst, out.ev_solution);
        out.stochastic = evaluate_solution_exact(inst, x_bar);
    } else {
        out.sampled = true;
        out.eval_scenarios = n_eval;
        SecondStageEvaluator ev_hat(inst, out.ev_solution);
        SecondStageEvaluator ev_bar(inst, x_bar);
        const RngStream stream = RngStream(eval_seed).sub(kEvaluationStreamKey);
        double sum_hat = 0.0, sum_bar = 0.0;
        for (int s = 0; s < n_eval; ++s) {
            const NdfppScenario sc = draw_scenario(inst, stream, s);
            sum_hat += ev_hat.cost_of_scenario(sc);
            sum_bar += ev_bar.cost_of_scenario(sc);
        }
        out.eev = sum_hat / n_eval;
        out.stochastic = sum_bar / n_eval;
    }
    out.vss_abs = out.eev - out.stochastic;
    out.vss_rel = out.eev != 0.0 ? out.vss_abs / out.eev : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// SAA adapter
// ---------------------------------------------------------------------------

NdfppSaaProblem::NdfppSaaProblem(const NdfppInstance& inst, const NdfppSaaOptions& opt)
    : inst_(inst), opt_(opt), base_(opt.seed) {}

std::optional<std::pair<double, FirstStageSolution>> NdfppSaaProblem::solve_training(
    int replication, int n) {
    std::vector<NdfppScenario> samples;
    samples.reserve(n);
    const RngStream rs = base_.sub(replication);
    for (int s = 0; s < n; ++s) samples.push_back(draw_scenario(inst_, rs, s));
    MipModel m;
    const SaaModelRefs refs = build_saa_extensive(m, inst_, samples, opt_.eps);
    const SolveResult res = solve(m, opt_.solve);
    if (res.status != SolveStatus::Optimal) return std::nullopt;
    return std::make_pair(res.objective, extract_first_stage(inst_, refs.fsv, res.solution));
}

int NdfppSaaProblem::key_index(const Candidate& c) {
    for (int i = 0; i < (int)keys_.size(); ++i)
        if (keys_[i] == c) return i;
    keys_.push_back(c);
    evals_.push_back(std::make_unique<SecondStageEvaluator>(inst_, c));
    exact_values_.push_back(opt_.exact_eval ? evaluate_solution_exact(inst_, c) : 0.0);
    return (int)keys_.size() - 1;
}

double NdfppSaaProblem::evaluate_scenario(const Candidate& c, int s) {
    const int i = key_index(c);
    if (opt_.exact_eval) return exact_values_[i];
    const NdfppScenario sc = draw_scenario(inst_, base_.sub(kEvaluationStreamKey), s);
    return evals_[i]->cost_of_scenario(sc);
}

NdfppRunReport run_ndfpp_saa(const NdfppInstance& inst, const NdfppSaaOptions& opt,
                             bool with_exact_value) {
    NdfppSaaOptions o = opt;
    if (o.exact_eval) o.saa.eval_scenarios = 2;  // per-scenario values are constant
    NdfppSaaProblem prob(inst, o);
    NdfppRunReport out;
    out.saa = run_saa(prob, o.saa, &out.chosen);
    if (with_exact_value && inst.variant != Variant::Normal) {
        out.exact_value = evaluate_solution_exact(inst, out.chosen);
        if (*out.exact_value != 0.0)
            out.exact_gap_rel = (*out.exact_value - out.saa.lb.mean) / *out.exact_value;
    }
    return out;
}

}  // namespace endo
