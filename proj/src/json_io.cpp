#include "endo/json_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "endo/quantiles.hpp"

namespace endo {

namespace {

ordered_json event_to_json(const NdfppEvent& e) {
    return ordered_json{{"name", e.name},
                        {"center_lat", e.center_lat},
                        {"center_lon", e.center_lon},
                        {"r1_km", e.r1_km},
                        {"r2_km", e.r2_km},
                        {"probability", e.probability},
                        {"no_disruption", e.no_disruption}};
}

NdfppEvent event_from_json(const ordered_json& j) {
    NdfppEvent e;
    e.name = j.at("name").get<std::string>();
    e.center_lat = j.at("center_lat").get<double>();
    e.center_lon = j.at("center_lon").get<double>();
    e.r1_km = j.at("r1_km").get<double>();
    e.r2_km = j.at("r2_km").get<double>();
    e.probability = j.at("probability").get<double>();
    e.no_disruption = j.at("no_disruption").get<bool>();
    return e;
}

// Instance name without a trailing "_seed<k>": groups runs of the same
// configuration across seeds.
std::string config_base(const std::string& name) {
    const auto pos = name.rfind("_seed");
    if (pos == std::string::npos) return name;
    for (size_t i = pos + 5; i < name.size(); ++i)
        if (!std::isdigit((unsigned char)name[i])) return name;
    return name.substr(0, pos);
}

}  // namespace

ordered_json instance_to_json(const NdfppInstance& inst) {
    ordered_json j;
    j["name"] = inst.name;
    j["seed"] = inst.seed;
    j["variant"] = to_string(inst.variant);
    j["node_names"] = inst.node_names;
    j["node_lat"] = inst.node_lat;
    j["node_lon"] = inst.node_lon;
    j["demand"] = inst.demand;
    j["facilities"] = inst.facilities;
    j["edges"] = inst.edges;
    j["edge_length_km"] = inst.edge_length_km;
    j["edge_cost"] = inst.edge_cost;
    j["P"] = inst.P;
    j["protection_cost"] = inst.protection_cost;
    j["budget"] = inst.budget;
    j["penalty_multiplier"] = inst.penalty_multiplier;
    j["W"] = inst.W;
    j["nu_bar"] = inst.nu_bar;
    j["L"] = inst.L;
    j["events"] = ordered_json::array();
    for (const auto& e : inst.events) j["events"].push_back(event_to_json(e));
    j["intensity"] = inst.intensity;
    j["cross_impact"] = inst.cross_impact;
    j["rho"] = inst.rho;
    j["phi_bar"] = inst.phi_bar;
    j["mu_bar"] = inst.mu_bar;
    j["sigma_bar"] = inst.sigma_bar;
    j["utility_w_profile"] = inst.utility_w_profile;
    return j;
}

NdfppInstance instance_from_json(const ordered_json& j) {
    NdfppInstance inst;
    inst.name = j.at("name").get<std::string>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.variant = variant_from_string(j.at("variant").get<std::string>());
    inst.node_names = j.at("node_names").get<std::vector<std::string>>();
    inst.node_lat = j.at("node_lat").get<std::vector<double>>();
    inst.node_lon = j.at("node_lon").get<std::vector<double>>();
    inst.demand = j.at("demand").get<std::vector<double>>();
    inst.facilities = j.at("facilities").get<std::vector<int>>();
    inst.edges = j.at("edges").get<std::vector<std::array<int, 2>>>();
    inst.edge_length_km = j.at("edge_length_km").get<std::vector<double>>();
    inst.edge_cost = j.at("edge_cost").get<std::vector<double>>();
    inst.P = j.at("P").get<int>();
    inst.protection_cost = j.at("protection_cost").get<std::vector<std::vector<double>>>();
    inst.budget = j.at("budget").get<double>();
    inst.penalty_multiplier = j.at("penalty_multiplier").get<double>();
    inst.W = j.at("W").get<int>();
    inst.nu_bar = j.at("nu_bar").get<double>();
    inst.L = j.at("L").get<int>();
    for (const auto& e : j.at("events")) inst.events.push_back(event_from_json(e));
    inst.intensity = j.at("intensity").get<std::vector<std::vector<int>>>();
    inst.cross_impact = j.at("cross_impact").get<double>();
    inst.rho = j.at("rho").get<double>();
    inst.phi_bar = j.at("phi_bar").get<std::vector<std::vector<std::vector<double>>>>();
    inst.mu_bar = j.at("mu_bar").get<std::vector<std::vector<std::vector<double>>>>();
    inst.sigma_bar = j.at("sigma_bar").get<std::vector<std::vector<double>>>();
    inst.utility_w_profile = j.at("utility_w_profile").get<std::vector<double>>();
    inst.validate();
    return inst;
}

void save_instance(const NdfppInstance& inst, const std::string& path) {
    write_text_file(path, instance_to_json(inst).dump(2) + "\n");
}

NdfppInstance load_instance(const std::string& path) {
    return instance_from_json(ordered_json::parse(read_text_file(path)));
}

ordered_json solution_to_json(const FirstStageSolution& sol) {
    ordered_json j;
    j["protection"] = sol.protection;
    j["edge_open"] = ordered_json::array();
    for (char v : sol.edge_open) j["edge_open"].push_back((int)v);
    return j;
}

FirstStageSolution solution_from_json(const ordered_json& j) {
    FirstStageSolution sol;
    sol.protection = j.at("protection").get<std::vector<int>>();
    for (const auto& v : j.at("edge_open")) sol.edge_open.push_back(v.get<int>() ? 1 : 0);
    return sol;
}

ordered_json saa_record(const NdfppInstance& inst, const NdfppSaaOptions& opt,
                        const NdfppRunReport& rep) {
    const SaaReport& s = rep.saa;
    ordered_json j;
    j["record"] = "saa";
    j["instance"] = inst.name;
    j["variant"] = to_string(inst.variant);
    j["seed"] = opt.seed;
    j["config"] = config_base(inst.name) + "|saa|M" + std::to_string(s.replications) + "|N" +
                  std::to_string(s.train_scenarios) + "|Np" +
                  std::to_string(s.eval_scenarios);
    j["params"] = ordered_json{{"replications", s.replications},
                               {"train_scenarios", s.train_scenarios},
                               {"eval_scenarios", s.eval_scenarios},
                               {"alpha", s.alpha},
                               {"epsilon", opt.eps},
                               {"exact_eval", opt.exact_eval}};
    j["lower_bound"] = ordered_json{{"mean", s.lb.mean}, {"var", s.lb.var}, {"ci", s.lb_ci}};
    j["upper_bound"] = ordered_json{{"mean", s.ub.mean}, {"var", s.ub.var}, {"ci", s.ub_ci}};
    j["gap"] = ordered_json{{"abs", s.gap.gap},
                            {"stat", s.gap.stat_gap},
                            {"relative_pct",
                             s.ub.mean != 0.0 ? 100.0 * s.gap.gap / s.ub.mean : 0.0}};
    j["replications"] = ordered_json::array();
    for (const auto& e : s.per_replication)
        j["replications"].push_back(ordered_json{{"index", e.index},
                                                 {"ok", e.ok},
                                                 {"objective", e.objective},
                                                 {"eval_value", e.eval_value}});
    j["used_replications"] = s.used_replications;
    j["distinct_candidates"] = s.distinct_candidates;
    j["chosen"] = solution_to_json(rep.chosen);
    j["chosen"]["replication"] = s.chosen_replication;
    j["chosen"]["investment"] = first_stage_investment(inst, rep.chosen);
    if (rep.exact_value) {
        j["exact"] = ordered_json{{"value", *rep.exact_value},
                                  {"gap_rel_pct", 100.0 * rep.exact_gap_rel}};
    }
    const double total_time = s.train_time_sec + s.eval_time_sec;
    j["time"] = ordered_json{{"train_sec", s.train_time_sec},
                             {"eval_sec", s.eval_time_sec},
                             {"total_sec", total_time}};
    j["table"] = ordered_json{{"|K|", s.train_scenarios},
                              {"gap-bar(x)(%)",
                               s.ub.mean != 0.0 ? 100.0 * s.gap.gap / s.ub.mean : 0.0},
                              {"Time(s)", total_time}};
    return j;
}

ordered_json dep_record(const NdfppInstance& inst, double objective,
                        const FirstStageSolution& sol, int scenario_count, double time_sec) {
    ordered_json j;
    j["record"] = "dep";
    j["instance"] = inst.name;
    j["variant"] = to_string(inst.variant);
    j["seed"] = inst.seed;
    j["config"] = config_base(inst.name) + "|dep";
    j["objective"] = objective;
    j["solution"] = solution_to_json(sol);
    j["solution"]["investment"] = first_stage_investment(inst, sol);
    j["time"] = ordered_json{{"total_sec", time_sec}};
    j["table"] =
        ordered_json{{"|K|", scenario_count}, {"v*", objective}, {"Time(s)", time_sec}};
    return j;
}

ordered_json ev_record(const NdfppInstance& inst, double objective,
                       const FirstStageSolution& sol, double time_sec) {
    ordered_json j;
    j["record"] = "ev";
    j["instance"] = inst.name;
    j["variant"] = to_string(inst.variant);
    j["seed"] = inst.seed;
    j["config"] = config_base(inst.name) + "|ev";
    j["objective"] = objective;
    j["solution"] = solution_to_json(sol);
    j["solution"]["investment"] = first_stage_investment(inst, sol);
    j["time"] = ordered_json{{"total_sec", time_sec}};
    j["table"] = ordered_json{{"EV", objective}, {"Time(s)", time_sec}};
    return j;
}

ordered_json evaluate_record(const NdfppInstance& inst, const FirstStageSolution& sol,
                             double value, bool sampled, int n_eval, std::uint64_t seed) {
    ordered_json j;
    j["record"] = "evaluate";
    j["instance"] = inst.name;
    j["variant"] = to_string(inst.variant);
    j["seed"] = seed;
    j["config"] = config_base(inst.name) + "|evaluate";
    j["solution"] = solution_to_json(sol);
    j["solution"]["investment"] = first_stage_investment(inst, sol);
    j["value"] = value;
    j["sampled"] = sampled;
    if (sampled) j["eval_scenarios"] = n_eval;
    j["table"] = ordered_json{{"v(x)", value}};
    return j;
}

ordered_json vss_record(const NdfppInstance& inst, const VssReport& v, std::uint64_t seed,
                        double time_sec) {
    ordered_json j;
    j["record"] = "vss";
    j["instance"] = inst.name;
    j["variant"] = to_string(inst.variant);
    j["seed"] = seed;
    j["config"] = config_base(inst.name) + "|vss";
    j["ev_solution"] = solution_to_json(v.ev_solution);
    j["ev_objective"] = v.ev_objective;
    j["eev"] = v.eev;
    j["stochastic_value"] = v.stochastic;
    j["vss_abs"] = v.vss_abs;
    j["vss_rel_pct"] = 100.0 * v.vss_rel;
    j["sampled"] = v.sampled;
    if (v.sampled) j["eval_scenarios"] = v.eval_scenarios;
    j["time"] = ordered_json{{"total_sec", time_sec}};
    j["table"] = ordered_json{{"EEV", v.eev},
                              {"v(x)", v.stochastic},
                              {"VSS1(%)", 100.0 * v.vss_rel},
                              {"Time(s)", time_sec}};
    return j;
}

std::string record_to_csv(const ordered_json& record) {
    std::ostringstream head, row;
    head << "config,seed";
    row << record.at("config").get<std::string>() << ","
        << record.at("seed").dump();
    for (const auto& [key, val] : record.at("table").items()) {
        head << "," << key;
        row << "," << val.dump();
    }
    return head.str() + "\n" + row.str() + "\n";
}

std::string aggregate_reports(const std::vector<std::string>& paths) {
    if (paths.empty()) throw std::invalid_argument("aggregate_reports: no input files");
    std::vector<std::string> columns;
    std::map<std::string, std::vector<std::vector<double>>> groups;  // config -> col -> values
    for (const auto& path : paths) {
        const ordered_json j = ordered_json::parse(read_text_file(path));
        if (!j.contains("config") || !j.contains("table"))
            throw std::runtime_error(path + ": not a run record");
        std::vector<std::string> cols;
        for (const auto& [key, val] : j.at("table").items()) {
            (void)val;
            cols.push_back(key);
        }
        if (columns.empty())
            columns = cols;
        else if (columns != cols)
            throw std::runtime_error(path + ": mixed report schemas");
        auto& g = groups[j.at("config").get<std::string>()];
        if (g.empty()) g.resize(columns.size());
        for (size_t c = 0; c < columns.size(); ++c)
            g[c].push_back(j.at("table").at(columns[c]).get<double>());
    }
    std::ostringstream out;
    out << "config,runs";
    for (const auto& c : columns) out << "," << c << "," << c << " ci95";
    out << "\n";
    for (const auto& [config, cols] : groups) {
        const int n = (int)cols.front().size();
        out << config << "," << n;
        for (const auto& values : cols) {
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= n;
            double half = 0.0;
            if (n > 1) {
                double ss = 0.0;
                for (double v : values) ss += (v - mean) * (v - mean);
                const double sd = std::sqrt(ss / (n - 1));
                half = upper_t(0.025, n - 1) * sd / std::sqrt((double)n);
            }
            out << "," << ordered_json(mean).dump() << "," << ordered_json(half).dump();
        }
        out << "\n";
    }
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

}  // namespace endo
