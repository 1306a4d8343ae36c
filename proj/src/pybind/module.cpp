// Python bindings: thin JSON-string wrappers over the library's main
// operations (instance generation, the sampled and exact solves, solution
// evaluation, and report aggregation). Structured data crosses the boundary
// as JSON text; the python package decodes it into dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>
#include <string>
#include <vector>

#include "endo/instance_gen.hpp"
#include "endo/json_io.hpp"
#include "endo/ndfpp.hpp"
#include "endo/solver.hpp"

namespace py = pybind11;
using namespace endo;

namespace {

ordered_json parse(const std::string& text, const char* what) {
    try {
        return ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string(what) + ": invalid JSON: " + e.what());
    }
}

NdfppSaaOptions options_from_json(const ordered_json& j) {
    NdfppSaaOptions o;
    o.saa.replications = j.value("replications", o.saa.replications);
    o.saa.train_scenarios = j.value("train_scenarios", o.saa.train_scenarios);
    o.saa.eval_scenarios = j.value("eval_scenarios", o.saa.eval_scenarios);
    o.saa.alpha = j.value("alpha", o.saa.alpha);
    o.seed = j.value("seed", o.seed);
    o.eps = j.value("epsilon", o.eps);
    o.exact_eval = j.value("exact_eval", o.exact_eval);
    o.solve.time_limit_sec = j.value("time_limit_sec", o.solve.time_limit_sec);
    o.solve.mip_rel_gap = j.value("mip_rel_gap", o.solve.mip_rel_gap);
    o.solve.threads = j.value("threads", o.solve.threads);
    return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string generate_instance(const std::string& csv_path, const std::string& config_json) {
    const ordered_json j = parse(config_json, "config");
    GenConfig cfg;
    cfg.population_threshold = j.value("population_threshold", cfg.population_threshold);
    cfg.facility_count = j.value("facility_count", cfg.facility_count);
    cfg.W = j.value("W", cfg.W);
    cfg.P = j.value("P", cfg.P);
    cfg.L = j.value("L", cfg.L);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.budget_fraction = j.value("budget_fraction", cfg.budget_fraction);
    cfg.penalty_multiplier = j.value("penalty_multiplier", cfg.penalty_multiplier);
    cfg.edge_cost_per_km = j.value("edge_cost_per_km", cfg.edge_cost_per_km);
    cfg.cross_impact = j.value("cross_impact", cfg.cross_impact);
    cfg.malfunction = j.value("malfunction", cfg.malfunction);
    if (j.contains("states")) cfg.states = j["states"].get<std::vector<std::string>>();
    if (j.contains("facility_nodes"))
        cfg.facility_nodes = j["facility_nodes"].get<std::vector<int>>();
    if (j.contains("utility_w_profile"))
        cfg.utility_w_profile = j["utility_w_profile"].get<std::vector<double>>();
    const Variant variant = variant_from_string(j.value("variant", std::string("selection")));
    const auto cities = load_cities(csv_path, cfg.states);
    const Network net = build_network(cities, cfg.population_threshold);
    return instance_to_json(gen_parameters(net, cfg, variant)).dump(2);
}

std::string solve_saa_json(const std::string& instance_json, const std::string& options_json) {
    const NdfppInstance inst = instance_from_json(parse(instance_json, "instance"));
    const NdfppSaaOptions opt = options_from_json(parse(options_json, "options"));
    const NdfppRunReport run = run_ndfpp_saa(inst, opt, inst.variant != Variant::Normal);
    return saa_record(inst, opt, run).dump(2);
}

std::string solve_dep_json(const std::string& instance_json, const std::string& options_json) {
    const NdfppInstance inst = instance_from_json(parse(instance_json, "instance"));
    const NdfppSaaOptions opt = options_from_json(parse(options_json, "options"));
    const auto t0 = std::chrono::steady_clock::now();
    MipModel m;
    const DepModelRefs refs = build_dep_selection(m, inst);
    const SolveResult res = solve(m, opt.solve);
    if (res.status != SolveStatus::Optimal)
        throw std::runtime_error(std::string("solve failed: ") + to_string(res.status));
    const auto fs = extract_first_stage(inst, refs.fsv, res.solution);
    return dep_record(inst, res.objective, fs, (int)refs.stages.size(), seconds_since(t0))
        .dump(2);
}

std::string solve_ev_json(const std::string& instance_json, const std::string& options_json) {
    const NdfppInstance inst = instance_from_json(parse(instance_json, "instance"));
    const NdfppSaaOptions opt = options_from_json(parse(options_json, "options"));
    const auto t0 = std::chrono::steady_clock::now();
    MipModel m;
    const EvModelRefs refs = build_ev(m, inst);
    const SolveResult res = solve(m, opt.solve);
    if (res.status != SolveStatus::Optimal)
        throw std::runtime_error(std::string("solve failed: ") + to_string(res.status));
    const auto fs = extract_first_stage(inst, refs.fsv, res.solution);
    return ev_record(inst, res.objective, fs, seconds_since(t0)).dump(2);
}

std::string evaluate_json(const std::string& instance_json, const std::string& solution_json,
                          const std::string& options_json) {
    const NdfppInstance inst = instance_from_json(parse(instance_json, "instance"));
    const FirstStageSolution fs = solution_from_json(parse(solution_json, "solution"));
    const NdfppSaaOptions opt = options_from_json(parse(options_json, "options"));
    double value = 0.0;
    bool sampled = false;
    if (inst.variant != Variant::Normal) {
        value = evaluate_solution_exact(inst, fs);
    } else {
        sampled = true;
        SecondStageEvaluator eval(inst, fs);
        const RngStream stream = RngStream(opt.seed).sub(kEvaluationStreamKey);
        for (int s = 0; s < opt.saa.eval_scenarios; ++s)
            value += eval.cost_of_scenario(draw_scenario(inst, stream, s));
        value /= opt.saa.eval_scenarios;
    }
    return evaluate_record(inst, fs, value, sampled, opt.saa.eval_scenarios, opt.seed).dump(2);
}

std::string vss_json(const std::string& instance_json, const std::string& solution_json,
                     const std::string& options_json) {
    const NdfppInstance inst = instance_from_json(parse(instance_json, "instance"));
    const FirstStageSolution x_bar = solution_from_json(parse(solution_json, "solution"));
    const NdfppSaaOptions opt = options_from_json(parse(options_json, "options"));
    const auto t0 = std::chrono::steady_clock::now();
    const VssReport v = compute_vss(inst, x_bar, opt.solve, EvOptions{},
                                    opt.saa.eval_scenarios, opt.seed);
    return vss_record(inst, v, opt.seed, seconds_since(t0)).dump(2);
}

}  // namespace

PYBIND11_MODULE(_endosaa, m) {
    m.doc() = "Two-stage stochastic network protection under decision-dependent "
              "uncertainty: instance generation, sampled solves, and evaluation.";
    m.def("solver_backend", &backend_name, "Name and version of the MILP backend.");
    m.def("generate", &generate_instance, py::arg("csv_path"), py::arg("config") = "{}",
          py::call_guard<py::gil_scoped_release>(),
          "Build an instance from a city CSV; returns the instance as JSON text.");
    m.def("solve_saa", &solve_saa_json, py::arg("instance"), py::arg("options") = "{}",
          py::call_guard<py::gil_scoped_release>(),
          "Sample-average solve with lower/upper statistical estimators; returns a "
          "run-record JSON.");
    m.def("solve_dep", &solve_dep_json, py::arg("instance"), py::arg("options") = "{}",
          py::call_guard<py::gil_scoped_release>(),
          "Exact extensive solve over the enumerated scenario space (selection "
          "variant); returns a run-record JSON.");
    m.def("solve_ev", &solve_ev_json, py::arg("instance"), py::arg("options") = "{}",
          py::call_guard<py::gil_scoped_release>(),
          "Mean-value solve; returns a run-record JSON.");
    m.def("evaluate", &evaluate_json, py::arg("instance"), py::arg("solution"),
          py::arg("options") = "{}", py::call_guard<py::gil_scoped_release>(),
          "Expected cost of a first-stage solution (exact when the scenario space is "
          "enumerable, sampled otherwise); returns a record JSON.");
    m.def("vss", &vss_json, py::arg("instance"), py::arg("solution"),
          py::arg("options") = "{}", py::call_guard<py::gil_scoped_release>(),
          "Value of the stochastic solution against the mean-value solution; returns "
          "a record JSON.");
    m.def(
        "aggregate",
        [](const std::vector<std::string>& paths) { return aggregate_reports(paths); },
        py::arg("record_paths"), py::call_guard<py::gil_scoped_release>(),
        "Aggregate run-record JSON files into a CSV table (mean and confidence "
        "half-width per column, grouped by configuration).");
}
