#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "endo/instance_gen.hpp"
#include "endo/json_io.hpp"
#include "endo/ndfpp.hpp"
#include "endo/solver.hpp"

namespace {

using namespace endo;

// Parse "0..4" or "3" into an inclusive seed list.
std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    const auto pos = text.find("..");
    if (pos == std::string::npos) return {std::stoull(text)};
    const std::uint64_t lo = std::stoull(text.substr(0, pos));
    const std::uint64_t hi = std::stoull(text.substr(pos + 2));
    if (hi < lo) throw CLI::ValidationError("--seeds", "range end before start");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
}

void emit(const ordered_json& record, const std::string& out_path, const std::string& format) {
    const std::string text =
        format == "csv" ? record_to_csv(record) : record.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage stochastic network protection: instance generation, "
                 "sample-average solves, and report aggregation"};
    app.require_subcommand(1);

    // ---- generate -----------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "Generate instance JSON files from a city CSV");
    std::string dataset, gen_out_dir = ".", gen_variant = "selection", seeds_text = "0";
    GenConfig cfg;
    long long nodes_hint = 0;
    gen->add_option("--dataset", dataset, "City CSV (city,state_id,lat,lng,population,home_value)")
        ->required();
    gen->add_option("--threshold", cfg.population_threshold,
                    "Population threshold for node inclusion");
    gen->add_option("--nodes", nodes_hint,
                    "Convenience: 15 => threshold 650000, 48 => threshold 450000");
    gen->add_option("--facilities", cfg.facility_count, "Number of facilities to open");
    gen->add_option("--W", cfg.W, "Number of capacity level steps");
    gen->add_option("--P", cfg.P, "Number of protection levels");
    gen->add_option("--seed", seeds_text, "Seed, or inclusive range like 0..4");
    gen->add_option("--seeds", seeds_text, "Alias of --seed accepting a range");
    gen->add_option("--variant", gen_variant, "selection|binomial|discrete|normal");
    gen->add_option("--out-dir", gen_out_dir, "Output directory");
    gen->add_option("--budget-fraction", cfg.budget_fraction, "Budget as fraction of max spend");
    gen->add_option("--states", cfg.states, "State whitelist (two-letter codes)");
    gen->add_option("--facility-nodes", cfg.facility_nodes,
                    "Explicit facility node indices (bypasses selection)");

    // ---- solve --------------------------------------------------------------
    auto* sol = app.add_subcommand("solve", "Solve an instance and write a run record");
    std::string instance_path, method = "saa", out_path, format = "json", solution_path;
    NdfppSaaOptions sopt;
    sopt.saa.replications = 50;
    sopt.saa.train_scenarios = 750;
    int jobs = 1;
    bool exact_eval = false;
    std::uint64_t vss_eval_seed = 0;
    sol->add_option("instance", instance_path, "Instance JSON path")->required();
    sol->add_option("--method", method, "saa|dep|ev|evaluate|vss");
    sol->add_option("--M", sopt.saa.replications, "Sampled-program replications");
    sol->add_option("--N", sopt.saa.train_scenarios, "Training scenarios per replication");
    sol->add_option("--Nprime", sopt.saa.eval_scenarios, "Evaluation scenarios");
    sol->add_option("--alpha", sopt.saa.alpha, "One-sided confidence level");
    sol->add_option("--seed", sopt.seed, "Run seed");
    sol->add_option("--time-limit", sopt.solve.time_limit_sec, "Per-solve time limit (s)");
    sol->add_option("--mip-gap", sopt.solve.mip_rel_gap, "Relative MIP gap");
    sol->add_option("--jobs", jobs, "Solver threads");
    sol->add_option("--epsilon", sopt.eps, "Strict-inequality margin in emitted rows");
    sol->add_flag("--exact-eval", exact_eval, "Screen candidates by exact expectation");
    sol->add_option("--solution", solution_path,
                    "First-stage solution JSON (required for method=evaluate; for "
                    "method=vss it replaces the sampled solve)");
    sol->add_option("--out", out_path, "Output file (stdout when omitted)");
    sol->add_option("--format", format, "json|csv");

    // ---- report -------------------------------------------------------------
    auto* rep = app.add_subcommand("report", "Aggregate run records into a CSV table");
    std::vector<std::string> report_paths;
    std::string report_out;
    rep->add_option("records", report_paths, "Run record JSON files")->required();
    rep->add_option("--out", report_out, "Output CSV (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            if (nodes_hint == 15) cfg.population_threshold = 650000;
            if (nodes_hint == 48) cfg.population_threshold = 450000;
            const Variant variant = variant_from_string(gen_variant);
            const auto cities = load_cities(dataset, cfg.states);
            const Network net = build_network(cities, cfg.population_threshold);
            for (const std::uint64_t s : parse_seed_range(seeds_text)) {
                GenConfig c = cfg;
                c.seed = s;
                const NdfppInstance inst = gen_parameters(net, c, variant);
                const std::string path = gen_out_dir + "/" + inst.name + ".json";
                save_instance(inst, path);
                std::cout << path << "\n";
            }
            return 0;
        }

        if (*sol) {
            const char* backend_env = std::getenv("ENDOSAA_SOLVER");
            if (backend_env && std::string(backend_env) != "highs") {
                std::cerr << "error: unsupported solver backend '" << backend_env
                          << "' (built-in: highs)\n";
                return 2;
            }
            sopt.solve.threads = jobs;
            sopt.exact_eval = exact_eval;
            const NdfppInstance inst = load_instance(instance_path);
            const auto t0 = std::chrono::steady_clock::now();
            if (method == "saa") {
                const NdfppRunReport run =
                    run_ndfpp_saa(inst, sopt, inst.variant != Variant::Normal);
                emit(saa_record(inst, sopt, run), out_path, format);
            } else if (method == "dep") {
                MipModel m;
                const DepModelRefs refs = build_dep_selection(m, inst);
                const SolveResult res = solve(m, sopt.solve);
                if (res.status != SolveStatus::Optimal)
                    throw std::runtime_error(std::string("dep solve failed: ") +
                                             to_string(res.status));
                const auto fs = extract_first_stage(inst, refs.fsv, res.solution);
                emit(dep_record(inst, res.objective, fs, (int)refs.stages.size(),
                                seconds_since(t0)),
                     out_path, format);
            } else if (method == "ev") {
                MipModel m;
                const EvModelRefs refs = build_ev(m, inst);
                const SolveResult res = solve(m, sopt.solve);
                if (res.status != SolveStatus::Optimal)
                    throw std::runtime_error(std::string("ev solve failed: ") +
                                             to_string(res.status));
                const auto fs = extract_first_stage(inst, refs.fsv, res.solution);
                emit(ev_record(inst, res.objective, fs, seconds_since(t0)), out_path, format);
            } else if (method == "evaluate") {
                if (solution_path.empty())
                    throw CLI::ValidationError("--solution",
                                               "method=evaluate needs a solution file");
                const FirstStageSolution fs =
                    solution_from_json(ordered_json::parse(read_text_file(solution_path)));
                double value = 0.0;
                bool sampled = false;
                if (inst.variant != Variant::Normal) {
                    value = evaluate_solution_exact(inst, fs);
                } else {
                    sampled = true;
                    SecondStageEvaluator eval(inst, fs);
                    const RngStream stream =
                        RngStream(sopt.seed).sub(kEvaluationStreamKey);
                    for (int s = 0; s < sopt.saa.eval_scenarios; ++s)
                        value += eval.cost_of_scenario(draw_scenario(inst, stream, s));
                    value /= sopt.saa.eval_scenarios;
                }
                emit(evaluate_record(inst, fs, value, sampled, sopt.saa.eval_scenarios,
                                     sopt.seed),
                     out_path, format);
            } else if (method == "vss") {
                // With --solution the given plan is scored directly; otherwise a
                // sampled solve first produces the plan to score.
                FirstStageSolution x_bar;
                ordered_json record;
                vss_eval_seed = sopt.seed;
                if (!solution_path.empty()) {
                    x_bar = solution_from_json(
                        ordered_json::parse(read_text_file(solution_path)));
                    const VssReport v = compute_vss(inst, x_bar, sopt.solve, EvOptions{},
                                                    sopt.saa.eval_scenarios, vss_eval_seed);
                    record = vss_record(inst, v, sopt.seed, seconds_since(t0));
                    record["stochastic_solution"] = solution_to_json(x_bar);
                } else {
                    NdfppSaaOptions so = sopt;
                    const NdfppRunReport run =
                        run_ndfpp_saa(inst, so, /*with_exact_value=*/false);
                    x_bar = run.chosen;
                    const VssReport v = compute_vss(inst, x_bar, sopt.solve, EvOptions{},
                                                    sopt.saa.eval_scenarios, vss_eval_seed);
                    record = vss_record(inst, v, sopt.seed, seconds_since(t0));
                    record["stochastic_solution"] = solution_to_json(x_bar);
                    record["saa"] = saa_record(inst, sopt, run);
                }
                emit(record, out_path, format);
            } else {
                throw CLI::ValidationError("--method", "unknown method: " + method);
            }
            return 0;
        }

        if (*rep) {
            const std::string csv = aggregate_reports(report_paths);
            if (report_out.empty())
                std::cout << csv;
            else
                write_text_file(report_out, csv);
            return 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
