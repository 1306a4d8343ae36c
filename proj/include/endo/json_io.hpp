#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "endo/ndfpp.hpp"

namespace endo {

using ordered_json = nlohmann::ordered_json;

// Instance serialization. Key order and number formatting are stable, so the
// same instance always produces the same bytes.
ordered_json instance_to_json(const NdfppInstance& inst);
NdfppInstance instance_from_json(const ordered_json& j);
void save_instance(const NdfppInstance& inst, const std::string& path);
NdfppInstance load_instance(const std::string& path);

ordered_json solution_to_json(const FirstStageSolution& sol);
FirstStageSolution solution_from_json(const ordered_json& j);

// Run records: one self-describing JSON object per solve, carrying the run
// seed, the full detail, and a flat "table" block whose column names mirror
// the usual reporting headers (|K|, gap-bar(x)(%), Time(s), VSS1(%)).
ordered_json saa_record(const NdfppInstance& inst, const NdfppSaaOptions& opt,
                        const NdfppRunReport& rep);
ordered_json dep_record(const NdfppInstance& inst, double objective,
                        const FirstStageSolution& sol, int scenario_count, double time_sec);
ordered_json ev_record(const NdfppInstance& inst, double objective,
                       const FirstStageSolution& sol, double time_sec);
ordered_json evaluate_record(const NdfppInstance& inst, const FirstStageSolution& sol,
                             double value, bool sampled, int n_eval, std::uint64_t seed);
ordered_json vss_record(const NdfppInstance& inst, const VssReport& v, std::uint64_t seed,
                        double time_sec);

// Single-record CSV: header line (config, seed, table columns) + one row.
std::string record_to_csv(const ordered_json& record);

// Aggregate many JSON run records: group by "config", and report
// mean and 95% confidence half-width (t-based over the records in the
// group) per table column. Files whose table columns differ are rejected.
std::string aggregate_reports(const std::vector<std::string>& paths);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace endo
