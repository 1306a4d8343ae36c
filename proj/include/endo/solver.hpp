#pragma once

#include <string>

#include "endo/model.hpp"

namespace endo {

enum class SolveStatus { Optimal, Infeasible, Unbounded, TimeLimit, IterationLimit, Error };

struct SolveOptions {
    double time_limit_sec = 1e30;
    double mip_rel_gap = 1e-9;
    int threads = 1;
    bool verbose = false;
    bool relax_integrality = false;  // solve the LP relaxation instead
    int random_seed = 0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    Assignment solution;
    double runtime_sec = 0.0;
    double mip_gap = 0.0;
    long long nodes = 0;
    std::string detail;  // backend status text
};

const char* to_string(SolveStatus s);

// Solve with the built-in backend (HiGHS).
SolveResult solve(const MipModel& model, const SolveOptions& opts = {});

// Name/version of the linked MILP backend.
std::string backend_name();

}  // namespace endo
