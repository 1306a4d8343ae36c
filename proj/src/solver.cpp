#include "endo/solver.hpp"

#include <Highs.h>

#include <chrono>

namespace endo {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::TimeLimit: return "time_limit";
        case SolveStatus::IterationLimit: return "iteration_limit";
        case SolveStatus::Error: return "error";
    }
    return "error";
}

std::string backend_name() {
    return "HiGHS " + std::to_string(HIGHS_VERSION_MAJOR) + "." +
           std::to_string(HIGHS_VERSION_MINOR) + "." + std::to_string(HIGHS_VERSION_PATCH);
}

SolveResult solve(const MipModel& model, const SolveOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();

    HighsModel hm;
    HighsLp& lp = hm.lp_;
    const int n = model.num_vars();
    const int m = model.num_rows();
    lp.num_col_ = n;
    lp.num_row_ = m;
    lp.sense_ = model.obj_sense() == ObjSense::Minimize ? ::ObjSense::kMinimize
                                                        : ::ObjSense::kMaximize;
    lp.offset_ = model.objective().constant;
    lp.col_cost_.assign(n, 0.0);
    for (const auto& t : model.objective().terms) lp.col_cost_[t.var] += t.coef;

    const double inf = kHighsInf;
    lp.col_lower_.resize(n);
    lp.col_upper_.resize(n);
    bool any_integer = false;
    lp.integrality_.assign(n, HighsVarType::kContinuous);
    for (int i = 0; i < n; ++i) {
        const Var& v = model.var(i);
        lp.col_lower_[i] = v.lb <= -kInf ? -inf : v.lb;
        lp.col_upper_[i] = v.ub >= kInf ? inf : v.ub;
        if (v.type != VarType::Continuous && !opts.relax_integrality) {
            lp.integrality_[i] = HighsVarType::kInteger;
            any_integer = true;
        }
    }
    if (!any_integer) lp.integrality_.clear();

    lp.row_lower_.resize(m);
    lp.row_upper_.resize(m);
    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    auto& start = lp.a_matrix_.start_;
    auto& index = lp.a_matrix_.index_;
    auto& value = lp.a_matrix_.value_;
    start.assign(1, 0);
    for (int i = 0; i < m; ++i) {
        const Row& r = model.row(i);
        switch (r.sense) {
            case RowSense::LE:
                lp.row_lower_[i] = -inf;
                lp.row_upper_[i] = r.rhs;
                break;
            case RowSense::GE:
                lp.row_lower_[i] = r.rhs;
                lp.row_upper_[i] = inf;
                break;
            case RowSense::EQ:
                lp.row_lower_[i] = r.rhs;
                lp.row_upper_[i] = r.rhs;
                break;
        }
        for (const auto& t : r.expr.terms) {
            index.push_back(t.var);
            value.push_back(t.coef);
        }
        start.push_back((HighsInt)index.size());
    }

    Highs highs;
    highs.setOptionValue("output_flag", opts.verbose);
    highs.setOptionValue("threads", opts.threads);
    highs.setOptionValue("random_seed", opts.random_seed);
    if (opts.time_limit_sec < 1e30) highs.setOptionValue("time_limit", opts.time_limit_sec);
    highs.setOptionValue("mip_rel_gap", opts.mip_rel_gap);

    SolveResult out;
    if (highs.passModel(hm) != HighsStatus::kOk) {
        out.detail = "passModel failed";
        return out;
    }
    if (highs.run() == HighsStatus::kError) {
        out.detail = "run failed";
        return out;
    }

    const HighsModelStatus st = highs.getModelStatus();
    out.detail = highs.modelStatusToString(st);
    switch (st) {
        case HighsModelStatus::kOptimal: out.status = SolveStatus::Optimal; break;
        case HighsModelStatus::kInfeasible: out.status = SolveStatus::Infeasible; break;
        case HighsModelStatus::kUnbounded:
        case HighsModelStatus::kUnboundedOrInfeasible: out.status = SolveStatus::Unbounded; break;
        case HighsModelStatus::kTimeLimit: out.status = SolveStatus::TimeLimit; break;
        case HighsModelStatus::kIterationLimit:
        case HighsModelStatus::kSolutionLimit: out.status = SolveStatus::IterationLimit; break;
        default: out.status = SolveStatus::Error; break;
    }

    const HighsInfo& info = highs.getInfo();
    if (out.status == SolveStatus::Optimal || out.status == SolveStatus::TimeLimit ||
        out.status == SolveStatus::IterationLimit) {
        if (info.primal_solution_status == kSolutionStatusFeasible) {
            out.objective = info.objective_function_value;
            const HighsSolution& sol = highs.getSolution();
            out.solution.reserve(n);
            for (int i = 0; i < n; ++i) out.solution.emplace(i, sol.col_value[i]);
        } else if (out.status != SolveStatus::Optimal) {
            out.status = SolveStatus::Error;
            out.detail += " (no feasible solution)";
        }
        out.mip_gap = info.mip_gap >= 0 && info.mip_gap < inf ? info.mip_gap : 0.0;
        out.nodes = info.mip_node_count >= 0 ? info.mip_node_count : 0;
    }

    out.runtime_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace endo
