#include "endo/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace endo {

void LinExpr::normalize(double drop_tol) {
    if (terms.empty()) return;
    std::sort(terms.begin(), terms.end(),
              [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
    std::vector<LinTerm> merged;
    merged.reserve(terms.size());
    for (const auto& t : terms) {
        if (!merged.empty() && merged.back().var == t.var)
            merged.back().coef += t.coef;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [&](const LinTerm& t) { return std::abs(t.coef) <= drop_tol; }),
                 merged.end());
    terms = std::move(merged);
}

double evaluate_expr(const LinExpr& e, const Assignment& a) {
    double v = e.constant;
    for (const auto& t : e.terms) v += t.coef * value_of(a, t.var);
    return v;
}

int MipModel::add_var(const std::string& name, VarType type, double lb, double ub) {
    if (lb > ub) throw std::invalid_argument("variable '" + name + "': lb > ub");
    vars_.push_back({name, type, lb, ub});
    return (int)vars_.size() - 1;
}

void MipModel::set_bounds(int var, double lb, double ub) {
    if (lb > ub) throw std::invalid_argument("set_bounds: lb > ub");
    vars_[var].lb = lb;
    vars_[var].ub = ub;
}

int MipModel::add_row(const std::string& name, LinExpr expr, RowSense sense, double rhs) {
    expr.normalize();
    // Fold the expression constant into the rhs so rows store pure linear parts.
    rhs -= expr.constant;
    expr.constant = 0.0;
    for (const auto& t : expr.terms)
        if (t.var < 0 || t.var >= (int)vars_.size())
            throw std::out_of_range("row '" + name + "' references unknown variable");
    rows_.push_back({name, std::move(expr), sense, rhs});
    return (int)rows_.size() - 1;
}

void MipModel::set_objective(LinExpr expr, ObjSense sense) {
    expr.normalize();
    objective_ = std::move(expr);
    obj_sense_ = sense;
}

std::vector<Violation> MipModel::check_feasible(const Assignment& a, double tol) const {
    std::vector<Violation> out;
    for (int i = 0; i < (int)vars_.size(); ++i) {
        double v = value_of(a, i);
        if (v < vars_[i].lb - tol) out.push_back({"bound:" + vars_[i].name, vars_[i].lb - v});
        if (v > vars_[i].ub + tol) out.push_back({"bound:" + vars_[i].name, v - vars_[i].ub});
        if (vars_[i].type != VarType::Continuous) {
            double frac = std::abs(v - std::round(v));
            if (frac > tol) out.push_back({"integrality:" + vars_[i].name, frac});
        }
    }
    for (const auto& r : rows_) {
        double v = evaluate_expr(r.expr, a);
        double viol = 0.0;
        switch (r.sense) {
            case RowSense::LE: viol = v - r.rhs; break;
            case RowSense::GE: viol = r.rhs - v; break;
            case RowSense::EQ: viol = std::abs(v - r.rhs); break;
        }
        if (viol > tol) out.push_back({"row:" + r.name, viol});
    }
    return out;
}

namespace {

std::string lp_name(const std::string& raw, const char* fallback, int idx) {
    std::string s;
    for (char c : raw) {
        if (std::isalnum((unsigned char)c) || c == '_')
            s += c;
        else
            s += '_';
    }
    if (s.empty()) s = fallback + std::to_string(idx);
    return s;
}

void append_expr(std::ostringstream& os, const LinExpr& e, const std::vector<Var>& vars) {
    bool first = true;
    for (const auto& t : e.terms) {
        double c = t.coef;
        if (first) {
            if (c < 0) os << "- ";
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        os << std::abs(c) << " " << lp_name(vars[t.var].name, "x", t.var);
    }
    if (first) os << "0 " << (vars.empty() ? "" : lp_name(vars[0].name, "x", 0));
}

}  // namespace

std::string MipModel::lp_format() const {
    std::ostringstream os;
    os.precision(17);
    os << (obj_sense_ == ObjSense::Minimize ? "Minimize" : "Maximize") << "\n obj: ";
    append_expr(os, objective_, vars_);
    if (objective_.constant != 0.0)
        os << (objective_.constant < 0 ? " - " : " + ") << std::abs(objective_.constant);
    os << "\nSubject To\n";
    for (int i = 0; i < (int)rows_.size(); ++i) {
        const Row& r = rows_[i];
        os << " " << lp_name(r.name, "c", i) << ": ";
        append_expr(os, r.expr, vars_);
        switch (r.sense) {
            case RowSense::LE: os << " <= "; break;
            case RowSense::GE: os << " >= "; break;
            case RowSense::EQ: os << " = "; break;
        }
        os << r.rhs << "\n";
    }
    os << "Bounds\n";
    for (int i = 0; i < (int)vars_.size(); ++i) {
        const Var& v = vars_[i];
        os << " ";
        if (v.lb <= -kInf)
            os << "-inf";
        else
            os << v.lb;
        os << " <= " << lp_name(v.name, "x", i) << " <= ";
        if (v.ub >= kInf)
            os << "+inf";
        else
            os << v.ub;
        os << "\n";
    }
    bool any_bin = false, any_int = false;
    for (const auto& v : vars_) {
        any_bin |= v.type == VarType::Binary;
        any_int |= v.type == VarType::Integer;
    }
    if (any_bin) {
        os << "Binaries\n";
        for (int i = 0; i < (int)vars_.size(); ++i)
            if (vars_[i].type == VarType::Binary) os << " " << lp_name(vars_[i].name, "x", i);
        os << "\n";
    }
    if (any_int) {
        os << "Generals\n";
        for (int i = 0; i < (int)vars_.size(); ++i)
            if (vars_[i].type == VarType::Integer) os << " " << lp_name(vars_[i].name, "x", i);
        os << "\n";
    }
    os << "End\n";
    return os.str();
}

}  // namespace endo
