#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace endo {

constexpr double kInf = 1e30;

enum class VarType { Continuous, Binary, Integer };
enum class RowSense { LE, GE, EQ };
enum class ObjSense { Minimize, Maximize };

struct LinTerm {
    int var;
    double coef;
};

// Sparse affine expression: sum_i coef_i * var_i + constant.
struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double c) : constant(c) {}

    static LinExpr of_var(int v, double coef = 1.0) {
        LinExpr e;
        e.terms.push_back({v, coef});
        return e;
    }

    LinExpr& add(int v, double coef = 1.0) {
        terms.push_back({v, coef});
        return *this;
    }
    LinExpr& add(const LinExpr& e, double scale = 1.0) {
        for (const auto& t : e.terms) terms.push_back({t.var, t.coef * scale});
        constant += e.constant * scale;
        return *this;
    }
    LinExpr& operator+=(const LinExpr& e) { return add(e, 1.0); }
    LinExpr& operator-=(const LinExpr& e) { return add(e, -1.0); }
    LinExpr& operator*=(double s) {
        for (auto& t : terms) t.coef *= s;
        constant *= s;
        return *this;
    }
    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
    friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

    // Merge duplicate variables, drop coefficients with |coef| <= drop_tol,
    // sort terms by variable id. Idempotent.
    void normalize(double drop_tol = 0.0);
};

// Variable id -> value. Missing ids evaluate as 0.
using Assignment = std::unordered_map<int, double>;

inline double value_of(const Assignment& a, int var, double fallback = 0.0) {
    auto it = a.find(var);
    return it == a.end() ? fallback : it->second;
}

double evaluate_expr(const LinExpr& e, const Assignment& a);

struct Var {
    std::string name;
    VarType type = VarType::Continuous;
    double lb = 0.0;
    double ub = kInf;
};

struct Row {
    std::string name;
    LinExpr expr;
    RowSense sense = RowSense::LE;
    double rhs = 0.0;
};

struct Violation {
    std::string what;   // "bound:<var>", "integrality:<var>", "row:<name>"
    double amount = 0.0;
};

class MipModel {
  public:
    int add_var(const std::string& name, VarType type, double lb, double ub);
    int add_continuous(const std::string& name, double lb = 0.0, double ub = kInf) {
        return add_var(name, VarType::Continuous, lb, ub);
    }
    int add_binary(const std::string& name) { return add_var(name, VarType::Binary, 0.0, 1.0); }
    int add_integer(const std::string& name, double lb, double ub) {
        return add_var(name, VarType::Integer, lb, ub);
    }

    void set_bounds(int var, double lb, double ub);
    // Fix a variable to a constant value (equal bounds).
    void fix_var(int var, double value) { set_bounds(var, value, value); }

    int add_row(const std::string& name, LinExpr expr, RowSense sense, double rhs);

    void set_objective(LinExpr expr, ObjSense sense = ObjSense::Minimize);
    void add_to_objective(const LinExpr& expr) { objective_.add(expr); }

    int num_vars() const { return (int)vars_.size(); }
    int num_rows() const { return (int)rows_.size(); }
    const Var& var(int i) const { return vars_[i]; }
    Var& var(int i) { return vars_[i]; }
    const Row& row(int i) const { return rows_[i]; }
    const std::vector<Var>& vars() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const LinExpr& objective() const { return objective_; }
    ObjSense obj_sense() const { return obj_sense_; }

    double evaluate(const LinExpr& e, const Assignment& a) const { return evaluate_expr(e, a); }

    // Bounds, integrality and row violations beyond tol; empty means feasible.
    std::vector<Violation> check_feasible(const Assignment& a, double tol = 1e-5) const;

    // CPLEX-LP style text dump (debugging / golden tests).
    std::string lp_format() const;

  private:
    std::vector<Var> vars_;
    std::vector<Row> rows_;
    LinExpr objective_;
    ObjSense obj_sense_ = ObjSense::Minimize;
};

}  // namespace endo
