#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "endo/model.hpp"
#include "endo/solver.hpp"

using namespace endo;

TEST_CASE("continuous minimum sits on the binding bound") {
    MipModel m;
    const int x = m.add_continuous("x");
    m.add_row("lb", LinExpr::of_var(x), RowSense::GE, 3.0);
    m.set_objective(LinExpr::of_var(x));
    const auto r = solve(m);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(3.0));
    CHECK(value_of(r.solution, x) == doctest::Approx(3.0));
    CHECK(m.check_feasible(r.solution, 1e-5).empty());
}

TEST_CASE("binary maximization via negated objective") {
    MipModel m;
    const int x = m.add_binary("x");
    m.set_objective(LinExpr::of_var(x, -1.0));
    const auto r = solve(m);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-1.0));
    CHECK(value_of(r.solution, x) == doctest::Approx(1.0));
}

TEST_CASE("contradictory rows are infeasible") {
    MipModel m;
    const int x = m.add_continuous("x", -kInf, kInf);
    m.add_row("ge", LinExpr::of_var(x), RowSense::GE, 1.0);
    m.add_row("le", LinExpr::of_var(x), RowSense::LE, 0.0);
    const auto r = solve(m);
    CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("maximize sense is honored") {
    MipModel m;
    const int x = m.add_continuous("x", 0.0, 5.0);
    m.set_objective(LinExpr::of_var(x), ObjSense::Maximize);
    const auto r = solve(m);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(5.0));
}

TEST_CASE("relaxed binary settles at the fractional bound") {
    MipModel m;
    const int x = m.add_binary("x");
    m.add_row("lb", LinExpr::of_var(x), RowSense::GE, 0.4);
    m.set_objective(LinExpr::of_var(x));
    SolveOptions lp;
    lp.relax_integrality = true;
    const auto r = solve(m, lp);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(0.4));
    // The integer version must round up.
    const auto ri = solve(m);
    REQUIRE(ri.status == SolveStatus::Optimal);
    CHECK(ri.objective == doctest::Approx(1.0));
}

TEST_CASE("relaxation never exceeds the integer optimum (minimization)") {
    // Small covering model with fractional LP optimum.
    MipModel m;
    const int a = m.add_binary("a");
    const int b = m.add_binary("b");
    const int c = m.add_binary("c");
    m.add_row("r1", LinExpr::of_var(a) + LinExpr::of_var(b), RowSense::GE, 1.0);
    m.add_row("r2", LinExpr::of_var(b) + LinExpr::of_var(c), RowSense::GE, 1.0);
    m.add_row("r3", LinExpr::of_var(a) + LinExpr::of_var(c), RowSense::GE, 1.0);
    m.set_objective(LinExpr::of_var(a) + LinExpr::of_var(b) + LinExpr::of_var(c));
    SolveOptions lp;
    lp.relax_integrality = true;
    const auto rl = solve(m, lp);
    const auto ri = solve(m);
    REQUIRE(rl.status == SolveStatus::Optimal);
    REQUIRE(ri.status == SolveStatus::Optimal);
    CHECK(rl.objective == doctest::Approx(1.5));
    CHECK(ri.objective == doctest::Approx(2.0));
    CHECK(rl.objective <= ri.objective + 1e-9);
}

TEST_CASE("pure LP: relaxation equals the integer call") {
    MipModel m;
    const int x = m.add_continuous("x", 0.0, 10.0);
    const int y = m.add_continuous("y", 0.0, 10.0);
    m.add_row("r", LinExpr::of_var(x) + 2.0 * LinExpr::of_var(y), RowSense::GE, 4.0);
    m.set_objective(3.0 * LinExpr::of_var(x) + LinExpr::of_var(y));
    SolveOptions lp;
    lp.relax_integrality = true;
    const auto r1 = solve(m);
    const auto r2 = solve(m, lp);
    REQUIRE(r1.status == SolveStatus::Optimal);
    REQUIRE(r2.status == SolveStatus::Optimal);
    CHECK(r1.objective == doctest::Approx(r2.objective));
}

TEST_CASE("infeasible LP relaxation reports infeasible") {
    MipModel m;
    const int x = m.add_binary("x");
    m.add_row("ge", LinExpr::of_var(x), RowSense::GE, 2.0);
    SolveOptions lp;
    lp.relax_integrality = true;
    CHECK(solve(m, lp).status == SolveStatus::Infeasible);
}

TEST_CASE("repeat solves are bit-stable on one thread") {
    MipModel m;
    const int a = m.add_binary("a");
    const int b = m.add_binary("b");
    const int y = m.add_continuous("y", 0.0, 4.0);
    m.add_row("r1", LinExpr::of_var(a) + LinExpr::of_var(b) + LinExpr::of_var(y), RowSense::GE,
              2.3);
    m.add_row("r2", 2.0 * LinExpr::of_var(a) - LinExpr::of_var(y), RowSense::LE, 1.0);
    m.set_objective(1.7 * LinExpr::of_var(a) + 1.1 * LinExpr::of_var(b) +
                    0.9 * LinExpr::of_var(y));
    const auto r1 = solve(m);
    const auto r2 = solve(m);
    REQUIRE(r1.status == SolveStatus::Optimal);
    REQUIRE(r2.status == SolveStatus::Optimal);
    CHECK(std::abs(r1.objective - r2.objective) <= 1e-9);
}

TEST_CASE("optimal assignments satisfy the model at reporting tolerance") {
    MipModel m;
    const int x = m.add_integer("x", 0.0, 9.0);
    const int y = m.add_continuous("y", 0.0, 9.0);
    m.add_row("r1", 2.0 * LinExpr::of_var(x) + LinExpr::of_var(y), RowSense::GE, 7.0);
    m.add_row("r2", LinExpr::of_var(x) - LinExpr::of_var(y), RowSense::LE, 1.5);
    m.set_objective(LinExpr::of_var(x) + LinExpr::of_var(y));
    const auto r = solve(m);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(m.check_feasible(r.solution, 1e-5).empty());
    CHECK(m.evaluate(m.objective(), r.solution) == doctest::Approx(r.objective));
}

TEST_CASE("status text and backend name are populated") {
    CHECK(std::string(to_string(SolveStatus::Optimal)) == "optimal");
    CHECK(std::string(to_string(SolveStatus::Infeasible)) == "infeasible");
    CHECK(!backend_name().empty());
}
