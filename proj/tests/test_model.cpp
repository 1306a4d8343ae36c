#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "endo/model.hpp"

using namespace endo;

TEST_CASE("evaluate_expr: empty expression is zero") {
    LinExpr e;
    Assignment a;
    CHECK(evaluate_expr(e, a) == doctest::Approx(0.0));
}

TEST_CASE("evaluate_expr: affine expression") {
    MipModel m;
    const int x = m.add_continuous("x");
    LinExpr e = 2.0 * LinExpr::of_var(x) + LinExpr(3.0);
    Assignment a{{x, 1.0}};
    CHECK(evaluate_expr(e, a) == doctest::Approx(5.0));
}

TEST_CASE("evaluate_expr: cancelling terms vanish after normalization") {
    MipModel m;
    const int x = m.add_continuous("x");
    LinExpr e = LinExpr::of_var(x) - LinExpr::of_var(x);
    Assignment a{{x, 7.0}};
    CHECK(evaluate_expr(e, a) == doctest::Approx(0.0));
    e.normalize();
    CHECK(e.terms.empty());
    CHECK(evaluate_expr(e, a) == doctest::Approx(0.0));
}

TEST_CASE("normalize merges duplicates, drops zeros, sorts; idempotent") {
    LinExpr e;
    e.add(3, 1.0).add(1, 2.0).add(3, -0.25).add(2, 0.0);
    e.constant = 4.0;
    e.normalize();
    REQUIRE(e.terms.size() == 2);
    CHECK(e.terms[0].var == 1);
    CHECK(e.terms[0].coef == doctest::Approx(2.0));
    CHECK(e.terms[1].var == 3);
    CHECK(e.terms[1].coef == doctest::Approx(0.75));
    const LinExpr snapshot = e;
    e.normalize();
    REQUIRE(e.terms.size() == snapshot.terms.size());
    for (size_t i = 0; i < e.terms.size(); ++i) {
        CHECK(e.terms[i].var == snapshot.terms[i].var);
        CHECK(e.terms[i].coef == doctest::Approx(snapshot.terms[i].coef));
    }
}

TEST_CASE("evaluate_expr unchanged by normalization") {
    LinExpr e;
    e.add(0, 1.5).add(1, -2.0).add(0, 0.5);
    e.constant = 1.0;
    Assignment a{{0, 2.0}, {1, 3.0}};
    const double before = evaluate_expr(e, a);
    e.normalize();
    CHECK(evaluate_expr(e, a) == doctest::Approx(before));
}

TEST_CASE("value_of falls back for missing ids") {
    Assignment a{{1, 2.5}};
    CHECK(value_of(a, 1) == doctest::Approx(2.5));
    CHECK(value_of(a, 9) == doctest::Approx(0.0));
    CHECK(value_of(a, 9, -1.0) == doctest::Approx(-1.0));
}

TEST_CASE("check_feasible: satisfied row gives no violations") {
    MipModel m;
    const int x = m.add_continuous("x");
    m.add_row("pos", LinExpr::of_var(x), RowSense::GE, 0.0);
    CHECK(m.check_feasible({{x, 1.0}}).empty());
}

TEST_CASE("check_feasible: violated row is reported with its overshoot") {
    MipModel m;
    const int x = m.add_continuous("x");
    m.add_row("cap", LinExpr::of_var(x), RowSense::LE, 0.5);
    const auto v = m.check_feasible({{x, 1.0}}, 1e-6);
    REQUIRE(v.size() == 1);
    CHECK(v[0].what == "row:cap");
    CHECK(v[0].amount == doctest::Approx(0.5));
}

TEST_CASE("check_feasible: empty model is feasible") {
    MipModel m;
    CHECK(m.check_feasible({}).empty());
}

TEST_CASE("check_feasible: bound and integrality violations") {
    MipModel m;
    const int x = m.add_continuous("x", 0.0, 1.0);
    const int b = m.add_binary("b");
    {
        const auto v = m.check_feasible({{x, 2.0}, {b, 0.0}});
        REQUIRE(v.size() == 1);
        CHECK(v[0].what == "bound:x");
        CHECK(v[0].amount == doctest::Approx(1.0));
    }
    {
        const auto v = m.check_feasible({{x, 0.5}, {b, 0.4}});
        REQUIRE(v.size() == 1);
        CHECK(v[0].what == "integrality:b");
        CHECK(v[0].amount == doctest::Approx(0.4));
    }
}

TEST_CASE("check_feasible: EQ rows violated on both sides") {
    MipModel m;
    const int x = m.add_continuous("x", -10.0, 10.0);
    m.add_row("eq", LinExpr::of_var(x), RowSense::EQ, 3.0);
    CHECK(m.check_feasible({{x, 3.0}}).empty());
    CHECK(m.check_feasible({{x, 4.0}}).size() == 1);
    CHECK(m.check_feasible({{x, 2.0}}).size() == 1);
    // Within tolerance passes.
    CHECK(m.check_feasible({{x, 3.0 + 1e-7}}, 1e-5).empty());
}

TEST_CASE("model bookkeeping: vars, rows, bounds, objective") {
    MipModel m;
    const int x = m.add_continuous("x", 1.0, 4.0);
    const int b = m.add_binary("b");
    const int k = m.add_integer("k", -2.0, 7.0);
    CHECK(m.num_vars() == 3);
    CHECK(m.var(x).type == VarType::Continuous);
    CHECK(m.var(b).type == VarType::Binary);
    CHECK(m.var(b).lb == doctest::Approx(0.0));
    CHECK(m.var(b).ub == doctest::Approx(1.0));
    CHECK(m.var(k).type == VarType::Integer);

    m.set_bounds(x, 2.0, 3.0);
    CHECK(m.var(x).lb == doctest::Approx(2.0));
    m.fix_var(x, 2.5);
    CHECK(m.var(x).lb == doctest::Approx(2.5));
    CHECK(m.var(x).ub == doctest::Approx(2.5));

    m.add_row("r", LinExpr::of_var(x) + LinExpr::of_var(k), RowSense::LE, 5.0);
    CHECK(m.num_rows() == 1);
    CHECK(m.row(0).name == "r");

    m.set_objective(LinExpr::of_var(x), ObjSense::Maximize);
    CHECK(m.obj_sense() == ObjSense::Maximize);
    m.add_to_objective(LinExpr::of_var(b, 2.0));
    Assignment a{{x, 2.5}, {b, 1.0}, {k, 0.0}};
    CHECK(m.evaluate(m.objective(), a) == doctest::Approx(4.5));
}

TEST_CASE("lp_format names every variable and row") {
    MipModel m;
    const int x = m.add_continuous("xvar", 0.0, 2.0);
    const int b = m.add_binary("bflag");
    m.add_row("capacity", LinExpr::of_var(x) + 3.0 * LinExpr::of_var(b), RowSense::LE, 2.0);
    m.set_objective(LinExpr::of_var(x));
    const std::string text = m.lp_format();
    CHECK(text.find("xvar") != std::string::npos);
    CHECK(text.find("bflag") != std::string::npos);
    CHECK(text.find("capacity") != std::string::npos);
}
