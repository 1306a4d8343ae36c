#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "endo/model.hpp"
#include "endo/quantiles.hpp"
#include "endo/rng.hpp"
#include "endo/solver.hpp"
#include "endo/transforms.hpp"

using namespace endo;

namespace {

// Min and max of an expression over the model's feasible set; equal values
// mean the constraint system pins the expression completely.
std::pair<double, double> forced_range(MipModel& m, const LinExpr& e) {
    m.set_objective(e, ObjSense::Minimize);
    const auto lo = solve(m);
    REQUIRE(lo.status == SolveStatus::Optimal);
    m.set_objective(e, ObjSense::Maximize);
    const auto hi = solve(m);
    REQUIRE(hi.status == SolveStatus::Optimal);
    return {lo.objective, hi.objective};
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const int n = (int)a.size();
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double num = 0, va = 0, vb = 0;
    for (int i = 0; i < n; ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(va * vb);
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (size_t k = 0; k < idx.size(); ++k) r[idx[k]] = (double)k;
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Inverse-CDF primitives
// ---------------------------------------------------------------------------

TEST_CASE("discrete inverse walks the pmf with left-closed cells") {
    const std::vector<double> pmf{0.2, 0.5, 0.3};
    CHECK(eval_discrete_inverse(pmf, 0.6) == 1);
    CHECK(eval_discrete_inverse(pmf, 0.95) == 2);
    CHECK(eval_discrete_inverse(pmf, 0.0) == 0);
    CHECK(eval_discrete_inverse(pmf, 0.1999) == 0);
    // Cell boundaries belong to the next index: cells are [0,.2), [.2,.7), [.7,1).
    CHECK(eval_discrete_inverse(pmf, 0.2) == 1);
    CHECK(eval_discrete_inverse(pmf, 0.7) == 2);
    CHECK(eval_discrete_inverse({1.0}, 0.42) == 0);
}

TEST_CASE("generalized inverse on cumulative values") {
    const std::vector<double> cdf{0.2, 0.7, 1.0};
    CHECK(eval_generalized_inverse(cdf, 0.6) == 1);
    CHECK(eval_generalized_inverse(cdf, 0.0) == 0);
    CHECK(eval_generalized_inverse(cdf, 1.0) == 2);
    CHECK(eval_generalized_inverse(cdf, 0.2) == 0);  // ties resolve to the smallest index
    CHECK(eval_generalized_inverse(cdf, 0.20001) == 1);
}

TEST_CASE("bernoulli indicator: success strictly below the probability") {
    CHECK(eval_bernoulli(0.5, 0.3) == doctest::Approx(1.0));
    CHECK(eval_bernoulli(0.5, 0.5) == doctest::Approx(0.0));
    CHECK(eval_bernoulli(0.5, 0.7) == doctest::Approx(0.0));
    CHECK(eval_bernoulli(1.0, 0.999) == doctest::Approx(1.0));
    CHECK(eval_bernoulli(0.0, 0.001) == doctest::Approx(0.0));
}

TEST_CASE("closed-form quantile transforms") {
    CHECK(transform_uniform(2.0, 6.0, 0.25) == doctest::Approx(3.0));
    CHECK(transform_exponential(1.0, 1.0 - std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(transform_exponential(0.5, 0.5) == doctest::Approx(1.3862943611198906).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// Exogenous distributions
// ---------------------------------------------------------------------------

TEST_CASE("exo_sample agrees with the scalar transforms") {
    const double u[3] = {0.25, 0.6, 0.4};
    CHECK(exo_sample(UniformDist{2.0, 6.0}, u) == doctest::Approx(3.0));
    CHECK(exo_sample(DiscreteDist{{10, 20, 30}, {0.2, 0.5, 0.3}}, u + 1) == doctest::Approx(20.0));
    CHECK(exo_sample(BernoulliDist{0.5}, u) == doctest::Approx(1.0));
    const double ub[3] = {0.1, 0.6, 0.4};
    CHECK(exo_sample(BinomialDist{3, 0.5, 1.0}, ub) == doctest::Approx(2.0));
    CHECK(exo_sample(BinomialDist{3, 0.5, 2.5}, ub) == doctest::Approx(5.0));
    CHECK(exo_sample(NormalDist{5.0, 2.0}, u) ==
          doctest::Approx(5.0 + 2.0 * normal_quantile(0.25)).epsilon(1e-12));
    const double ug = std::exp(-1.0);
    const double ue[1] = {ug};
    CHECK(exo_sample(GumbelDist{0.0, 1.0}, ue) == doctest::Approx(0.0).scale(1));
    CHECK(exo_sample(GevDist{0.0, 1.0, 0.0}, ue) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("exo_n_uniforms: one per draw except one per binomial trial") {
    CHECK(exo_n_uniforms(UniformDist{}) == 1);
    CHECK(exo_n_uniforms(NormalDist{}) == 1);
    CHECK(exo_n_uniforms(BinomialDist{5, 0.5, 1.0}) == 5);
}

TEST_CASE("exo_pmf enumerates discrete support") {
    std::vector<double> values, probs;
    exo_pmf(BinomialDist{2, 0.5, 2.0}, values, probs);
    REQUIRE(values.size() == 3);
    CHECK(values[0] == doctest::Approx(0.0));
    CHECK(values[1] == doctest::Approx(2.0));
    CHECK(values[2] == doctest::Approx(4.0));
    CHECK(probs[0] == doctest::Approx(0.25));
    CHECK(probs[1] == doctest::Approx(0.5));
    CHECK(probs[2] == doctest::Approx(0.25));
    CHECK(exo_is_discrete(BinomialDist{2, 0.5, 2.0}));
    CHECK(!exo_is_discrete(NormalDist{}));
    CHECK_THROWS(exo_pmf(NormalDist{}, values, probs));
}

TEST_CASE("exo_cdf matches closed forms") {
    CHECK(exo_cdf(UniformDist{0.0, 2.0}, 0.5) == doctest::Approx(0.25));
    CHECK(exo_cdf(ExponentialDist{1.0}, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(exo_cdf(NormalDist{0.0, 1.0}, 0.0) == doctest::Approx(0.5));
    CHECK(exo_cdf(DiscreteDist{{1, 2}, {0.4, 0.6}}, 1.5) == doctest::Approx(0.4));
    CHECK(exo_cdf(BinomialDist{2, 0.5, 1.0}, 1.0) == doctest::Approx(0.75));
}

TEST_CASE("binomial pmf product form") {
    CHECK(binomial_pmf(2, 0.5, 0) == doctest::Approx(0.25));
    CHECK(binomial_pmf(2, 0.5, 1) == doctest::Approx(0.5));
    CHECK(binomial_pmf(4, 0.3, 2) == doctest::Approx(6 * 0.09 * 0.49));
    double total = 0;
    for (int k = 0; k <= 7; ++k) total += binomial_pmf(7, 0.37, k);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// Decision-dependent transforms (closed-form oracle)
// ---------------------------------------------------------------------------

TEST_CASE("transform_value: selection picks the active candidate") {
    SelectionSpec s;
    s.choice_vars = {0, 1};
    s.candidates = {DiscreteDist{{3.0}, {1.0}}, DiscreteDist{{7.0}, {1.0}}};
    CHECK(transform_value(s, {{0, 1.0}, {1, 0.0}}, {0.5, 0.5}) == doctest::Approx(3.0));
    CHECK(transform_value(s, {{0, 0.0}, {1, 1.0}}, {0.5, 0.5}) == doctest::Approx(7.0));
}

TEST_CASE("transform_value: location-scale families") {
    LocationScaleSpec n;
    n.mu = LinExpr(5.0);
    n.sigma = LinExpr(2.0);
    CHECK(transform_value(n, {}, {normal_cdf(1.5)}) == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(transform_value(n, {}, {0.5}) == doctest::Approx(5.0));

    LocationScaleSpec g;
    g.mu = LinExpr(0.0);
    g.sigma = LinExpr(1.0);
    g.family = LocationScaleSpec::Family::Gev;
    g.shape = 0.0;
    CHECK(transform_value(g, {}, {std::exp(-1.0)}) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("transform_value: truncated normal clamps the standard draw") {
    LocationScaleSpec n;
    n.mu = LinExpr(0.0);
    n.sigma = LinExpr(1.0);
    n.truncate_pm4 = true;
    CHECK(transform_value(n, {}, {1e-9}) == doctest::Approx(-4.0));
    CHECK(transform_value(n, {}, {1.0 - 1e-9}) == doctest::Approx(4.0));
}

TEST_CASE("transform_value: affine bernoulli and binomial") {
    BernoulliSpec br;
    br.prob = LinExpr::of_var(0, 0.5);  // phi = 0.5 * x0
    CHECK(transform_value(br, {{0, 1.0}}, {0.3}) == doctest::Approx(1.0));
    CHECK(transform_value(br, {{0, 1.0}}, {0.5}) == doctest::Approx(0.0));

    BinomialSpec bn;
    bn.trials = 3;
    bn.prob = LinExpr(0.5);
    CHECK(transform_value(bn, {}, {0.1, 0.6, 0.4}) == doctest::Approx(2.0));
}

TEST_CASE("sampled binomial mean approaches trials*phi") {
    BinomialSpec bn;
    bn.trials = 4;
    bn.prob = LinExpr(0.3);
    RngStream s(77);
    const auto draws = sample_transformed(bn, {}, s, 100000);
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
    CHECK(mean == doctest::Approx(1.2).epsilon(0.02));
}

TEST_CASE("a million standard normal draws center on zero") {
    LocationScaleSpec n;
    n.mu = LinExpr(0.0);
    n.sigma = LinExpr(1.0);
    RngStream s(123);
    const auto draws = sample_transformed(n, {}, s, 1000000);
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
    CHECK(std::abs(mean) < 0.005);
    double var = 0;
    for (double d : draws) var += (d - mean) * (d - mean);
    var /= draws.size();
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("sample_transformed is reproducible bit for bit") {
    DiscreteInverseSpec d;
    d.values = {0.0, 1.0, 2.0};
    d.pmf = {LinExpr(0.3), LinExpr(0.4), LinExpr(0.3)};
    RngStream s(5);
    const auto a = sample_transformed(d, {}, s, 1000);
    const auto b = sample_transformed(d, {}, s, 1000);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("pmf_at and cdf_at at a fixed first stage") {
    DiscreteInverseSpec d;
    d.values = {5.0, 6.0};
    d.pmf = {LinExpr(0.5) + LinExpr::of_var(0, 0.4), LinExpr(0.5) + LinExpr::of_var(0, -0.4)};
    const auto p1 = pmf_at(d, {{0, 1.0}});
    REQUIRE(p1.values.size() == 2);
    CHECK(p1.probs[0] == doctest::Approx(0.9));
    CHECK(p1.probs[1] == doctest::Approx(0.1));
    CHECK(cdf_at(d, {{0, 1.0}}, 5.0) == doctest::Approx(0.9));
    CHECK(cdf_at(d, {{0, 1.0}}, 4.9) == doctest::Approx(0.0).scale(1));
    CHECK(cdf_at(d, {{0, 1.0}}, 6.0) == doctest::Approx(1.0));

    SelectionSpec s;
    s.choice_vars = {0, 1};
    s.candidates = {BernoulliDist{0.25}, BernoulliDist{0.75}};
    const auto ps = pmf_at(s, {{0, 0.0}, {1, 1.0}});
    REQUIRE(ps.values.size() == 2);
    CHECK(ps.probs[1] == doctest::Approx(0.75));
}

TEST_CASE("spec_n_uniforms counts per-spec draw budgets") {
    SelectionSpec s;
    s.choice_vars = {0, 1};
    s.candidates = {DiscreteDist{{1.0}, {1.0}}, BinomialDist{2, 0.5, 1.0}};
    CHECK(spec_n_uniforms(s) == 3);
    CHECK(spec_is_discrete(s));
    BinomialSpec bn;
    bn.trials = 4;
    CHECK(spec_n_uniforms(bn) == 4);
    LocationScaleSpec ls;
    CHECK(spec_n_uniforms(ls) == 1);
    CHECK(!spec_is_discrete(ls));
}

// ---------------------------------------------------------------------------
// Gaussian copula
// ---------------------------------------------------------------------------

TEST_CASE("independent copula components are uncorrelated") {
    CopulaSpec spec;
    spec.dim = 2;  // empty correlation = identity
    RngStream s(11);
    const int n = 100000;
    std::vector<double> u1(n), u2(n);
    for (int i = 0; i < n; ++i) {
        const auto u = gaussian_copula_sample(spec, s, i);
        u1[i] = u[0];
        u2[i] = u[1];
    }
    CHECK(std::abs(pearson(u1, u2)) < 0.02);
}

TEST_CASE("perfect correlation collapses the components") {
    CopulaSpec spec;
    spec.dim = 2;
    spec.correlation = {{1.0, 1.0}, {1.0, 1.0}};
    RngStream s(12);
    for (int i = 0; i < 100; ++i) {
        const auto u = gaussian_copula_sample(spec, s, i);
        CHECK(u[0] == doctest::Approx(u[1]).epsilon(1e-12));
    }
}

TEST_CASE("normal correlation maps to the known Spearman value") {
    CopulaSpec spec;
    spec.dim = 2;
    spec.correlation = {{1.0, 0.8}, {0.8, 1.0}};
    RngStream s(13);
    const int n = 100000;
    std::vector<double> u1(n), u2(n);
    for (int i = 0; i < n; ++i) {
        const auto u = gaussian_copula_sample(spec, s, i);
        u1[i] = u[0];
        u2[i] = u[1];
    }
    const double rho_s = pearson(ranks(u1), ranks(u2));
    const double expected = (6.0 / 3.14159265358979323846) * std::asin(0.8 / 2.0);
    CHECK(rho_s == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("copula draws are keyed by counter") {
    CopulaSpec spec;
    spec.dim = 3;
    RngStream s(14);
    const auto a = gaussian_copula_sample(spec, s, 0);
    const auto b = gaussian_copula_sample(spec, s, 1);
    const auto a2 = gaussian_copula_sample(spec, s, 0);
    CHECK(a != b);
    CHECK(a == a2);
}

TEST_CASE("cholesky of a PD matrix reproduces it") {
    const std::vector<std::vector<double>> a{{4.0, 2.0}, {2.0, 3.0}};
    const auto L = cholesky_psd(a);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double v = 0;
            for (int k = 0; k < 2; ++k) v += L[i][k] * L[j][k];
            CHECK(v == doctest::Approx(a[i][j]).epsilon(1e-10));
        }
}

// ---------------------------------------------------------------------------
// MILP emissions: at binary first stages the fragments pin the value exactly
// ---------------------------------------------------------------------------

TEST_CASE("mccormick product is exact at binary points and loose in between") {
    // b = 1 forces tau = z.
    {
        MipModel m;
        const int b = m.add_binary("b");
        m.fix_var(b, 1.0);
        const int tau = mccormick_product(m, b, LinExpr(3.0), 10.0, "tau");
        const auto [lo, hi] = forced_range(m, LinExpr::of_var(tau));
        CHECK(lo == doctest::Approx(3.0));
        CHECK(hi == doctest::Approx(3.0));
    }
    // b = 0 forces tau = 0.
    {
        MipModel m;
        const int b = m.add_binary("b");
        m.fix_var(b, 0.0);
        const int tau = mccormick_product(m, b, LinExpr(3.0), 10.0, "tau");
        const auto [lo, hi] = forced_range(m, LinExpr::of_var(tau));
        CHECK(lo == doctest::Approx(0.0).scale(1));
        CHECK(hi == doctest::Approx(0.0).scale(1));
    }
    // Fractional b = 0.5 with z at its bound admits tau = ub/2 in the relaxation.
    {
        MipModel m;
        const int b = m.add_binary("b");
        m.set_bounds(b, 0.5, 0.5);
        const int tau = mccormick_product(m, b, LinExpr(10.0), 10.0, "tau");
        SolveOptions lp;
        lp.relax_integrality = true;
        m.set_objective(LinExpr::of_var(tau), ObjSense::Maximize);
        const auto hi = solve(m, lp);
        REQUIRE(hi.status == SolveStatus::Optimal);
        CHECK(hi.objective == doctest::Approx(5.0));
        m.set_objective(LinExpr::of_var(tau), ObjSense::Minimize);
        const auto lo = solve(m, lp);
        CHECK(lo.objective == doctest::Approx(5.0));
    }
}

TEST_CASE("selection emission is affine in the choice variables") {
    MipModel m;
    const int x0 = m.add_binary("x0");
    const int x1 = m.add_binary("x1");
    SelectionSpec s;
    s.choice_vars = {x0, x1};
    s.candidates = {DiscreteDist{{3.0}, {1.0}}, DiscreteDist{{7.0}, {1.0}}};
    const auto em = emit_selection(m, s, {0.5, 0.5}, "sel");
    CHECK(evaluate_expr(em.value, {{x0, 1.0}, {x1, 0.0}}) == doctest::Approx(3.0));
    CHECK(evaluate_expr(em.value, {{x0, 0.0}, {x1, 1.0}}) == doctest::Approx(7.0));
}

TEST_CASE("discrete-inverse emission pins the realized value per first stage") {
    // pmf depends on a binary: b=1 -> (0.9, 0.1), b=0 -> (0.5, 0.5); theta=0.7.
    for (double bval : {1.0, 0.0}) {
        MipModel m;
        const int b = m.add_binary("b");
        m.fix_var(b, bval);
        DiscreteInverseSpec d;
        d.values = {10.0, 20.0};
        d.pmf = {LinExpr(0.5) + LinExpr::of_var(b, 0.4),
                 LinExpr(0.5) + LinExpr::of_var(b, -0.4)};
        const auto em = emit_discrete_inverse(m, d, 0.7, 1e-4, "d");
        const auto [lo, hi] = forced_range(m, em.value);
        const double expect = bval == 1.0 ? 10.0 : 20.0;
        CHECK(lo == doctest::Approx(expect));
        CHECK(hi == doctest::Approx(expect));
        CHECK(transform_value(d, {{b, bval}}, {0.7}) == doctest::Approx(expect));
    }
}

TEST_CASE("discrete-inverse emission rejects boundary draws") {
    MipModel m;
    DiscreteInverseSpec d;
    d.values = {0.0, 1.0};
    d.pmf = {LinExpr(0.5), LinExpr(0.5)};
    CHECK_THROWS(emit_discrete_inverse(m, d, 0.0, 1e-4, "d"));
    CHECK_THROWS(emit_discrete_inverse(m, d, 1.0, 1e-4, "d"));
}

TEST_CASE("bernoulli emission matches the indicator oracle") {
    for (const auto& [theta, expect] : std::vector<std::pair<double, double>>{
             {0.3, 1.0}, {0.5, 0.0}, {0.7, 0.0}}) {
        MipModel m;
        BernoulliSpec s;
        s.prob = LinExpr(0.5);
        const auto em = emit_bernoulli(m, s, theta, 1e-4, "b");
        const auto [lo, hi] = forced_range(m, em.value);
        CHECK(lo == doctest::Approx(expect).scale(1));
        CHECK(hi == doctest::Approx(expect).scale(1));
    }
}

TEST_CASE("binomial emission counts forced trial indicators") {
    MipModel m;
    BinomialSpec s;
    s.trials = 3;
    s.prob = LinExpr(0.5);
    const auto em = emit_binomial(m, s, {0.1, 0.6, 0.4}, 1e-4, "bin");
    const auto [lo, hi] = forced_range(m, em.value);
    CHECK(lo == doctest::Approx(2.0));
    CHECK(hi == doctest::Approx(2.0));
}

TEST_CASE("uniform emission interpolates affine endpoints") {
    MipModel m;
    UniformSpec s;
    s.a = LinExpr(2.0);
    s.b = LinExpr(6.0);
    const auto em = emit_uniform(m, s, 0.25, "u");
    CHECK(evaluate_expr(em.value, {}) == doctest::Approx(3.0));
}

TEST_CASE("location-scale emission shifts mu by the quantile-scaled sigma") {
    MipModel m;
    LocationScaleSpec s;
    s.mu = LinExpr(5.0);
    s.sigma = LinExpr(2.0);
    const auto em = emit_location_scale(m, s, normal_cdf(1.5), "n");
    CHECK(evaluate_expr(em.value, {}) == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("emissions agree with transform_value across random draws") {
    // Every discrete emitter, many draws, random binary first stages; draws
    // near a pmf breakpoint are skipped (the epsilon guard band).
    RngStream rng(2023);
    const double eps = 1e-4;
    int checked = 0;
    for (int it = 0; it < 200; ++it) {
        const RngStream ss = rng.sub(it);
        const double xv = ss.u01(0) < 0.5 ? 0.0 : 1.0;
        const double theta = ss.u01_open(1);

        // Affine bernoulli: phi(x) = 0.3 + 0.4 x.
        {
            const double phi = 0.3 + 0.4 * xv;
            if (std::abs(theta - phi) > 10 * eps) {
                MipModel m;
                const int x = m.add_binary("x");
                m.fix_var(x, xv);
                BernoulliSpec s;
                s.prob = LinExpr(0.3) + LinExpr::of_var(x, 0.4);
                const auto em = emit_bernoulli(m, s, theta, eps, "b");
                const auto [lo, hi] = forced_range(m, em.value);
                const double oracle = transform_value(s, {{x, xv}}, {theta});
                CHECK(lo == doctest::Approx(oracle).scale(1));
                CHECK(hi == doctest::Approx(oracle).scale(1));
                ++checked;
            }
        }
        // Discrete inverse with a decision-dependent pmf.
        {
            DiscreteInverseSpec d;
            d.values = {0.0, 1.0, 2.0};
            const double shift = 0.2 * xv;
            const std::vector<double> pmf{0.3 + shift, 0.4 - shift, 0.3};
            bool degenerate = false;
            double cum = 0;
            for (double p : pmf) {
                cum += p;
                if (std::abs(theta - cum) <= 10 * eps) degenerate = true;
            }
            if (!degenerate) {
                MipModel m;
                const int x = m.add_binary("x");
                m.fix_var(x, xv);
                d.pmf = {LinExpr(0.3) + LinExpr::of_var(x, 0.2),
                         LinExpr(0.4) + LinExpr::of_var(x, -0.2), LinExpr(0.3)};
                const auto em = emit_discrete_inverse(m, d, theta, eps, "d");
                const auto [lo, hi] = forced_range(m, em.value);
                const double oracle = transform_value(d, {{x, xv}}, {theta});
                CHECK(lo == doctest::Approx(oracle).scale(1));
                CHECK(hi == doctest::Approx(oracle).scale(1));
                ++checked;
            }
        }
    }
    CHECK(checked > 150);
}

TEST_CASE("emit_transform dispatches on the held alternative") {
    MipModel m;
    DiscreteInverseSpec d;
    d.values = {4.0, 9.0};
    d.pmf = {LinExpr(0.6), LinExpr(0.4)};
    const EndogenousSpec spec = d;
    const auto em = emit_transform(m, spec, {0.8}, 1e-4, "t");
    const auto [lo, hi] = forced_range(m, em.value);
    CHECK(lo == doctest::Approx(9.0));
    CHECK(hi == doctest::Approx(9.0));

    MipModel m2;
    const EndogenousSpec ex = ExogenousSpec{UniformDist{0.0, 4.0}};
    const auto em2 = emit_transform(m2, ex, {0.25}, 1e-4, "e");
    CHECK(evaluate_expr(em2.value, {}) == doctest::Approx(1.0));
}

TEST_CASE("empirical law of the transformed draws matches the exact pmf") {
    // Decision-dependent discrete spec sampled 100k times at a fixed stage.
    DiscreteInverseSpec d;
    d.values = {0.0, 1.0, 2.0};
    d.pmf = {LinExpr(0.5), LinExpr(0.2), LinExpr(0.3)};
    RngStream s(21);
    const int n = 100000;
    const auto draws = sample_transformed(d, {}, s, n);
    std::vector<double> freq(3, 0.0);
    for (double v : draws) freq[(size_t)v] += 1.0 / n;
    const auto exact = pmf_at(d, {});
    for (int k = 0; k < 3; ++k) CHECK(std::abs(freq[k] - exact.probs[k]) < 0.01);
}
