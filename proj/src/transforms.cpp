#include "endo/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "endo/quantiles.hpp"

namespace endo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_pmf(const std::vector<double>& probs) {
    double s = 0.0;
    for (double p : probs) {
        if (p < -1e-9) throw std::invalid_argument("pmf has negative entry");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-6) throw std::invalid_argument("pmf does not sum to 1");
}

}  // namespace

double binomial_pmf(int n, double p, int k) {
    if (k < 0 || k > n) return 0.0;
    // Multiplicative form: product of (n-k+i)/i * p * (1-p)^... kept stable for n <= ~60.
    double logc = 0.0;
    for (int i = 1; i <= k; ++i) logc += std::log((double)(n - k + i)) - std::log((double)i);
    double logp = k * std::log(std::max(p, 1e-300)) + (n - k) * std::log(std::max(1.0 - p, 1e-300));
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    return std::exp(logc + logp);
}

int eval_discrete_inverse(const std::vector<double>& pmf, double theta) {
    double cum = 0.0;
    for (int r = 0; r < (int)pmf.size(); ++r) {
        cum += pmf[r];
        if (theta < cum) return r;
    }
    return (int)pmf.size() - 1;  // theta >= 1 - fp dust
}

int eval_generalized_inverse(const std::vector<double>& cdf_values, double j) {
    if (cdf_values.empty()) throw std::invalid_argument("eval_generalized_inverse: empty cdf");
    for (int r = 0; r < (int)cdf_values.size(); ++r)
        if (cdf_values[r] >= j) return r;
    throw std::invalid_argument("eval_generalized_inverse: cdf never reaches the target");
}

std::vector<std::vector<double>> cholesky_psd(const std::vector<std::vector<double>>& a) {
    const int n = (int)a.size();
    std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j) {
        double d = a[j][j];
        for (int k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
        if (d < -1e-8) throw std::invalid_argument("cholesky_psd: matrix not PSD");
        // Zero pivot: degenerate direction (e.g. perfectly correlated pair);
        // leave the column zero so L*L^T still reproduces the input.
        L[j][j] = d > 1e-12 ? std::sqrt(d) : 0.0;
        for (int i = j + 1; i < n; ++i) {
            if (L[j][j] == 0.0) continue;
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
            L[i][j] = s / L[j][j];
        }
    }
    return L;
}

std::vector<double> gaussian_copula_sample(const CopulaSpec& spec, const RngStream& stream,
                                           std::uint64_t counter) {
    const int n = spec.dim;
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = normal_quantile(stream.u01_open(counter * (std::uint64_t)n + i));
    if (spec.correlation.empty()) {  // identity: independent marginals
        for (int i = 0; i < n; ++i) g[i] = normal_cdf(g[i]);
        return g;
    }
    if ((int)spec.correlation.size() != n)
        throw std::invalid_argument("gaussian_copula_sample: correlation size != dim");
    const auto L = cholesky_psd(spec.correlation);
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) {
        double z = 0.0;
        for (int k = 0; k <= i; ++k) z += L[i][k] * g[k];
        u[i] = normal_cdf(z);
    }
    return u;
}

// ---------------------------------------------------------------------------
// Exogenous distributions
// ---------------------------------------------------------------------------

int exo_n_uniforms(const ExoDist& d) {
    if (const auto* b = std::get_if<BinomialDist>(&d)) return b->trials;
    return 1;
}

double exo_sample(const ExoDist& d, const double* u) {
    return std::visit(
        overloaded{
            [&](const DiscreteDist& x) {
                return x.values[eval_discrete_inverse(x.probs, u[0])];
            },
            [&](const BernoulliDist& x) { return eval_bernoulli(x.p, u[0]); },
            [&](const BinomialDist& x) {
                double k = 0.0;
                for (int j = 0; j < x.trials; ++j) k += eval_bernoulli(x.p, u[j]);
                return x.scale * k;
            },
            [&](const UniformDist& x) { return x.a + (x.b - x.a) * u[0]; },
            [&](const ExponentialDist& x) { return exponential_quantile(u[0], x.rate); },
            [&](const NormalDist& x) {
                double q = normal_quantile(u[0]);
                if (x.truncate_pm4) q = std::clamp(q, -4.0, 4.0);
                return x.mu + x.sigma * q;
            },
            [&](const GumbelDist& x) { return x.mu + x.sigma * gumbel_quantile(u[0]); },
            [&](const GevDist& x) { return x.mu + x.sigma * gev_quantile(u[0], x.shape); }},
        d);
}

double exo_cdf(const ExoDist& d, double t) {
    return std::visit(
        overloaded{
            [&](const DiscreteDist& x) {
                double c = 0.0;
                for (size_t i = 0; i < x.values.size(); ++i)
                    if (x.values[i] <= t) c += x.probs[i];
                return c;
            },
            [&](const BernoulliDist& x) {
                if (t < 0) return 0.0;
                if (t < 1) return 1.0 - x.p;
                return 1.0;
            },
            [&](const BinomialDist& x) {
                double c = 0.0;
                for (int k = 0; k <= x.trials; ++k)
                    if (x.scale * k <= t) c += binomial_pmf(x.trials, x.p, k);
                return c;
            },
            [&](const UniformDist& x) {
                if (t <= x.a) return 0.0;
                if (t >= x.b) return 1.0;
                return (t - x.a) / (x.b - x.a);
            },
            [&](const ExponentialDist& x) {
                return t <= 0 ? 0.0 : 1.0 - std::exp(-x.rate * t);
            },
            [&](const NormalDist& x) { return normal_cdf((t - x.mu) / x.sigma); },
            [&](const GumbelDist& x) {
                return std::exp(-std::exp(-(t - x.mu) / x.sigma));
            },
            [&](const GevDist& x) {
                if (x.shape == 0.0) return std::exp(-std::exp(-(t - x.mu) / x.sigma));
                const double z = 1.0 + x.shape * (t - x.mu) / x.sigma;
                if (z <= 0.0) return x.shape > 0 ? 0.0 : 1.0;
                return std::exp(-std::pow(z, -1.0 / x.shape));
            }},
        d);
}

bool exo_is_discrete(const ExoDist& d) {
    return std::holds_alternative<DiscreteDist>(d) || std::holds_alternative<BernoulliDist>(d) ||
           std::holds_alternative<BinomialDist>(d);
}

void exo_pmf(const ExoDist& d, std::vector<double>& values, std::vector<double>& probs) {
    if (const auto* x = std::get_if<DiscreteDist>(&d)) {
        values = x->values;
        probs = x->probs;
    } else if (const auto* x = std::get_if<BernoulliDist>(&d)) {
        values = {0.0, 1.0};
        probs = {1.0 - x->p, x->p};
    } else if (const auto* x = std::get_if<BinomialDist>(&d)) {
        values.clear();
        probs.clear();
        for (int k = 0; k <= x->trials; ++k) {
            values.push_back(x->scale * k);
            probs.push_back(binomial_pmf(x->trials, x->p, k));
        }
    } else {
        throw std::logic_error("exo_pmf: continuous distribution");
    }
}

// ---------------------------------------------------------------------------
// Spec-level helpers
// ---------------------------------------------------------------------------

int spec_n_uniforms(const EndogenousSpec& spec) {
    return std::visit(overloaded{[](const SelectionSpec& s) {
                                     int n = 0;
                                     for (const auto& c : s.candidates) n += exo_n_uniforms(c);
                                     return n;
                                 },
                                 [](const DiscreteInverseSpec&) { return 1; },
                                 [](const BernoulliSpec&) { return 1; },
                                 [](const BinomialSpec& s) { return s.trials; },
                                 [](const UniformSpec&) { return 1; },
                                 [](const LocationScaleSpec&) { return 1; },
                                 [](const ExogenousSpec& s) { return exo_n_uniforms(s.dist); }},
                      spec);
}

bool spec_is_discrete(const EndogenousSpec& spec) {
    return std::visit(
        overloaded{[](const SelectionSpec& s) {
                       for (const auto& c : s.candidates)
                           if (!exo_is_discrete(c)) return false;
                       return true;
                   },
                   [](const DiscreteInverseSpec&) { return true; },
                   [](const BernoulliSpec&) { return true; },
                   [](const BinomialSpec&) { return true; },
                   [](const UniformSpec&) { return false; },
                   [](const LocationScaleSpec&) { return false; },
                   [](const ExogenousSpec& s) { return exo_is_discrete(s.dist); }},
        spec);
}

namespace {

int selected_candidate(const SelectionSpec& s, const Assignment& x) {
    int best = -1;
    double best_v = -1.0;
    for (int d = 0; d < (int)s.choice_vars.size(); ++d) {
        const double v = value_of(x, s.choice_vars[d]);
        if (v > best_v) {
            best_v = v;
            best = d;
        }
    }
    if (best < 0 || best_v < 0.5)
        throw std::invalid_argument("selection: no candidate chosen by the first stage");
    return best;
}

std::vector<double> pmf_values_at(const DiscreteInverseSpec& s, const Assignment& x) {
    std::vector<double> p(s.pmf.size());
    for (size_t r = 0; r < s.pmf.size(); ++r) p[r] = evaluate_expr(s.pmf[r], x);
    check_pmf(p);
    return p;
}

double quantile_of_family(LocationScaleSpec::Family fam, double shape, double u) {
    switch (fam) {
        case LocationScaleSpec::Family::Normal: return normal_quantile(u);
        case LocationScaleSpec::Family::Gumbel: return gumbel_quantile(u);
        case LocationScaleSpec::Family::Gev: return gev_quantile(u, shape);
    }
    return 0.0;
}

}  // namespace

double transform_value(const EndogenousSpec& spec, const Assignment& x,
                       const std::vector<double>& u) {
    if ((int)u.size() < spec_n_uniforms(spec))
        throw std::invalid_argument("transform_value: not enough uniforms");
    return std::visit(
        overloaded{
            [&](const SelectionSpec& s) {
                const int chosen = selected_candidate(s, x);
                int off = 0;
                for (int d = 0; d < chosen; ++d) off += exo_n_uniforms(s.candidates[d]);
                return exo_sample(s.candidates[chosen], u.data() + off);
            },
            [&](const DiscreteInverseSpec& s) {
                return s.values[eval_discrete_inverse(pmf_values_at(s, x), u[0])];
            },
            [&](const BernoulliSpec& s) {
                return eval_bernoulli(evaluate_expr(s.prob, x), u[0]);
            },
            [&](const BinomialSpec& s) {
                const double phi = evaluate_expr(s.prob, x);
                double k = 0.0;
                for (int j = 0; j < s.trials; ++j) k += eval_bernoulli(phi, u[j]);
                return s.scale * k;
            },
            [&](const UniformSpec& s) {
                const double a = evaluate_expr(s.a, x);
                const double b = evaluate_expr(s.b, x);
                return a + (b - a) * u[0];
            },
            [&](const LocationScaleSpec& s) {
                double q = quantile_of_family(s.family, s.shape, u[0]);
                if (s.truncate_pm4 && s.family == LocationScaleSpec::Family::Normal)
                    q = std::clamp(q, -4.0, 4.0);
                return evaluate_expr(s.mu, x) + evaluate_expr(s.sigma, x) * q;
            },
            [&](const ExogenousSpec& s) { return exo_sample(s.dist, u.data()); }},
        spec);
}

DiscretePmf pmf_at(const EndogenousSpec& spec, const Assignment& x) {
    std::vector<double> values, probs;
    std::visit(
        overloaded{
            [&](const SelectionSpec& s) {
                exo_pmf(s.candidates[selected_candidate(s, x)], values, probs);
            },
            [&](const DiscreteInverseSpec& s) {
                values = s.values;
                probs = pmf_values_at(s, x);
            },
            [&](const BernoulliSpec& s) {
                values = {0.0, 1.0};
                const double p = evaluate_expr(s.prob, x);
                probs = {1.0 - p, p};
            },
            [&](const BinomialSpec& s) {
                const double p = evaluate_expr(s.prob, x);
                for (int k = 0; k <= s.trials; ++k) {
                    values.push_back(s.scale * k);
                    probs.push_back(binomial_pmf(s.trials, p, k));
                }
            },
            [&](const UniformSpec&) -> void {
                throw std::logic_error("pmf_at: continuous spec");
            },
            [&](const LocationScaleSpec&) -> void {
                throw std::logic_error("pmf_at: continuous spec");
            },
            [&](const ExogenousSpec& s) { exo_pmf(s.dist, values, probs); }},
        spec);
    // Merge duplicate support points, sort ascending.
    std::map<double, double> agg;
    for (size_t i = 0; i < values.size(); ++i) agg[values[i]] += probs[i];
    DiscretePmf out;
    for (const auto& [v, p] : agg) {
        out.values.push_back(v);
        out.probs.push_back(p);
    }
    return out;
}

double cdf_at(const EndogenousSpec& spec, const Assignment& x, double t) {
    return std::visit(
        overloaded{
            [&](const SelectionSpec& s) {
                return exo_cdf(s.candidates[selected_candidate(s, x)], t);
            },
            [&](const UniformSpec& s) {
                return exo_cdf(UniformDist{evaluate_expr(s.a, x), evaluate_expr(s.b, x)}, t);
            },
            [&](const LocationScaleSpec& s) {
                const double mu = evaluate_expr(s.mu, x);
                const double sg = evaluate_expr(s.sigma, x);
                switch (s.family) {
                    case LocationScaleSpec::Family::Normal:
                        return exo_cdf(NormalDist{mu, sg}, t);
                    case LocationScaleSpec::Family::Gumbel:
                        return exo_cdf(GumbelDist{mu, sg}, t);
                    case LocationScaleSpec::Family::Gev:
                        return exo_cdf(GevDist{mu, sg, s.shape}, t);
                }
                return 0.0;
            },
            [&](const ExogenousSpec& s) { return exo_cdf(s.dist, t); },
            [&](const auto&) {
                const DiscretePmf pmf = pmf_at(spec, x);
                double c = 0.0;
                for (size_t i = 0; i < pmf.values.size(); ++i)
                    if (pmf.values[i] <= t) c += pmf.probs[i];
                return c;
            }},
        spec);
}

std::vector<double> sample_transformed(const EndogenousSpec& spec, const Assignment& x,
                                       const RngStream& stream, int n) {
    const int k = spec_n_uniforms(spec);
    std::vector<double> out(n);
    std::vector<double> u(k);
    for (int s = 0; s < n; ++s) {
        const RngStream ss = stream.sub(s);
        for (int j = 0; j < k; ++j) u[j] = ss.u01_open(j);
        out[s] = transform_value(spec, x, u);
    }
    return out;
}

// ---------------------------------------------------------------------------
// MILP emission
// ---------------------------------------------------------------------------

int mccormick_product(MipModel& m, int binary_var, const LinExpr& z, double ub,
                      const std::string& tag, std::vector<int>* rows_out) {
    const int tau = m.add_continuous(tag, 0.0, ub);
    LinExpr cap_bin = LinExpr::of_var(tau) - ub * LinExpr::of_var(binary_var);
    LinExpr cap_z = LinExpr::of_var(tau) - z;
    LinExpr floor = z - LinExpr::of_var(tau) + ub * LinExpr::of_var(binary_var);
    const int r1 = m.add_row(tag + ".cap_bin", std::move(cap_bin), RowSense::LE, 0.0);
    const int r2 = m.add_row(tag + ".cap_val", std::move(cap_z), RowSense::LE, 0.0);
    const int r3 = m.add_row(tag + ".floor", std::move(floor), RowSense::LE, ub);
    if (rows_out) {
        rows_out->push_back(r1);
        rows_out->push_back(r2);
        rows_out->push_back(r3);
    }
    return tau;
}

TransformEmission emit_selection(MipModel& m, const SelectionSpec& spec,
                                 const std::vector<double>& u, const std::string& tag) {
    (void)m;
    (void)tag;
    TransformEmission out;
    int off = 0;
    for (size_t d = 0; d < spec.candidates.size(); ++d) {
        const double v = exo_sample(spec.candidates[d], u.data() + off);
        off += exo_n_uniforms(spec.candidates[d]);
        out.value.add(spec.choice_vars[d], v);
    }
    return out;
}

TransformEmission emit_discrete_inverse(MipModel& m, const DiscreteInverseSpec& spec,
                                        double theta, double eps, const std::string& tag) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("emit_discrete_inverse: theta outside (0,1)");
    const int R = (int)spec.values.size();
    TransformEmission out;
    std::vector<int> sel(R), cum(R);
    for (int r = 0; r < R; ++r) {
        sel[r] = m.add_binary(tag + ".pick" + std::to_string(r));
        cum[r] = m.add_binary(tag + ".cum" + std::to_string(r));
        out.vars.push_back(sel[r]);
        out.vars.push_back(cum[r]);
    }
    m.fix_var(cum[R - 1], 1.0);

    // cum[r] may be 1 only if theta clears the partial pmf sum (scaled by theta
    // to keep coefficients bounded), and 0 only if theta is at/above it.
    for (int r = 0; r + 1 < R; ++r) {
        LinExpr lhs = theta * LinExpr::of_var(cum[r]);
        for (int j = 0; j <= r; ++j) lhs -= spec.pmf[j];
        out.rows.push_back(m.add_row(tag + ".below" + std::to_string(r), std::move(lhs),
                                     RowSense::LE, -eps));
    }
    for (int r = 1; r < R; ++r) {
        LinExpr lhs = -(1.0 - theta) * LinExpr::of_var(cum[r - 1]);
        for (int j = r; j < R; ++j) lhs -= spec.pmf[j];
        out.rows.push_back(m.add_row(tag + ".above" + std::to_string(r), std::move(lhs),
                                     RowSense::LE, -(1.0 - theta)));
    }
    for (int r = 0; r + 1 < R; ++r) {
        LinExpr chain =
            LinExpr::of_var(cum[r]) - LinExpr::of_var(cum[r + 1]) + LinExpr::of_var(sel[r + 1]);
        out.rows.push_back(
            m.add_row(tag + ".chain" + std::to_string(r), std::move(chain), RowSense::EQ, 0.0));
    }
    LinExpr one;
    for (int r = 0; r < R; ++r) one.add(sel[r]);
    out.rows.push_back(m.add_row(tag + ".one", std::move(one), RowSense::EQ, 1.0));

    for (int r = 0; r < R; ++r) out.value.add(sel[r], spec.values[r]);
    return out;
}

TransformEmission emit_discrete_inverse_loose(MipModel& m, const DiscreteInverseSpec& spec,
                                              double theta, double eps, const std::string& tag) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("emit_discrete_inverse_loose: theta outside (0,1)");
    const int R = (int)spec.values.size();
    TransformEmission out;
    std::vector<int> sel(R);
    for (int r = 0; r < R; ++r) {
        sel[r] = m.add_binary(tag + ".pick" + std::to_string(r));
        out.vars.push_back(sel[r]);
    }
    // pick[r] <= 1 + cdf_r(x) - theta - eps  and  pick[r] <= theta + tail_r(x).
    for (int r = 0; r < R; ++r) {
        LinExpr below = LinExpr::of_var(sel[r]);
        for (int j = 0; j <= r; ++j) below -= spec.pmf[j];
        out.rows.push_back(m.add_row(tag + ".below" + std::to_string(r), std::move(below),
                                     RowSense::LE, 1.0 - theta - eps));
        LinExpr above = LinExpr::of_var(sel[r]);
        for (int j = r; j < R; ++j) above -= spec.pmf[j];
        out.rows.push_back(
            m.add_row(tag + ".above" + std::to_string(r), std::move(above), RowSense::LE, theta));
    }
    LinExpr one;
    for (int r = 0; r < R; ++r) one.add(sel[r]);
    out.rows.push_back(m.add_row(tag + ".one", std::move(one), RowSense::EQ, 1.0));
    for (int r = 0; r < R; ++r) out.value.add(sel[r], spec.values[r]);
    return out;
}

TransformEmission emit_bernoulli(MipModel& m, const BernoulliSpec& spec, double theta,
                                 double eps, const std::string& tag) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("emit_bernoulli: theta outside (0,1)");
    TransformEmission out;
    const int ind = m.add_binary(tag + ".ind");
    out.vars.push_back(ind);
    // theta*ind <= phi(x) - eps  (success only below the success probability)
    LinExpr r1 = theta * LinExpr::of_var(ind) - spec.prob;
    out.rows.push_back(m.add_row(tag + ".succ", std::move(r1), RowSense::LE, -eps));
    // ind >= phi(x) - theta      (failure only at/above it)
    LinExpr r2 = spec.prob - LinExpr::of_var(ind);
    out.rows.push_back(m.add_row(tag + ".fail", std::move(r2), RowSense::LE, theta));
    out.value = LinExpr::of_var(ind);
    return out;
}

TransformEmission emit_binomial(MipModel& m, const BinomialSpec& spec,
                                const std::vector<double>& u, double eps,
                                const std::string& tag) {
    if ((int)u.size() < spec.trials)
        throw std::invalid_argument("emit_binomial: needs one uniform per trial");
    TransformEmission out;
    for (int j = 0; j < spec.trials; ++j) {
        TransformEmission b =
            emit_bernoulli(m, BernoulliSpec{spec.prob}, u[j], eps, tag + ".t" + std::to_string(j));
        out.vars.insert(out.vars.end(), b.vars.begin(), b.vars.end());
        out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
        out.value.add(b.value, spec.scale);
    }
    return out;
}

TransformEmission emit_uniform(MipModel& m, const UniformSpec& spec, double theta,
                               const std::string& tag) {
    (void)m;
    (void)tag;
    TransformEmission out;
    out.value.add(spec.a, 1.0 - theta);
    out.value.add(spec.b, theta);
    return out;
}

TransformEmission emit_location_scale(MipModel& m, const LocationScaleSpec& spec, double theta,
                                      const std::string& tag) {
    (void)m;
    (void)tag;
    TransformEmission out;
    double q = quantile_of_family(spec.family, spec.shape, theta);
    if (spec.truncate_pm4 && spec.family == LocationScaleSpec::Family::Normal)
        q = std::clamp(q, -4.0, 4.0);
    out.value.add(spec.mu);
    out.value.add(spec.sigma, q);
    return out;
}

TransformEmission emit_transform(MipModel& m, const EndogenousSpec& spec,
                                 const std::vector<double>& u, double eps,
                                 const std::string& tag) {
    return std::visit(
        overloaded{
            [&](const SelectionSpec& s) { return emit_selection(m, s, u, tag); },
            [&](const DiscreteInverseSpec& s) {
                return emit_discrete_inverse(m, s, u[0], eps, tag);
            },
            [&](const BernoulliSpec& s) { return emit_bernoulli(m, s, u[0], eps, tag); },
            [&](const BinomialSpec& s) { return emit_binomial(m, s, u, eps, tag); },
            [&](const UniformSpec& s) { return emit_uniform(m, s, u[0], tag); },
            [&](const LocationScaleSpec& s) { return emit_location_scale(m, s, u[0], tag); },
            [&](const ExogenousSpec& s) {
                TransformEmission out;
                out.value = LinExpr(exo_sample(s.dist, u.data()));
                return out;
            }},
        spec);
}

}  // namespace endo
