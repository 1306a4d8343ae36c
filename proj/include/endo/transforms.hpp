#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "endo/model.hpp"
#include "endo/rng.hpp"

namespace endo {

// ---------------------------------------------------------------------------
// Exogenous distributions (numeric parameters only).
// ---------------------------------------------------------------------------

struct DiscreteDist {
    std::vector<double> values;
    std::vector<double> probs;
};
struct BernoulliDist {
    double p = 0.5;
};
struct BinomialDist {
    int trials = 1;
    double p = 0.5;
    double scale = 1.0;  // value = scale * #successes
};
struct UniformDist {
    double a = 0.0, b = 1.0;
};
struct ExponentialDist {
    double rate = 1.0;
};
struct NormalDist {
    double mu = 0.0, sigma = 1.0;
    // Clamp the standard normal draw to [-4, 4]. Off by default; consumers
    // that need a nonnegative quantity (e.g. capacities with mu >= 4*sigma)
    // turn it on explicitly.
    bool truncate_pm4 = false;
};
struct GumbelDist {
    double mu = 0.0, sigma = 1.0;
};
struct GevDist {
    double mu = 0.0, sigma = 1.0, shape = 0.0;
};

using ExoDist = std::variant<DiscreteDist, BernoulliDist, BinomialDist, UniformDist,
                             ExponentialDist, NormalDist, GumbelDist, GevDist>;

// Number of independent U(0,1) draws one sample consumes.
int exo_n_uniforms(const ExoDist& d);
// Transform uniforms (array of exo_n_uniforms entries, each in (0,1)) to a sample.
double exo_sample(const ExoDist& d, const double* u);
double exo_cdf(const ExoDist& d, double t);
bool exo_is_discrete(const ExoDist& d);
// Support and probabilities for discrete exogenous distributions.
void exo_pmf(const ExoDist& d, std::vector<double>& values, std::vector<double>& probs);

// Generalized inverse of a discrete CDF: smallest index r such that
// sum_{j<=r} pmf[j] > theta (left-closed, right-open realization cells).
int eval_discrete_inverse(const std::vector<double>& pmf, double theta);

// Generalized inverse on cumulative values: smallest index r with
// cdf_values[r] >= j (so j = 0 gives index 0 and j = 1 the last index of a
// proper CDF). cdf_values must be nondecreasing with back() >= j.
int eval_generalized_inverse(const std::vector<double>& cdf_values, double j);

// Indicator transform: 1 if theta < phi else 0.
inline double eval_bernoulli(double phi, double theta) { return theta < phi ? 1.0 : 0.0; }

// Closed-form quantile transforms for simple continuous families.
inline double transform_uniform(double a, double b, double theta) {
    return a + (b - a) * theta;
}
inline double transform_exponential(double rate, double theta) {
    return -std::log1p(-theta) / rate;
}

// ---------------------------------------------------------------------------
// Gaussian copula: correlated U(0,1) vectors with the given Pearson
// correlation on the underlying normals.
// ---------------------------------------------------------------------------

struct CopulaSpec {
    int dim = 1;
    // dim x dim symmetric PSD matrix with unit diagonal; empty => identity.
    std::vector<std::vector<double>> correlation;
};

// Lower-triangular Cholesky factor tolerant of positive *semi*definite input
// (zero pivots produce zero columns, e.g. perfectly correlated components).
std::vector<std::vector<double>> cholesky_psd(const std::vector<std::vector<double>>& a);

// One copula draw: uniforms from `stream` at counters [dim*counter, dim*(counter+1)).
std::vector<double> gaussian_copula_sample(const CopulaSpec& spec, const RngStream& stream,
                                           std::uint64_t counter);

// ---------------------------------------------------------------------------
// Decision-dependent specs. Affine parameters are LinExpr in first-stage vars.
// ---------------------------------------------------------------------------

// Pick one of several fully-specified distributions with one-hot choice_vars.
struct SelectionSpec {
    std::vector<int> choice_vars;
    std::vector<ExoDist> candidates;
};
// Finite support with decision-dependent pmf (affine, must sum to 1 when the
// first stage is feasible).
struct DiscreteInverseSpec {
    std::vector<double> values;
    std::vector<LinExpr> pmf;
};
struct BernoulliSpec {
    LinExpr prob;
};
struct BinomialSpec {
    int trials = 1;
    LinExpr prob;
    double scale = 1.0;
};
struct UniformSpec {
    LinExpr a, b;
};
struct LocationScaleSpec {
    enum class Family { Normal, Gumbel, Gev };
    LinExpr mu, sigma;
    Family family = Family::Normal;
    double shape = 0.0;  // Gev only
    // Normal only: clamp the standard quantile to [-4, 4] (see NormalDist).
    bool truncate_pm4 = false;
};
// No decision dependence; still usable as a transformed element.
struct ExogenousSpec {
    ExoDist dist;
};

using EndogenousSpec = std::variant<SelectionSpec, DiscreteInverseSpec, BernoulliSpec,
                                    BinomialSpec, UniformSpec, LocationScaleSpec, ExogenousSpec>;

int spec_n_uniforms(const EndogenousSpec& spec);
bool spec_is_discrete(const EndogenousSpec& spec);

// Closed-form transform of one draw at a fixed first stage (the oracle the
// MILP fragments are tested against). u holds spec_n_uniforms entries.
double transform_value(const EndogenousSpec& spec, const Assignment& x,
                       const std::vector<double>& u);

// Exact distribution at a fixed first stage.
struct DiscretePmf {
    std::vector<double> values;  // ascending, unique
    std::vector<double> probs;
};
DiscretePmf pmf_at(const EndogenousSpec& spec, const Assignment& x);
double cdf_at(const EndogenousSpec& spec, const Assignment& x, double t);

// n independent samples (counters 0..n-1 of `stream`).
std::vector<double> sample_transformed(const EndogenousSpec& spec, const Assignment& x,
                                       const RngStream& stream, int n);

// ---------------------------------------------------------------------------
// MILP emission: inject constraints forcing an affine expression to equal the
// transformed value for a *numeric* draw, exactly at binary first stages.
// ---------------------------------------------------------------------------

struct TransformEmission {
    std::vector<int> vars;
    std::vector<int> rows;
    LinExpr value;
};

// tau = binary_var * z for z in [0, ub]: three envelope rows, exact at binary
// points. Returns the tau variable id.
int mccormick_product(MipModel& m, int binary_var, const LinExpr& z, double ub,
                      const std::string& tag, std::vector<int>* rows_out = nullptr);

TransformEmission emit_selection(MipModel& m, const SelectionSpec& spec,
                                 const std::vector<double>& u, const std::string& tag);
TransformEmission emit_discrete_inverse(MipModel& m, const DiscreteInverseSpec& spec,
                                        double theta, double eps, const std::string& tag);
// Looser LP relaxation published elsewhere; kept for tightness comparisons.
TransformEmission emit_discrete_inverse_loose(MipModel& m, const DiscreteInverseSpec& spec,
                                              double theta, double eps, const std::string& tag);
TransformEmission emit_bernoulli(MipModel& m, const BernoulliSpec& spec, double theta,
                                 double eps, const std::string& tag);
TransformEmission emit_binomial(MipModel& m, const BinomialSpec& spec,
                                const std::vector<double>& u, double eps,
                                const std::string& tag);
TransformEmission emit_uniform(MipModel& m, const UniformSpec& spec, double theta,
                               const std::string& tag);
TransformEmission emit_location_scale(MipModel& m, const LocationScaleSpec& spec, double theta,
                                      const std::string& tag);
// Dispatch on the variant; u as in transform_value.
TransformEmission emit_transform(MipModel& m, const EndogenousSpec& spec,
                                 const std::vector<double>& u, double eps,
                                 const std::string& tag);

// Binomial pmf helper (exact product form).
double binomial_pmf(int n, double p, int k);

}  // namespace endo
