#pragma once

namespace endo {

// Standard normal inverse CDF (Wichura's PPND16 rational approximation,
// |abs err| < 1e-15 over (0,1)). p in (0,1).
double normal_quantile(double p);

// Standard normal CDF via erfc.
double normal_cdf(double x);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Student-t inverse CDF with df degrees of freedom, lower tail, p in (0,1).
double student_t_quantile(double p, int df);

// Upper-tail critical points: P(Z > z) = alpha, P(T_df > t) = alpha.
double upper_z(double alpha);
double upper_t(double alpha, int df);

// Standard Gumbel inverse CDF: -ln(-ln p).
double gumbel_quantile(double p);

// Standard GEV(0,1,shape) inverse CDF; shape == 0 degenerates to Gumbel.
double gev_quantile(double p, double shape);

// Exponential(rate) inverse CDF: -ln(1-p)/rate.
double exponential_quantile(double p, double rate);

}  // namespace endo
