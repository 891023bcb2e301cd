#pragma once

#include "maxaffine/model.hpp"

namespace maxaffine {

/// Inputs shared by the closed-form bound evaluators. zeta and gamma are the
/// anti-concentration exponents of the covariate law (zeta = 1/2 for
/// Gaussian covariates; other laws carry nominal values only). R is the
/// neighborhood-radius constant, default 1 and configurable. Absolute
/// constants proved to exist but never pinned down numerically (C, C', nu)
/// are explicit caller arguments of the individual evaluators, never
/// defaulted here.
struct TheoryInputs {
  int k = 2;
  int d = 1;
  double n = 100.0;
  double sigma = 0.0;
  double delta = 0.05;   // must lie in (0, 1/e)
  double pi_min = 0.5;   // in (0, 1/k]
  double kappa = 1.0;
  double zeta = 0.5;
  double gamma = 1.0;
  double R = 1.0;

  void validate() const;
};

/// Neighborhood radius multiplier
///   rho = min( (R pi^{z(1+z)} / (4 k^z)) / sqrt(log(k^z / (R pi^{z(1+z)}))),
///              1/4 )
/// with z = 1/zeta. Throws FormulaDomainError when the log argument is <= 1.
double compute_rho(const TheoryInputs& inputs);

/// Descent error bound after t iterations from distance init_dist:
///   nu^t * init_dist + c' sigma k sqrt(k (k d log(n/d) + log(k/delta)) / n).
/// nu in (0,1) and c' are caller-supplied constants.
double gd_error_bound(const TheoryInputs& inputs, double t, double init_dist, double nu,
                      double c_prime);

/// Stochastic-descent error floor for batch size m:
///   c' sigma k sqrt( (d + log(n/delta))/m  v  (k d log(n/d) + log(1/delta))/n ).
double sgd_error_floor(const TheoryInputs& inputs, double m, double c_prime);

/// Sample-size requirement for the descent guarantee,
///   n >= C pi^{-2(1+z)} (k^{1.5} pi^{-(1+z)}  v  sigma/(kappa rho))^2
///        (k d log(n/d) + log(k/delta)),
/// solved as a fixed point in n starting from n0 = k d. Throws
/// FormulaDomainError when the iteration has not settled after 100 rounds.
double sample_complexity_gd(const TheoryInputs& inputs, double C);

struct SubsetEigResult {
  double min_eigenvalue = 0.0;
  bool empty_family = false;  // no subset satisfies the size constraint
  long subset_size = 0;       // ceil(alpha * n)
};

/// Exact infimum over index subsets I with |I| >= alpha*n of the smallest
/// eigenvalue of sum_{i in I} [x_i; 1][x_i; 1]^T, by exhaustive enumeration
/// of the size-ceil(alpha*n) subsets (adding a rank-one PSD term never
/// lowers the smallest eigenvalue, so larger subsets cannot attain the
/// infimum). Desk-scale diagnostic: refuses n > 14.
SubsetEigResult worst_subset_min_eig(const Dataset& data, double alpha);

}  // namespace maxaffine
