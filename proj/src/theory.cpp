#include "maxaffine/theory.hpp"

#include <cmath>
#include <vector>

#include "maxaffine/errors.hpp"

namespace maxaffine {

void TheoryInputs::validate() const {
  if (k < 1 || d < 1) throw InputError("k and d must be positive");
  if (!(n > 0.0)) throw InputError("n must be positive");
  if (sigma < 0.0) throw InputError("sigma must be nonnegative");
  if (!(delta > 0.0) || delta >= 1.0 / 2.718281828459045235)
    throw InputError("delta must lie in (0, 1/e)");
  if (!(pi_min > 0.0) || pi_min > 1.0 / static_cast<double>(k))
    throw InputError("pi_min must lie in (0, 1/k]");
  if (kappa < 0.0) throw InputError("kappa must be nonnegative");
  if (!(zeta > 0.0) || zeta > 1.0) throw InputError("zeta must lie in (0, 1]");
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
  if (!(R > 0.0)) throw InputError("R must be positive");
}

double compute_rho(const TheoryInputs& inputs) {
  inputs.validate();
  const double z = 1.0 / inputs.zeta;
  const double pi_pow = std::pow(inputs.pi_min, z * (1.0 + z));
  const double k_pow = std::pow(static_cast<double>(inputs.k), z);
  const double log_arg = k_pow / (inputs.R * pi_pow);
  if (!(log_arg > 1.0))
    throw FormulaDomainError("rho is undefined: log argument is at or below 1");
  const double first = inputs.R * pi_pow / (4.0 * k_pow) / std::sqrt(std::log(log_arg));
  return std::min(first, 0.25);
}

double gd_error_bound(const TheoryInputs& inputs, double t, double init_dist, double nu,
                      double c_prime) {
  inputs.validate();
  if (!(nu > 0.0) || nu >= 1.0) throw InputError("nu must lie in (0, 1)");
  const double k = static_cast<double>(inputs.k);
  const double d = static_cast<double>(inputs.d);
  const double noise_term =
      c_prime * inputs.sigma * k *
      std::sqrt(k * (k * d * std::log(inputs.n / d) + std::log(k / inputs.delta)) / inputs.n);
  return std::pow(nu, t) * init_dist + noise_term;
}

double sgd_error_floor(const TheoryInputs& inputs, double m, double c_prime) {
  inputs.validate();
  if (m < 1.0) throw InputError("batch size must be at least 1");
  const double k = static_cast<double>(inputs.k);
  const double d = static_cast<double>(inputs.d);
  const double batch_branch = (d + std::log(inputs.n / inputs.delta)) / m;
  const double sample_branch =
      (k * d * std::log(inputs.n / d) + std::log(1.0 / inputs.delta)) / inputs.n;
  return c_prime * inputs.sigma * k * std::sqrt(std::max(batch_branch, sample_branch));
}

double sample_complexity_gd(const TheoryInputs& inputs, double C) {
  inputs.validate();
  if (!(C > 0.0)) throw InputError("C must be positive");
  const double z = 1.0 / inputs.zeta;
  const double rho = compute_rho(inputs);
  const double k = static_cast<double>(inputs.k);
  const double d = static_cast<double>(inputs.d);
  const double front = C * std::pow(inputs.pi_min, -2.0 * (1.0 + z));
  const double k_branch = std::pow(k, 1.5) * std::pow(inputs.pi_min, -(1.0 + z));
  const double noise_branch = inputs.sigma > 0.0 ? inputs.sigma / (inputs.kappa * rho) : 0.0;
  const double mid = std::pow(std::max(k_branch, noise_branch), 2.0);

  double n = k * d;
  for (int round = 0; round < 100; ++round) {
    const double log_term = k * d * std::log(std::max(n / d, 1.0)) + std::log(k / inputs.delta);
    const double next = front * mid * log_term;
    if (std::abs(next - n) <= 1e-12 * std::max(1.0, std::abs(next))) return next;
    n = next;
  }
  throw FormulaDomainError("sample-complexity fixed point did not settle in 100 rounds");
}

SubsetEigResult worst_subset_min_eig(const Dataset& data, double alpha) {
  data.validate();
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (data.n > 14)
    throw InputError("worst_subset_min_eig enumerates exhaustively and refuses n > 14");

  SubsetEigResult result;
  result.subset_size = static_cast<long>(std::ceil(alpha * static_cast<double>(data.n)));
  if (result.subset_size > data.n) {
    result.empty_family = true;
    result.min_eigenvalue = std::numeric_limits<double>::infinity();
    return result;
  }
  if (result.subset_size < 1) result.subset_size = 1;

  const int dim = data.d + 1;
  std::vector<Eigen::MatrixXd> outer(static_cast<std::size_t>(data.n));
  for (long i = 0; i < data.n; ++i) {
    Eigen::VectorXd xi(dim);
    xi.head(data.d) = data.covariates.row(i).transpose();
    xi(data.d) = 1.0;
    outer[static_cast<std::size_t>(i)] = xi * xi.transpose();
  }

  const long n = data.n;
  const long s = result.subset_size;
  double best = std::numeric_limits<double>::infinity();
#pragma omp parallel
  {
    double local_best = std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
// Enumerate bitmask subsets; popcount filters to size s. The min over
// subsets is order-free, so the parallel split is deterministic.
#pragma omp for schedule(static)
    for (long mask = 1; mask < (1L << n); ++mask) {
      if (__builtin_popcountl(static_cast<unsigned long>(mask)) != s) continue;
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
      for (long i = 0; i < n; ++i)
        if (mask & (1L << i)) sum += outer[static_cast<std::size_t>(i)];
      solver.compute(sum, Eigen::EigenvaluesOnly);
      local_best = std::min(local_best, solver.eigenvalues()(0));
    }
#pragma omp critical
    best = std::min(best, local_best);
  }
  result.min_eigenvalue = best;
  return result;
}

}  // namespace maxaffine
