#include "maxaffine/model.hpp"

#include <cmath>

namespace maxaffine {

Eigen::VectorXd ModelParams::to_vector() const {
  Eigen::VectorXd v(static_cast<long>(k) * (d + 1));
  for (int j = 0; j < k; ++j) v.segment(static_cast<long>(j) * (d + 1), d + 1) = blocks.row(j);
  return v;
}

ModelParams ModelParams::from_vector(int k, int d, const Eigen::VectorXd& v) {
  if (v.size() != static_cast<long>(k) * (d + 1))
    throw InputError("parameter vector has wrong length");
  ModelParams p(k, d);
  for (int j = 0; j < k; ++j) p.blocks.row(j) = v.segment(static_cast<long>(j) * (d + 1), d + 1);
  return p;
}

void ModelParams::validate() const {
  if (k < 1 || d < 1) throw InputError("model needs k >= 1 pieces and d >= 1 dimensions");
  if (blocks.rows() != k || blocks.cols() != d + 1)
    throw InputError("parameter block matrix has wrong shape");
  if (!blocks.allFinite()) throw InputError("parameter blocks contain non-finite entries");
}

void Dataset::validate() const {
  if (n < 1 || d < 1) throw InputError("dataset needs n >= 1 samples and d >= 1 dimensions");
  if (covariates.rows() != n || covariates.cols() != d || responses.size() != n)
    throw InputError("dataset shapes are inconsistent");
  if (!covariates.allFinite() || !responses.allFinite())
    throw InputError("dataset contains non-finite entries");
}

namespace detail {
void check_dims(const ModelParams& params, const Dataset& data) {
  if (params.d != data.d) throw InputError("model dimension does not match dataset dimension");
}
}  // namespace detail

double predict(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != params.d) throw InputError("covariate length does not match model dimension");
  if (!x.allFinite()) throw InputError("covariate contains non-finite entries");
  double best = params.slope(0).dot(x.transpose()) + params.offset(0);
  for (int j = 1; j < params.k; ++j) {
    const double v = params.slope(j).dot(x.transpose()) + params.offset(j);
    if (v > best) best = v;
  }
  return best;
}

int maximizing_piece(const ModelParams& params,
                     const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  int arg = 0;
  double best = params.slope(0).dot(x) + params.offset(0);
  for (int j = 1; j < params.k; ++j) {
    const double v = params.slope(j).dot(x) + params.offset(j);
    if (v > best) {  // strict: ties stay at the smaller index
      best = v;
      arg = j;
    }
  }
  return arg;
}

Partition assign_cells_serial(const ModelParams& params, const Dataset& data) {
  detail::check_dims(params, data);
  Partition part;
  part.assignment.resize(static_cast<std::size_t>(data.n));
  part.cell_counts.assign(static_cast<std::size_t>(params.k), 0);
  for (long i = 0; i < data.n; ++i) {
    const int j = maximizing_piece(params, data.covariates.row(i));
    part.assignment[static_cast<std::size_t>(i)] = j;
    ++part.cell_counts[static_cast<std::size_t>(j)];
  }
  return part;
}

Partition assign_cells(const ModelParams& params, const Dataset& data) {
  detail::check_dims(params, data);
  Partition part;
  part.assignment.resize(static_cast<std::size_t>(data.n));
  part.cell_counts.assign(static_cast<std::size_t>(params.k), 0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < data.n; ++i)
    part.assignment[static_cast<std::size_t>(i)] = maximizing_piece(params, data.covariates.row(i));
  for (long i = 0; i < data.n; ++i)
    ++part.cell_counts[static_cast<std::size_t>(part.assignment[static_cast<std::size_t>(i)])];
  return part;
}

Eigen::VectorXd max_residuals(const ModelParams& params, const Dataset& data) {
  detail::check_dims(params, data);
  Eigen::VectorXd r(data.n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < data.n; ++i) {
    const auto x = data.covariates.row(i);
    double best = params.slope(0).dot(x) + params.offset(0);
    for (int j = 1; j < params.k; ++j) {
      const double v = params.slope(j).dot(x) + params.offset(j);
      if (v > best) best = v;
    }
    r(i) = best - data.responses(i);
  }
  return r;
}

}  // namespace maxaffine
