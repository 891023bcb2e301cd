#include "maxaffine/objective.hpp"

#include <vector>

namespace maxaffine {
namespace {

// Fixed accumulation block size. Partial sums are formed per block in sample
// order and then combined by halving, so the floating-point summation order
// depends only on the sample order, never on the thread count.
constexpr long kReduceBlock = 2048;

template <typename T>
void combine_halving(std::vector<T>& parts) {
  long m = static_cast<long>(parts.size());
  while (m > 1) {
    const long h = (m + 1) / 2;
    for (long b = 0; b + h < m; ++b) parts[static_cast<std::size_t>(b)] += parts[static_cast<std::size_t>(b + h)];
    m = h;
  }
}

// One residual evaluation: maximizing piece (smallest index on ties) and
// residual value at sample row x.
inline void residual_at(const ModelParams& params, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                        double y, int& cell, double& residual) {
  const int d = params.d;
  int arg = 0;
  double best = params.blocks.row(0).head(d).dot(x) + params.blocks(0, d);
  for (int j = 1; j < params.k; ++j) {
    const double v = params.blocks.row(j).head(d).dot(x) + params.blocks(j, d);
    if (v > best) {
      best = v;
      arg = j;
    }
  }
  cell = arg;
  residual = best - y;
}

struct BatchSums {
  double squared_sum = 0.0;
  RowMatrix grad_sum;
};

// Shared accumulation core for gradient() and minibatch_gradient(). `index`
// maps accumulation position to sample index; both entry points therefore
// produce bit-identical sums whenever the index sequences coincide.
template <typename IndexFn>
BatchSums accumulate(const ModelParams& params, const Dataset& data, long count, IndexFn index) {
  const int k = params.k;
  const int d = params.d;
  const long nblocks = (count + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> sq(static_cast<std::size_t>(nblocks), 0.0);
  std::vector<RowMatrix> gs(static_cast<std::size_t>(nblocks), RowMatrix::Zero(k, d + 1));

#pragma omp parallel for schedule(static)
  for (long b = 0; b < nblocks; ++b) {
    const long lo = b * kReduceBlock;
    const long hi = std::min(count, lo + kReduceBlock);
    double local_sq = 0.0;
    RowMatrix& g = gs[static_cast<std::size_t>(b)];
    for (long p = lo; p < hi; ++p) {
      const long i = index(p);
      int cell;
      double r;
      residual_at(params, data.covariates.row(i), data.responses(i), cell, r);
      local_sq += r * r;
      g.row(cell).head(d) += r * data.covariates.row(i);
      g(cell, d) += r;
    }
    sq[static_cast<std::size_t>(b)] = local_sq;
  }

  combine_halving(sq);
  combine_halving(gs);
  return BatchSums{sq[0], std::move(gs[0])};
}

}  // namespace

Eigen::VectorXd Gradient::to_vector() const {
  Eigen::VectorXd v(static_cast<long>(k) * (d + 1));
  for (int j = 0; j < k; ++j) v.segment(static_cast<long>(j) * (d + 1), d + 1) = blocks.row(j);
  return v;
}

double loss_serial(const ModelParams& params, const Dataset& data) {
  detail::check_dims(params, data);
  if (data.n < 1) throw InputError("loss requires a nonempty dataset");
  double sum = 0.0;
  for (long i = 0; i < data.n; ++i) {
    int cell;
    double r;
    residual_at(params, data.covariates.row(i), data.responses(i), cell, r);
    sum += r * r;
  }
  return sum / (2.0 * static_cast<double>(data.n));
}

double loss(const ModelParams& params, const Dataset& data) {
  detail::check_dims(params, data);
  if (data.n < 1) throw InputError("loss requires a nonempty dataset");
  const long nblocks = (data.n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> sq(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < nblocks; ++b) {
    const long lo = b * kReduceBlock;
    const long hi = std::min(data.n, lo + kReduceBlock);
    double local = 0.0;
    for (long i = lo; i < hi; ++i) {
      int cell;
      double r;
      residual_at(params, data.covariates.row(i), data.responses(i), cell, r);
      local += r * r;
    }
    sq[static_cast<std::size_t>(b)] = local;
  }
  combine_halving(sq);
  return sq[0] / (2.0 * static_cast<double>(data.n));
}

Gradient gradient_serial(const ModelParams& params, const Dataset& data) {
  detail::check_dims(params, data);
  if (data.n < 1) throw InputError("gradient requires a nonempty dataset");
  Gradient g(params.k, params.d);
  for (long i = 0; i < data.n; ++i) {
    int cell;
    double r;
    residual_at(params, data.covariates.row(i), data.responses(i), cell, r);
    g.blocks.row(cell).head(params.d) += r * data.covariates.row(i);
    g.blocks(cell, params.d) += r;
  }
  g.blocks /= static_cast<double>(data.n);
  return g;
}

Gradient gradient(const ModelParams& params, const Dataset& data) {
  detail::check_dims(params, data);
  if (data.n < 1) throw InputError("gradient requires a nonempty dataset");
  BatchSums sums = accumulate(params, data, data.n, [](long p) { return p; });
  Gradient g(params.k, params.d);
  g.blocks = sums.grad_sum / static_cast<double>(data.n);
  return g;
}

double loss_and_gradient(const ModelParams& params, const Dataset& data, Gradient& grad) {
  detail::check_dims(params, data);
  if (data.n < 1) throw InputError("gradient requires a nonempty dataset");
  BatchSums sums = accumulate(params, data, data.n, [](long p) { return p; });
  grad.k = params.k;
  grad.d = params.d;
  grad.blocks = sums.grad_sum / static_cast<double>(data.n);
  return sums.squared_sum / (2.0 * static_cast<double>(data.n));
}

Gradient sample_gradient(const ModelParams& params, const Dataset& data, long i) {
  detail::check_dims(params, data);
  if (i < 0 || i >= data.n) throw InputError("sample index out of range");
  int cell;
  double r;
  residual_at(params, data.covariates.row(i), data.responses(i), cell, r);
  Gradient g(params.k, params.d);
  g.blocks.row(cell).head(params.d) = r * data.covariates.row(i);
  g.blocks(cell, params.d) = r;
  return g;
}

Gradient minibatch_gradient(const ModelParams& params, const Dataset& data,
                            std::span<const long> batch) {
  detail::check_dims(params, data);
  if (batch.empty()) throw InputError("minibatch is empty");
  for (long i : batch)
    if (i < 0 || i >= data.n) throw InputError("minibatch index out of range");
  BatchSums sums = accumulate(params, data, static_cast<long>(batch.size()),
                              [&batch](long p) { return batch[static_cast<std::size_t>(p)]; });
  Gradient g(params.k, params.d);
  g.blocks = sums.grad_sum / static_cast<double>(batch.size());
  return g;
}

}  // namespace maxaffine
