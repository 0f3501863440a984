#include "urbanembed/eval/regression.hpp"

#include "urbanembed/eval/lasso.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace urbanembed {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Vector take(const Vector& y, const std::vector<std::size_t>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace

RegressionMetrics regression_metrics(const Vector& truth, const Vector& prediction) {
  if (truth.size() != prediction.size() || truth.size() == 0) {
    throw std::invalid_argument("regression_metrics: size mismatch or empty input");
  }
  const Vector err = truth - prediction;
  const double n = static_cast<double>(truth.size());
  RegressionMetrics m;
  m.mae = err.cwiseAbs().sum() / n;
  const double ss_res = err.squaredNorm();
  m.rmse = std::sqrt(ss_res / n);
  const double ss_tot = (truth.array() - truth.mean()).square().sum();
  m.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return m;
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("make_folds: k must be positive");
  if (k > n) throw std::invalid_argument("make_folds: k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " samples");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t state = seed;
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(splitmix64(state) % (i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos), order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

std::vector<double> default_l1_grid(const Matrix& x, const Vector& y, std::size_t count) {
  const double top = lasso_lambda_max(x, y);
  if (count == 0) return {};
  if (top <= 0.0) return {0.0};
  if (count == 1) return {top};
  std::vector<double> grid(count);
  const double lo = std::log(1e-4 * top), hi = std::log(top);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return grid;
}

RegressionReport kfold_regress(const Matrix& x, const Vector& y, std::size_t k, std::span<const double> l1_grid,
                               std::uint64_t seed, const std::string& task) {
  if (x.rows() != y.size()) throw std::invalid_argument("kfold_regress: X/y row mismatch");
  const auto folds = make_folds(static_cast<std::size_t>(x.rows()), k, seed);
  std::vector<double> grid(l1_grid.begin(), l1_grid.end());
  if (grid.empty()) grid = default_l1_grid(x, y);

  RegressionReport best;
  best.task = task;
  best.folds = k;
  bool have_best = false;
  for (double lambda : grid) {
    RegressionMetrics mean;
    for (std::size_t f = 0; f < k; ++f) {
      std::vector<std::size_t> train_rows;
      for (std::size_t g = 0; g < k; ++g) {
        if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
      }
      const LassoModel model = lasso_fit(take_rows(x, train_rows), take(y, train_rows), lambda);
      const Matrix x_test = take_rows(x, folds[f]);
      const auto m = regression_metrics(take(y, folds[f]), model.predict(x_test));
      mean.mae += m.mae / static_cast<double>(k);
      mean.rmse += m.rmse / static_cast<double>(k);
      mean.r2 += m.r2 / static_cast<double>(k);
    }
    if (!have_best || mean.mae < best.mae) {
      best.mae = mean.mae;
      best.rmse = mean.rmse;
      best.r2 = mean.r2;
      best.l1_weight = lambda;
      have_best = true;
    }
  }
  return best;
}

}  // namespace urbanembed
