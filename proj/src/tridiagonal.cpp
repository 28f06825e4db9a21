#include "bdls/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

namespace bdls {

CyclicTridiagonal::CyclicTridiagonal(std::vector<double> lower, std::vector<double> diag,
                                     std::vector<double> upper)
    : n_(diag.size()), lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
  const std::size_t n = n_;
  if (n < 3) throw std::invalid_argument("cyclic tridiagonal: need at least 3 rows");
  if (lower_.size() != n || upper_.size() != n)
    throw std::invalid_argument("cyclic tridiagonal: band sizes differ");

  u_.assign(n, 0.0);
  r_.assign(n - 1, 0.0);
  l_.assign(n - 1, 0.0);
  s_.assign(n - 1, 0.0);

  u_[0] = diag_[0];
  r_[0] = lower_[0];               // A[0][n-1]
  double q = upper_[n - 1];        // working entry of the last row, column i
  double last = diag_[n - 1];      // working A[n-1][n-1]
  for (std::size_t i = 0; i + 2 < n; ++i) {
    if (!(u_[i] != 0.0) || !std::isfinite(u_[i]))
      throw std::runtime_error("cyclic tridiagonal: zero pivot at row " + std::to_string(i));
    const std::size_t k = i + 1;
    l_[k] = lower_[k] / u_[i];
    u_[k] = diag_[k] - l_[k] * upper_[i];
    r_[k] = (k == n - 2 ? upper_[n - 2] : 0.0) - l_[k] * r_[i];

    s_[i] = q / u_[i];
    last -= s_[i] * r_[i];
    q = (k == n - 2 ? lower_[n - 1] : 0.0) - s_[i] * upper_[i];
  }
  const std::size_t m = n - 2;
  if (!(u_[m] != 0.0) || !std::isfinite(u_[m]))
    throw std::runtime_error("cyclic tridiagonal: zero pivot at row " + std::to_string(m));
  s_[m] = q / u_[m];
  last -= s_[m] * r_[m];
  u_[n - 1] = last;
  if (!(last != 0.0) || !std::isfinite(last))
    throw std::runtime_error("cyclic tridiagonal: matrix is singular");
}

void CyclicTridiagonal::solve(std::span<const double> rhs, std::span<double> x) const {
  const std::size_t n = n_;
  if (rhs.size() != n || x.size() != n)
    throw std::invalid_argument("cyclic tridiagonal: right-hand side has wrong size");
  std::vector<double> y(n);
  y[0] = rhs[0];
  for (std::size_t i = 1; i + 1 < n; ++i) y[i] = rhs[i] - l_[i] * y[i - 1];
  double tail = rhs[n - 1];
  for (std::size_t j = 0; j + 1 < n; ++j) tail -= s_[j] * y[j];
  y[n - 1] = tail;

  x[n - 1] = y[n - 1] / u_[n - 1];
  x[n - 2] = (y[n - 2] - r_[n - 2] * x[n - 1]) / u_[n - 2];
  for (std::size_t i = n - 2; i-- > 0;)
    x[i] = (y[i] - upper_[i] * x[i + 1] - r_[i] * x[n - 1]) / u_[i];
}

std::vector<double> CyclicTridiagonal::solve(std::span<const double> rhs) const {
  std::vector<double> x(n_);
  solve(rhs, x);
  return x;
}

std::vector<double> CyclicTridiagonal::multiply(std::span<const double> x) const {
  const std::size_t n = n_;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    y[i] = lower_[i] * x[prev] + diag_[i] * x[i] + upper_[i] * x[next];
  }
  return y;
}

}  // namespace bdls
