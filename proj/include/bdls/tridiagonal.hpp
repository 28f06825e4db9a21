#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bdls {

// LU factorization of a cyclic tridiagonal matrix
//
//   A[i][i] = diag[i], A[i][i+1] = upper[i], A[i][i-1] = lower[i]
//
// with indices taken mod n (so lower[0] sits in the top-right corner and
// upper[n-1] in the bottom-left). Elimination runs without pivoting, which is
// stable for the diagonally dominant M-matrices produced by implicit
// diffusion. For an M-matrix the forward and backward sweeps only add
// nonnegative terms, so a nonnegative right-hand side yields a nonnegative
// solution.
class CyclicTridiagonal {
 public:
  CyclicTridiagonal(std::vector<double> lower, std::vector<double> diag,
                    std::vector<double> upper);

  std::size_t size() const { return n_; }
  void solve(std::span<const double> rhs, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> rhs) const;

  // y = A x, used by tests and residual checks.
  std::vector<double> multiply(std::span<const double> x) const;

 private:
  std::size_t n_;
  std::vector<double> lower_, diag_, upper_;  // original matrix
  std::vector<double> u_;     // U diagonal
  std::vector<double> r_;     // U last column, rows 0..n-2
  std::vector<double> l_;     // L subdiagonal, rows 1..n-2
  std::vector<double> s_;     // L last row, columns 0..n-2
};

}  // namespace bdls
