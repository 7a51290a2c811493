#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deed/grid.hpp"
#include "deed/variational.hpp"

// Dense reference solvers for tiny grids. Everything here is assembled
// entry by entry from the definition of the discrete energy and shares no
// code path with the matrix-free solvers it checks.
namespace deed::oracle {

class DenseMatrix {
 public:
  explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
  std::vector<double> apply(const std::vector<double>& x) const;

 private:
  std::size_t n_;
  std::vector<double> a_;
};

/// Dense Hessian of 1/2 h^2 sum A grad_h v . grad_h v, assembled per pixel from
/// the forward-difference coefficient vectors.
DenseMatrix assemble_diffusion(const TensorField& tensor);

/// Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(DenseMatrix a, std::vector<double> b);

/// Minimizer of the energy by dense linear solve with refinement (t = 2) or
/// dense Newton. Below gradient sup-norm tol, Newton steps are kept only while
/// they reduce the gradient. Pinned pixels are fixed at zero.
ScalarField minimize_dense(const EnergyProblem& problem, const std::vector<std::uint8_t>& pinned = {},
                           double tol = 1e-13);

struct Check {
  std::string name;
  double error;
  double tolerance;
  bool pass() const { return error <= tolerance; }
};

/// Oracle-equivalence suite on built-in 2x2 .. 4x4 instances.
std::vector<Check> selftest(std::uint64_t seed = 0);

}  // namespace deed::oracle
