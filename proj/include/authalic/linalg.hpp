#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace authalic {

// Column-major sparse matrix. Symmetric matrices store both triangles.
using SparseMatrix = Eigen::SparseMatrix<double>;
using Permutation = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>;

// Fill-reducing (approximate minimum degree) sparse Cholesky factorization
//   U^T U = P^T M P
// of a symmetric positive definite matrix M. Immutable once built; solve()
// may be called concurrently.
class CholeskyFactor {
 public:
  // Throws NumericError("matrix not SPD ...") naming the offending pivot when
  // a pivot falls below 1e-12 times the largest diagonal entry, and
  // ValidationError for non-square, non-symmetric or non-finite input.
  static CholeskyFactor factorize(const SparseMatrix& m);

  // x with M x = r. Throws ValidationError on dimension mismatch.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& r) const;

  int size() const { return n_; }

  // Upper-triangular factor U.
  SparseMatrix upper() const;
  // P in U^T U = P^T M P.
  Permutation permutation() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  int n_ = 0;
};

}  // namespace authalic
