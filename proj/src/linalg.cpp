#include "authalic/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "authalic/common.hpp"

namespace authalic {

namespace {

constexpr double kPivotTolerance = 1e-12;

using Llt = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

// Original row index of position j in the permuted matrix P_e A P_e^T.
int original_index(const Permutation& p_eigen, int j) {
  const auto& idx = p_eigen.indices();
  for (int i = 0; i < idx.size(); ++i) {
    if (idx[i] == j) return i;
  }
  return j;
}

[[noreturn]] void throw_not_spd(int pivot, double value) {
  throw NumericError("matrix not SPD: pivot " + std::to_string(value) + " at index " + std::to_string(pivot));
}

}  // namespace

struct CholeskyFactor::Impl {
  Llt llt;
};

CholeskyFactor CholeskyFactor::factorize(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("factorize: matrix is not square");
  const int n = static_cast<int>(m.rows());
  if (n == 0) return CholeskyFactor();
  double max_diag = 0.0;
  double max_abs = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (!std::isfinite(it.value())) throw ValidationError("factorize: non-finite entry");
      max_abs = std::max(max_abs, std::abs(it.value()));
      if (it.row() == it.col()) max_diag = std::max(max_diag, it.value());
    }
  }
  const SparseMatrix asym = m - SparseMatrix(m.transpose());
  for (int k = 0; k < asym.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(asym, k); it; ++it) {
      if (std::abs(it.value()) > 1e-12 * max_abs) throw ValidationError("factorize: matrix is not symmetric");
    }
  }

  auto impl = std::make_shared<Impl>();
  impl->llt.compute(m);
  const double threshold = kPivotTolerance * max_diag;
  if (impl->llt.info() != Eigen::Success || max_diag <= 0.0) {
    Ldlt ldlt(m);
    const Eigen::VectorXd d = ldlt.vectorD();
    for (int j = 0; j < d.size(); ++j) {
      if (!(d[j] > threshold)) throw_not_spd(original_index(ldlt.permutationP(), j), d[j]);
    }
    throw_not_spd(-1, 0.0);
  }
  const SparseMatrix l = impl->llt.matrixL();
  for (int j = 0; j < n; ++j) {
    const double pivot = l.coeff(j, j) * l.coeff(j, j);
    if (!(pivot > threshold)) throw_not_spd(original_index(impl->llt.permutationP(), j), pivot);
  }

  CholeskyFactor factor;
  factor.impl_ = std::move(impl);
  factor.n_ = n;
  return factor;
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::Ref<const Eigen::VectorXd>& r) const {
  if (r.size() != n_) {
    throw ValidationError("solve: dimension mismatch (" + std::to_string(r.size()) + " vs " + std::to_string(n_) + ")");
  }
  if (n_ == 0) return Eigen::VectorXd();
  return impl_->llt.solve(r);
}

SparseMatrix CholeskyFactor::upper() const {
  if (!impl_) return SparseMatrix();
  return impl_->llt.matrixU();
}

Permutation CholeskyFactor::permutation() const {
  if (!impl_) return Permutation();
  return impl_->llt.permutationP().transpose();
}

}  // namespace authalic
