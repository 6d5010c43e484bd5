#pragma once

#include <vector>

#include <Eigen/Dense>

#include "meshnet/tolerance.hpp"

namespace meshnet::lmi {

/// Symmetric N x N grid of equally indexed blocks with W_ij = W_ji^T.
class BlockSymMatrix {
 public:
  /// Wraps a dense symmetric matrix partitioned into @p block_sizes. Throws
  /// kInvalidArgument on size mismatch or asymmetry above 1e-12 (relative).
  BlockSymMatrix(const Eigen::MatrixXd& dense, std::vector<int> block_sizes);

  int num_blocks() const { return static_cast<int>(sizes_.size()); }
  int block_size(int i) const { return sizes_[i]; }
  int offset(int i) const { return offsets_[i]; }
  Eigen::MatrixXd block(int i, int j) const;
  const Eigen::MatrixXd& dense() const { return dense_; }

  /// The blocks W_i0 ... W_ii of row i.
  std::vector<Eigen::MatrixXd> row(int i) const;

 private:
  Eigen::MatrixXd dense_;
  std::vector<int> sizes_;
  std::vector<int> offsets_;
};

/// Cached factors of the compositional PD test: W = A D A^T with A block
/// lower triangular, A_kl = W~_kl (k > l), A_kk = W~_kk, D = diag(W~_kk^{-1}).
struct SylvesterFactor {
  /// W~_jj for every processed index j.
  std::vector<Eigen::MatrixXd> diag;
  /// lower[j][k] = W~_jk for k < j.
  std::vector<std::vector<Eigen::MatrixXd>> lower;

  int size() const { return static_cast<int>(diag.size()); }

  /// Reconstructs A D A^T, which equals the processed leading principal
  /// block of W.
  Eigen::MatrixXd Assemble() const;
};

struct SylvesterStepResult {
  Eigen::MatrixXd W_tilde_ii;
  SylvesterFactor factors;
};

/// One step of the sequential Schur-complement recursion.
///
/// @p W_row_i holds W_i0 ... W_i,i-1 followed by W_ii. The row factors
/// W~_i = W_i (D A^T)^{-1} are obtained by forward substitution against the
/// unit-diagonal lower-triangular A D (no explicit inverse), then
/// W~_ii = W_ii - sum_k W~_ik W~_kk^{-1} W~_ik^T. Throws kPriorNotPD when a
/// stored W~_jj fails Cholesky at tolerance @p pd_tol, and kInvalidArgument
/// when the row length does not match the prior.
SylvesterStepResult sylvester_step(const std::vector<Eigen::MatrixXd>& W_row_i,
                                   const SylvesterFactor& prior,
                                   double pd_tol = ToleranceConfig{}.pd_tol);

/// True iff every W~_ii of the recursion is positive definite (Cholesky of
/// W~_ii - pd_tol I succeeds).
bool is_pd_compositional(const BlockSymMatrix& W,
                         double pd_tol = ToleranceConfig{}.pd_tol);

/// Cholesky test of S - pd_tol I.
bool is_pd(const Eigen::MatrixXd& S, double pd_tol = ToleranceConfig{}.pd_tol);

}  // namespace meshnet::lmi
