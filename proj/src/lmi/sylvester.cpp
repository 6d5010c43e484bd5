#include "meshnet/lmi/sylvester.hpp"

#include <numeric>

#include "meshnet/errors.hpp"

namespace meshnet::lmi {

BlockSymMatrix::BlockSymMatrix(const Eigen::MatrixXd& dense,
                               std::vector<int> block_sizes)
    : dense_(dense), sizes_(std::move(block_sizes)) {
  int off = 0;
  for (int s : sizes_) {
    if (s <= 0) {
      throw MeshnetError(ErrorKind::kInvalidArgument, "block size must be positive");
    }
    offsets_.push_back(off);
    off += s;
  }
  if (dense.rows() != off || dense.cols() != off) {
    throw MeshnetError(ErrorKind::kInvalidArgument,
                       "block sizes do not match the matrix");
  }
  const double scale = 1.0 + dense.cwiseAbs().maxCoeff();
  if ((dense - dense.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "matrix is not symmetric");
  }
}

Eigen::MatrixXd BlockSymMatrix::block(int i, int j) const {
  return dense_.block(offsets_[i], offsets_[j], sizes_[i], sizes_[j]);
}

std::vector<Eigen::MatrixXd> BlockSymMatrix::row(int i) const {
  std::vector<Eigen::MatrixXd> out;
  for (int j = 0; j <= i; ++j) out.push_back(block(i, j));
  return out;
}

Eigen::MatrixXd SylvesterFactor::Assemble() const {
  const int n = size();
  std::vector<int> off(n + 1, 0);
  for (int i = 0; i < n; ++i) off[i + 1] = off[i] + static_cast<int>(diag[i].rows());
  const int dim = off[n];
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    const int s = static_cast<int>(diag[i].rows());
    A.block(off[i], off[i], s, s) = diag[i];
    D.block(off[i], off[i], s, s) = diag[i].ldlt().solve(Eigen::MatrixXd::Identity(s, s));
    for (int k = 0; k < i; ++k) {
      A.block(off[i], off[k], s, diag[k].rows()) = lower[i][k];
    }
  }
  Eigen::MatrixXd W = A * D * A.transpose();
  return 0.5 * (W + W.transpose());
}

bool is_pd(const Eigen::MatrixXd& S, double pd_tol) {
  Eigen::MatrixXd T = 0.5 * (S + S.transpose());
  T.diagonal().array() -= pd_tol;
  Eigen::LLT<Eigen::MatrixXd> llt(T);
  return llt.info() == Eigen::Success;
}

SylvesterStepResult sylvester_step(const std::vector<Eigen::MatrixXd>& W_row_i,
                                   const SylvesterFactor& prior, double pd_tol) {
  const int i = prior.size();
  if (static_cast<int>(W_row_i.size()) != i + 1) {
    throw MeshnetError(ErrorKind::kInvalidArgument,
                       "row length does not match the prior factors");
  }
  std::vector<Eigen::LLT<Eigen::MatrixXd>> chol;
  chol.reserve(i);
  for (int j = 0; j < i; ++j) {
    if (!is_pd(prior.diag[j], pd_tol)) {
      throw MeshnetError(ErrorKind::kPriorNotPD,
                         "stored factor " + std::to_string(j) + " is not PD");
    }
    chol.emplace_back(prior.diag[j]);
  }
  const Eigen::MatrixXd& W_ii = W_row_i[i];
  // Forward substitution: W~_ik = W_ik - sum_{l<k} W~_il W~_ll^{-1} W~_kl^T.
  std::vector<Eigen::MatrixXd> row(i);
  for (int k = 0; k < i; ++k) {
    Eigen::MatrixXd acc = W_row_i[k];
    for (int l = 0; l < k; ++l) {
      acc -= row[l] * chol[l].solve(prior.lower[k][l].transpose());
    }
    row[k] = acc;
  }
  Eigen::MatrixXd W_tilde = W_ii;
  for (int k = 0; k < i; ++k) {
    W_tilde -= row[k] * chol[k].solve(row[k].transpose());
  }
  W_tilde = 0.5 * (W_tilde + W_tilde.transpose());

  SylvesterStepResult out;
  out.W_tilde_ii = W_tilde;
  out.factors = prior;
  out.factors.diag.push_back(W_tilde);
  out.factors.lower.push_back(std::move(row));
  return out;
}

bool is_pd_compositional(const BlockSymMatrix& W, double pd_tol) {
  SylvesterFactor f;
  for (int i = 0; i < W.num_blocks(); ++i) {
    SylvesterStepResult r = sylvester_step(W.row(i), f, pd_tol);
    if (!is_pd(r.W_tilde_ii, pd_tol)) return false;
    f = std::move(r.factors);
  }
  return true;
}

}  // namespace meshnet::lmi
