#include "meshnet/lmi/affine.hpp"

#include <numeric>

#include "meshnet/errors.hpp"

namespace meshnet::lmi {

namespace {

void check_same_shape(const AffineMatrix& a, const AffineMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw MeshnetError(ErrorKind::kInvalidArgument,
                       "affine expression shape mismatch");
  }
}

SparseMat to_sparse(const Eigen::MatrixXd& m) {
  return m.sparseView(1.0, 0.0);
}

}  // namespace

AffineMatrix::AffineMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), constant_(Eigen::MatrixXd::Zero(rows, cols)) {}

AffineMatrix::AffineMatrix(const Eigen::MatrixXd& constant)
    : rows_(static_cast<int>(constant.rows())),
      cols_(static_cast<int>(constant.cols())),
      constant_(constant) {}

AffineMatrix::AffineMatrix(Variable v) : AffineMatrix(1, 1) {
  AddEntry(v, 0, 0, 1.0);
}

AffineMatrix AffineMatrix::Scalar(double c) {
  return AffineMatrix(Eigen::MatrixXd::Constant(1, 1, c));
}

void AffineMatrix::AddEntry(Variable v, int r, int c, double value) {
  auto it = terms_.find(v.index);
  if (it == terms_.end()) {
    it = terms_.emplace(v.index, SparseMat(rows_, cols_)).first;
  }
  it->second.coeffRef(r, c) += value;
}

void AffineMatrix::AddTerm(int var, const SparseMat& coeff) {
  auto it = terms_.find(var);
  if (it == terms_.end()) {
    terms_.emplace(var, coeff);
  } else {
    it->second += coeff;
  }
}

AffineMatrix AffineMatrix::operator+(const AffineMatrix& o) const {
  AffineMatrix out = *this;
  out += o;
  return out;
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& o) {
  check_same_shape(*this, o);
  constant_ += o.constant_;
  for (const auto& [v, m] : o.terms_) AddTerm(v, m);
  return *this;
}

AffineMatrix AffineMatrix::operator-() const { return (*this) * -1.0; }

AffineMatrix AffineMatrix::operator-(const AffineMatrix& o) const {
  return *this + (-o);
}

AffineMatrix AffineMatrix::operator*(double s) const {
  AffineMatrix out = *this;
  out.constant_ *= s;
  for (auto& [v, m] : out.terms_) m *= s;
  return out;
}

AffineMatrix AffineMatrix::transpose() const {
  AffineMatrix out(cols_, rows_);
  out.constant_ = constant_.transpose();
  for (const auto& [v, m] : terms_) out.terms_.emplace(v, SparseMat(m.transpose()));
  return out;
}

AffineMatrix operator*(const Eigen::MatrixXd& M, const AffineMatrix& a) {
  if (M.cols() != a.rows()) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "left product shape");
  }
  AffineMatrix out(static_cast<int>(M.rows()), a.cols());
  out.constant_ = M * a.constant_;
  for (const auto& [v, m] : a.terms_) {
    out.terms_.emplace(v, to_sparse(M * Eigen::MatrixXd(m)));
  }
  return out;
}

AffineMatrix AffineMatrix::operator*(const Eigen::MatrixXd& M) const {
  if (cols_ != M.rows()) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "right product shape");
  }
  AffineMatrix out(rows_, static_cast<int>(M.cols()));
  out.constant_ = constant_ * M;
  for (const auto& [v, m] : terms_) {
    out.terms_.emplace(v, to_sparse(Eigen::MatrixXd(m) * M));
  }
  return out;
}

AffineMatrix AffineMatrix::ScalarTimes(const AffineMatrix& s,
                                       const Eigen::MatrixXd& M) {
  if (s.rows() != 1 || s.cols() != 1) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "expected scalar");
  }
  AffineMatrix out(static_cast<int>(M.rows()), static_cast<int>(M.cols()));
  out.constant_ = s.constant_(0, 0) * M;
  const SparseMat Ms = to_sparse(M);
  for (const auto& [v, m] : s.terms_) {
    const double c = m.coeff(0, 0);
    if (c != 0.0) out.terms_.emplace(v, Ms * c);
  }
  return out;
}

AffineMatrix AffineMatrix::Sym() const { return *this + transpose(); }

Eigen::MatrixXd AffineMatrix::Evaluate(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd out = constant_;
  for (const auto& [v, m] : terms_) out += y(v) * Eigen::MatrixXd(m);
  return out;
}

AffineMatrix AffineMatrix::Block(int r, int c, int rows, int cols) const {
  AffineMatrix out(rows, cols);
  out.constant_ = constant_.block(r, c, rows, cols);
  for (const auto& [v, m] : terms_) {
    SparseMat b = m.block(r, c, rows, cols);
    if (b.nonZeros() > 0) out.terms_.emplace(v, b);
  }
  return out;
}

AffineMatrix BlockMatrix(const std::vector<std::vector<AffineMatrix>>& blocks,
                         const std::vector<int>& row_sizes,
                         const std::vector<int>& col_sizes) {
  const int rows = std::accumulate(row_sizes.begin(), row_sizes.end(), 0);
  const int cols = std::accumulate(col_sizes.begin(), col_sizes.end(), 0);
  Eigen::MatrixXd constant = Eigen::MatrixXd::Zero(rows, cols);
  std::map<int, std::vector<Eigen::Triplet<double>>> triplets;
  int r0 = 0;
  for (size_t bi = 0; bi < row_sizes.size(); ++bi) {
    int c0 = 0;
    for (size_t bj = 0; bj < col_sizes.size(); ++bj) {
      if (bi < blocks.size() && bj < blocks[bi].size()) {
        const AffineMatrix& b = blocks[bi][bj];
        if (b.rows() != 0 || b.cols() != 0) {
          if (b.rows() != row_sizes[bi] || b.cols() != col_sizes[bj]) {
            throw MeshnetError(ErrorKind::kInvalidArgument,
                               "block size mismatch in BlockMatrix");
          }
          constant.block(r0, c0, b.rows(), b.cols()) = b.constant();
          for (const auto& [v, m] : b.terms()) {
            auto& t = triplets[v];
            for (int k = 0; k < m.outerSize(); ++k) {
              for (SparseMat::InnerIterator it(m, k); it; ++it) {
                t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
              }
            }
          }
        }
      }
      c0 += col_sizes[bj];
    }
    r0 += row_sizes[bi];
  }
  AffineMatrix out(constant);
  for (auto& [v, t] : triplets) {
    SparseMat m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    out.AddTerm(v, m);
  }
  return out;
}

}  // namespace meshnet::lmi
