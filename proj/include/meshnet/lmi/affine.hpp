#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace meshnet::lmi {

using SparseMat = Eigen::SparseMatrix<double>;

/// A decision variable handle (index into the owning LmiProblem).
struct Variable {
  int index{-1};
};

/// Affine matrix expression C + sum_v y_v F_v with dense constant part and
/// sparse coefficient matrices. Scalars are 1x1 expressions.
class AffineMatrix {
 public:
  AffineMatrix() : AffineMatrix(0, 0) {}
  AffineMatrix(int rows, int cols);
  /// Constant expression.
  explicit AffineMatrix(const Eigen::MatrixXd& constant);
  /// Scalar expression 1 * y.
  explicit AffineMatrix(Variable v);
  /// Scalar constant.
  static AffineMatrix Scalar(double c);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Eigen::MatrixXd& constant() const { return constant_; }
  const std::map<int, SparseMat>& terms() const { return terms_; }

  /// Adds coefficient @p value at (r, c) of variable @p v.
  void AddEntry(Variable v, int r, int c, double value);
  void AddTerm(int var, const SparseMat& coeff);

  AffineMatrix operator+(const AffineMatrix& o) const;
  AffineMatrix operator-(const AffineMatrix& o) const;
  AffineMatrix operator-() const;
  AffineMatrix operator*(double s) const;
  AffineMatrix& operator+=(const AffineMatrix& o);

  AffineMatrix transpose() const;
  /// Left product by a constant matrix.
  friend AffineMatrix operator*(const Eigen::MatrixXd& M, const AffineMatrix& a);
  /// Right product by a constant matrix.
  AffineMatrix operator*(const Eigen::MatrixXd& M) const;
  /// Scalar affine expression times a constant matrix (s * M).
  static AffineMatrix ScalarTimes(const AffineMatrix& s, const Eigen::MatrixXd& M);

  /// X + X^T.
  AffineMatrix Sym() const;

  /// Value at assignment @p y.
  Eigen::MatrixXd Evaluate(const Eigen::VectorXd& y) const;

  /// Sub-block copy.
  AffineMatrix Block(int r, int c, int rows, int cols) const;

 private:
  int rows_;
  int cols_;
  Eigen::MatrixXd constant_;
  std::map<int, SparseMat> terms_;
};

/// Assembles a matrix expression from a grid of blocks. Empty cells (0x0
/// expressions) are zero; row heights and column widths are taken from the
/// given sizes.
AffineMatrix BlockMatrix(const std::vector<std::vector<AffineMatrix>>& blocks,
                         const std::vector<int>& row_sizes,
                         const std::vector<int>& col_sizes);

}  // namespace meshnet::lmi
