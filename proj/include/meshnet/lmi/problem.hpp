#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meshnet/lmi/affine.hpp"
#include "meshnet/tolerance.hpp"

namespace meshnet::lmi {

enum class Sense {
  /// F(y) >= margin * I
  kPsd,
  /// F(y) <= -margin * I
  kNsd,
};

/// Which entrywise surrogate backs a block-norm objective term.
enum class BlockNorm { kEntrywise, kInduced1 };

/// One symmetric affine constraint.
struct LmiConstraint {
  std::string name;
  AffineMatrix F;
  Sense sense{Sense::kPsd};
  /// Per-constraint margin; the problem-wide default applies when unset.
  std::optional<double> margin;
};

/// Variables, symmetric affine constraints and a linear objective.
class LmiProblem {
 public:
  Variable NewVariable(const std::string& name);

  /// Scalar expression of a fresh variable.
  AffineMatrix NewScalar(const std::string& name);

  /// Matrix of fresh variables where @p mask is true; other entries are
  /// structural zeros.
  AffineMatrix NewMatrix(const std::string& name,
                         const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask);
  AffineMatrix NewMatrix(const std::string& name, int rows, int cols);
  /// Symmetric matrix variable (n(n+1)/2 scalars).
  AffineMatrix NewSymmetric(const std::string& name, int n);

  /// F >= margin * I (or <= -margin * I). Throws kInvalidArgument when F is
  /// not square and symmetric in every coefficient.
  void AddLmi(const std::string& name, const AffineMatrix& F,
              Sense sense = Sense::kPsd,
              std::optional<double> margin = std::nullopt);

  /// Scalar linear inequality a >= b (non-strict).
  void AddGreaterEqual(const std::string& name, const AffineMatrix& a,
                       const AffineMatrix& b);

  /// Adds a scalar affine expression to the objective (minimized).
  void AddCost(const AffineMatrix& c);

  /// Returns t with t >= |e| elementwise-summed over all entries of @p m
  /// (entrywise) or the max column absolute sum (induced1).
  AffineMatrix AddNormBound(const std::string& name, const AffineMatrix& m,
                            BlockNorm norm);

  int num_variables() const { return static_cast<int>(names_.size()); }
  const std::string& variable_name(int i) const { return names_[i]; }
  const std::vector<LmiConstraint>& constraints() const { return constraints_; }
  const Eigen::VectorXd& objective() const { return c_; }
  double objective_constant() const { return c0_; }

 private:
  std::vector<std::string> names_;
  std::vector<LmiConstraint> constraints_;
  Eigen::VectorXd c_;
  double c0_{0.0};
};

/// Encodes ||M|| <= t (spectral norm) as [[t I, M], [M^T, t I]] >= 0.
LmiConstraint spectral_bound_constraint(const AffineMatrix& M,
                                        const AffineMatrix& t);

enum class SolveStatus { kOptimal, kInfeasible, kNumericalFailure };

const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status{SolveStatus::kNumericalFailure};
  Eigen::VectorXd assignment;
  double objective{0.0};
  /// Largest violation of any constraint at the returned assignment, measured
  /// against its margin by a direct eigenvalue evaluation.
  double max_violation{0.0};
  std::string backend;
  int iterations{0};
  std::string message;

  double value(const AffineMatrix& scalar) const;
  Eigen::MatrixXd value_matrix(const AffineMatrix& m) const;
};

/// Violation of a single constraint at @p y (0 when satisfied).
double constraint_violation(const LmiConstraint& c, const Eigen::VectorXd& y,
                            double default_margin);

/// Pluggable conic backend.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string id() const = 0;
  virtual SolveReport Solve(const LmiProblem& p,
                            const ToleranceConfig& tol) const = 0;
};

/// Registers a backend under its id (replacing any previous one).
void register_backend(std::shared_ptr<SolverBackend> backend);
std::vector<std::string> registered_backends();

struct SolverOptions {
  /// Backend id; empty selects $MESHNET_SOLVER, then "ipm".
  std::string backend;
  ToleranceConfig tol;
};

/// @p requested if non-empty, else $MESHNET_SOLVER if set, else "ipm".
std::string resolve_backend(const std::string& requested);

/// Solves @p p with the selected backend. The returned report has
/// status kOptimal only if max_violation <= tol.feas_tol. Throws
/// kInvalidArgument for an unknown backend id.
SolveReport solve(const LmiProblem& p, const SolverOptions& options = {});

}  // namespace meshnet::lmi
