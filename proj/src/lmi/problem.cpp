#include "meshnet/lmi/problem.hpp"

#include <cstdlib>
#include <map>
#include <mutex>

#include "meshnet/errors.hpp"
#include "meshnet/lmi/ipm_backend.hpp"

namespace meshnet::lmi {

Variable LmiProblem::NewVariable(const std::string& name) {
  names_.push_back(name);
  c_.conservativeResize(num_variables());
  c_(num_variables() - 1) = 0.0;
  return Variable{num_variables() - 1};
}

AffineMatrix LmiProblem::NewScalar(const std::string& name) {
  return AffineMatrix(NewVariable(name));
}

AffineMatrix LmiProblem::NewMatrix(
    const std::string& name,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
  AffineMatrix out(static_cast<int>(mask.rows()), static_cast<int>(mask.cols()));
  for (int c = 0; c < mask.cols(); ++c) {
    for (int r = 0; r < mask.rows(); ++r) {
      if (!mask(r, c)) continue;
      const Variable v = NewVariable(name + "[" + std::to_string(r) + "," +
                                     std::to_string(c) + "]");
      out.AddEntry(v, r, c, 1.0);
    }
  }
  return out;
}

AffineMatrix LmiProblem::NewMatrix(const std::string& name, int rows, int cols) {
  return NewMatrix(name, Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::
                             Constant(rows, cols, true));
}

AffineMatrix LmiProblem::NewSymmetric(const std::string& name, int n) {
  AffineMatrix out(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = c; r < n; ++r) {
      const Variable v = NewVariable(name + "[" + std::to_string(r) + "," +
                                     std::to_string(c) + "]");
      out.AddEntry(v, r, c, 1.0);
      if (r != c) out.AddEntry(v, c, r, 1.0);
    }
  }
  return out;
}

void LmiProblem::AddLmi(const std::string& name, const AffineMatrix& F,
                        Sense sense, std::optional<double> margin) {
  if (F.rows() != F.cols() || F.rows() == 0) {
    throw MeshnetError(ErrorKind::kInvalidArgument,
                       "constraint " + name + " is not square");
  }
  const double scale = 1.0 + F.constant().cwiseAbs().maxCoeff();
  if ((F.constant() - F.constant().transpose()).cwiseAbs().maxCoeff() >
      1e-12 * scale) {
    throw MeshnetError(ErrorKind::kInvalidArgument,
                       "constraint " + name + " has an asymmetric constant");
  }
  for (const auto& [v, m] : F.terms()) {
    if (v < 0 || v >= num_variables()) {
      throw MeshnetError(ErrorKind::kInvalidArgument,
                         "constraint " + name + " references an undeclared variable");
    }
    const SparseMat d = m - SparseMat(m.transpose());
    for (int k = 0; k < d.outerSize(); ++k) {
      for (SparseMat::InnerIterator it(d, k); it; ++it) {
        if (std::abs(it.value()) > 1e-12 * (1.0 + std::abs(m.coeff(it.row(), it.col())))) {
          throw MeshnetError(ErrorKind::kInvalidArgument,
                             "constraint " + name + " has an asymmetric coefficient");
        }
      }
    }
  }
  constraints_.push_back(LmiConstraint{name, F, sense, margin});
}

void LmiProblem::AddGreaterEqual(const std::string& name, const AffineMatrix& a,
                                 const AffineMatrix& b) {
  if (a.rows() != 1 || a.cols() != 1 || b.rows() != 1 || b.cols() != 1) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "expected scalars");
  }
  AddLmi(name, a - b, Sense::kPsd, 0.0);
}

void LmiProblem::AddCost(const AffineMatrix& c) {
  if (c.rows() != 1 || c.cols() != 1) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "cost must be scalar");
  }
  c0_ += c.constant()(0, 0);
  for (const auto& [v, m] : c.terms()) c_(v) += m.coeff(0, 0);
}

AffineMatrix LmiProblem::AddNormBound(const std::string& name,
                                      const AffineMatrix& m, BlockNorm norm) {
  // Entries that are structurally zero need no bound.
  AffineMatrix total = AffineMatrix::Scalar(0.0);
  std::vector<AffineMatrix> column_sums(m.cols(), AffineMatrix::Scalar(0.0));
  for (int c = 0; c < m.cols(); ++c) {
    for (int r = 0; r < m.rows(); ++r) {
      AffineMatrix e = m.Block(r, c, 1, 1);
      if (e.terms().empty() && e.constant()(0, 0) == 0.0) continue;
      AffineMatrix t = NewScalar(name + ".abs[" + std::to_string(r) + "," +
                                 std::to_string(c) + "]");
      AddGreaterEqual(name + ".pos", t, e);
      AddGreaterEqual(name + ".neg", t, -e);
      total += t;
      column_sums[c] += t;
    }
  }
  if (norm == BlockNorm::kEntrywise) return total;
  AffineMatrix s = NewScalar(name + ".colmax");
  for (int c = 0; c < m.cols(); ++c) {
    AddGreaterEqual(name + ".col", s, column_sums[c]);
  }
  return s;
}

LmiConstraint spectral_bound_constraint(const AffineMatrix& M,
                                        const AffineMatrix& t) {
  const int r = M.rows();
  const int c = M.cols();
  AffineMatrix F = BlockMatrix(
      {{AffineMatrix::ScalarTimes(t, Eigen::MatrixXd::Identity(r, r)), M},
       {M.transpose(), AffineMatrix::ScalarTimes(t, Eigen::MatrixXd::Identity(c, c))}},
      {r, c}, {r, c});
  return LmiConstraint{"spectral_bound", F, Sense::kPsd, 0.0};
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

double SolveReport::value(const AffineMatrix& scalar) const {
  return scalar.Evaluate(assignment)(0, 0);
}

Eigen::MatrixXd SolveReport::value_matrix(const AffineMatrix& m) const {
  return m.Evaluate(assignment);
}

double constraint_violation(const LmiConstraint& c, const Eigen::VectorXd& y,
                            double default_margin) {
  const double margin = c.margin.value_or(default_margin);
  Eigen::MatrixXd F = c.F.Evaluate(y);
  if (c.sense == Sense::kNsd) F = -F;
  F = 0.5 * (F + F.transpose());
  double lmin;
  if (F.rows() == 1) {
    lmin = F(0, 0);
  } else {
    lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(F, Eigen::EigenvaluesOnly)
               .eigenvalues()(0);
  }
  return std::max(0.0, margin - lmin);
}

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, std::shared_ptr<SolverBackend>>& registry() {
  static std::map<std::string, std::shared_ptr<SolverBackend>> r = [] {
    std::map<std::string, std::shared_ptr<SolverBackend>> init;
    auto ipm = make_ipm_backend();
    init.emplace(ipm->id(), ipm);
    return init;
  }();
  return r;
}

}  // namespace

void register_backend(std::shared_ptr<SolverBackend> backend) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[backend->id()] = std::move(backend);
}

std::vector<std::string> registered_backends() {
  std::lock_guard<std::mutex> lock(registry_mutex());
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

std::string resolve_backend(const std::string& requested) {
  if (!requested.empty()) return requested;
  const char* env = std::getenv("MESHNET_SOLVER");
  return (env != nullptr && *env != '\0') ? env : "ipm";
}

SolveReport solve(const LmiProblem& p, const SolverOptions& options) {
  const std::string id = resolve_backend(options.backend);
  std::shared_ptr<SolverBackend> backend;
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry().find(id);
    if (it == registry().end()) {
      throw MeshnetError(ErrorKind::kInvalidArgument,
                         "unknown solver backend '" + id + "'");
    }
    backend = it->second;
  }
  SolveReport report = backend->Solve(p, options.tol);
  report.backend = id;
  if (report.assignment.size() == p.num_variables()) {
    double worst = 0.0;
    for (const auto& c : p.constraints()) {
      worst = std::max(worst, constraint_violation(c, report.assignment,
                                                   options.tol.margin));
    }
    report.max_violation = worst;
    report.objective =
        p.objective().dot(report.assignment) + p.objective_constant();
    if (report.status == SolveStatus::kOptimal &&
        worst > options.tol.feas_tol) {
      report.status = SolveStatus::kNumericalFailure;
      report.message += " (post-check violation " + std::to_string(worst) + ")";
    }
  }
  return report;
}

}  // namespace meshnet::lmi
