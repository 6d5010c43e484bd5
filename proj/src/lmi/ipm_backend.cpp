#include "meshnet/lmi/ipm_backend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace meshnet::lmi {
namespace {

struct Entry {
  int r;
  int c;
  double v;
};

/// One semidefinite block Z = F0 + sum_v y_v F_v >= 0.
struct SdpBlock {
  int n{0};
  Eigen::MatrixXd F0;
  /// Global variable ids present in this block and their full (both
  /// triangles) coefficient entries.
  std::vector<int> vars;
  std::vector<std::vector<Entry>> coeffs;
};

/// Standard form: min c^T y  s.t.  SDP blocks >= 0,  f0 + A y >= 0.
struct StandardForm {
  int num_vars{0};
  Eigen::VectorXd c;
  std::vector<SdpBlock> blocks;
  Eigen::VectorXd f0;
  SparseMat A;  // rows = LP constraints
};

StandardForm to_standard_form(const LmiProblem& p, double default_margin) {
  StandardForm sf;
  sf.num_vars = p.num_variables();
  sf.c = p.objective();
  std::vector<double> f0;
  std::vector<Eigen::Triplet<double>> lp;
  for (const auto& con : p.constraints()) {
    const double sign = con.sense == Sense::kPsd ? 1.0 : -1.0;
    const double margin = con.margin.value_or(default_margin);
    const int n = con.F.rows();
    if (n == 1) {
      const int row = static_cast<int>(f0.size());
      f0.push_back(sign * con.F.constant()(0, 0) - margin);
      for (const auto& [v, m] : con.F.terms()) {
        const double a = sign * m.coeff(0, 0);
        if (a != 0.0) lp.emplace_back(row, v, a);
      }
      continue;
    }
    SdpBlock b;
    b.n = n;
    b.F0 = sign * con.F.constant() -
           margin * Eigen::MatrixXd::Identity(n, n);
    b.F0 = 0.5 * (b.F0 + b.F0.transpose());
    for (const auto& [v, m] : con.F.terms()) {
      std::vector<Entry> entries;
      for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(m, k); it; ++it) {
          if (it.value() != 0.0) {
            entries.push_back(Entry{static_cast<int>(it.row()),
                                    static_cast<int>(it.col()),
                                    sign * it.value()});
          }
        }
      }
      if (entries.empty()) continue;
      b.vars.push_back(v);
      b.coeffs.push_back(std::move(entries));
    }
    sf.blocks.push_back(std::move(b));
  }
  sf.f0 = Eigen::Map<Eigen::VectorXd>(f0.data(), static_cast<int>(f0.size()));
  sf.A.resize(static_cast<int>(f0.size()), sf.num_vars);
  sf.A.setFromTriplets(lp.begin(), lp.end());
  return sf;
}

/// Iterate / direction over all blocks.
struct Blocks {
  std::vector<Eigen::MatrixXd> S;
  Eigen::VectorXd lp;
};

double inner(const Blocks& a, const Blocks& b) {
  double s = a.lp.dot(b.lp);
  for (size_t k = 0; k < a.S.size(); ++k) s += (a.S[k].array() * b.S[k].array()).sum();
  return s;
}

double frob(const Blocks& a) { return std::sqrt(inner(a, a)); }

/// F(y) without the slack: F0 + sum y F.
Blocks evaluate(const StandardForm& sf, const Eigen::VectorXd& y) {
  Blocks out;
  for (const auto& b : sf.blocks) {
    Eigen::MatrixXd F = b.F0;
    for (size_t k = 0; k < b.vars.size(); ++k) {
      const double yv = y(b.vars[k]);
      if (yv == 0.0) continue;
      for (const Entry& e : b.coeffs[k]) F(e.r, e.c) += yv * e.v;
    }
    out.S.push_back(std::move(F));
  }
  out.lp = sf.f0 + sf.A * y;
  return out;
}

/// Linear part only: sum dy F.
Blocks apply_linear(const StandardForm& sf, const Eigen::VectorXd& dy) {
  Blocks out;
  for (const auto& b : sf.blocks) {
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(b.n, b.n);
    for (size_t k = 0; k < b.vars.size(); ++k) {
      const double yv = dy(b.vars[k]);
      if (yv == 0.0) continue;
      for (const Entry& e : b.coeffs[k]) F(e.r, e.c) += yv * e.v;
    }
    out.S.push_back(std::move(F));
  }
  out.lp = sf.A * dy;
  return out;
}

/// Adjoint: v -> <F_v, X>.
Eigen::VectorXd adjoint(const StandardForm& sf, const Blocks& X) {
  Eigen::VectorXd out = sf.A.transpose() * X.lp;
  for (size_t bi = 0; bi < sf.blocks.size(); ++bi) {
    const auto& b = sf.blocks[bi];
    const Eigen::MatrixXd& Xb = X.S[bi];
    for (size_t k = 0; k < b.vars.size(); ++k) {
      double s = 0.0;
      for (const Entry& e : b.coeffs[k]) s += e.v * Xb(e.r, e.c);
      out(b.vars[k]) += s;
    }
  }
  return out;
}

/// Largest alpha <= 1/step_fraction... with S + alpha dS >= 0 (inf if none).
double max_step(const Eigen::MatrixXd& S, const Eigen::MatrixXd& dS) {
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::MatrixXd Linv_dS =
      llt.matrixL().solve(dS);
  Eigen::MatrixXd T = llt.matrixL().solve(Linv_dS.transpose()).transpose();
  T = 0.5 * (T + T.transpose());
  const double lmin =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T, Eigen::EigenvaluesOnly)
          .eigenvalues()(0);
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step(const Blocks& S, const Blocks& dS) {
  double a = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < S.S.size(); ++k) a = std::min(a, max_step(S.S[k], dS.S[k]));
  for (int i = 0; i < S.lp.size(); ++i) {
    if (dS.lp(i) < 0.0) a = std::min(a, -S.lp(i) / dS.lp(i));
  }
  return a;
}

enum class RunOutcome { kConverged, kStalled, kDiverged };

struct RunResult {
  RunOutcome outcome{RunOutcome::kStalled};
  Eigen::VectorXd y;
  int iterations{0};
  double pinf{0}, dinf{0}, gap{0};
  /// Last iterate meeting the relaxed tolerances, if any.
  bool has_relaxed{false};
  Eigen::VectorXd relaxed_y;
};

RunResult run_ipm(const StandardForm& sf, const IpmSettings& settings) {
  const int m = sf.num_vars;
  int ntot = static_cast<int>(sf.f0.size());
  for (const auto& b : sf.blocks) ntot += b.n;

  double scale_F = sf.f0.size() > 0 ? sf.f0.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& b : sf.blocks) scale_F = std::max(scale_F, b.F0.cwiseAbs().maxCoeff());
  const double scale_c = m > 0 ? sf.c.cwiseAbs().maxCoeff() : 0.0;
  const double init = 10.0 * std::max({1.0, scale_F, scale_c});

  Blocks X, Z;
  for (const auto& b : sf.blocks) {
    X.S.push_back(init * Eigen::MatrixXd::Identity(b.n, b.n));
    Z.S.push_back(init * Eigen::MatrixXd::Identity(b.n, b.n));
  }
  X.lp = Eigen::VectorXd::Constant(sf.f0.size(), init);
  Z.lp = Eigen::VectorXd::Constant(sf.f0.size(), init);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  double normF0 = sf.f0.norm();
  for (const auto& b : sf.blocks) normF0 = std::hypot(normF0, b.F0.norm());
  const double normc = sf.c.norm();

  RunResult result;
  int small_steps = 0;
  for (int it = 0; it < settings.max_iterations; ++it) {
    result.iterations = it;
    Blocks Fy = evaluate(sf, y);
    Blocks Rd;
    for (size_t k = 0; k < Fy.S.size(); ++k) Rd.S.push_back(Fy.S[k] - Z.S[k]);
    Rd.lp = Fy.lp - Z.lp;
    const Eigen::VectorXd rp = sf.c - adjoint(sf, X);
    const double gap = inner(X, Z);
    const double mu = ntot > 0 ? gap / ntot : 0.0;
    const double pobj = sf.c.dot(y);
    double dobj = -sf.f0.dot(X.lp);
    for (size_t k = 0; k < sf.blocks.size(); ++k) {
      dobj -= (sf.blocks[k].F0.array() * X.S[k].array()).sum();
    }
    result.pinf = frob(Rd) / (1.0 + normF0);
    result.dinf = rp.norm() / (1.0 + normc);
    result.gap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
    result.y = y;
    if (result.pinf < settings.tol_residual && result.dinf < settings.tol_residual &&
        result.gap < settings.tol_gap) {
      result.outcome = RunOutcome::kConverged;
      return result;
    }
    if (result.pinf < settings.tol_residual_relaxed &&
        result.dinf < settings.tol_residual_relaxed &&
        result.gap < settings.tol_gap_relaxed) {
      result.has_relaxed = true;
      result.relaxed_y = y;
    }
    if (!y.allFinite() || y.norm() > 1e12) {
      result.outcome = RunOutcome::kDiverged;
      return result;
    }

    // Inverses of the dual slack and the Schur complement matrix.
    std::vector<Eigen::MatrixXd> Zinv;
    for (const auto& Zb : Z.S) {
      Eigen::LLT<Eigen::MatrixXd> llt(Zb);
      if (llt.info() != Eigen::Success) {
        result.outcome = RunOutcome::kStalled;
        return result;
      }
      Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(Zb.rows(), Zb.cols()));
      Zinv.push_back(0.5 * (inv + inv.transpose()));
    }
    const Eigen::VectorXd zinv_lp = Z.lp.cwiseInverse();

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (size_t bi = 0; bi < sf.blocks.size(); ++bi) {
      const auto& b = sf.blocks[bi];
      const Eigen::MatrixXd& Xb = X.S[bi];
      const Eigen::MatrixXd& Zi = Zinv[bi];
      Eigen::MatrixXd G(b.n, b.n);
      for (size_t kv = 0; kv < b.vars.size(); ++kv) {
        // G = X F_v Zinv, using the sparsity of F_v.
        G.setZero();
        for (const Entry& e : b.coeffs[kv]) {
          // (X F_v)(:, e.c) += X(:, e.r) * e.v ; then times Zinv row e.c
          G.noalias() += (e.v * Xb.col(e.r)) * Zi.row(e.c);
        }
        for (size_t ku = 0; ku <= kv; ++ku) {
          double s = 0.0;
          for (const Entry& e : b.coeffs[ku]) s += e.v * G(e.r, e.c);
          M(b.vars[ku], b.vars[kv]) += s;
          if (ku != kv) M(b.vars[kv], b.vars[ku]) += s;
        }
      }
    }
    if (sf.A.rows() > 0) {
      const Eigen::VectorXd d = X.lp.cwiseProduct(zinv_lp);
      SparseMat AtD = sf.A.transpose() * d.asDiagonal();
      M += Eigen::MatrixXd(AtD * sf.A);
    }
    M = 0.5 * (M + M.transpose());
    Eigen::LLT<Eigen::MatrixXd> Mllt;
    double reg = 0.0;
    const double diag_scale = std::max(1e-300, M.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd Mr = M;
      if (reg > 0.0) Mr.diagonal().array() += reg;
      Mllt.compute(Mr);
      if (Mllt.info() == Eigen::Success) break;
      reg = reg == 0.0 ? 1e-14 * diag_scale : reg * 100.0;
    }
    if (Mllt.info() != Eigen::Success) {
      result.outcome = RunOutcome::kStalled;
      return result;
    }

    // Solves for a direction given sigma*mu and the second-order term.
    auto direction = [&](double sigma_mu, const Blocks* corr, Eigen::VectorXd& dy,
                         Blocks& dX, Blocks& dZ) {
      Blocks T;
      for (size_t k = 0; k < sf.blocks.size(); ++k) {
        Eigen::MatrixXd R = X.S[k] * Rd.S[k];
        if (corr != nullptr) R += corr->S[k];
        T.S.push_back(sigma_mu * Zinv[k] - R * Zinv[k]);
      }
      Eigen::VectorXd Rlp = X.lp.cwiseProduct(Rd.lp);
      if (corr != nullptr) Rlp += corr->lp;
      T.lp = (sigma_mu - Rlp.array()).matrix().cwiseProduct(zinv_lp);
      const Eigen::VectorXd rhs = adjoint(sf, T) - sf.c;
      dy = Mllt.solve(rhs);
      Blocks lin = apply_linear(sf, dy);
      dZ.S.clear();
      dX.S.clear();
      for (size_t k = 0; k < sf.blocks.size(); ++k) {
        dZ.S.push_back(Rd.S[k] + lin.S[k]);
        Eigen::MatrixXd R = X.S[k] * dZ.S[k];
        if (corr != nullptr) R += corr->S[k];
        Eigen::MatrixXd d = sigma_mu * Zinv[k] - X.S[k] - R * Zinv[k];
        dX.S.push_back(0.5 * (d + d.transpose()));
      }
      dZ.lp = Rd.lp + lin.lp;
      Eigen::VectorXd r2 = X.lp.cwiseProduct(dZ.lp);
      if (corr != nullptr) r2 += corr->lp;
      dX.lp = ((sigma_mu - r2.array()).matrix()).cwiseProduct(zinv_lp) - X.lp;
    };

    Eigen::VectorXd dy_a;
    Blocks dX_a, dZ_a;
    direction(0.0, nullptr, dy_a, dX_a, dZ_a);
    const double ap_a = std::min(1.0, max_step(X, dX_a));
    const double ad_a = std::min(1.0, max_step(Z, dZ_a));
    Blocks Xa = X, Za = Z;
    for (size_t k = 0; k < X.S.size(); ++k) {
      Xa.S[k] += ap_a * dX_a.S[k];
      Za.S[k] += ad_a * dZ_a.S[k];
    }
    Xa.lp += ap_a * dX_a.lp;
    Za.lp += ad_a * dZ_a.lp;
    const double mu_aff = ntot > 0 ? inner(Xa, Za) / ntot : 0.0;
    double sigma = mu > 0.0 ? std::pow(std::max(0.0, mu_aff) / mu, 3) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    Blocks corr;
    for (size_t k = 0; k < X.S.size(); ++k) corr.S.push_back(dX_a.S[k] * dZ_a.S[k]);
    corr.lp = dX_a.lp.cwiseProduct(dZ_a.lp);

    Eigen::VectorXd dy;
    Blocks dX, dZ;
    direction(sigma * mu, &corr, dy, dX, dZ);
    const double ap = std::min(1.0, settings.step_fraction * max_step(X, dX));
    const double ad = std::min(1.0, settings.step_fraction * max_step(Z, dZ));
    if (ap < 1e-10 && ad < 1e-10) {
      if (++small_steps > 3) {
        result.outcome = RunOutcome::kStalled;
        return result;
      }
    } else {
      small_steps = 0;
    }
    for (size_t k = 0; k < X.S.size(); ++k) {
      X.S[k] += ap * dX.S[k];
      X.S[k] = 0.5 * (X.S[k] + X.S[k].transpose());
      Z.S[k] += ad * dZ.S[k];
      Z.S[k] = 0.5 * (Z.S[k] + Z.S[k].transpose());
    }
    X.lp += ap * dX.lp;
    Z.lp += ad * dZ.lp;
    y += ad * dy;
  }
  result.outcome = RunOutcome::kStalled;
  return result;
}

/// min s  s.t.  F(y) + s I >= 0, s >= -1.
StandardForm phase_one(const StandardForm& sf) {
  StandardForm p1 = sf;
  const int s = sf.num_vars;
  p1.num_vars = s + 1;
  p1.c = Eigen::VectorXd::Zero(s + 1);
  p1.c(s) = 1.0;
  for (auto& b : p1.blocks) {
    std::vector<Entry> diag;
    for (int i = 0; i < b.n; ++i) diag.push_back(Entry{i, i, 1.0});
    b.vars.push_back(s);
    b.coeffs.push_back(std::move(diag));
  }
  const int rows = static_cast<int>(sf.f0.size());
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < sf.A.outerSize(); ++k) {
    for (SparseMat::InnerIterator it(sf.A, k); it; ++it) {
      t.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int r = 0; r < rows; ++r) t.emplace_back(r, s, 1.0);
  t.emplace_back(rows, s, 1.0);
  p1.A.resize(rows + 1, s + 1);
  p1.A.setFromTriplets(t.begin(), t.end());
  p1.f0.conservativeResize(rows + 1);
  p1.f0(rows) = 1.0;
  return p1;
}

class IpmBackend final : public SolverBackend {
 public:
  explicit IpmBackend(IpmSettings s) : settings_(s) {}

  std::string id() const override { return "ipm"; }

  SolveReport Solve(const LmiProblem& p,
                    const ToleranceConfig& tol) const override {
    const StandardForm sf = to_standard_form(p, tol.margin);
    SolveReport report;
    report.backend = id();
    const RunResult main = run_ipm(sf, settings_);
    report.iterations = main.iterations;
    report.assignment = main.y;
    std::ostringstream os;
    os << "pinf=" << main.pinf << " dinf=" << main.dinf << " gap=" << main.gap;
    if (main.outcome == RunOutcome::kConverged) {
      report.status = SolveStatus::kOptimal;
      report.message = os.str();
      return report;
    }
    if (main.has_relaxed) {
      report.status = SolveStatus::kOptimal;
      report.assignment = main.relaxed_y;
      report.message = os.str() + "; inaccurate";
      return report;
    }
    // Decide feasibility with the auxiliary problem.
    const StandardForm p1 = phase_one(sf);
    const RunResult aux = run_ipm(p1, settings_);
    const double s_opt = aux.y.size() > 0 ? aux.y(sf.num_vars) : 0.0;
    os << "; phase-1 s=" << s_opt;
    report.message = os.str();
    if (aux.outcome == RunOutcome::kConverged && s_opt > tol.feas_tol) {
      report.status = SolveStatus::kInfeasible;
    } else {
      report.status = SolveStatus::kNumericalFailure;
    }
    return report;
  }

 private:
  IpmSettings settings_;
};

}  // namespace

std::shared_ptr<SolverBackend> make_ipm_backend(const IpmSettings& s) {
  return std::make_shared<IpmBackend>(s);
}

}  // namespace meshnet::lmi
