#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meshnet/harness/simulation.hpp"

namespace meshnet::harness {

struct AgentMetrics {
  int id{0};
  double start_time{0.0};
  /// sup_t |[e_x; e_v]| and sup_t |[e_R; e_Omega]|.
  double sup_outer{0.0};
  double sup_inner{0.0};
  /// Componentwise sup_t |.| of each error vector.
  Vec3 sup_e_x{Vec3::Zero()};
  Vec3 sup_e_v{Vec3::Zero()};
  Vec3 sup_e_R{Vec3::Zero()};
  Vec3 sup_e_Omega{Vec3::Zero()};
  /// Time (relative to start) after which every e_x component stays in the
  /// band; empty when the agent never settles.
  std::optional<double> band_entry;
  double sup_w{0.0};
  double sup_X{0.0};
  /// Largest weak-coupling gain of the agent over the initial and final gains.
  double weak_coupling{0.0};
  /// max_t of |e_i(t)| minus the ISS bound.
  double iss_residual{0.0};
};

struct Metrics {
  std::string scenario;
  int num_agents{0};
  double band{0.7};
  std::map<int, AgentMetrics> agents;
  double sup_outer{0.0};
  double sup_inner{0.0};
  /// Largest band entry time; empty if some agent never settles.
  std::optional<double> max_band_entry;
  double l2_gain{0.0};
  /// Synthesized gamma of the initial and final gains.
  double gamma_initial{0.0};
  double gamma_final{0.0};
  double max_iss_residual{0.0};
  double max_weak_coupling{0.0};
};

/// Empirical finite-horizon gain sqrt(int |z|^2 / int |w|^2) by trapezoidal
/// quadrature on the sample times @p t. Throws kZeroDisturbance when the w
/// energy is zero, kInvalidArgument on size mismatch.
double estimate_l2_gain(const std::vector<double>& t, const std::vector<Eigen::VectorXd>& z,
                        const std::vector<Eigen::VectorXd>& w);

/// Same with z the stacked [e_x; e_v] and w the stacked outer-loop
/// disturbance channel of all active agents.
double estimate_l2_gain(const SimOutput& output);

/// ISS bound of agent i at time t (relative to its start):
/// (1/sqrt(mu lmin)) (sum_{j != i} ||R' K_ij|| sup_j |e_j| + ||R'|| sup |w_i|)
/// + sqrt(lmax/lmin) |e_i(0)| exp(-mu t / 2), with R' = c R.
double iss_bound(const codesign::AgentCertificate& cert, double coupling_sum,
                 double sup_neighbors, double sup_w, double e0, double t);

Metrics compute_metrics(const SimOutput& output, double band = 0.7,
                        const std::string& scenario = "");

/// Outcome of the scalable mesh stability checks over several runs.
struct SmsReport {
  /// (a) weak-coupling gain < 1 for every agent of every run.
  bool certificate{false};
  /// (b) sup-agent outer sup-norm non-increasing in N within tol and spread
  /// below tol.
  bool empirical{false};
  /// (c) ISS residual <= 0 at all samples of every run.
  bool iss{false};
  double tol{0.1};
  /// (N, sup-agent outer sup-norm) sorted by N.
  std::vector<std::pair<int, double>> table;
  double spread{0.0};
  double max_weak_coupling{0.0};
  double max_iss_residual{0.0};

  bool pass() const { return certificate && empirical && iss; }
};

SmsReport check_sms(const std::vector<Metrics>& runs, double tol = 0.1);

}  // namespace meshnet::harness
