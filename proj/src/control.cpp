#include "meshnet/control.hpp"

#include <algorithm>
#include <cmath>

#include "meshnet/errors.hpp"

namespace meshnet {

GainBlock GainBlock::FromMatrix(const Mat6& m) {
  return GainBlock(m.block<3, 3>(3, 0), m.block<3, 3>(3, 3));
}

Mat36 GainBlock::row() const {
  Mat36 r;
  r << k_x_, k_v_;
  return r;
}

Mat6 GainBlock::matrix() const {
  Mat6 m = Mat6::Zero();
  m.block<3, 3>(3, 0) = k_x_;
  m.block<3, 3>(3, 3) = k_v_;
  return m;
}

GainBlock GainBlock::operator+(const GainBlock& o) const {
  return GainBlock(k_x_ + o.k_x_, k_v_ + o.k_v_);
}

GainBlock GainBlock::operator-(const GainBlock& o) const {
  return GainBlock(k_x_ - o.k_x_, k_v_ - o.k_v_);
}

GainBlock& GainBlock::operator+=(const GainBlock& o) {
  k_x_ += o.k_x_;
  k_v_ += o.k_v_;
  return *this;
}

GainBlock& GainBlock::operator-=(const GainBlock& o) {
  k_x_ -= o.k_x_;
  k_v_ -= o.k_v_;
  return *this;
}

GainBlock GainBlock::operator*(double s) const {
  return GainBlock(s * k_x_, s * k_v_);
}

bool GainBlock::operator==(const GainBlock& o) const {
  return k_x_ == o.k_x_ && k_v_ == o.k_v_;
}

Vec3 coupling_term(const Vec3& f_d, const Rotation& R, const Rotation& R_d) {
  const Mat3 R_e = R_d.matrix().transpose() * R.matrix();
  const double c = e3().dot(R_e * e3());
  return f_d.norm() * (c * (R.matrix() * e3()) - R_d.matrix() * e3());
}

double thrust_from_nominal(const Vec3& f_d, const Rotation& R) {
  return -f_d.dot(R.matrix() * e3());
}

Vec3 inner_loop(const Vec3& e_R, const Vec3& e_Omega,
                const InnerLoopGains& g) {
  return -g.k_R * e_R - g.k_Omega * e_Omega;
}

Vec3 torque_from_u2(const Vec3& u_2, const RigidBodyState& s,
                    const DesiredAttitude& att, const RigidBodyParams& p) {
  const Mat3 RtRd = s.R.matrix().transpose() * att.R_d.matrix();
  return p.J * (u_2 - hat(s.Omega) * RtRd * att.Omega_d +
                RtRd * att.Omega_d_dot) +
         hat(s.Omega) * p.J * s.Omega;
}

Vec3 u2_from_torque(const Vec3& M, const RigidBodyState& s,
                    const DesiredAttitude& att, const RigidBodyParams& p) {
  const Mat3 RtRd = s.R.matrix().transpose() * att.R_d.matrix();
  const Eigen::LDLT<Mat3> J_ldlt(p.J);
  return -J_ldlt.solve(hat(s.Omega) * p.J * s.Omega) + J_ldlt.solve(M) +
         hat(s.Omega) * RtRd * att.Omega_d - RtRd * att.Omega_d_dot;
}

Vec3 outer_loop(int self, const TrackingError& errors_self,
                const std::vector<std::pair<int, TrackingError>>& errors_neighbors,
                const LocalGain& L_bar, const std::map<int, GainBlock>& K_row) {
  const Vec6 e_i = errors_self.outer();
  Vec3 u = L_bar.L_bar * e_i;
  if (auto it = K_row.find(self); it != K_row.end()) {
    u += it->second.row() * e_i;
  }
  for (const auto& [j, err] : errors_neighbors) {
    if (j == self) continue;
    auto it = K_row.find(j);
    if (it == K_row.end()) {
      throw MeshnetError(ErrorKind::kMissingGain,
                         "no gain block for neighbor " + std::to_string(j));
    }
    u += it->second.row() * err.outer();
  }
  return u;
}

Vec3 nominal_force_from_u1(const Vec3& u_1, const Vec3& a_d,
                           const RigidBodyParams& p) {
  return p.m * (u_1 + a_d - kGravity * e3());
}

GrowthConstants growth_constants(const std::vector<RigidBodyParams>& params,
                                 const std::vector<LocalGain>& L_bar_all,
                                 const Eigen::MatrixXd& K_all, double B) {
  if (!(B > 0.0)) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "B must be positive");
  }
  if (params.empty()) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "no agents");
  }
  double m_max = 0.0;
  for (const auto& p : params) m_max = std::max(m_max, p.m);

  const int n = static_cast<int>(L_bar_all.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(3 * n, 6 * n);
  for (int i = 0; i < n; ++i) L.block<3, 6>(3 * i, 6 * i) = L_bar_all[i].L_bar;
  const double sigma_L =
      n > 0 ? Eigen::JacobiSVD<Eigen::MatrixXd>(L).singularValues()(0) : 0.0;
  const double sigma_K =
      K_all.size() > 0
          ? Eigen::JacobiSVD<Eigen::MatrixXd>(K_all).singularValues()(0)
          : 0.0;
  const double lambda = std::max(sigma_L, sigma_K);
  if (!(lambda > 0.0)) {
    throw MeshnetError(ErrorKind::kDegenerateGains,
                       "both gain spectral bounds vanish");
  }
  GrowthConstants out;
  out.lambda = lambda;
  out.B = B;
  out.k_f = 2.0 * std::sqrt(2.0) * m_max * lambda;
  out.c_f = B / (std::sqrt(2.0) * m_max * lambda);
  return out;
}

}  // namespace meshnet
