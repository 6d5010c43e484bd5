#include "meshnet/geometry.hpp"

#include <cmath>
#include <sstream>

#include "meshnet/errors.hpp"

namespace meshnet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotSkew: return "NotSkew";
    case ErrorKind::kInvalidRotation: return "InvalidRotation";
    case ErrorKind::kDegenerateThrust: return "DegenerateThrust";
    case ErrorKind::kDegenerateAxes: return "DegenerateAxes";
    case ErrorKind::kIntegrationDiverged: return "IntegrationDiverged";
    case ErrorKind::kMissingGain: return "MissingGain";
    case ErrorKind::kDegenerateGains: return "DegenerateGains";
    case ErrorKind::kInfeasible: return "Infeasible";
    case ErrorKind::kNumericalFailure: return "NumericalFailure";
    case ErrorKind::kPriorNotPD: return "PriorNotPD";
    case ErrorKind::kEpsilonTooSmall: return "EpsilonTooSmall";
    case ErrorKind::kUnknownAgent: return "UnknownAgent";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kValidationError: return "ValidationError";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kZeroDisturbance: return "ZeroDisturbance";
    case ErrorKind::kCodesignInfeasible: return "CodesignInfeasible";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Rotation::Rotation(const Mat3& m, double tol_orth) : m_(m) {
  if (!m.allFinite()) {
    throw MeshnetError(ErrorKind::kInvalidRotation, "non-finite entries");
  }
  const double orth = OrthogonalityError();
  const double det_err = std::abs(m.determinant() - 1.0);
  if (orth > tol_orth || det_err > tol_orth) {
    std::ostringstream os;
    os << "|m^T m - I| = " << orth << ", |det m - 1| = " << det_err;
    throw MeshnetError(ErrorKind::kInvalidRotation, os.str());
  }
}

Rotation Rotation::AxisAngle(const Vec3& axis, double angle) {
  return Rotation(exp_so3(axis.normalized() * angle));
}

double Rotation::OrthogonalityError() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Vec6 TrackingError::outer() const {
  Vec6 out;
  out << e_x, e_v;
  return out;
}

Vec6 TrackingError::inner() const {
  Vec6 out;
  out << e_R, e_Omega;
  return out;
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m, double tol_skew) {
  const double asym = (m + m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= tol_skew)) {
    std::ostringstream os;
    os << "max |m + m^T| = " << asym;
    throw MeshnetError(ErrorKind::kNotSkew, os.str());
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

namespace {

/// vee without the skew check, for internally antisymmetrized matrices.
Vec3 vee_unchecked(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

}  // namespace

Mat3 exp_so3(const Vec3& theta) {
  const double angle = theta.norm();
  const Mat3 K = hat(theta);
  if (angle < 1e-6) {
    // Taylor series to fourth order keeps full double precision here.
    const double a2 = angle * angle;
    return Mat3::Identity() + (1.0 - a2 / 6.0) * K + (0.5 - a2 / 24.0) * K * K;
  }
  return Mat3::Identity() + (std::sin(angle) / angle) * K +
         ((1.0 - std::cos(angle)) / (angle * angle)) * K * K;
}

Vec3 rotation_error(const Rotation& R, const Rotation& R_d) {
  const Mat3 R_e = R_d.matrix().transpose() * R.matrix();
  return 0.5 * vee_unchecked(R_e - R_e.transpose());
}

Vec3 angular_velocity_error(const Vec3& Omega, const Rotation& R,
                            const Rotation& R_d, const Vec3& Omega_d) {
  const Mat3 R_e = R_d.matrix().transpose() * R.matrix();
  return Omega - R_e.transpose() * Omega_d;
}

Mat3 trace_op(const Mat3& m) {
  return 0.5 * (m.transpose().trace() * Mat3::Identity() - m.transpose());
}

DesiredAttitude plan_attitude(const Vec3& f_d, const Vec3& v_d,
                              const std::optional<DesiredAttitude>& prev,
                              double dt, const ToleranceConfig& tol) {
  const double f_norm = f_d.norm();
  if (!(f_norm > tol.eps_f)) {
    throw MeshnetError(ErrorKind::kDegenerateThrust, "|f_d| too small");
  }
  DesiredAttitude out;
  out.b_d3 = -f_d / f_norm;
  const double v_norm = v_d.norm();
  if (v_norm > tol.eps_v) {
    out.b_d1 = v_d / v_norm;
  } else if (prev) {
    out.b_d1 = prev->b_d1;
  } else {
    out.b_d1 = Vec3::UnitX();
  }

  const Mat3 B3 = hat(out.b_d3);
  const Vec3 c2_raw = B3 * out.b_d1;
  if (c2_raw.norm() <= tol.eps_align) {
    throw MeshnetError(ErrorKind::kDegenerateAxes,
                       "b_d1 is parallel to b_d3");
  }
  const Vec3 c1_raw = -(B3 * B3 * out.b_d1);

  // Gram-Schmidt on (b_d3, c1, c2) in that priority order.
  const Vec3 c3 = out.b_d3;
  Vec3 c1 = c1_raw - c1_raw.dot(c3) * c3;
  c1.normalize();
  Vec3 c2 = c2_raw - c2_raw.dot(c3) * c3 - c2_raw.dot(c1) * c1;
  c2.normalize();
  Mat3 Rd;
  Rd.col(0) = c1;
  Rd.col(1) = c2;
  Rd.col(2) = c3;
  out.R_d = Rotation(Rd, std::max(tol.tol_orth, 1e-9));

  if (prev && dt > 0.0) {
    const Mat3& R1 = prev->R_d.matrix();
    const Mat3& R2 = Rd;
    const Mat3 D = R1.transpose() * R2 - R2.transpose() * R1;
    out.Omega_d = Vec3(D(2, 1), D(0, 2), D(1, 0)) / (2.0 * dt);
    out.Omega_d_dot = (out.Omega_d - prev->Omega_d) / dt;
  }
  return out;
}

}  // namespace meshnet
