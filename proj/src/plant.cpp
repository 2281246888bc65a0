// SPDX-License-Identifier: Apache-2.0

#include "tsfpi/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tsfpi/errors.hpp"

namespace tsfpi {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Geometry {
  double c2, s2, c3, s3, c23, s23, rho2, rho3;
};

Geometry geometry(const Vec3& q, const PlantParams& p) {
  Geometry g{};
  g.c2 = std::cos(q[1]);
  g.s2 = std::sin(q[1]);
  g.c3 = std::cos(q[2]);
  g.s3 = std::sin(q[2]);
  g.c23 = std::cos(q[1] + q[2]);
  g.s23 = std::sin(q[1] + q[2]);
  g.rho2 = p.l3 + p.l1 * g.c2;
  g.rho3 = g.rho2 + p.l2 * g.c23;
  return g;
}

// dM/dq_k for k = 0..2.
std::array<Mat3, 3> mass_matrix_gradient(const Vec3& q, const PlantParams& p) {
  const auto g = geometry(q, p);
  std::array<Mat3, 3> d{};
  const double drho2_dq2 = -p.l1 * g.s2;
  const double drho3_dq2 = drho2_dq2 - p.l2 * g.s23;
  const double drho3_dq3 = -p.l2 * g.s23;
  d[1][0][0] = 2.0 * (p.m2 * g.rho2 * drho2_dq2 + p.m3 * g.rho3 * drho3_dq2);
  d[2][0][0] = 2.0 * p.m3 * g.rho3 * drho3_dq3;
  d[2][1][1] = -2.0 * p.m3 * p.l1 * p.l2 * g.s3;
  d[2][1][2] = d[2][2][1] = -p.m3 * p.l1 * p.l2 * g.s3;
  return d;
}

Vec3 solve(const Mat3& a, const Vec3& b) {
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw NumericError("plant: singular inertia matrix");
  }
  Vec3 x{};
  for (int c = 0; c < 3; ++c) {
    Mat3 m = a;
    for (int r = 0; r < 3; ++r) m[r][c] = b[r];
    x[c] = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
            m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
            m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
           det;
  }
  return x;
}

bool finite(const Vec3& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

PlantState add_scaled(const PlantState& s, const Vec3& dtheta, const Vec3& domega, double h) {
  PlantState out = s;
  for (int i = 0; i < 3; ++i) {
    out.theta[i] += h * dtheta[i];
    out.omega[i] += h * domega[i];
  }
  return out;
}

}  // namespace

void PlantParams::validate() const {
  for (double v : {l1, l2, l3, l4}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("plant: lengths must be >= 0");
  }
  if (!(l1 > 0.0) || !(l2 > 0.0)) throw ConfigError("plant: link lengths must be positive");
  if (!(m2 > 0.0) || !(m3 > 0.0)) throw ConfigError("plant: masses must be positive");
  if (!(j1 >= 0.0)) throw ConfigError("plant: base inertia must be >= 0");
  for (double v : rotor) {
    if (!(v >= 0.0)) throw ConfigError("plant: rotor inertia must be >= 0");
  }
  for (double v : friction) {
    if (!(v >= 0.0)) throw ConfigError("plant: friction must be >= 0");
  }
  if (!(gravity >= 0.0)) throw ConfigError("plant: gravity must be >= 0");
  if (j1 + rotor[0] <= 0.0 && l3 <= 0.0) {
    throw ConfigError("plant: joint 1 has no inertia when the arm is vertical");
  }
}

Mat3 mass_matrix(const Vec3& theta, const PlantParams& p) {
  const auto g = geometry(theta, p);
  Mat3 m{};
  m[0][0] = p.j1 + p.m2 * g.rho2 * g.rho2 + p.m3 * g.rho3 * g.rho3;
  m[1][1] = p.m2 * p.l1 * p.l1 +
            p.m3 * (p.l1 * p.l1 + p.l2 * p.l2 + 2.0 * p.l1 * p.l2 * g.c3);
  m[1][2] = m[2][1] = p.m3 * (p.l2 * p.l2 + p.l1 * p.l2 * g.c3);
  m[2][2] = p.m3 * p.l2 * p.l2;
  for (int i = 0; i < 3; ++i) m[i][i] += p.rotor[i];
  return m;
}

Vec3 coriolis(const Vec3& theta, const Vec3& omega, const PlantParams& p) {
  const auto d = mass_matrix_gradient(theta, p);
  Vec3 c{};
  for (int i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        acc += (d[k][i][j] - 0.5 * d[i][j][k]) * omega[j] * omega[k];
      }
    }
    c[i] = acc;
  }
  return c;
}

Vec3 gravity_torque(const Vec3& theta, const PlantParams& p) {
  const auto g = geometry(theta, p);
  return {0.0, p.gravity * (p.m2 * p.l1 * g.c2 + p.m3 * (p.l1 * g.c2 + p.l2 * g.c23)),
          p.gravity * p.m3 * p.l2 * g.c23};
}

Vec3 dynamics(const PlantState& s, const Vec3& tau, const PlantParams& p) {
  if (!finite(s.theta) || !finite(s.omega) || !finite(tau)) {
    throw NumericError("plant: state or torque is not finite");
  }
  const auto m = mass_matrix(s.theta, p);
  const auto c = coriolis(s.theta, s.omega, p);
  const auto g = gravity_torque(s.theta, p);
  Vec3 rhs{};
  for (int i = 0; i < 3; ++i) rhs[i] = tau[i] - c[i] - g[i] - p.friction[i] * s.omega[i];
  return solve(m, rhs);
}

double kinetic_energy(const PlantState& s, const PlantParams& p) {
  const auto m = mass_matrix(s.theta, p);
  double e = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) e += s.omega[i] * m[i][j] * s.omega[j];
  }
  return 0.5 * e;
}

double potential_energy(const Vec3& theta, const PlantParams& p) {
  const auto g = geometry(theta, p);
  return p.gravity * (p.m2 * p.l1 * g.s2 + p.m3 * (p.l1 * g.s2 + p.l2 * g.s23));
}

PlantState rk4_step(const PlantState& s, const Vec3& tau, double dt, const PlantParams& p) {
  const auto k1v = s.omega;
  const auto k1a = dynamics(s, tau, p);
  const auto s2 = add_scaled(s, k1v, k1a, dt / 2);
  const auto k2v = s2.omega;
  const auto k2a = dynamics(s2, tau, p);
  const auto s3 = add_scaled(s, k2v, k2a, dt / 2);
  const auto k3v = s3.omega;
  const auto k3a = dynamics(s3, tau, p);
  const auto s4 = add_scaled(s, k3v, k3a, dt);
  const auto k4v = s4.omega;
  const auto k4a = dynamics(s4, tau, p);
  PlantState out = s;
  for (int i = 0; i < 3; ++i) {
    out.theta[i] += dt / 6 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
    out.omega[i] += dt / 6 * (k1a[i] + 2 * k2a[i] + 2 * k3a[i] + k4a[i]);
  }
  if (!finite(out.theta) || !finite(out.omega)) throw NumericError("plant: integration diverged");
  return out;
}

Vec3 forward_kinematics(const Vec3& theta, const PlantParams& p) {
  const auto g = geometry(theta, p);
  const double rho = g.rho3 + p.l4 * g.c23;
  const double z = p.l1 * g.s2 + (p.l2 + p.l4) * g.s23;
  return {rho * std::cos(theta[0]), rho * std::sin(theta[0]), z};
}

TrajectorySchedule TrajectorySchedule::reference_table() {
  TrajectorySchedule s;
  s.segment_seconds = 2.0;
  s.setpoints_deg = {{90.0, 0.0, 45.0, -45.0, 90.0},
                     {45.0, 45.0, 0.0, 22.5, 45.0},
                     {45.0, 22.5, 0.0, 22.5, 45.0}};
  return s;
}

std::size_t TrajectorySchedule::segment_count() const {
  return setpoints_deg.empty() ? 0 : setpoints_deg.front().size();
}

std::size_t TrajectorySchedule::segment_at(double t) const {
  const auto n = segment_count();
  if (n == 0) throw ContractError("schedule has no segments");
  const auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(t / segment_seconds)));
  return std::min(idx, n - 1);
}

double TrajectorySchedule::setpoint_deg(std::size_t joint, double t) const {
  return setpoints_deg.at(joint).at(segment_at(t));
}

void TrajectorySchedule::validate() const {
  if (!(segment_seconds > 0.0)) throw ConfigError("schedule: segment length must be positive");
  if (setpoints_deg.size() != 3) throw ConfigError("schedule: need one row per joint (3)");
  const auto n = setpoints_deg.front().size();
  if (n == 0) throw ConfigError("schedule: no segments");
  for (const auto& row : setpoints_deg) {
    if (row.size() != n) throw ConfigError("schedule: rows differ in length");
    for (double v : row) {
      if (!std::isfinite(v) || std::abs(v) > 180.0) {
        throw ConfigError("schedule: set points must lie in [-180, 180] degrees");
      }
    }
  }
}

bool SimulationResult::all_settled() const {
  return std::all_of(segments.begin(), segments.end(), [](const auto& s) { return s.settled; });
}

SimulationResult simulate_closed_loop(const std::array<JointController*, 3>& controllers,
                                      const TrajectorySchedule& schedule,
                                      const PlantParams& params, const SimulationOptions& opts,
                                      const StepObserver& observer) {
  schedule.validate();
  params.validate();
  for (auto* c : controllers) {
    if (c == nullptr) throw ContractError("simulate_closed_loop: missing controller");
  }
  if (!(opts.ts > 0.0)) throw ConfigError("simulation: ts must be positive");
  if (opts.log_every < 1) throw ConfigError("simulation: log_every must be >= 1");

  const auto segments = schedule.segment_count();
  const auto steps_per_segment =
      static_cast<std::size_t>(std::llround(schedule.segment_seconds / opts.ts));
  const auto total = steps_per_segment * segments;
  const auto window_steps = static_cast<std::size_t>(std::llround(opts.settle_window / opts.ts));

  SimulationResult res;
  res.steps = total;
  res.segments.resize(3 * segments);
  for (std::size_t j = 0; j < 3; ++j) {
    double prev = opts.initial.theta[j] / kDeg;
    for (std::size_t k = 0; k < segments; ++k) {
      auto& st = res.segments[j * segments + k];
      st.joint = j;
      st.segment = k;
      st.setpoint_deg = schedule.setpoints_deg[j][k];
      st.step_deg = st.setpoint_deg - prev;
      st.tolerance_deg = std::max(opts.min_tolerance_deg,
                                  opts.settle_fraction *
                                      std::max(std::abs(st.step_deg), std::abs(st.setpoint_deg)));
      prev = st.setpoint_deg;
    }
  }

  PlantState state = opts.initial;
  for (std::size_t n = 0; n < total; ++n) {
    const std::size_t seg = n / steps_per_segment;
    const std::size_t in_seg = n % steps_per_segment;
    RobotSample sample;
    sample.t = static_cast<double>(n) * opts.ts;
    for (std::size_t j = 0; j < 3; ++j) {
      sample.theta[j] = state.theta[j];
      sample.setpoint[j] = schedule.setpoints_deg[j][seg] * kDeg;
      sample.tau[j] = controllers[j]->step(state.theta[j] / opts.y_scale_rad,
                                           sample.setpoint[j] / opts.y_scale_rad);
    }
    if (in_seg + window_steps >= steps_per_segment) {
      for (std::size_t j = 0; j < 3; ++j) {
        auto& st = res.segments[j * segments + seg];
        st.final_error_deg = std::max(
            st.final_error_deg, std::abs(sample.theta[j] - sample.setpoint[j]) / kDeg);
      }
    }
    if (n % static_cast<std::size_t>(opts.log_every) == 0) res.samples.push_back(sample);
    if (observer) observer(n, sample);
    state = rk4_step(state, sample.tau, opts.ts, params);
  }
  for (auto& st : res.segments) st.settled = st.final_error_deg <= st.tolerance_deg;
  return res;
}

double max_angle_difference_deg(const SimulationResult& a, const SimulationResult& b,
                                const TrajectorySchedule& schedule, double transient) {
  const auto n = std::min(a.samples.size(), b.samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sa = a.samples[i];
    const auto& sb = b.samples[i];
    if (std::abs(sa.t - sb.t) > 1e-12) {
      throw ContractError("max_angle_difference_deg: sample times differ");
    }
    const double into = sa.t - static_cast<double>(schedule.segment_at(sa.t)) * schedule.segment_seconds;
    if (into < transient) continue;
    for (int j = 0; j < 3; ++j) {
      worst = std::max(worst, std::abs(sa.theta[j] - sb.theta[j]) / kDeg);
    }
  }
  return worst;
}

}  // namespace tsfpi
