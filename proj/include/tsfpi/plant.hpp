// SPDX-License-Identifier: Apache-2.0

#pragma once

// Three-joint manipulator used for closed-loop runs, and the loop that ties
// three controllers to it.
//
// Joint 1 turns the arm about the vertical axis. Joints 2 and 3 move two
// links in the vertical plane through that axis; the shoulder sits L3 off
// the axis, link lengths are L1 and L2, angles are measured from the
// horizontal (joint 3 relative to link 2). Each link's mass is lumped at its
// far end. L4 (tool offset) only enters the forward kinematics.
//
//   M(q) qdd + C(q, qd) qd + g(q) - f(qd) = tau,   f = -b qd
//
// M is derived from the point-mass kinetic energy; C comes from its
// Christoffel symbols; the model is integrated with fixed-step RK4 holding
// tau constant over the step.

#include <array>
#include <functional>
#include <vector>

#include "tsfpi/controller.hpp"

namespace tsfpi {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

struct PlantParams {
  double l1 = 0.135;
  double l2 = 0.135;
  double l3 = 0.025;
  double l4 = 0.170;
  double m2 = 0.1;  // at the end of link L1
  double m3 = 0.1;  // at the end of link L2
  double j1 = 1e-3;  // base inertia about the vertical axis
  Vec3 rotor{0.0, 0.0, 0.0};  // reflected actuator inertia per joint
  Vec3 friction{1.0, 1.0, 1.0};
  double gravity = 9.81;

  // Throws ConfigError.
  void validate() const;
};

struct PlantState {
  Vec3 theta{0.0, 0.0, 0.0};
  Vec3 omega{0.0, 0.0, 0.0};
};

Mat3 mass_matrix(const Vec3& theta, const PlantParams& p);
// C(q, qd) qd.
Vec3 coriolis(const Vec3& theta, const Vec3& omega, const PlantParams& p);
Vec3 gravity_torque(const Vec3& theta, const PlantParams& p);

// Joint accelerations. NumericError if the state or torque is not finite.
Vec3 dynamics(const PlantState& s, const Vec3& tau, const PlantParams& p);

double kinetic_energy(const PlantState& s, const PlantParams& p);
double potential_energy(const Vec3& theta, const PlantParams& p);

PlantState rk4_step(const PlantState& s, const Vec3& tau, double dt, const PlantParams& p);

// Tool point position (x, y, z) in metres.
Vec3 forward_kinematics(const Vec3& theta, const PlantParams& p);

// Piecewise-constant set points, one row per joint, in degrees.
struct TrajectorySchedule {
  double segment_seconds = 2.0;
  std::vector<std::vector<double>> setpoints_deg;

  // Five 2 s segments:
  //   joint 1: 90, 0, 45, -45, 90
  //   joint 2: 45, 45, 0, 22.5, 45
  //   joint 3: 45, 22.5, 0, 22.5, 45
  static TrajectorySchedule reference_table();

  std::size_t segment_count() const;
  double duration() const { return segment_seconds * static_cast<double>(segment_count()); }
  std::size_t segment_at(double t) const;
  double setpoint_deg(std::size_t joint, double t) const;

  void validate() const;
};

struct RobotSample {
  double t = 0.0;
  Vec3 theta{};  // rad
  Vec3 setpoint{};  // rad
  Vec3 tau{};
};

struct SegmentStats {
  std::size_t joint = 0;
  std::size_t segment = 0;
  double setpoint_deg = 0.0;
  double step_deg = 0.0;
  // Largest |theta - setpoint| over the settle window closing the segment.
  double final_error_deg = 0.0;
  double tolerance_deg = 0.0;
  bool settled = false;
};

struct SimulationOptions {
  double ts = 1e-5;
  // Controllers see theta / y_scale_rad (pi: 180 degrees maps to 1).
  double y_scale_rad = 3.14159265358979323846;
  // Keep every log_every-th sample (the first one is always kept).
  int log_every = 100;
  // Settling is judged over this much time at the end of each segment.
  double settle_window = 0.1;
  // tolerance = settle_fraction * max(|step|, |setpoint|), at least min_tolerance_deg.
  double settle_fraction = 0.05;
  double min_tolerance_deg = 0.05;
  PlantState initial{};
};

struct SimulationResult {
  std::vector<RobotSample> samples;
  std::vector<SegmentStats> segments;
  std::size_t steps = 0;

  bool all_settled() const;
};

using StepObserver = std::function<void(std::size_t step, const RobotSample&)>;

// Runs the loop for the schedule's duration: sample theta, step each joint's
// controller, hold the torques for one ts of RK4. NumericError on
// divergence. The observer, if set, sees every step.
SimulationResult simulate_closed_loop(const std::array<JointController*, 3>& controllers,
                                      const TrajectorySchedule& schedule,
                                      const PlantParams& params, const SimulationOptions& opts,
                                      const StepObserver& observer = {});

// Largest per-joint |a - b| in degrees over samples with matching times,
// skipping the first `transient` seconds of every segment.
double max_angle_difference_deg(const SimulationResult& a, const SimulationResult& b,
                                const TrajectorySchedule& schedule, double transient);

}  // namespace tsfpi
