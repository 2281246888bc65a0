// SPDX-License-Identifier: Apache-2.0

#pragma once

// Fitted synthesis planes for the two inference variants and the
// dynamic-power scaling rule. The planes were fitted over N in [8, 16] and
// T in [4, 10]; outside that box the estimate is an extrapolation.

#include <span>
#include <string>

namespace tsfpi {

enum class Variant { OneShot, Pipeline };
enum class Quantity { Nlut, Rs };

const char* to_string(Variant v);
Variant parse_variant(const std::string& text);  // "os" / "p"

struct PlaneModel {
  Variant variant;
  Quantity quantity;
  double intercept;
  double coef_n;
  double coef_t;
  double r_squared;

  double operator()(double n, double t) const { return intercept + coef_n * n + coef_t * t; }
};

const PlaneModel& plane(Variant v, Quantity q);

bool in_fit_domain(double n, double t);

struct CostEstimate {
  double nlut = 0.0;
  double rs_msps = 0.0;
  // rules * Msps.
  double mflips = 0.0;
  bool extrapolated = false;
};

CostEstimate estimate(Variant v, double n, double t, int rules = 49);

// Synthesis results the planes were fitted to (N in {8..16} step 2,
// T in {4..10} step 2).
struct SynthesisPoint {
  int n;
  int t;
  int nlut;
  double rs_msps;
};

std::span<const SynthesisPoint> synthesis_table(Variant v);

// Same variants at T = 10, with register counts.
struct RegisterPoint {
  int n;
  int registers;
  int nlut;
  double rs_msps;
};

std::span<const RegisterPoint> register_table(Variant v);

// Dynamic power goes as gates * f^3; returns P_ref / P_work. All arguments
// must be positive (ContractError).
double dynamic_power_saving(double n_ref_gates, double f_ref_mhz, double n_work_gates,
                            double f_work_mhz);

}  // namespace tsfpi
