// SPDX-License-Identifier: Apache-2.0

#include "tsfpi/costmodel.hpp"

#include <array>
#include <cmath>

#include "tsfpi/errors.hpp"

namespace tsfpi {

namespace {

constexpr PlaneModel kPlanes[] = {
    {Variant::OneShot, Quantity::Nlut, 1682.0, 532.2, 6.493e-13, 0.9766},
    {Variant::OneShot, Quantity::Rs, 13.24, -0.1163, 3.414e-16, 0.7521},
    {Variant::Pipeline, Quantity::Nlut, 1171.0, 491.1, 4.245e-13, 0.9838},
    {Variant::Pipeline, Quantity::Rs, 18.48, -0.09704, -5.365e-16, 0.5366},
};

constexpr std::array<SynthesisPoint, 20> kOneShot = {{
    {8, 4, 6339, 12.54},   {8, 6, 6381, 12.35},   {8, 8, 6452, 12.20},   {8, 10, 6598, 11.94},
    {10, 4, 6772, 11.88},  {10, 6, 6904, 12.09},  {10, 8, 7331, 11.91},  {10, 10, 7331, 12.05},
    {12, 4, 7280, 12.10},  {12, 6, 7916, 12.01},  {12, 8, 7954, 11.49},  {12, 10, 8147, 11.63},
    {14, 4, 8761, 11.89},  {14, 6, 8915, 11.75},  {14, 8, 8999, 11.58},  {14, 10, 9163, 11.53},
    {16, 4, 9816, 11.54},  {16, 6, 9990, 11.79},  {16, 8, 10072, 11.32}, {16, 10, 10252, 11.28},
}};

constexpr std::array<SynthesisPoint, 20> kPipeline = {{
    {8, 4, 5326, 17.62},  {8, 6, 5350, 17.92},  {8, 8, 5422, 17.80},  {8, 10, 5590, 17.55},
    {10, 4, 6093, 17.48}, {10, 6, 6141, 17.28}, {10, 8, 6199, 17.35}, {10, 10, 6317, 17.63},
    {12, 4, 6910, 17.27}, {12, 6, 6982, 17.18}, {12, 8, 7016, 17.06}, {12, 10, 7172, 17.77},
    {14, 4, 7799, 17.06}, {14, 6, 7823, 17.18}, {14, 8, 7905, 17.16}, {14, 10, 8031, 16.66},
    {16, 4, 8713, 16.83}, {16, 6, 8737, 17.20}, {16, 8, 8819, 17.27}, {16, 10, 8955, 16.98},
}};

constexpr std::array<RegisterPoint, 5> kOneShotRegs = {{
    {8, 261, 6834, 10.77},
    {10, 307, 7331, 10.16},
    {12, 375, 8409, 10.13},
    {14, 438, 9460, 10.00},
    {16, 488, 10595, 9.59},
}};

constexpr std::array<RegisterPoint, 5> kPipelineRegs = {{
    {8, 790, 5826, 15.13},
    {10, 965, 6317, 13.86},
    {12, 1164, 7434, 14.50},
    {14, 1355, 8328, 13.66},
    {16, 1537, 9298, 13.41},
}};

}  // namespace

const char* to_string(Variant v) { return v == Variant::OneShot ? "os" : "p"; }

Variant parse_variant(const std::string& text) {
  if (text == "os" || text == "oneshot") return Variant::OneShot;
  if (text == "p" || text == "pipeline") return Variant::Pipeline;
  throw ConfigError("unknown variant '" + text + "' (expected os or p)");
}

const PlaneModel& plane(Variant v, Quantity q) {
  for (const auto& p : kPlanes) {
    if (p.variant == v && p.quantity == q) return p;
  }
  throw ContractError("no plane for this variant/quantity");
}

bool in_fit_domain(double n, double t) { return n >= 8 && n <= 16 && t >= 4 && t <= 10; }

CostEstimate estimate(Variant v, double n, double t, int rules) {
  if (!std::isfinite(n) || !std::isfinite(t)) throw ContractError("estimate: N and T must be finite");
  if (rules < 1) throw ContractError("estimate: rule count must be positive");
  CostEstimate e;
  e.nlut = plane(v, Quantity::Nlut)(n, t);
  e.rs_msps = plane(v, Quantity::Rs)(n, t);
  e.mflips = rules * e.rs_msps;
  e.extrapolated = !in_fit_domain(n, t);
  return e;
}

std::span<const SynthesisPoint> synthesis_table(Variant v) {
  return v == Variant::OneShot ? std::span<const SynthesisPoint>(kOneShot)
                               : std::span<const SynthesisPoint>(kPipeline);
}

std::span<const RegisterPoint> register_table(Variant v) {
  return v == Variant::OneShot ? std::span<const RegisterPoint>(kOneShotRegs)
                               : std::span<const RegisterPoint>(kPipelineRegs);
}

double dynamic_power_saving(double n_ref_gates, double f_ref_mhz, double n_work_gates,
                            double f_work_mhz) {
  for (double v : {n_ref_gates, f_ref_mhz, n_work_gates, f_work_mhz}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ContractError("dynamic_power_saving: arguments must be positive");
    }
  }
  return (n_ref_gates * f_ref_mhz * f_ref_mhz * f_ref_mhz) /
         (n_work_gates * f_work_mhz * f_work_mhz * f_work_mhz);
}

}  // namespace tsfpi
