// SPDX-License-Identifier: Apache-2.0

#include "tsfpi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "json.hpp"
#include "tsfpi/errors.hpp"

namespace tsfpi {

namespace {

using nlohmann::json;
using detail::CsvWriter;

constexpr double kDeg = std::numbers::pi / 180.0;

// Rejects keys outside `allowed` so typos do not silently fall back to
// defaults.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Rounding parse_rounding(const std::string& text) {
  if (text == "floor") return Rounding::Floor;
  if (text == "nearest_even") return Rounding::NearestEven;
  throw ConfigError("unknown rounding '" + text + "' (expected floor or nearest_even)");
}

const char* rounding_name(Rounding r) { return r == Rounding::Floor ? "floor" : "nearest_even"; }

TermShape term_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "label", "c", "d", "e", "f", "m", "points"});
  std::string kind;
  std::string label;
  read(j, "kind", kind, where);
  read(j, "label", label, where);
  auto num = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    double v = 0.0;
    read(j, key, v, where);
    return v;
  };
  switch (parse_term_kind(kind)) {
    case TermKind::RightTrapezoid: return TermShape::right_trapezoid(label, num("c"), num("d"));
    case TermKind::LeftTrapezoid: return TermShape::left_trapezoid(label, num("e"), num("f"));
    case TermKind::Triangle: return TermShape::triangle(label, num("e"), num("m"), num("d"));
    case TermKind::Lookup: {
      std::vector<std::pair<double, double>> pts;
      read(j, "points", pts, where);
      return TermShape::lookup(label, std::move(pts));
    }
  }
  throw ConfigError(where + ": bad kind");
}

json term_to_json(const TermShape& t) {
  json j{{"kind", to_string(t.kind)}, {"label", t.label}};
  switch (t.kind) {
    case TermKind::RightTrapezoid: j["c"] = t.c; j["d"] = t.d; break;
    case TermKind::LeftTrapezoid: j["e"] = t.e; j["f"] = t.f; break;
    case TermKind::Triangle: j["e"] = t.e; j["m"] = t.m; j["d"] = t.d; break;
    case TermKind::Lookup: j["points"] = t.points; break;
  }
  return j;
}

BankShape bank_from_json(const json& j) {
  check_keys(j, "bank", {"uniform", "inputs"});
  if (j.contains("uniform") && j.contains("inputs")) {
    throw ConfigError("bank: give either 'uniform' or 'inputs', not both");
  }
  if (j.contains("uniform")) {
    const auto& u = j.at("uniform");
    check_keys(u, "bank.uniform", {"count", "plateau"});
    int count = 7;
    double plateau = 0.75;
    read(u, "count", count, "bank.uniform");
    read(u, "plateau", plateau, "bank.uniform");
    if (!(plateau > 0.0 && plateau <= 1.0)) throw ConfigError("bank.uniform.plateau must lie in (0, 1]");
    return BankShape::uniform(2, count, plateau);
  }
  BankShape bank;
  if (!j.contains("inputs") || !j.at("inputs").is_array()) {
    throw ConfigError("bank: 'inputs' must be an array");
  }
  int i = 0;
  for (const auto& input : j.at("inputs")) {
    if (!input.is_array()) throw ConfigError("bank.inputs: each input must be an array");
    std::vector<TermShape> terms;
    int k = 0;
    for (const auto& t : input) {
      terms.push_back(term_from_json(t, "bank.inputs[" + std::to_string(i) + "][" +
                                            std::to_string(k++) + "]"));
    }
    bank.inputs.push_back(std::move(terms));
    ++i;
  }
  return bank;
}

RuleBase rules_from_json(const json& j, const BankShape& bank) {
  if (j.is_string()) {
    if (j.get<std::string>() != "antisymmetric") {
      throw ConfigError("rules: the only named rule base is 'antisymmetric'");
    }
    return RuleBase::antisymmetric_default(bank);
  }
  if (!j.is_array()) throw ConfigError("rules: expected 'antisymmetric' or an array of [l, k, A, B, C]");
  if (bank.inputs.size() < 2) throw ConfigError("rules: bank needs two inputs");
  RuleBase rb;
  rb.terms0 = bank.inputs[0].size();
  rb.terms1 = bank.inputs[1].size();
  rb.rules.assign(rb.terms0 * rb.terms1, RuleConsequent{});
  std::vector<bool> seen(rb.rules.size(), false);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 5) throw ConfigError("rules: each row is [l, k, A, B, C]");
    const auto l = row[0].get<long long>();
    const auto k = row[1].get<long long>();
    if (l < 0 || k < 0 || static_cast<std::size_t>(l) >= rb.terms0 ||
        static_cast<std::size_t>(k) >= rb.terms1) {
      throw ConfigError("rules: index (" + std::to_string(l) + ", " + std::to_string(k) +
                        ") outside the bank");
    }
    const auto g = rb.index(static_cast<std::size_t>(l), static_cast<std::size_t>(k));
    if (seen[g]) throw ConfigError("rules: duplicate row for (" + std::to_string(l) + ", " +
                                   std::to_string(k) + ")");
    seen[g] = true;
    rb.rules[g] = {row[2].get<double>(), row[3].get<double>(), row[4].get<double>()};
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ConfigError("rules: every (l, k) pair needs a row");
  }
  return rb;
}

json rules_to_json(const RuleBase& rb) {
  json rows = json::array();
  for (std::size_t l = 0; l < rb.terms0; ++l) {
    for (std::size_t k = 0; k < rb.terms1; ++k) {
      const auto& r = rb.at(l, k);
      rows.push_back({l, k, r.a, r.b, r.c});
    }
  }
  return rows;
}

void controller_from_json(const json& j, ControllerConfig& c) {
  check_keys(j, "controller",
             {"kp", "ki", "ts", "v_min", "v_max", "y_max", "n_bits", "t_bits", "mode", "rounding"});
  read(j, "kp", c.kp, "controller");
  read(j, "ki", c.ki, "controller");
  read(j, "ts", c.ts, "controller");
  read(j, "v_min", c.v_min, "controller");
  read(j, "v_max", c.v_max, "controller");
  read(j, "y_max", c.y_max, "controller");
  read(j, "n_bits", c.n_bits, "controller");
  read(j, "t_bits", c.t_bits, "controller");
  if (j.contains("mode")) c.mode = parse_executor_mode(j.at("mode").get<std::string>());
  if (j.contains("rounding")) c.rounding = parse_rounding(j.at("rounding").get<std::string>());
}

void plant_from_json(const json& j, PlantParams& p) {
  check_keys(j, "plant", {"l1", "l2", "l3", "l4", "m2", "m3", "j1", "rotor", "friction", "gravity"});
  read(j, "l1", p.l1, "plant");
  read(j, "l2", p.l2, "plant");
  read(j, "l3", p.l3, "plant");
  read(j, "l4", p.l4, "plant");
  read(j, "m2", p.m2, "plant");
  read(j, "m3", p.m3, "plant");
  read(j, "j1", p.j1, "plant");
  read(j, "rotor", p.rotor, "plant");
  read(j, "friction", p.friction, "plant");
  read(j, "gravity", p.gravity, "plant");
}

void simulation_from_json(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "simulation",
             {"log_every", "settle_window", "settle_fraction", "min_tolerance_deg",
              "transient_seconds", "initial_deg"});
  auto& s = cfg.simulation;
  read(j, "log_every", s.log_every, "simulation");
  read(j, "settle_window", s.settle_window, "simulation");
  read(j, "settle_fraction", s.settle_fraction, "simulation");
  read(j, "min_tolerance_deg", s.min_tolerance_deg, "simulation");
  read(j, "transient_seconds", cfg.transient_seconds, "simulation");
  if (j.contains("initial_deg")) {
    Vec3 deg{};
    read(j, "initial_deg", deg, "simulation");
    for (int i = 0; i < 3; ++i) s.initial.theta[i] = deg[i] * kDeg;
  }
}

void write_trajectory(const SimulationResult& r, const std::filesystem::path& path) {
  CsvWriter csv(path, "tsfpi.robot/1",
                {"t", "theta1_deg", "theta2_deg", "theta3_deg", "sp1_deg", "sp2_deg", "sp3_deg",
                 "tau1", "tau2", "tau3"});
  for (const auto& s : r.samples) {
    csv << s.t;
    for (double v : s.theta) csv << v / kDeg;
    for (double v : s.setpoint) csv << v / kDeg;
    for (double v : s.tau) csv << v;
    csv.end_row();
  }
  csv.close();
}

// Wraps a fixed-point controller and logs every log_every-th step.
class LoggedController final : public JointController {
 public:
  LoggedController(std::unique_ptr<FuzzyPiController> inner, const std::filesystem::path& path,
                   int every)
      : inner_(std::move(inner)),
        csv_(path, "tsfpi.steplog/1", {"n", "y", "y_sp", "e", "e_d", "x0", "x1", "v_d", "r"}),
        every_(every) {}

  double step(double y, double y_sp) override {
    const auto rec = inner_->step_record(y, y_sp);
    if (n_ % every_ == 0) {
      csv_ << static_cast<long long>(n_) << rec.y << rec.y_sp << rec.e.to_double()
           << rec.e_d.to_double() << rec.x0.to_double() << rec.x1.to_double()
           << rec.v_d.to_double() << rec.r.to_double();
      csv_.end_row();
    }
    ++n_;
    return rec.r.to_double();
  }
  void reset() override {
    inner_->reset();
    n_ = 0;
  }
  void close() { csv_.close(); }

 private:
  std::unique_ptr<FuzzyPiController> inner_;
  CsvWriter csv_;
  std::size_t n_ = 0;
  std::size_t every_;
};

std::string run_name(int n_bits) {
  return n_bits == 0 ? std::string("reference") : "N" + std::to_string(n_bits);
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

void ExperimentConfig::validate() const {
  bank.validate();
  rules.validate();
  controller.validate();
  plant.validate();
  schedule.validate();
  if (bank.inputs.size() != 2) throw ConfigError("bank: the controller has exactly two inputs");
  if (rules.terms0 != bank.inputs[0].size() || rules.terms1 != bank.inputs[1].size()) {
    throw ConfigError("rules do not match the bank size");
  }
  if (simulation.log_every < 1) throw ConfigError("simulation.log_every must be >= 1");
  if (!(simulation.settle_window > 0.0) || simulation.settle_window > schedule.segment_seconds) {
    throw ConfigError("simulation.settle_window must lie in (0, segment length]");
  }
  if (!(transient_seconds >= 0.0) || transient_seconds >= schedule.segment_seconds) {
    throw ConfigError("simulation.transient_seconds must lie in [0, segment length)");
  }
  if (mse.points_per_axis < 2) throw ConfigError("sweep.points_per_axis must be >= 2");
  auto check_bits = [](const std::vector<int>& v, int lo, int hi, const char* what) {
    if (v.empty()) throw ConfigError(std::string(what) + ": empty list");
    for (int b : v) {
      if (b < lo || b > hi) {
        throw ConfigError(std::string(what) + ": " + std::to_string(b) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
      }
    }
  };
  check_bits(sweep_n, 4, 32, "sweep.n");
  check_bits(sweep_t, 2, 16, "sweep.t");
  check_bits(robot_n, 4, 32, "robot.n");
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"bank", "rules", "controller", "plant", "schedule", "simulation", "sweep", "robot"});
  ExperimentConfig cfg;
  try {
    if (j.contains("bank")) cfg.bank = bank_from_json(j.at("bank"));
    cfg.rules = j.contains("rules") ? rules_from_json(j.at("rules"), cfg.bank)
                                    : RuleBase::antisymmetric_default(cfg.bank);
    if (j.contains("controller")) controller_from_json(j.at("controller"), cfg.controller);
    if (j.contains("plant")) plant_from_json(j.at("plant"), cfg.plant);
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      check_keys(s, "schedule", {"segment_seconds", "setpoints_deg"});
      read(s, "segment_seconds", cfg.schedule.segment_seconds, "schedule");
      read(s, "setpoints_deg", cfg.schedule.setpoints_deg, "schedule");
    }
    if (j.contains("simulation")) simulation_from_json(j.at("simulation"), cfg);
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      check_keys(s, "sweep", {"n", "t", "points_per_axis", "reference_input"});
      read(s, "n", cfg.sweep_n, "sweep");
      read(s, "t", cfg.sweep_t, "sweep");
      read(s, "points_per_axis", cfg.mse.points_per_axis, "sweep");
      if (s.contains("reference_input")) {
        const auto v = s.at("reference_input").get<std::string>();
        if (v == "real") {
          cfg.mse.reference_input = ReferenceInput::Real;
        } else if (v == "quantized") {
          cfg.mse.reference_input = ReferenceInput::Quantized;
        } else {
          throw ConfigError("sweep.reference_input must be 'real' or 'quantized'");
        }
      }
    }
    if (j.contains("robot")) {
      check_keys(j.at("robot"), "robot", {"n"});
      read(j.at("robot"), "n", cfg.robot_n, "robot");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.mse.rounding = cfg.controller.rounding;
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string ExperimentConfig::to_json() const {
  json j;
  json inputs = json::array();
  for (const auto& terms : bank.inputs) {
    json arr = json::array();
    for (const auto& t : terms) arr.push_back(term_to_json(t));
    inputs.push_back(arr);
  }
  j["bank"] = {{"inputs", inputs}};
  j["rules"] = rules_to_json(rules);
  j["controller"] = {{"kp", controller.kp},         {"ki", controller.ki},
                     {"ts", controller.ts},         {"v_min", controller.v_min},
                     {"v_max", controller.v_max},   {"y_max", controller.y_max},
                     {"n_bits", controller.n_bits}, {"t_bits", controller.t_bits},
                     {"mode", to_string(controller.mode)},
                     {"rounding", rounding_name(controller.rounding)}};
  j["plant"] = {{"l1", plant.l1}, {"l2", plant.l2},       {"l3", plant.l3},
                {"l4", plant.l4}, {"m2", plant.m2},       {"m3", plant.m3},
                {"j1", plant.j1}, {"rotor", plant.rotor}, {"friction", plant.friction},
                {"gravity", plant.gravity}};
  j["schedule"] = {{"segment_seconds", schedule.segment_seconds},
                   {"setpoints_deg", schedule.setpoints_deg}};
  Vec3 initial_deg{};
  for (int i = 0; i < 3; ++i) initial_deg[i] = simulation.initial.theta[i] / kDeg;
  j["simulation"] = {{"log_every", simulation.log_every},
                     {"settle_window", simulation.settle_window},
                     {"settle_fraction", simulation.settle_fraction},
                     {"min_tolerance_deg", simulation.min_tolerance_deg},
                     {"transient_seconds", transient_seconds},
                     {"initial_deg", initial_deg}};
  j["sweep"] = {{"n", sweep_n},
                {"t", sweep_t},
                {"points_per_axis", mse.points_per_axis},
                {"reference_input",
                 mse.reference_input == ReferenceInput::Real ? "real" : "quantized"}};
  j["robot"] = {{"n", robot_n}};
  return j.dump(2) + "\n";
}

SurfaceResult run_surface(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const auto& c = cfg.controller;
  const FimEngine engine(cfg.bank, cfg.rules, {c.n_bits, c.t_bits, c.rounding});
  const auto axis = grid_axis(cfg.mse.points_per_axis);

  SurfaceResult res;
  res.fixed_csv = out_dir / "surface_fixed.csv";
  res.reference_csv = out_dir / "surface_reference.csv";
  CsvWriter fixed(res.fixed_csv, "tsfpi.surface_fixed/1", {"x0", "x1", "v_d", "v_d_raw", "flags"});
  CsvWriter ref(res.reference_csv, "tsfpi.surface_reference/1", {"x0", "x1", "v_d"});
  for (double a : axis) {
    const auto x0 = engine.quantize_input(a);
    for (double b : axis) {
      const auto x1 = engine.quantize_input(b);
      const auto out = engine.one_shot(x0, x1);
      fixed << x0.to_double() << x1.to_double() << out.v_d.to_double()
            << static_cast<long long>(out.v_d.raw64()) << static_cast<int>(out.flags);
      fixed.end_row();
      ref << a << b << fim_reference(a, b, cfg.bank, cfg.rules).v_d;
      ref.end_row();
      res.max_abs_fixed = std::max(res.max_abs_fixed, std::abs(out.v_d.to_double()));
      if (out.flags & kFimZeroDenominator) ++res.zero_denominators;
      ++res.rows;
    }
  }
  fixed.close();
  ref.close();
  return res;
}

SweepResult run_mse_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  SweepResult res;
  res.reports = mse_sweep(cfg.sweep_n, cfg.sweep_t, cfg.bank, cfg.rules, cfg.mse);
  res.csv = out_dir / "mse_sweep.csv";
  CsvWriter csv(res.csv, "tsfpi.mse_sweep/1",
                {"N", "T", "grid_points", "mse", "max_abs_err", "max_abs_output"});
  for (const auto& r : res.reports) {
    csv << r.n_bits << r.t_bits << r.grid_points << r.mse << r.max_abs_err << r.max_abs_output;
    csv.end_row();
  }
  csv.close();
  return res;
}

bool RobotResult::all_settled() const {
  return std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.result.all_settled(); });
}

double RobotResult::worst_diff_deg() const {
  double w = 0.0;
  for (const auto& r : runs) w = std::max(w, r.max_diff_deg);
  return w;
}

RobotResult run_robot(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      const RobotOptions& options) {
  cfg.validate();
  ensure_dir(out_dir);
  auto sim = cfg.simulation;
  sim.ts = cfg.controller.ts;

  auto simulate = [&](int n_bits) {
    RobotRun run;
    run.n_bits = n_bits;
    std::vector<std::unique_ptr<JointController>> owned;
    std::vector<LoggedController*> logged;
    auto ccfg = cfg.controller;
    if (n_bits != 0) ccfg.n_bits = n_bits;
    for (int j = 0; j < 3; ++j) {
      if (n_bits == 0) {
        owned.push_back(std::make_unique<ReferenceController>(ccfg, cfg.bank, cfg.rules));
      } else if (options.step_log) {
        auto inner = std::make_unique<FuzzyPiController>(ccfg, cfg.bank, cfg.rules);
        auto path = out_dir / ("steplog_" + run_name(n_bits) + "_joint" + std::to_string(j + 1) +
                               ".csv");
        auto lc = std::make_unique<LoggedController>(std::move(inner), path, sim.log_every);
        logged.push_back(lc.get());
        owned.push_back(std::move(lc));
      } else {
        owned.push_back(std::make_unique<FuzzyPiController>(ccfg, cfg.bank, cfg.rules));
      }
    }
    run.result = simulate_closed_loop({owned[0].get(), owned[1].get(), owned[2].get()},
                                      cfg.schedule, cfg.plant, sim);
    for (auto* l : logged) l->close();
    if (options.write_trajectories) {
      run.csv = out_dir / ("robot_" + run_name(n_bits) + ".csv");
      write_trajectory(run.result, run.csv);
    }
    return run;
  };

  auto ref_job = std::async(std::launch::async, simulate, 0);
  std::vector<std::future<RobotRun>> jobs;
  for (int n : cfg.robot_n) jobs.push_back(std::async(std::launch::async, simulate, n));

  RobotResult res;
  std::exception_ptr failure;
  try {
    res.reference = ref_job.get();
  } catch (...) {
    failure = std::current_exception();
  }
  for (auto& j : jobs) {
    try {
      res.runs.push_back(j.get());
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& r : res.runs) {
    r.max_diff_deg =
        max_angle_difference_deg(r.result, res.reference.result, cfg.schedule, cfg.transient_seconds);
  }

  res.summary_csv = out_dir / "robot_summary.csv";
  CsvWriter csv(res.summary_csv, "tsfpi.robot_summary/1",
                {"run", "N", "joint", "segment", "setpoint_deg", "step_deg", "final_error_deg",
                 "tolerance_deg", "settled", "max_diff_deg"});
  auto emit = [&](const RobotRun& r) {
    for (const auto& s : r.result.segments) {
      csv << run_name(r.n_bits) << r.n_bits << s.joint + 1 << s.segment + 1 << s.setpoint_deg
          << s.step_deg << s.final_error_deg << s.tolerance_deg << (s.settled ? 1 : 0)
          << r.max_diff_deg;
      csv.end_row();
    }
  };
  emit(res.reference);
  for (const auto& r : res.runs) emit(r);
  csv.close();
  return res;
}

}  // namespace tsfpi
