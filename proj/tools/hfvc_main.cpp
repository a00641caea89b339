// Command-line front end. Subcommands:
//
//   solve     one scene file -> solution JSON (stdout or --out)
//   bench     randomized benchmark -> records CSV + summary JSON
//   tilt      block-tilting trajectory -> per-step CSV
//   selftest  built-in invariant checks
//
// Exit codes: 0 success, 1 input error (bad flags, unreadable or invalid
// files, invalid parameters), 2 typed infeasibility reported by the solver,
// 3 internal failure. Every file this tool writes gets a sibling
// "<file>.manifest.json" recording how to reproduce it.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hfvc/bench.hpp"
#include "hfvc/linalg.hpp"
#include "hfvc/qp.hpp"
#include "hfvc/rng.hpp"
#include "hfvc/scene.hpp"
#include "hfvc/solver.hpp"
#include "hfvc/tilt.hpp"
#include "hfvc/verify.hpp"

namespace {

using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kInputError = 1, kInfeasible = 2, kInternal = 3 };

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string content_hash(const std::string& text) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

std::string iso_utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Reproducibility sidecar written next to each output artifact.
struct Manifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string started_at;
};

void write_manifest(const std::string& artifact_path, const Manifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["seed"] = m.seed;
  j["tool_version"] = kVersion;
  j["config_hash"] = m.config_hash;
  j["started_at"] = m.started_at;
  j["finished_at"] = iso_utc_now();
  write_file(artifact_path + ".manifest.json", j.dump(2) + "\n");
}

// JSON cannot carry non-finite numbers; print them as strings instead of
// nlohmann's default null.
ordered_json json_double(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ordered_json json_vec(const hfvc::Vec& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(json_double(v(i)));
  return a;
}

ordered_json json_mat(const hfvc::Mat& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(json_vec(m.row(i)));
  return rows;
}

ordered_json solution_json(const hfvc::Solution& sol) {
  ordered_json j;
  j["n_av"] = sol.n_av;
  j["n_af"] = sol.n_af;
  j["R_a"] = json_mat(sol.r_a);
  j["C"] = json_mat(sol.c);
  j["w_av"] = json_vec(sol.w_av);
  j["eta_af"] = json_vec(sol.eta_af);
  j["crashing_index"] = json_double(sol.crashing_index);
  j["timings"] = {{"velocity_us", json_double(sol.timings.velocity_us)},
                  {"force_us", json_double(sol.timings.force_us)}};
  j["status"] = hfvc::solve_status_name(sol.status);
  if (sol.status != hfvc::SolveStatus::kSolved)
    j["reason"] = hfvc::infeasible_reason_name(sol.reason);
  return j;
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const hfvc::SceneError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const std::string& command_line, const std::string& scene_path,
              const std::string& mode, const std::string& out_path) {
  const std::string text = read_file(scene_path);
  hfvc::Scene scene;
  try {
    scene = hfvc::parse_scene_text(text);
  } catch (const hfvc::SceneError& e) {
    std::cerr << "error: " << scene_path << ": " << e.what() << "\n";
    return kInputError;
  }
  const hfvc::SystemModel model = hfvc::build_model(scene);

  hfvc::SolveOptions opts;
  if (mode == "maximal") opts.mode = hfvc::VelocityDimMode::kMaximal;

  Manifest manifest;
  manifest.command = command_line;
  manifest.config_path = scene_path;
  manifest.config_hash = content_hash(text);
  manifest.started_at = iso_utc_now();

  const hfvc::Solution sol = hfvc::solve(model, opts);
  const std::string body = solution_json(sol).dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << body;
  } else {
    write_file(out_path, body);
    write_manifest(out_path, manifest);
  }
  return sol.status == hfvc::SolveStatus::kSolved ? kOk : kInfeasible;
}

// ---------------------------------------------------------------------------
// bench

void apply_bench_config_file(const std::string& text, hfvc::BenchConfig* cfg) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object())
    throw std::invalid_argument("bench config: expected a JSON object");
  if (j.contains("family")) {
    const std::string fam = j.at("family").get<std::string>();
    if (fam != "planar" && fam != "3d")
      throw std::invalid_argument("bench config: family must be planar or 3d");
    cfg->planar = fam == "planar";
  }
  if (j.contains("problems")) cfg->problems_per_cell = j.at("problems").get<int>();
  if (j.contains("seed")) cfg->seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode != "minimal" && mode != "maximal")
      throw std::invalid_argument("bench config: mode must be minimal or maximal");
    cfg->mode = mode == "maximal" ? hfvc::VelocityDimMode::kMaximal
                                  : hfvc::VelocityDimMode::kMinimal;
  }
  if (j.contains("workers")) cfg->workers = j.at("workers").get<int>();
  if (j.contains("alternatives"))
    cfg->alternative_samples = j.at("alternatives").get<int>();
  if (j.contains("cells"))
    cfg->cells = j.at("cells").get<std::vector<std::string>>();
  if (j.contains("mu_min")) cfg->mu_min = j.at("mu_min").get<double>();
  if (j.contains("mu_max")) cfg->mu_max = j.at("mu_max").get<double>();
  if (j.contains("n_min")) cfg->n_min = j.at("n_min").get<double>();
  if (j.contains("ridge_count")) cfg->ridge_count = j.at("ridge_count").get<int>();
}

struct BenchFlags {
  std::string family = "planar";
  int problems = -1;
  std::int64_t seed = -1;
  std::string mode;
  int workers = -1;
  int alternatives = -1;
  std::vector<std::string> cells;
  std::string config_path;
  std::string csv_path = "bench_records.csv";
  std::string summary_path = "bench_summary.json";
  bool family_given = false;
};

int cmd_bench(const std::string& command_line, const BenchFlags& flags) {
  hfvc::BenchConfig cfg;
  std::string config_text;
  if (!flags.config_path.empty()) {
    config_text = read_file(flags.config_path);
    try {
      apply_bench_config_file(config_text, &cfg);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << flags.config_path << ": " << e.what() << "\n";
      return kInputError;
    }
  }
  if (flags.family_given) {
    if (flags.family != "planar" && flags.family != "3d")
      throw std::invalid_argument("--family must be planar or 3d");
    cfg.planar = flags.family == "planar";
  }
  if (flags.problems >= 0) cfg.problems_per_cell = flags.problems;
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.mode.empty()) {
    if (flags.mode != "minimal" && flags.mode != "maximal")
      throw std::invalid_argument("--mode must be minimal or maximal");
    cfg.mode = flags.mode == "maximal" ? hfvc::VelocityDimMode::kMaximal
                                       : hfvc::VelocityDimMode::kMinimal;
  }
  if (flags.workers >= 0) cfg.workers = flags.workers;
  if (flags.alternatives >= 0) cfg.alternative_samples = flags.alternatives;
  if (!flags.cells.empty()) cfg.cells = flags.cells;

  Manifest manifest;
  manifest.command = command_line;
  manifest.config_path = flags.config_path;
  manifest.seed = cfg.seed;
  if (config_text.empty()) {
    std::ostringstream canon;
    canon << "family=" << (cfg.planar ? "planar" : "3d")
          << ";problems=" << cfg.problems_per_cell << ";seed=" << cfg.seed
          << ";mode="
          << (cfg.mode == hfvc::VelocityDimMode::kMaximal ? "maximal" : "minimal")
          << ";alternatives=" << cfg.alternative_samples << ";cells=";
    for (const std::string& c : cfg.cells) canon << c << ',';
    manifest.config_hash = content_hash(canon.str());
  } else {
    manifest.config_hash = content_hash(config_text);
  }
  manifest.started_at = iso_utc_now();

  const hfvc::BenchResult result = hfvc::run_benchmark(cfg);

  std::ostringstream csv;
  hfvc::write_records_csv(result.records, csv);
  write_file(flags.csv_path, csv.str());
  write_manifest(flags.csv_path, manifest);

  write_file(flags.summary_path, hfvc::summary_json(result) + "\n");
  write_manifest(flags.summary_path, manifest);

  std::cout << "bench: " << result.overall.solved << "/" << result.overall.total
            << " solved, " << result.overall.errors << " errors, "
            << result.overall.oracle_violations << " oracle violations\n"
            << "records: " << flags.csv_path << "\nsummary: " << flags.summary_path
            << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// tilt

void apply_tilt_config_file(const std::string& text, hfvc::TiltParams* params) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object())
    throw std::invalid_argument("tilt config: expected a JSON object");
  const auto vec3 = [&](const char* key, Eigen::Vector3d* out) {
    if (!j.contains(key)) return;
    const auto arr = j.at(key).get<std::vector<double>>();
    if (arr.size() != 3)
      throw std::invalid_argument(std::string("tilt config: ") + key +
                                  " must have 3 entries");
    *out = Eigen::Vector3d(arr[0], arr[1], arr[2]);
  };
  if (j.contains("edge")) params->edge = j.at("edge").get<double>();
  vec3("table_contact_a", &params->table_contact_a);
  vec3("table_contact_b", &params->table_contact_b);
  vec3("hand_contact_object", &params->hand_contact_object);
  vec3("object_start", &params->object_start);
  vec3("axis", &params->axis);
  vec3("hand_gravity", &params->hand_gravity);
  if (j.contains("rate")) params->rate = j.at("rate").get<double>();
  if (j.contains("total_angle")) params->total_angle = j.at("total_angle").get<double>();
  if (j.contains("steps")) params->steps = j.at("steps").get<int>();
  if (j.contains("object_weight"))
    params->object_weight = j.at("object_weight").get<double>();
  if (j.contains("mu_hand")) params->mu_hand = j.at("mu_hand").get<double>();
  if (j.contains("mu_table")) params->mu_table = j.at("mu_table").get<double>();
  if (j.contains("n_min")) params->n_min = j.at("n_min").get<double>();
  if (j.contains("ridge_count")) params->ridge_count = j.at("ridge_count").get<int>();
}

struct TiltFlags {
  int steps = -1;
  double rate = std::numeric_limits<double>::quiet_NaN();
  double mu_hand = std::numeric_limits<double>::quiet_NaN();
  double mu_table = std::numeric_limits<double>::quiet_NaN();
  double n_min = std::numeric_limits<double>::quiet_NaN();
  std::string config_path;
  std::string csv_path = "tilt_steps.csv";
};

int cmd_tilt(const std::string& command_line, const TiltFlags& flags) {
  hfvc::TiltParams params;
  std::string config_text;
  if (!flags.config_path.empty()) {
    config_text = read_file(flags.config_path);
    try {
      apply_tilt_config_file(config_text, &params);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << flags.config_path << ": " << e.what() << "\n";
      return kInputError;
    }
  }
  if (flags.steps >= 0) params.steps = flags.steps;
  if (!std::isnan(flags.rate)) params.rate = flags.rate;
  if (!std::isnan(flags.mu_hand)) params.mu_hand = flags.mu_hand;
  if (!std::isnan(flags.mu_table)) params.mu_table = flags.mu_table;
  if (!std::isnan(flags.n_min)) params.n_min = flags.n_min;

  Manifest manifest;
  manifest.command = command_line;
  manifest.config_path = flags.config_path;
  if (config_text.empty()) {
    std::ostringstream canon;
    canon << "steps=" << params.steps << ";rate=" << params.rate
          << ";mu_hand=" << params.mu_hand << ";mu_table=" << params.mu_table
          << ";n_min=" << params.n_min;
    manifest.config_hash = content_hash(canon.str());
  } else {
    manifest.config_hash = content_hash(config_text);
  }
  manifest.started_at = iso_utc_now();

  const hfvc::TiltTrajectory traj = hfvc::run_tilt(params);

  std::ostringstream csv;
  hfvc::write_tilt_csv(traj, csv);
  write_file(flags.csv_path, csv.str());
  write_manifest(flags.csv_path, manifest);

  std::cout << "tilt: " << traj.steps.size() << "/" << params.steps
            << " steps solved\nrecords: " << flags.csv_path << "\n";
  if (!traj.completed) {
    const hfvc::TiltStep& last = traj.steps.back();
    std::cerr << "tilt halted at step " << last.step << ": "
              << hfvc::solve_status_name(last.solution.status) << " ("
              << hfvc::infeasible_reason_name(last.solution.reason) << ")\n";
    return kInfeasible;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// selftest

int cmd_selftest() {
  int failures = 0;
  const auto report = [&](const char* name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };

  // Closed-form conditioning of one constraint row against a rotated control.
  {
    bool ok = true;
    std::string detail;
    hfvc::Mat j(1, 2);
    j << 1, 0;
    for (double deg : {15.0, 30.0, 45.0, 60.0, 75.0}) {
      const double th = deg * M_PI / 180.0;
      hfvc::Mat c(1, 2);
      c << std::cos(th), std::sin(th);
      const double got = hfvc::crashing_index(j, c);
      const double want =
          std::sqrt((1 + std::abs(std::cos(th))) / (1 - std::abs(std::cos(th))));
      if (std::abs(got - want) > 1e-8) {
        ok = false;
        detail = "angle " + std::to_string(deg);
      }
    }
    hfvc::Mat collinear(1, 2);
    collinear << 1, 0;
    if (!std::isinf(hfvc::crashing_index(j, collinear))) {
      ok = false;
      detail = "collinear sentinel";
    }
    report("crashing index closed form", ok, detail);
  }

  // Index invariance under row rotations of the control basis.
  {
    bool ok = true;
    std::string detail;
    hfvc::Rng rng(2024, 0, 0);
    for (int trial = 0; trial < 200 && ok; ++trial) {
      const hfvc::Mat j = rng.normal_mat(2, 4);
      const hfvc::Mat c = hfvc::row_basis(rng.normal_mat(2, 4));
      if (c.rows() != 2) continue;
      const hfvc::Mat q = hfvc::row_basis(rng.normal_mat(2, 2));
      if (q.rows() != 2) continue;
      const double base = hfvc::crashing_index(j, c);
      const double rotated = hfvc::crashing_index(j, hfvc::Mat(q * c));
      if (std::isfinite(base) != std::isfinite(rotated) ||
          (std::isfinite(base) && std::abs(base - rotated) > 1e-8)) {
        ok = false;
        detail = "trial " + std::to_string(trial);
      }
    }
    report("index rotation invariance", ok, detail);
  }

  // Contact-free solves: orthonormal bases, unit index, checker passes.
  {
    bool ok = true;
    std::string detail;
    hfvc::Rng rng(2025, 0, 0);
    for (int trial = 0; trial < 100 && ok; ++trial) {
      const int n_a = 2 + static_cast<int>(rng.uniform_int(0, 2));
      hfvc::SystemModel model;
      model.dof = hfvc::DofPartition{0, n_a};
      model.j = hfvc::Mat(0, n_a);
      model.jf = hfvc::Mat(0, n_a);
      const hfvc::Mat g = hfvc::row_basis(rng.normal_mat(1, n_a));
      if (g.rows() != 1) continue;
      model.g = g;
      const hfvc::Vec target = rng.normal_vec(n_a);
      model.b_g = model.g * target;
      model.f_ext = hfvc::Vec::Zero(n_a);
      model.guard.lambda_mat = hfvc::Mat(0, n_a);
      model.guard.b_lambda = hfvc::Vec();
      const hfvc::Solution sol = hfvc::solve(model);
      if (sol.status != hfvc::SolveStatus::kSolved ||
          std::abs(sol.crashing_index - 1.0) > 1e-9 ||
          !hfvc::check_solution(model, sol).passes()) {
        ok = false;
        detail = "trial " + std::to_string(trial);
      }
    }
    report("contact-free solves stay orthonormal", ok, detail);
  }

  // Equality-only QPs reduce to minimum-norm solutions.
  {
    bool ok = true;
    std::string detail;
    hfvc::Rng rng(2026, 0, 0);
    for (int trial = 0; trial < 100 && ok; ++trial) {
      const hfvc::Mat a = rng.normal_mat(2, 4);
      const hfvc::Vec x0 = rng.normal_vec(4);
      hfvc::QpProblem p;
      p.h = 2.0 * hfvc::Mat::Identity(4, 4);
      p.g = hfvc::Vec::Zero(4);
      p.a_eq = a;
      p.b_eq = a * x0;
      p.a_in = hfvc::Mat(0, 4);
      p.b_in = hfvc::Vec();
      const hfvc::QpSolution sol = hfvc::qp_solve(p);
      hfvc::Vec ref;
      try {
        ref = hfvc::min_norm_solve(a, p.b_eq);
      } catch (const std::exception&) {
        continue;
      }
      if (sol.status != hfvc::QpStatus::kOptimal || (sol.x - ref).norm() > 1e-8) {
        ok = false;
        detail = "trial " + std::to_string(trial);
      }
    }
    report("equality QP equals minimum-norm solve", ok, detail);
  }

  // Benchmark determinism on a small planar cell.
  {
    bool ok = true;
    std::string detail;
    hfvc::BenchConfig cfg;
    cfg.planar = true;
    cfg.cells = {"planar_f_1fx1"};
    cfg.problems_per_cell = 5;
    cfg.seed = 123;
    const hfvc::BenchResult a = hfvc::run_benchmark(cfg);
    const hfvc::BenchResult b = hfvc::run_benchmark(cfg);
    std::ostringstream csv_a, csv_b;
    hfvc::write_records_csv(a.records, csv_a);
    hfvc::write_records_csv(b.records, csv_b);
    if (hfvc::csv_without_timing_columns(csv_a.str()) !=
        hfvc::csv_without_timing_columns(csv_b.str())) {
      ok = false;
      detail = "record streams differ";
    }
    if (a.overall.errors != 0) {
      ok = false;
      detail = "errors in benchmark records";
    }
    report("benchmark determinism", ok, detail);
  }

  // Short tilt run: structure of every step.
  {
    bool ok = true;
    std::string detail;
    hfvc::TiltParams params;
    params.steps = 8;
    const hfvc::TiltTrajectory traj = hfvc::run_tilt(params);
    if (!traj.completed) {
      ok = false;
      detail = "halted";
    }
    for (const hfvc::TiltStep& s : traj.steps) {
      if (s.solution.n_av != 1 || s.solution.n_af != 2 ||
          s.force_y_fraction > 0.05) {
        ok = false;
        detail = "step " + std::to_string(s.step);
      }
    }
    report("tilt scenario structure", ok, detail);
  }

  std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string command_line = join_args(argc, argv);

  CLI::App app{"Optimally conditioned hybrid force-velocity control"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string scene_path;
  std::string solve_mode = "minimal";
  std::string solve_out;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one scene file");
  solve_cmd->add_option("scene", scene_path, "Scene JSON file")->required();
  solve_cmd->add_option("--mode", solve_mode, "minimal or maximal")
      ->check(CLI::IsMember({"minimal", "maximal"}));
  solve_cmd->add_option("--out", solve_out, "Write the solution JSON here");

  BenchFlags bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run the randomized benchmark");
  CLI::Option* family_opt =
      bench_cmd->add_option("--family", bench.family, "planar or 3d")
          ->check(CLI::IsMember({"planar", "3d"}));
  bench_cmd->add_option("--problems", bench.problems, "Problems per cell");
  bench_cmd->add_option("--seed", bench.seed, "Benchmark seed");
  bench_cmd->add_option("--mode", bench.mode, "minimal or maximal")
      ->check(CLI::IsMember({"minimal", "maximal"}));
  bench_cmd->add_option("--workers", bench.workers, "Worker thread count");
  bench_cmd->add_option("--alternatives", bench.alternatives,
                        "Sampled alternative controls per problem");
  bench_cmd->add_option("--cells", bench.cells, "Cell label filter")
      ->delimiter(',');
  bench_cmd->add_option("--config", bench.config_path, "Config JSON file");
  bench_cmd->add_option("--csv", bench.csv_path, "Records CSV path");
  bench_cmd->add_option("--summary", bench.summary_path, "Summary JSON path");

  TiltFlags tilt;
  CLI::App* tilt_cmd = app.add_subcommand("tilt", "Run the block-tilting scenario");
  tilt_cmd->add_option("--steps", tilt.steps, "Trajectory steps");
  tilt_cmd->add_option("--rate", tilt.rate, "Tilt angular speed, rad/s");
  tilt_cmd->add_option("--mu-hand", tilt.mu_hand, "Hand friction coefficient");
  tilt_cmd->add_option("--mu-table", tilt.mu_table, "Table friction coefficient");
  tilt_cmd->add_option("--nmin", tilt.n_min, "Normal force floor, N");
  tilt_cmd->add_option("--config", tilt.config_path, "Params JSON file");
  tilt_cmd->add_option("--csv", tilt.csv_path, "Per-step CSV path");

  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "Run built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  bench.family_given = family_opt->count() > 0;

  if (solve_cmd->parsed())
    return guarded([&] { return cmd_solve(command_line, scene_path, solve_mode,
                                          solve_out); });
  if (bench_cmd->parsed())
    return guarded([&] { return cmd_bench(command_line, bench); });
  if (tilt_cmd->parsed())
    return guarded([&] { return cmd_tilt(command_line, tilt); });
  if (selftest_cmd->parsed()) return guarded(cmd_selftest);
  return kInputError;
}
