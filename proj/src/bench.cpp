#include "hfvc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hfvc/verify.hpp"

namespace hfvc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double clamp_index(double x) {
  if (std::isnan(x)) return 1e12;
  return std::min(std::max(x, 1.0), 1e12);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// Random orthonormal rows through the library's own basis routine; the
// spanned subspace is what matters downstream, not the particular basis.
Mat random_orthonormal_rows(Rng& rng, int r, int n) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Mat basis = row_basis(rng.normal_mat(r, n));
    if (basis.rows() == r) return basis;
  }
  throw std::runtime_error("random_orthonormal_rows: degenerate draws");
}

Vec sample_box_position(Rng& rng, int dim) {
  Vec p(dim);
  for (int i = 0; i < dim; ++i) p(i) = rng.uniform(-0.5, 0.5);
  return p;
}

Vec sample_tangent(Rng& rng, const Vec& normal) {
  if (normal.size() == 2) {
    Vec t(2);
    t << -normal(1), normal(0);
    if (rng.uniform01() < 0.5) t = -t;
    return t;
  }
  while (true) {
    const Vec v = rng.unit_vector(3);
    Vec t = v - v.dot(normal) * normal;
    const double norm = t.norm();
    if (norm > 1e-3) return t / norm;
  }
}

struct CellPlan {
  BenchCell cell;
  int stream_id = 0;  // position in the full family enumeration
};

std::vector<CellPlan> plan_cells(const BenchConfig& cfg) {
  const std::vector<BenchCell> all = bench_cells(cfg.planar);
  std::vector<CellPlan> plans;
  if (cfg.cells.empty()) {
    for (int i = 0; i < static_cast<int>(all.size()); ++i) {
      plans.push_back({all[i], i});
    }
    return plans;
  }
  for (const std::string& wanted : cfg.cells) {
    bool found = false;
    for (int i = 0; i < static_cast<int>(all.size()); ++i) {
      if (all[i].label() == wanted) {
        plans.push_back({all[i], i});
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument("run_benchmark: unknown cell label " +
                                  wanted);
    }
  }
  return plans;
}

struct TimingAcc {
  std::vector<double> samples_us;

  void add(double us) { samples_us.push_back(us); }

  StageStats finish() const {
    StageStats s;
    s.count = static_cast<long>(samples_us.size());
    if (samples_us.empty()) return s;
    double sum = 0.0;
    double worst = 0.0;
    for (double v : samples_us) {
      sum += v;
      worst = std::max(worst, v);
    }
    std::vector<double> sorted = samples_us;
    std::sort(sorted.begin(), sorted.end());
    const size_t mid = sorted.size() / 2;
    const double median = sorted.size() % 2 == 1
                              ? sorted[mid]
                              : 0.5 * (sorted[mid - 1] + sorted[mid]);
    s.average_ms = sum / static_cast<double>(sorted.size()) / 1000.0;
    s.worst_ms = worst / 1000.0;
    s.median_ms = median / 1000.0;
    return s;
  }
};

struct StatsAcc {
  long total = 0;
  long solved = 0;
  long errors = 0;
  long ill_conditioned = 0;
  long oracle_violations = 0;
  double index_sum = 0.0;
  long index_count = 0;
  TimingAcc velocity;
  TimingAcc force;

  void add(const BenchRecord& rec, double threshold) {
    ++total;
    if (rec.status == "error") {
      ++errors;
      return;
    }
    velocity.add(rec.velocity_time_us);
    if (rec.status == "solved" || rec.status == "guard_infeasible") {
      force.add(rec.force_time_us);
    }
    if (rec.status != "solved") return;
    ++solved;
    if (std::isfinite(rec.crashing_index)) {
      index_sum += rec.crashing_index;
      ++index_count;
      if (rec.crashing_index > threshold) ++ill_conditioned;
    }
    if (!std::isnan(rec.oracle_gap) && rec.oracle_gap < -1e-6) {
      ++oracle_violations;
    }
  }

  BenchStats finish() const {
    BenchStats s;
    s.total = total;
    s.solved = solved;
    s.errors = errors;
    s.ill_conditioned = ill_conditioned;
    s.oracle_violations = oracle_violations;
    s.average_crashing_index =
        index_count > 0 ? index_sum / static_cast<double>(index_count) : kNan;
    s.velocity = velocity.finish();
    s.force = force.finish();
    return s;
  }
};

nlohmann::json stats_json(const BenchStats& s) {
  nlohmann::json j;
  j["# of Problems"] = {{"Total", s.total}, {"Solved", s.solved}};
  if (std::isnan(s.average_crashing_index)) {
    j["Average Crashing Index"] = nullptr;
  } else {
    j["Average Crashing Index"] = s.average_crashing_index;
  }
  j["ill-conditioned solutions"] = s.ill_conditioned;
  j["Velocity Time (ms)"] = {{"Average", s.velocity.average_ms},
                             {"Worst", s.velocity.worst_ms},
                             {"Median", s.velocity.median_ms}};
  j["Force Time (ms)"] = {{"Average", s.force.average_ms},
                          {"Worst", s.force.worst_ms},
                          {"Median", s.force.median_ms}};
  j["errors"] = s.errors;
  j["oracle violations"] = s.oracle_violations;
  return j;
}

}  // namespace

std::string BenchCell::label() const {
  std::string out = planar ? "planar" : "3d";
  out += "_" + env_modes + "_";
  out += std::to_string(fingers) + "f";
  out += "x" + std::to_string(contacts_per_finger);
  return out;
}

std::vector<BenchCell> bench_cells(bool planar) {
  std::vector<BenchCell> cells;
  if (planar) {
    for (const char* modes : {"f", "s", "ss"}) {
      for (int cpf : {1, 2}) {
        cells.push_back({true, modes, 1, cpf});
      }
    }
    return cells;
  }
  for (const char* modes : {"f", "s", "ff", "fs", "ss", "ffs", "fss", "sss"}) {
    for (int fingers : {1, 2, 3}) {
      for (int cpf : {1, 2, 3}) {
        cells.push_back({false, modes, fingers, cpf});
      }
    }
  }
  return cells;
}

SystemModel generate_problem(const BenchCell& cell, const BenchConfig& cfg,
                             Rng& rng) {
  const int dim = cell.planar ? 2 : 3;
  const BodyKind kind = cell.planar ? BodyKind::kPlanar : BodyKind::kSpatial;
  const int object_dof = body_dof(kind);

  std::vector<Body> bodies;
  bodies.push_back({"object", kind, false});
  for (int f = 0; f < cell.fingers; ++f) {
    bodies.push_back({"finger" + std::to_string(f + 1), kind, true});
  }
  bodies.push_back({"env", BodyKind::kEnvironment, false});

  std::vector<ContactPoint> contacts;
  for (char mode : cell.env_modes) {
    ContactPoint c;
    c.position = sample_box_position(rng, dim);
    c.normal = rng.unit_vector(dim);
    if (c.normal(dim - 1) < 0.0) c.normal = -c.normal;
    c.mu = rng.uniform(cfg.mu_min, cfg.mu_max);
    c.body_a = "object";
    c.body_b = "env";
    if (mode == 's') {
      c.mode = ContactMode::kSliding;
      c.slide_direction = sample_tangent(rng, c.normal);
    }
    contacts.push_back(std::move(c));
  }
  for (int f = 0; f < cell.fingers; ++f) {
    for (int k = 0; k < cell.contacts_per_finger; ++k) {
      ContactPoint c;
      c.position = sample_box_position(rng, dim);
      c.normal = rng.unit_vector(dim);
      c.mu = rng.uniform(cfg.mu_min, cfg.mu_max);
      c.body_a = "object";
      c.body_b = "finger" + std::to_string(f + 1);
      contacts.push_back(std::move(c));
    }
  }

  // Goal rate from a sampled contact-preserving motion keeps the goal
  // consistent; whether the robot can actually control it is the question
  // the solver answers.
  const ContactJacobians jac = assemble_jacobians(bodies, contacts);
  const int n = object_dof * (1 + cell.fingers);
  const Mat nullspace = null_rows(jac.j);
  Vec v_target = Vec::Zero(n);
  if (nullspace.rows() > 0) {
    v_target = nullspace.transpose() * (nullspace * rng.normal_vec(n));
    const double norm = v_target.norm();
    if (norm > 1e-9) v_target /= norm;
  }

  const int goal_rows = rng.uniform_int(1, cell.planar ? 2 : 3);
  const Mat g_object = random_orthonormal_rows(rng, goal_rows, object_dof);
  Mat g = Mat::Zero(goal_rows, n);
  g.leftCols(object_dof) = g_object;
  const Vec b_g = g * v_target;

  return build_model(bodies, contacts, g, b_g, Vec(), cfg.n_min,
                     cfg.ridge_count);
}

std::vector<Mat> sample_alternative_controls(const SystemModel& model,
                                             const Mat& c, int count,
                                             Rng& rng) {
  if (count < 0) throw std::invalid_argument("sample_alternative_controls: negative count");
  std::vector<Mat> out;
  if (count == 0) return out;
  const int n_av = static_cast<int>(c.rows());
  if (n_av == 0) {
    throw std::invalid_argument(
        "sample_alternative_controls: no velocity-control rows to vary");
  }
  const Mat ubar = free_robot_motions(model.j, model.dof);
  const Mat goal_invariant = null_rows(vstack(model.j, model.g));
  const Mat k_space = null_rows(Mat(goal_invariant * ubar.transpose()));
  if (k_space.rows() < n_av) {
    throw std::invalid_argument(
        "sample_alternative_controls: feasible space thinner than c");
  }
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const Mat mix =
        random_orthonormal_rows(rng, n_av, static_cast<int>(k_space.rows()));
    out.push_back(mix * k_space * ubar);
  }
  return out;
}

BenchResult run_benchmark(const BenchConfig& cfg) {
  if (cfg.problems_per_cell < 0) {
    throw std::invalid_argument("run_benchmark: negative problems_per_cell");
  }
  const std::vector<CellPlan> plans = plan_cells(cfg);

  BenchResult result;
  result.config = cfg;
  const long per_cell = cfg.problems_per_cell;
  const long total = per_cell * static_cast<long>(plans.size());
  result.records.resize(total);

  SolveOptions opts;
  opts.mode = cfg.mode;
  opts.ill_conditioned_threshold = cfg.ill_conditioned_threshold;

  auto run_one = [&](long id) {
    const CellPlan& plan = plans[id / per_cell];
    const long index_in_cell = id % per_cell;
    BenchRecord rec;
    rec.problem_id = id;
    rec.cell = plan.cell.label();
    rec.crashing_index = kNan;
    rec.oracle_gap = kNan;
    Rng rng(cfg.seed, static_cast<std::uint64_t>(plan.stream_id),
            static_cast<std::uint64_t>(index_in_cell));
    try {
      const SystemModel model = generate_problem(plan.cell, cfg, rng);
      const Solution sol = solve(model, opts);
      rec.status = solve_status_name(sol.status);
      rec.velocity_time_us = sol.timings.velocity_us;
      rec.force_time_us = sol.timings.force_us;
      if (sol.status != SolveStatus::kInfeasibleGoal) {
        rec.n_av = sol.n_av;
        rec.n_af = sol.n_af;
        rec.crashing_index = sol.crashing_index;
      }
      if (sol.status == SolveStatus::kSolved) {
        if (!check_solution(model, sol).passes()) {
          rec.status = "error";
        } else if (cfg.alternative_samples > 0) {
          if (sol.n_av == 0) {
            rec.oracle_gap = 0.0;
          } else {
            const std::vector<Mat> alts = sample_alternative_controls(
                model, sol.c, cfg.alternative_samples, rng);
            double best = kInf;
            for (const Mat& alt : alts) {
              best = std::min(best,
                              clamp_index(crashing_index(model.j, alt,
                                                         opts.rank_tol)));
            }
            rec.oracle_gap = best - clamp_index(sol.crashing_index);
          }
        }
      }
    } catch (const std::exception&) {
      rec.status = "error";
    }
    result.records[id] = std::move(rec);
  };

  const int workers = std::max(1, cfg.workers);
  if (workers == 1 || total <= 1) {
    for (long id = 0; id < total; ++id) run_one(id);
  } else {
    std::atomic<long> next{0};
    auto drain = [&] {
      while (true) {
        const long id = next.fetch_add(1);
        if (id >= total) break;
        run_one(id);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (std::thread& t : pool) t.join();
  }

  StatsAcc overall;
  std::vector<StatsAcc> cell_acc(plans.size());
  for (long id = 0; id < total; ++id) {
    overall.add(result.records[id], cfg.ill_conditioned_threshold);
    cell_acc[id / per_cell].add(result.records[id],
                                cfg.ill_conditioned_threshold);
  }
  result.overall = overall.finish();
  for (size_t i = 0; i < plans.size(); ++i) {
    result.per_cell.emplace_back(plans[i].cell.label(), cell_acc[i].finish());
  }
  return result;
}

void write_records_csv(const std::vector<BenchRecord>& records,
                       std::ostream& out) {
  out << "problem_id,cell,status,n_av,n_af,crashing_index,velocity_time_us,"
         "force_time_us,oracle_gap\n";
  for (const BenchRecord& r : records) {
    out << r.problem_id << ',' << r.cell << ',' << r.status << ',' << r.n_av
        << ',' << r.n_af << ',' << fmt_double(r.crashing_index) << ','
        << fmt_double(r.velocity_time_us) << ',' << fmt_double(r.force_time_us)
        << ',' << fmt_double(r.oracle_gap) << '\n';
  }
}

std::string csv_without_timing_columns(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i == 6 || i == 7) continue;  // velocity_time_us, force_time_us
      if (!out.empty() && out.back() != '\n') out += ',';
      out += fields[i];
    }
    out += '\n';
  }
  return out;
}

std::string summary_json(const BenchResult& result) {
  nlohmann::json j;
  j["family"] = result.config.planar ? "planar" : "3d";
  j["mode"] = result.config.mode == VelocityDimMode::kMinimal ? "minimal"
                                                              : "maximal";
  j["seed"] = result.config.seed;
  j["problems_per_cell"] = result.config.problems_per_cell;
  j["overall"] = stats_json(result.overall);
  nlohmann::json cells = nlohmann::json::object();
  for (const auto& [label, stats] : result.per_cell) {
    cells[label] = stats_json(stats);
  }
  j["cells"] = cells;
  return j.dump(2);
}

}  // namespace hfvc
