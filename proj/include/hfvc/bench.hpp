#pragma once

// Randomized benchmark harness. Problems are generated per cell (a family /
// contact-mode / finger-count combination), solved, validated, and streamed
// out as CSV records plus aggregate statistics. Generation is deterministic:
// each problem draws from an RNG stream keyed by (seed, cell, index), so
// identical configs produce identical records regardless of worker count.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hfvc/model.hpp"
#include "hfvc/rng.hpp"
#include "hfvc/solver.hpp"

namespace hfvc {

/// One benchmark cell. env_modes holds one mode letter per environment
/// contact: 'f' sticking, 's' sliding. Planar cells always use one finger.
struct BenchCell {
  bool planar = true;
  std::string env_modes;
  int fingers = 1;
  int contacts_per_finger = 1;

  std::string label() const;
};

/// Every cell of a family, in a fixed enumeration order: planar has 6 cells
/// ({f, s, ss} x {1, 2} contacts per finger), spatial has 72
/// ({f, s, ff, fs, ss, ffs, fss, sss} x {1..3} fingers x {1..3} contacts).
std::vector<BenchCell> bench_cells(bool planar);

struct BenchConfig {
  bool planar = true;
  int problems_per_cell = 100;
  std::uint64_t seed = 0;
  VelocityDimMode mode = VelocityDimMode::kMinimal;
  double ill_conditioned_threshold = 100.0;
  // Sampled alternative controls per solved problem for the oracle_gap
  // column; 0 skips the comparison.
  int alternative_samples = 0;
  int workers = 1;
  // Cell label filter; empty runs the whole family. Unknown labels throw.
  std::vector<std::string> cells;
  double mu_min = 0.3;
  double mu_max = 1.0;
  // The random scenes carry no external load, so force balance is assessed
  // at a zero normal-force floor by default.
  double n_min = 0.0;
  int ridge_count = 8;
};

struct BenchRecord {
  long problem_id = 0;
  std::string cell;
  // solved | infeasible_goal | guard_infeasible | error. An exception or a
  // failed post-solve validation is recorded as error, never rethrown.
  std::string status;
  int n_av = 0;
  int n_af = 0;
  double crashing_index = 0.0;  // NaN unless the velocity stage succeeded
  double velocity_time_us = 0.0;
  double force_time_us = 0.0;
  // Best sampled alternative index minus ours (both clamped to [1, 1e12]);
  // NaN when sampling was off or the problem did not solve.
  double oracle_gap = 0.0;
};

/// Random scene for one cell: contacts placed uniformly in the unit box,
/// environment normals on the upper hemisphere, finger normals on the full
/// sphere, friction uniform in [mu_min, mu_max], and a goal over the object
/// coordinates whose rate comes from a sampled contact-preserving motion, so
/// the goal is always consistent (feasibility still depends on actuation).
SystemModel generate_problem(const BenchCell& cell, const BenchConfig& cfg,
                             Rng& rng);

/// Alternative velocity-control candidates of the same dimension as c, drawn
/// inside the feasible coefficient space the solver itself searches. Each is
/// orthonormal with zero unactuated columns and keeps the goal reachable.
std::vector<Mat> sample_alternative_controls(const SystemModel& model,
                                             const Mat& c, int count,
                                             Rng& rng);

struct StageStats {
  double average_ms = 0.0;
  double worst_ms = 0.0;
  double median_ms = 0.0;
  long count = 0;
};

struct BenchStats {
  long total = 0;
  long solved = 0;
  long errors = 0;
  // Solved records with a finite crashing index above the threshold.
  long ill_conditioned = 0;
  // Solved records where a sampled alternative beat ours by more than 1e-6.
  long oracle_violations = 0;
  // Mean crashing index over solved records with finite index; NaN if none.
  double average_crashing_index = 0.0;
  StageStats velocity;  // over records whose velocity stage ran
  StageStats force;     // over records whose force stage ran
};

struct BenchResult {
  BenchConfig config;
  std::vector<BenchRecord> records;  // in problem_id order
  std::vector<std::pair<std::string, BenchStats>> per_cell;
  BenchStats overall;
};

/// Generate, solve, validate, and aggregate every problem of the configured
/// cells. Individual failures become error records; the run never aborts.
BenchResult run_benchmark(const BenchConfig& cfg);

/// Record stream as CSV with a fixed header:
/// problem_id,cell,status,n_av,n_af,crashing_index,velocity_time_us,
/// force_time_us,oracle_gap. Doubles use %.12g, so non-finite values print
/// as inf/nan.
void write_records_csv(const std::vector<BenchRecord>& records,
                       std::ostream& out);

/// The same CSV with the two timing columns dropped from every line; two
/// runs of one config must agree on this byte for byte.
std::string csv_without_timing_columns(const std::string& csv);

/// Aggregate statistics as JSON. Per scope the keys mirror the benchmark
/// table rows: "# of Problems" {Total, Solved}, "Average Crashing Index",
/// "ill-conditioned solutions", "Velocity Time (ms)" and "Force Time (ms)"
/// {Average, Worst, Median}.
std::string summary_json(const BenchResult& result);

}  // namespace hfvc
