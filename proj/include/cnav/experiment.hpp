// Experiment runner: executes one filter variant over a trajectory log
// under a GNSS coverage scenario and scores it against the truth.
//
// Variants: plain ESKF; ESKF with the non-holonomic update every epoch;
// the inequality-constrained branch; and the dual-branch fusion of the
// last two.
//
// Scenarios: full coverage (fixes throughout, scored over the whole run)
// and denied (fixes only during the first init_s seconds, scored over the
// following outage_s seconds).
#pragma once

#include <cstdint>
#include <vector>

#include "cnav/constraints.hpp"
#include "cnav/fusion.hpp"
#include "cnav/metrics.hpp"
#include "cnav/trajectory.hpp"

namespace cnav {

enum class Variant { kEkf, kNhcEkf, kInqEkf, kDual };
enum class Scenario { kFullGnss, kGnssDenied };

Variant variant_from_name(const std::string& name);
std::string variant_name(Variant v);
Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

struct ExperimentSpec {
  Variant variant = Variant::kEkf;
  Scenario scenario = Scenario::kFullGnss;
  double gnss_noise_std = 3.5;  // m, also sets the filter's R
  double gnss_rate = 1.0;       // Hz
  double init_s = 60.0;         // denied: fixes available before this
  double outage_s = 30.0;       // denied: scored window length
  double bounds_scale = 2.0;    // envelope factor over the truth excursions
  double v_max = 13.89;         // m/s (50 km/h)
  bool altitude_relative = true;
  bool literal_weights = false;
  bool track_health = false;    // per-epoch covariance eigenvalue tracking
  uint64_t seed = 1;            // drives the GNSS corruption
  FilterConfig filter;
};

struct RunResult {
  std::vector<NavState> estimate;  // one entry per processed epoch
  std::vector<Vec15> w_inq;        // dual variant only
  MetricsReport metrics;           // over the evaluation window
  size_t eval_begin = 0;           // estimate index where the window starts
  EnvelopeBounds bounds;
  int constrained_updates = 0;
  int projections = 0;
  int fallbacks = 0;
  int fixes_consumed = 0;
  int fixes_withheld = 0;          // denied scenario: fixes inside the outage
  int late_fixes_consumed = 0;     // denied scenario: must stay zero
  int att_guard_epochs = 0;        // dual: epochs with the divergence flag set
  double max_violation = 0.0;      // worst inequality-branch row residual
  double min_eigenvalue = 0.0;     // track_health only
  double max_asymmetry = 0.0;      // track_health only
};

RunResult run_variant(const TrajectoryLog& log, const ExperimentSpec& spec);

// All four variants under both scenarios on the same log (same fixes per
// scenario). Entries are ordered scenario-major in declaration order.
struct SweepEntry {
  Variant variant;
  Scenario scenario;
  RunResult result;
};

std::vector<SweepEntry> run_sweep(const TrajectoryLog& log, const ExperimentSpec& base);

}  // namespace cnav
