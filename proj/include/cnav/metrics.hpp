// Error metrics over an estimate/truth pair: RMS position, velocity and
// attitude errors plus 95th percentiles and the raw per-epoch series.
#pragma once

#include <vector>

#include "cnav/trajectory.hpp"
#include "cnav/types.hpp"

namespace cnav {

struct ErrorSeries {
  std::vector<double> t;
  std::vector<double> n, e, d;       // position error components, m
  std::vector<double> vn, ve, vd;    // velocity error components, m/s
  std::vector<double> roll, pitch;   // wrapped attitude errors, rad
};

struct Percentiles {
  double horizontal = 0.0;  // m
  double vertical = 0.0;    // m
  double position = 0.0;    // m
  double velocity = 0.0;    // m/s
  double attitude = 0.0;    // rad
};

struct MetricsReport {
  double prmse = 0.0;    // 3D position RMSE, m
  double vrmse = 0.0;    // 3D velocity RMSE, m/s
  double armse = 0.0;    // roll/pitch RMSE, rad
  double h_prmse = 0.0;  // horizontal position RMSE, m
  double v_prmse = 0.0;  // vertical position RMSE, m
  Percentiles p95;
  ErrorSeries series;
};

// Linear-interpolation percentile of the sample set, pct in [0, 100].
double percentile_linear(std::vector<double> values, double pct);

// est and truth must be index-aligned with matching timestamps.
MetricsReport compute_metrics(const std::vector<NavState>& est,
                              const std::vector<TruthSample>& truth);

}  // namespace cnav
