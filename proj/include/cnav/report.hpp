// JSON and CSV renderings of experiment results. Key order and number
// formatting are fixed so that identical runs serialize byte-identically.
#pragma once

#include <string>
#include <vector>

#include "cnav/experiment.hpp"
#include "json.hpp"

namespace cnav {

using Json = nlohmann::ordered_json;

// Config echo, envelope, metrics, and the per-run counters. schema: 1.
Json run_json(const ExperimentSpec& spec, const RunResult& result);

// All sweep entries under one roof, same per-entry layout as run_json.
Json sweep_json(const ExperimentSpec& base, const std::vector<SweepEntry>& entries);

// Fixed-width comparison table, one row per (variant, scenario).
std::string sweep_table(const std::vector<SweepEntry>& entries);

// Whole-run per-epoch error series against the log truth. Weight columns
// hold the inequality-branch fusion weight and are zero for variants that
// do not fuse.
void write_series_csv(const TrajectoryLog& log, const RunResult& result,
                      const std::string& path);

}  // namespace cnav
