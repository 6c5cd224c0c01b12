#include "cnav/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cnav/metrics.hpp"

namespace cnav {

namespace {

Json bounds_json(const EnvelopeBounds& b) {
  return Json{{"h_min", b.h_min},         {"h_max", b.h_max},
              {"roll_min", b.roll_min},   {"roll_max", b.roll_max},
              {"pitch_min", b.pitch_min}, {"pitch_max", b.pitch_max},
              {"v_max", b.v_max}};
}

Json metrics_json(const MetricsReport& m) {
  return Json{{"prmse", m.prmse},
              {"vrmse", m.vrmse},
              {"armse", m.armse},
              {"h_prmse", m.h_prmse},
              {"v_prmse", m.v_prmse},
              {"p95",
               Json{{"horizontal", m.p95.horizontal},
                    {"vertical", m.p95.vertical},
                    {"position", m.p95.position},
                    {"velocity", m.p95.velocity},
                    {"attitude", m.p95.attitude}}}};
}

Json config_json(const ExperimentSpec& spec) {
  return Json{{"variant", variant_name(spec.variant)},
              {"scenario", scenario_name(spec.scenario)},
              {"gnss_noise_std", spec.gnss_noise_std},
              {"gnss_rate", spec.gnss_rate},
              {"init_s", spec.init_s},
              {"outage_s", spec.outage_s},
              {"bounds_scale", spec.bounds_scale},
              {"v_max", spec.v_max},
              {"altitude_relative", spec.altitude_relative},
              {"literal_weights", spec.literal_weights},
              {"seed", spec.seed}};
}

Json result_json(const RunResult& r) {
  return Json{{"metrics", metrics_json(r.metrics)},
              {"bounds", bounds_json(r.bounds)},
              {"counters",
               Json{{"epochs", r.estimate.size()},
                    {"fixes_consumed", r.fixes_consumed},
                    {"fixes_withheld", r.fixes_withheld},
                    {"late_fixes_consumed", r.late_fixes_consumed},
                    {"constrained_updates", r.constrained_updates},
                    {"projections", r.projections},
                    {"fallbacks", r.fallbacks},
                    {"att_guard_epochs", r.att_guard_epochs}}},
              {"max_violation", r.max_violation}};
}

}  // namespace

Json run_json(const ExperimentSpec& spec, const RunResult& result) {
  Json out{{"schema", 1}, {"config", config_json(spec)}};
  out.update(result_json(result));
  if (spec.track_health) {
    out["health"] = Json{{"min_eigenvalue", result.min_eigenvalue},
                         {"max_asymmetry", result.max_asymmetry}};
  }
  return out;
}

Json sweep_json(const ExperimentSpec& base, const std::vector<SweepEntry>& entries) {
  Json runs = Json::array();
  for (const SweepEntry& e : entries) {
    Json row{{"variant", variant_name(e.variant)},
             {"scenario", scenario_name(e.scenario)}};
    row.update(result_json(e.result));
    runs.push_back(std::move(row));
  }
  Json config = config_json(base);
  config.erase("variant");
  config.erase("scenario");
  return Json{{"schema", 1}, {"config", config}, {"runs", runs}};
}

std::string sweep_table(const std::vector<SweepEntry>& entries) {
  std::string out =
      "variant  scenario     prmse     vrmse     armse   h_prmse   v_prmse"
      "   p95_pos\n";
  char line[160];
  for (const SweepEntry& e : entries) {
    const MetricsReport& m = e.result.metrics;
    std::snprintf(line, sizeof(line),
                  "%-8s %-8s %9.4f %9.4f %9.5f %9.4f %9.4f %9.4f\n",
                  variant_name(e.variant).c_str(),
                  scenario_name(e.scenario).c_str(), m.prmse, m.vrmse, m.armse,
                  m.h_prmse, m.v_prmse, m.p95.position);
    out += line;
  }
  return out;
}

void write_series_csv(const TrajectoryLog& log, const RunResult& result,
                      const std::string& path) {
  // Score every processed epoch, not just the evaluation window. Denied
  // runs stop at the outage end, so the estimate may be a prefix of the
  // truth series.
  if (result.estimate.size() > log.truth.size()) {
    throw std::invalid_argument("write_series_csv: estimate outruns truth");
  }
  const std::vector<TruthSample> truth(
      log.truth.begin(),
      log.truth.begin() + static_cast<std::ptrdiff_t>(result.estimate.size()));
  const ErrorSeries s = compute_metrics(result.estimate, truth).series;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write series: " + path);
  out << "t,err_n,err_e,err_d,err_vn,err_ve,err_vd,err_roll,err_pitch,"
         "w_inq_h,w_inq_roll,w_inq_pitch\n";
  char line[256];
  for (size_t k = 0; k < s.t.size(); ++k) {
    const bool fused = k < result.w_inq.size();
    const double wh = fused ? result.w_inq[k](kSlotAlt) : 0.0;
    const double wr = fused ? result.w_inq[k](kSlotRoll) : 0.0;
    const double wp = fused ? result.w_inq[k](kSlotPitch) : 0.0;
    std::snprintf(line, sizeof(line),
                  "%.6f,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.6g,%.6g,%.6g\n",
                  s.t[k], s.n[k], s.e[k], s.d[k], s.vn[k], s.ve[k], s.vd[k],
                  s.roll[k], s.pitch[k], wh, wr, wp);
    out << line;
  }
}

}  // namespace cnav
