// Command-line front end for the experiment library.
//
//   gen      synthesize a trajectory log (or echo an existing one)
//   run      execute one filter variant and report metrics
//   sweep    run all four variants under both GNSS scenarios
//   convert  ingest an external CSV into the canonical log format
//
// Relative log paths resolve against $CNAV_LOG_DIR when it is set.
// Runtime failures print one JSON object {"error": ...} to stderr.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cnav/experiment.hpp"
#include "cnav/report.hpp"

namespace {

using namespace cnav;

std::string resolve(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  if (const char* dir = std::getenv("CNAV_LOG_DIR")) {
    return std::string(dir) + "/" + path;
  }
  return path;
}

// Options shared by every subcommand that needs a trajectory: either an
// existing log or the synthetic generator's knobs.
struct TrajArgs {
  std::string log_path;
  std::string profile = "hilly";
  double duration = 90.0;
  double rate = 100.0;
  uint64_t gen_seed = 1;
  std::vector<double> accel_bias;  // one value for all axes, or three
  std::vector<double> gyro_bias;
  ImuErrors errors;
};

Vec3 axes(const std::vector<double>& v, const char* flag) {
  if (v.empty()) return Vec3::Zero();
  if (v.size() == 1) return Vec3::Constant(v[0]);
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw CLI::ValidationError(flag, "expects one or three values");
}

void add_gen_options(CLI::App& cmd, TrajArgs& a) {
  cmd.add_option("--profile", a.profile, "static|straight|circuit|hilly")
      ->check(CLI::IsMember({"static", "straight", "circuit", "hilly"}));
  cmd.add_option("--duration", a.duration, "log length, s")->check(CLI::PositiveNumber);
  cmd.add_option("--rate", a.rate, "imu rate, Hz")->check(CLI::PositiveNumber);
  cmd.add_option("--gen-seed", a.gen_seed, "imu noise seed");
  cmd.add_option("--accel-bias", a.accel_bias, "m/s^2, one value or three")
      ->expected(1, 3);
  cmd.add_option("--gyro-bias", a.gyro_bias, "rad/s, one value or three")
      ->expected(1, 3);
  cmd.add_option("--accel-noise", a.errors.accel_noise, "m/s^2/sqrt(Hz)");
  cmd.add_option("--gyro-noise", a.errors.gyro_noise, "rad/s/sqrt(Hz)");
  cmd.add_option("--bias-onset", a.errors.bias_onset, "bias start time, s");
}

TrajectoryLog make_log(TrajArgs& a) {
  if (!a.log_path.empty()) return load_log_csv(resolve(a.log_path));
  a.errors.accel_bias = axes(a.accel_bias, "--accel-bias");
  a.errors.gyro_bias = axes(a.gyro_bias, "--gyro-bias");
  return gen_synthetic(profile_from_name(a.profile), a.duration, a.rate,
                       a.errors, a.gen_seed);
}

void add_spec_options(CLI::App& cmd, ExperimentSpec& spec, std::string& scenario) {
  cmd.add_option("--scenario", scenario, "full-gnss|gnss-denied");
  cmd.add_option("--gnss-noise", spec.gnss_noise_std, "fix noise std, m");
  cmd.add_option("--gnss-rate", spec.gnss_rate, "fix rate, Hz")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--init", spec.init_s, "denied: aided window, s");
  cmd.add_option("--outage", spec.outage_s, "denied: scored window, s");
  cmd.add_option("--bounds-scale", spec.bounds_scale, "envelope factor");
  cmd.add_option("--v-max", spec.v_max, "forward speed cap, m/s");
  cmd.add_flag("--absolute-altitude",
               [&spec](size_t) { spec.altitude_relative = false; },
               "envelope altitude about zero instead of the start");
  cmd.add_flag("--literal-weights", spec.literal_weights,
               "unnormalized fusion weights");
  cmd.add_flag("--track-health", spec.track_health,
               "per-epoch covariance eigenvalue tracking");
  cmd.add_option("--seed", spec.seed, "gnss corruption seed");
}

void emit_json(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(resolve(path));
  if (!out) throw std::runtime_error("cannot write json: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ins/gnss error-state filter experiments with a motion envelope"};
  app.require_subcommand(1);

  TrajArgs traj;
  std::string out_path, dump_path, json_path, series_path, in_path;
  std::string scenario, variant;
  ExperimentSpec spec;

  CLI::App* gen = app.add_subcommand("gen", "synthesize a trajectory log");
  add_gen_options(*gen, traj);
  gen->add_option("--out", out_path, "log destination (stdout if omitted)");
  gen->add_option("--dump", dump_path, "echo an existing log instead");

  CLI::App* run = app.add_subcommand("run", "run one filter variant");
  run->add_option("--log", traj.log_path, "existing log (otherwise synthetic)");
  add_gen_options(*run, traj);
  run->add_option("--variant", variant, "ekf|nhcekf|inqekf|dual");
  add_spec_options(*run, spec, scenario);
  run->add_option("--json", json_path, "results destination (default stdout)");
  run->add_option("--series", series_path, "per-epoch error CSV");

  CLI::App* sweep = app.add_subcommand("sweep", "all variants, both scenarios");
  sweep->add_option("--log", traj.log_path, "existing log (otherwise synthetic)");
  add_gen_options(*sweep, traj);
  add_spec_options(*sweep, spec, scenario);
  sweep->add_option("--json", json_path, "results destination");

  CLI::App* convert = app.add_subcommand("convert", "external CSV to canonical log");
  convert->add_option("--in", in_path, "source CSV")->required();
  convert->add_option("--out", out_path, "canonical log destination")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const TrajectoryLog log =
          dump_path.empty() ? make_log(traj) : load_log_csv(resolve(dump_path));
      if (out_path.empty()) {
        write_log_csv(log, std::cout);
      } else {
        save_log_csv(log, resolve(out_path));
      }
    } else if (run->parsed()) {
      if (!variant.empty()) spec.variant = variant_from_name(variant);
      if (!scenario.empty()) spec.scenario = scenario_from_name(scenario);
      const TrajectoryLog log = make_log(traj);
      const RunResult result = run_variant(log, spec);
      emit_json(run_json(spec, result), json_path);
      if (!series_path.empty()) {
        write_series_csv(log, result, resolve(series_path));
      }
    } else if (sweep->parsed()) {
      if (!scenario.empty()) spec.scenario = scenario_from_name(scenario);
      const TrajectoryLog log = make_log(traj);
      const std::vector<SweepEntry> entries = run_sweep(log, spec);
      std::cout << sweep_table(entries);
      if (!json_path.empty()) emit_json(sweep_json(spec, entries), json_path);
    } else if (convert->parsed()) {
      save_log_csv(convert_log(resolve(in_path)), resolve(out_path));
    }
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
