// Synthetic trajectory generation and log handling for the experiments.
//
// Profiles are closed-form: position, velocity, acceleration and attitude
// (plus attitude rates) are exact functions of time, and the IMU stream is
// produced by inverse mechanization. Gyro and accel samples are evaluated
// at the midpoint of each sampling interval so a forward mechanization of
// the clean stream reproduces the truth closely.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cnav/constraints.hpp"
#include "cnav/types.hpp"

namespace cnav {

struct TruthSample {
  double t = 0.0;
  Vec3 p_ned = Vec3::Zero();
  Vec3 v_ned = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
};

struct TrajectoryLog {
  std::string name;
  double imu_rate = 100.0;
  std::vector<ImuSample> imu;
  std::vector<TruthSample> truth;  // empty when the source carried none

  bool has_truth() const { return !truth.empty(); }
  double duration() const { return imu.empty() ? 0.0 : imu.back().t - imu.front().t; }
};

enum class Profile { kStatic, kStraight, kCircuit, kHilly };

Profile profile_from_name(const std::string& name);
std::string profile_name(Profile p);

// Constant biases plus white noise given as densities (per sqrt(Hz)).
// bias_onset delays the bias injection, modeling an in-run bias shift; the
// default applies the biases over the whole log.
struct ImuErrors {
  Vec3 accel_bias = Vec3::Zero();   // m/s^2
  Vec3 gyro_bias = Vec3::Zero();    // rad/s
  double accel_noise = 0.0;         // m/s^2/sqrt(Hz)
  double gyro_noise = 0.0;          // rad/s/sqrt(Hz)
  double bias_onset = 0.0;          // s
};

TrajectoryLog gen_synthetic(Profile profile, double duration, double rate,
                            const ImuErrors& errors, uint64_t seed);

// Gaussian position fixes at gnss_rate, sampled on the truth epochs
// (every imu_rate/gnss_rate-th epoch, starting one interval in).
std::vector<GnssFix> corrupt_gnss(const TrajectoryLog& log, double noise_std,
                                  double gnss_rate, uint64_t seed);

// Envelope from the truth track: roll and pitch at +/- scale times the
// largest excursion, altitude at scale times the largest deviation from the
// initial altitude (or from zero when altitude_relative is false).
EnvelopeBounds derive_bounds(const TrajectoryLog& log, double scale, double v_max,
                             bool altitude_relative = true);

// Canonical log CSV: t,fx,fy,fz,wx,wy,wz plus the nine gt_* columns when
// truth is present. Values are written with round-trip precision.
void write_log_csv(const TrajectoryLog& log, std::ostream& out);
void save_log_csv(const TrajectoryLog& log, const std::string& path);
TrajectoryLog load_log_csv(const std::string& path);

// Reads a log whose header may omit the truth velocity columns; missing
// velocities are filled by central differences of the truth positions.
TrajectoryLog convert_log(const std::string& path);

}  // namespace cnav
