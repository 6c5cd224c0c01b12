#include "cnav/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "cnav/attitude.hpp"

namespace cnav {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Profile parameters. The hilly pitch lags the path slope slightly, so the
// body-frame vertical velocity is not exactly zero while the truth still
// respects the derived envelope.
constexpr double kCruise = 11.0;        // m/s, circuit and hilly
constexpr double kRadius = 80.0;        // m
constexpr double kStraightCruise = 10.0;
constexpr double kStraightMod = 1.5;    // m/s speed modulation
constexpr double kStraightPeriod = 20.0;
constexpr double kHillAmp = 4.0;        // m
constexpr double kHillPeriod = 25.0;    // s
constexpr double kPitchLag = 0.4;       // s
constexpr double kBankAngle = 0.03;     // rad

struct TruthPoint {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  Vec3 rpy_dot = Vec3::Zero();
};

TruthPoint eval_profile(Profile profile, double t) {
  TruthPoint tp;
  switch (profile) {
    case Profile::kStatic:
      break;
    case Profile::kStraight: {
      const double om = kTwoPi / kStraightPeriod;
      tp.p.x() = kStraightCruise * t + kStraightMod / om * (1.0 - std::cos(om * t));
      tp.v.x() = kStraightCruise + kStraightMod * std::sin(om * t);
      tp.a.x() = kStraightMod * om * std::cos(om * t);
      break;
    }
    case Profile::kCircuit:
    case Profile::kHilly: {
      const double om = kCruise / kRadius;
      tp.p.x() = kRadius * std::sin(om * t);
      tp.p.y() = kRadius * (1.0 - std::cos(om * t));
      tp.v.x() = kCruise * std::cos(om * t);
      tp.v.y() = kCruise * std::sin(om * t);
      tp.a.x() = -kCruise * om * std::sin(om * t);
      tp.a.y() = kCruise * om * std::cos(om * t);
      tp.rpy.z() = wrap_angle(om * t);
      tp.rpy_dot.z() = om;
      if (profile == Profile::kHilly) {
        const double oh = kTwoPi / kHillPeriod;
        tp.p.z() = -kHillAmp * std::sin(oh * t);
        tp.v.z() = -kHillAmp * oh * std::cos(oh * t);
        tp.a.z() = kHillAmp * oh * oh * std::sin(oh * t);
        const double s = t - kPitchLag;
        const double u = kHillAmp * oh / kCruise * std::cos(oh * s);
        const double du = -kHillAmp * oh * oh / kCruise * std::sin(oh * s);
        tp.rpy.x() = kBankAngle;
        tp.rpy.y() = std::atan(u);
        tp.rpy_dot.y() = du / (1.0 + u * u);
      }
      break;
    }
  }
  return tp;
}

// Body angular rate from ZYX Euler angles and their rates.
Vec3 body_rate(const Vec3& rpy, const Vec3& rpy_dot) {
  const double sr = std::sin(rpy.x()), cr = std::cos(rpy.x());
  const double sp = std::sin(rpy.y()), cp = std::cos(rpy.y());
  const double dr = rpy_dot.x(), dp = rpy_dot.y(), dy = rpy_dot.z();
  return {dr - dy * sp,
          dp * cr + dy * cp * sr,
          -dp * sr + dy * cp * cr};
}

ImuSample clean_sample(Profile profile, double t) {
  const TruthPoint tp = eval_profile(profile, t);
  ImuSample s;
  s.t = t;
  s.f_b = euler_to_dcm(tp.rpy).transpose() * (tp.a - gravity_ned());
  s.w_b = body_rate(tp.rpy, tp.rpy_dot);
  return s;
}

void append_value(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

TrajectoryLog parse_log_csv(const std::string& path, bool allow_missing_velocity) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log: " + path);

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty log: " + path);
  const std::vector<std::string> names = split_csv(header);
  std::unordered_map<std::string, int> col;
  for (size_t i = 0; i < names.size(); ++i) col[names[i]] = static_cast<int>(i);

  const char* required[] = {"t", "fx", "fy", "fz", "wx", "wy", "wz"};
  for (const char* n : required) {
    if (!col.count(n)) throw std::runtime_error("log missing column " + std::string(n));
  }
  const bool has_pos = col.count("gt_n") && col.count("gt_e") && col.count("gt_d");
  const bool has_att = col.count("gt_roll") && col.count("gt_pitch") && col.count("gt_yaw");
  const bool has_vel = col.count("gt_vn") && col.count("gt_ve") && col.count("gt_vd");
  const bool has_truth = has_pos && has_att;
  if (has_truth && !has_vel && !allow_missing_velocity) {
    throw std::runtime_error("log has truth without velocity columns; run convert first");
  }
  if (col.count("gt_n") && !has_truth) {
    throw std::runtime_error("log has partial truth columns");
  }

  TrajectoryLog log;
  const auto stem = [&] {
    const size_t slash = path.find_last_of('/');
    const std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    const size_t dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
  };
  log.name = stem();

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() < names.size()) {
      throw std::runtime_error("log row with too few fields: " + line);
    }
    const auto get = [&](const char* n) {
      try {
        return std::stod(cells[col.at(n)]);
      } catch (const std::exception&) {
        throw std::runtime_error("bad numeric field '" + std::string(n) +
                                 "' in log row: " + line);
      }
    };
    ImuSample s;
    s.t = get("t");
    s.f_b = {get("fx"), get("fy"), get("fz")};
    s.w_b = {get("wx"), get("wy"), get("wz")};
    log.imu.push_back(s);
    if (has_truth) {
      TruthSample gt;
      gt.t = s.t;
      gt.p_ned = {get("gt_n"), get("gt_e"), get("gt_d")};
      if (has_vel) gt.v_ned = {get("gt_vn"), get("gt_ve"), get("gt_vd")};
      gt.rpy = {get("gt_roll"), get("gt_pitch"), get("gt_yaw")};
      log.truth.push_back(gt);
    }
  }
  if (log.imu.size() < 2) throw std::runtime_error("log has fewer than two samples");

  if (has_truth && !has_vel) {
    // Central differences in the interior, one-sided at the ends.
    auto& gt = log.truth;
    const size_t n = gt.size();
    std::vector<Vec3> v(n);
    for (size_t k = 0; k < n; ++k) {
      const size_t lo = k == 0 ? 0 : k - 1;
      const size_t hi = k + 1 == n ? k : k + 1;
      v[k] = (gt[hi].p_ned - gt[lo].p_ned) / (gt[hi].t - gt[lo].t);
    }
    for (size_t k = 0; k < n; ++k) gt[k].v_ned = v[k];
  }

  log.imu_rate = (log.imu.size() - 1) / (log.imu.back().t - log.imu.front().t);
  return log;
}

}  // namespace

Profile profile_from_name(const std::string& name) {
  if (name == "static") return Profile::kStatic;
  if (name == "straight") return Profile::kStraight;
  if (name == "circuit") return Profile::kCircuit;
  if (name == "hilly") return Profile::kHilly;
  throw std::invalid_argument("unknown profile: " + name);
}

std::string profile_name(Profile p) {
  switch (p) {
    case Profile::kStatic: return "static";
    case Profile::kStraight: return "straight";
    case Profile::kCircuit: return "circuit";
    case Profile::kHilly: return "hilly";
  }
  return "?";
}

TrajectoryLog gen_synthetic(Profile profile, double duration, double rate,
                            const ImuErrors& errors, uint64_t seed) {
  if (duration <= 0.0 || rate <= 0.0) {
    throw std::invalid_argument("gen_synthetic: nonpositive duration or rate");
  }
  if (errors.accel_noise < 0.0 || errors.gyro_noise < 0.0) {
    throw std::invalid_argument("gen_synthetic: negative noise density");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  const double accel_std = errors.accel_noise * std::sqrt(rate);
  const double gyro_std = errors.gyro_noise * std::sqrt(rate);
  const auto noise3 = [&](double std) {
    return Vec3(std * n01(rng), std * n01(rng), std * n01(rng));
  };

  TrajectoryLog log;
  log.name = profile_name(profile);
  log.imu_rate = rate;
  const auto n = static_cast<size_t>(std::llround(duration * rate)) + 1;
  log.imu.reserve(n);
  log.truth.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / rate;
    // Interval-midpoint sampling keeps the forward mechanization tight.
    const double ts = k == 0 ? 0.0 : (static_cast<double>(k) - 0.5) / rate;
    ImuSample s = clean_sample(profile, ts);
    s.t = t;
    s.f_b += noise3(accel_std);
    s.w_b += noise3(gyro_std);
    if (ts >= errors.bias_onset) {
      s.f_b += errors.accel_bias;
      s.w_b += errors.gyro_bias;
    }
    log.imu.push_back(s);

    const TruthPoint tp = eval_profile(profile, t);
    TruthSample gt;
    gt.t = t;
    gt.p_ned = tp.p;
    gt.v_ned = tp.v;
    gt.rpy = tp.rpy;
    log.truth.push_back(gt);
  }
  return log;
}

std::vector<GnssFix> corrupt_gnss(const TrajectoryLog& log, double noise_std,
                                  double gnss_rate, uint64_t seed) {
  if (!log.has_truth()) throw std::invalid_argument("corrupt_gnss: log has no truth");
  if (noise_std < 0.0 || gnss_rate <= 0.0) {
    throw std::invalid_argument("corrupt_gnss: bad noise or rate");
  }
  const auto stride = static_cast<size_t>(std::llround(log.imu_rate / gnss_rate));
  if (stride < 1) throw std::invalid_argument("corrupt_gnss: gnss rate above imu rate");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<GnssFix> fixes;
  for (size_t k = stride; k < log.truth.size(); k += stride) {
    GnssFix f;
    f.t = log.truth[k].t;
    f.p_ned = log.truth[k].p_ned +
              noise_std * Vec3(n01(rng), n01(rng), n01(rng));
    f.sigma = Vec3::Constant(noise_std);
    fixes.push_back(f);
  }
  return fixes;
}

EnvelopeBounds derive_bounds(const TrajectoryLog& log, double scale, double v_max,
                             bool altitude_relative) {
  if (!log.has_truth()) throw std::invalid_argument("derive_bounds: log has no truth");
  if (scale <= 0.0 || v_max <= 0.0) {
    throw std::invalid_argument("derive_bounds: nonpositive scale or v_max");
  }

  double max_roll = 0.0, max_pitch = 0.0, max_dev = 0.0, max_alt = 0.0;
  const double h0 = -log.truth.front().p_ned.z();
  for (const TruthSample& gt : log.truth) {
    max_roll = std::max(max_roll, std::abs(gt.rpy.x()));
    max_pitch = std::max(max_pitch, std::abs(gt.rpy.y()));
    const double h = -gt.p_ned.z();
    max_dev = std::max(max_dev, std::abs(h - h0));
    max_alt = std::max(max_alt, std::abs(h));
  }

  EnvelopeBounds b;
  if (altitude_relative) {
    b.h_min = h0 - scale * max_dev;
    b.h_max = h0 + scale * max_dev;
  } else {
    b.h_min = -scale * max_alt;
    b.h_max = scale * max_alt;
  }
  b.roll_min = -scale * max_roll;
  b.roll_max = scale * max_roll;
  b.pitch_min = -scale * max_pitch;
  b.pitch_max = scale * max_pitch;
  b.v_max = v_max;
  return b;
}

void write_log_csv(const TrajectoryLog& log, std::ostream& out) {
  std::string line = "t,fx,fy,fz,wx,wy,wz";
  if (log.has_truth()) {
    line += ",gt_n,gt_e,gt_d,gt_vn,gt_ve,gt_vd,gt_roll,gt_pitch,gt_yaw";
  }
  out << line << '\n';

  for (size_t k = 0; k < log.imu.size(); ++k) {
    line.clear();
    const ImuSample& s = log.imu[k];
    const double vals[] = {s.t, s.f_b.x(), s.f_b.y(), s.f_b.z(),
                           s.w_b.x(), s.w_b.y(), s.w_b.z()};
    for (double v : vals) {
      if (!line.empty()) line += ',';
      append_value(line, v);
    }
    if (log.has_truth()) {
      const TruthSample& gt = log.truth.at(k);
      const double tv[] = {gt.p_ned.x(), gt.p_ned.y(), gt.p_ned.z(),
                           gt.v_ned.x(), gt.v_ned.y(), gt.v_ned.z(),
                           gt.rpy.x(), gt.rpy.y(), gt.rpy.z()};
      for (double v : tv) {
        line += ',';
        append_value(line, v);
      }
    }
    out << line << '\n';
  }
}

void save_log_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write log: " + path);
  write_log_csv(log, out);
}

TrajectoryLog load_log_csv(const std::string& path) {
  return parse_log_csv(path, false);
}

TrajectoryLog convert_log(const std::string& path) {
  return parse_log_csv(path, true);
}

}  // namespace cnav
