// End-to-end acceptance checks for the library. Each test prints one
// summary line so the suite doubles as a release checklist; tolerances are
// pinned next to the checks they gate.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cnav/attitude.hpp"
#include "cnav/experiment.hpp"
#include "cnav/fusion.hpp"
#include "cnav/metrics.hpp"
#include "cnav/nav_core.hpp"
#include "cnav/qp_solver.hpp"
#include "test_util.hpp"

#ifndef CNAV_CLI_PATH
#define CNAV_CLI_PATH ""
#endif

namespace cnav {
namespace {

void report(int idx, const char* what) {
  std::printf("[acceptance %2d] %s  %s\n", idx,
              ::testing::Test::HasFailure() ? "FAIL" : "PASS", what);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// The two trend configurations share one error model: a hilly 90 s drive
// at 100 Hz with a filter whose process noise matches the IMU densities.
ImuErrors trend_errors(double accel_bias, double onset) {
  ImuErrors errs;
  errs.accel_bias = Vec3::Constant(accel_bias);
  errs.gyro_bias = Vec3::Constant(1e-4);
  errs.accel_noise = 0.01;
  errs.gyro_noise = 2e-4;
  errs.bias_onset = onset;
  return errs;
}

ExperimentSpec trend_spec(uint64_t seed, Scenario scenario) {
  ExperimentSpec spec;
  spec.seed = seed;
  spec.scenario = scenario;
  spec.gnss_noise_std = 2.0;
  spec.bounds_scale = 1.25;
  spec.filter.q_spec.accel_noise = 0.01;
  spec.filter.q_spec.gyro_noise = 2e-4;
  return spec;
}

TEST(Acceptance, ProjectionMatchesEnumerationOracle) {
  constexpr double kMatchTol = 1e-8;
  constexpr int kProblems = 1000;

  std::mt19937_64 rng(101);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> pick_l(1, 8);
  std::uniform_real_distribution<double> slack(0.01, 2.0);

  const auto t0 = std::chrono::steady_clock::now();
  int total_active = 0;
  for (int trial = 0; trial < kProblems; ++trial) {
    const Mat15 p = testutil::random_spd<15>(rng, 0.1, 1.0);
    StateVector15 x0, xa;
    for (int i = 0; i < 15; ++i) {
      x0(i) = 2.0 * g(rng);
      xa(i) = 0.5 * g(rng);
    }
    const int l = pick_l(rng);
    Eigen::MatrixXd c(l, 15);
    Eigen::VectorXd d(l);
    for (int r = 0; r < l; ++r) {
      for (int i = 0; i < 15; ++i) c(r, i) = g(rng);
      c.row(r).normalize();
      d(r) = c.row(r) * xa + slack(rng);  // xa certifies feasibility
    }

    const StateVector15 got = project_state(x0, p, c, d);

    // Same quadratic the projection minimizes, handed to the brute-force
    // active-set enumerator.
    QpProblem prob;
    const Mat15 ridged = p + 1e-9 * Mat15::Identity();
    const Mat15 h = ridged.inverse();
    prob.hessian = 0.5 * (h + h.transpose());
    prob.gradient = -prob.hessian * x0;
    prob.a_ineq = c;
    prob.b_ineq = d;
    prob.a_eq.resize(0, 15);
    prob.b_eq.resize(0);

    Eigen::VectorXd best;
    ASSERT_TRUE(testutil::qp_enumerate(prob, best)) << "trial " << trial;
    EXPECT_LT((got - best).cwiseAbs().maxCoeff(), kMatchTol)
        << "trial " << trial;
    total_active += static_cast<int>(((c * best - d).array() > -1e-9).count());
  }
  const double elapsed = seconds_since(t0);
  EXPECT_LT(elapsed, 10.0);
  EXPECT_GT(total_active, 100);  // the set must actually bind sometimes
  report(1, "state projection matches brute-force QP enumeration (1000 cases)");
}

TEST(Acceptance, ConstrainedRunsKeepEveryRowSatisfied) {
  constexpr double kRowTol = 1e-6;
  int total_proj = 0;
  int total_cons = 0;
  double worst = 0.0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const TrajectoryLog log = gen_synthetic(Profile::kHilly, 90.0, 100.0,
                                            trend_errors(0.05, 60.0), seed);
    ExperimentSpec spec = trend_spec(seed, Scenario::kGnssDenied);
    spec.variant = Variant::kInqEkf;
    const RunResult res = run_variant(log, spec);
    EXPECT_LE(res.max_violation, kRowTol) << "seed " << seed;
    EXPECT_GT(res.projections, 100) << "seed " << seed;
    worst = std::max(worst, res.max_violation);
    total_proj += res.projections;
    total_cons += res.constrained_updates;
  }
  EXPECT_GT(total_proj, 1000);
  EXPECT_GE(total_cons, 20);
  std::printf("    worst row residual %.3e over %d projections, %d gain clamps\n",
              worst, total_proj, total_cons);
  report(2, "gnss-denied constrained runs satisfy all rows within 1e-6");
}

TEST(Acceptance, CovarianceStaysHealthyOverLongMixedRun) {
  constexpr double kSymTol = 1e-9;
  constexpr double kEigFloor = -1e-9;

  const TrajectoryLog log = gen_synthetic(Profile::kHilly, 1000.0, 100.0,
                                          trend_errors(0.02, 0.0), 3);
  ExperimentSpec spec = trend_spec(3, Scenario::kFullGnss);
  spec.variant = Variant::kInqEkf;
  spec.bounds_scale = 1.05;  // tight envelope keeps the constraints engaged
  spec.track_health = true;

  const RunResult res = run_variant(log, spec);
  EXPECT_GE(res.estimate.size(), 100000u);
  EXPECT_LE(res.max_asymmetry, kSymTol);
  EXPECT_GE(res.min_eigenvalue, kEigFloor);
  // The run must actually mix plain, constrained and projected epochs.
  EXPECT_GT(res.fixes_consumed, 100);
  EXPECT_GT(res.projections, 100);
  EXPECT_GT(res.constrained_updates, 10);
  report(3, "covariance symmetric and PSD across 1e5 mixed epochs");
}

// Steady climb with a gentle attitude wobble. Pitch stays in [0.11, 0.19],
// so the pitch-scaled down-velocity cap keeps a many-sigma margin over the
// constant 1.2 m/s descent-rate magnitude; every other envelope row is
// orders of magnitude away once scaled up. Closed form: constant v_ned,
// rpy(t) analytic, gyro from the exact Euler-rate to body-rate map,
// accelerometer from the rotated gravity reaction.
TrajectoryLog climb_log(double duration, double rate) {
  const Vec3 v_ned(10.0, 2.0, -1.2);
  const auto rpy_at = [](double t) {
    return Vec3(0.08 * std::sin(0.25 * t), 0.15 + 0.04 * std::sin(0.3 * t),
                0.3 + 0.1 * std::sin(0.12 * t));
  };
  const auto rpy_rate_at = [](double t) {
    return Vec3(0.08 * 0.25 * std::cos(0.25 * t), 0.04 * 0.3 * std::cos(0.3 * t),
                0.1 * 0.12 * std::cos(0.12 * t));
  };

  TrajectoryLog log;
  log.name = "climb";
  log.imu_rate = rate;
  const auto n = static_cast<size_t>(std::llround(duration * rate)) + 1;
  for (size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / rate;
    const double ts = k == 0 ? 0.0 : (static_cast<double>(k) - 0.5) / rate;

    const Vec3 rpy = rpy_at(ts);
    const Vec3 rdot = rpy_rate_at(ts);
    const double sf = std::sin(rpy.x()), cf = std::cos(rpy.x());
    const double st = std::sin(rpy.y()), ct = std::cos(rpy.y());
    ImuSample s;
    s.t = t;
    s.w_b = Vec3(rdot.x() - rdot.z() * st,
                 rdot.y() * cf + rdot.z() * ct * sf,
                 -rdot.y() * sf + rdot.z() * ct * cf);
    const Eigen::Quaterniond q = euler_to_quat(rpy);
    s.f_b = q.toRotationMatrix().transpose() * (-gravity_ned());
    log.imu.push_back(s);

    TruthSample gt;
    gt.t = t;
    gt.p_ned = t * v_ned;
    gt.v_ned = v_ned;
    gt.rpy = rpy_at(t);
    log.truth.push_back(gt);
  }
  return log;
}

TEST(Acceptance, SlackEnvelopeReducesToPlainFilter) {
  constexpr double kNestTol = 1e-6;
  const TrajectoryLog log = climb_log(60.0, 100.0);
  ExperimentSpec spec = trend_spec(5, Scenario::kFullGnss);
  spec.bounds_scale = 50.0;  // envelope sits far beyond any 10-sigma wander
  spec.v_max = 100.0;

  spec.variant = Variant::kEkf;
  const RunResult ekf = run_variant(log, spec);
  spec.variant = Variant::kInqEkf;
  const RunResult inq = run_variant(log, spec);

  EXPECT_EQ(inq.projections, 0);
  EXPECT_EQ(inq.constrained_updates, 0);
  EXPECT_NEAR(inq.metrics.prmse, ekf.metrics.prmse, kNestTol);
  report(4, "inactive envelope leaves the constrained variant equal to the ekf");
}

TEST(Acceptance, FusionWeightsPartitionAndInterpolate) {
  constexpr double kBetweenTol = 1e-12;
  constexpr int kPairs = 10000;

  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> var(0.05, 20.0);
  std::uniform_real_distribution<double> lam(0.0, 2.0);

  int bad_partition = 0;
  int bad_between = 0;
  for (int trial = 0; trial < kPairs; ++trial) {
    BranchEstimate nhc, inq;
    nhc.state = testutil::random_state(rng);
    inq.state = testutil::random_state(rng);
    nhc.P = Mat15::Identity();
    inq.P = Mat15::Identity();
    Vec15 lambda;
    for (int j = 0; j < 15; ++j) {
      nhc.P(j, j) = var(rng);
      inq.P(j, j) = var(rng);
      lambda(j) = lam(rng);
    }

    const FusedEstimate f = fuse(nhc, inq, lambda);
    const StateVector15 xa = to_state_vector(nhc.state);
    const StateVector15 xb = to_state_vector(inq.state);
    const StateVector15 xf = to_state_vector(f.state);
    for (int j = 0; j < 15; ++j) {
      if (f.w_inq(j) + f.w_nhc(j) != 1.0) ++bad_partition;
      if (j >= kSlotRoll && j <= kSlotYaw) {
        const double d = wrap_angle(xb(j) - xa(j));
        const double fd = wrap_angle(xf(j) - xa(j));
        if (fd < std::min(0.0, d) - kBetweenTol ||
            fd > std::max(0.0, d) + kBetweenTol) {
          ++bad_between;
        }
      } else {
        if (xf(j) < std::min(xa(j), xb(j)) - kBetweenTol ||
            xf(j) > std::max(xa(j), xb(j)) + kBetweenTol) {
          ++bad_between;
        }
      }
    }
  }
  EXPECT_EQ(bad_partition, 0);
  EXPECT_EQ(bad_between, 0);
  report(5, "fusion weights sum to one and fused slots stay between branches");
}

TEST(Acceptance, NhcUpdateDeliversTheOneDimensionalGain) {
  FilterConfig cfg;
  NavState s;
  s.q = euler_to_quat({0.01, -0.02, 0.5});
  const Vec3 v_b_true(8.0, 0.0, 0.0);
  const Vec3 v_b_err(0.0, 1.0, 0.0);  // 1 m/s of injected lateral velocity
  s.v_ned = s.q.toRotationMatrix() * (v_b_true + v_b_err);
  const FilterState fs = make_filter_state(s, cfg);

  const Eigen::Matrix<double, 3, 15> j = body_velocity_jacobian(fs.nominal);
  const Eigen::RowVector<double, 15> h_lat = j.row(1);
  const double p_lat = h_lat * fs.P * h_lat.transpose();
  const double r = cfg.r_nhc(0, 0);
  const double kappa = p_lat / (p_lat + r);  // 1D Kalman reduction factor

  const FilterState out = nhc_update(fs, cfg.r_nhc);
  const double after = std::abs(
      (out.nominal.q.toRotationMatrix().transpose() * out.nominal.v_ned).y());
  const double reduction = 1.0 - after / 1.0;
  EXPECT_GE(reduction, 0.95 * kappa);
  EXPECT_LE(after, 1.0);
  std::printf("    lateral 1.000 -> %.4f (1d factor %.4f)\n", after, kappa);
  report(6, "one nhc update removes at least the 1d kalman share of slip");
}

TEST(Acceptance, DeniedOutageVerticalTrend) {
  const auto t0 = std::chrono::steady_clock::now();
  int wins = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const TrajectoryLog log = gen_synthetic(Profile::kHilly, 90.0, 100.0,
                                            trend_errors(0.05, 60.0), seed);
    ExperimentSpec spec = trend_spec(seed, Scenario::kGnssDenied);
    spec.variant = Variant::kEkf;
    const RunResult ekf = run_variant(log, spec);
    spec.variant = Variant::kDual;
    const RunResult dual = run_variant(log, spec);
    if (dual.metrics.v_prmse < 0.5 * ekf.metrics.v_prmse) ++wins;
  }
  const double elapsed = seconds_since(t0);
  EXPECT_GE(wins, 9);
  EXPECT_LT(elapsed, 60.0);
  std::printf("    dual halves the vertical outage error in %d/10 seeds (%.1f s)\n",
              wins, elapsed);
  report(7, "dual branch halves vertical drift during outages in 9+/10 seeds");
}

TEST(Acceptance, FullCoverageTrend) {
  int dual_vs_ekf = 0;
  int dual_vs_nhc = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const TrajectoryLog log = gen_synthetic(Profile::kHilly, 90.0, 100.0,
                                            trend_errors(0.02, 0.0), seed);
    ExperimentSpec spec = trend_spec(seed, Scenario::kFullGnss);
    spec.variant = Variant::kEkf;
    const RunResult ekf = run_variant(log, spec);
    spec.variant = Variant::kNhcEkf;
    const RunResult nhc = run_variant(log, spec);
    spec.variant = Variant::kDual;
    const RunResult dual = run_variant(log, spec);
    if (dual.metrics.prmse <= ekf.metrics.prmse) ++dual_vs_ekf;
    if (dual.metrics.v_prmse < nhc.metrics.v_prmse) ++dual_vs_nhc;
  }
  EXPECT_GE(dual_vs_ekf, 9);
  EXPECT_GE(dual_vs_nhc, 8);
  std::printf("    dual <= ekf prmse %d/10, dual < nhc vertical %d/10\n",
              dual_vs_ekf, dual_vs_nhc);
  report(8, "dual branch beats ekf and nhc baselines under full coverage");
}

TEST(Acceptance, MetricsMatchClosedForms) {
  constexpr double kExactTol = 1e-12;
  std::vector<NavState> est;
  std::vector<TruthSample> truth;
  const auto add = [&](double t, const Vec3& pe, const Vec3& ve, double roll,
                       double pitch) {
    TruthSample gt;
    gt.t = t;
    truth.push_back(gt);
    NavState s;
    s.t = t;
    s.p_ned = pe;
    s.v_ned = ve;
    s.q = euler_to_quat({roll, pitch, 0.0});
    est.push_back(s);
  };
  add(0.0, {1, 0, 0}, {1, 0, 0}, 0.1, 0.0);
  add(1.0, {0, 2, 0}, {2, 0, 0}, 0.0, 0.2);
  add(2.0, {0, 0, 2}, {3, 0, 0}, 0.0, 0.0);

  const MetricsReport m = compute_metrics(est, truth);
  EXPECT_NEAR(m.prmse, std::sqrt(3.0), kExactTol);
  EXPECT_NEAR(m.h_prmse, std::sqrt(5.0 / 3.0), kExactTol);
  EXPECT_NEAR(m.v_prmse, std::sqrt(4.0 / 3.0), kExactTol);
  EXPECT_NEAR(m.vrmse, std::sqrt(14.0 / 3.0), kExactTol);
  EXPECT_NEAR(m.armse, std::sqrt(0.05 / 3.0), kExactTol);

  std::vector<double> v;
  for (int k = 1; k <= 100; ++k) v.push_back(k);
  EXPECT_NEAR(percentile_linear(v, 95.0), 95.05, kExactTol);
  report(9, "metrics reproduce hand-computed values and percentiles");
}

TEST(Acceptance, CliSweepIsByteDeterministic) {
  const std::string cli = CNAV_CLI_PATH;
  ASSERT_FALSE(cli.empty());

  namespace fs = std::filesystem;
  const std::string j1 = (fs::temp_directory_path() / "cnav_accept_1.json").string();
  const std::string j2 = (fs::temp_directory_path() / "cnav_accept_2.json").string();
  const auto run = [&](const std::string& out) {
    const std::string cmd =
        "\"" + cli + "\" sweep --seed 7 --accel-bias 0.02 --gyro-bias 1e-4"
        " --accel-noise 0.01 --gyro-noise 2e-4 --json \"" + out + "\" > /dev/null";
    return std::system(cmd.c_str());
  };
  ASSERT_EQ(run(j1), 0);
  ASSERT_EQ(run(j2), 0);

  const auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(j1);
  const std::string b = slurp(j2);
  std::remove(j1.c_str());
  std::remove(j2.c_str());
  ASSERT_GT(a.size(), 100u);
  EXPECT_EQ(a, b);
  report(10, "repeated cli sweeps emit byte-identical json");
}

}  // namespace
}  // namespace cnav
