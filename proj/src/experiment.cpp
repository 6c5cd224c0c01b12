#include "cnav/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cnav/attitude.hpp"

namespace cnav {
namespace {

constexpr double kTimeEps = 1e-9;

NavState initial_state(const TruthSample& truth) {
  NavState s;
  s.t = truth.t;
  s.p_ned = truth.p_ned;
  s.v_ned = truth.v_ned;
  s.q = euler_to_quat(truth.rpy);
  s.b_a.setZero();
  s.b_g.setZero();
  return s;
}

void track_covariance_health(const Mat15& p, RunResult& out) {
  out.max_asymmetry = std::max(out.max_asymmetry,
                               (p - p.transpose()).cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Mat15> es(p, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = std::min(out.min_eigenvalue, es.eigenvalues().minCoeff());
}

}  // namespace

namespace {

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Variant variant_from_name(const std::string& name) {
  const std::string n = lowered(name);
  if (n == "ekf") return Variant::kEkf;
  if (n == "nhcekf") return Variant::kNhcEkf;
  if (n == "inqekf") return Variant::kInqEkf;
  if (n == "dual") return Variant::kDual;
  throw std::invalid_argument("unknown variant: " + name);
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kEkf: return "ekf";
    case Variant::kNhcEkf: return "nhcekf";
    case Variant::kInqEkf: return "inqekf";
    case Variant::kDual: return "dual";
  }
  throw std::logic_error("bad variant");
}

Scenario scenario_from_name(const std::string& name) {
  const std::string n = lowered(name);
  if (n == "full" || n == "full-gnss") return Scenario::kFullGnss;
  if (n == "denied" || n == "gnss-denied") return Scenario::kGnssDenied;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
  return s == Scenario::kFullGnss ? "full" : "denied";
}

RunResult run_variant(const TrajectoryLog& log, const ExperimentSpec& spec) {
  if (!log.has_truth()) {
    throw std::invalid_argument("run_variant needs a log with ground truth");
  }
  if (log.imu.size() < 2) {
    throw std::invalid_argument("run_variant needs at least two epochs");
  }

  const double dt_nom = 1.0 / log.imu_rate;
  const double t0 = log.imu.front().t;
  const bool denied = spec.scenario == Scenario::kGnssDenied;
  const double cut = t0 + spec.init_s;           // last instant fixes may arrive
  const double t_stop = cut + spec.outage_s;     // denied: end of scored window
  if (denied && log.imu.back().t + kTimeEps < t_stop - dt_nom) {
    throw std::invalid_argument("log too short for the denied scenario window");
  }

  FilterConfig cfg = spec.filter;
  cfg.r_gnss = spec.gnss_noise_std * spec.gnss_noise_std * Mat3::Identity();

  const std::vector<GnssFix> fixes =
      corrupt_gnss(log, spec.gnss_noise_std, spec.gnss_rate, spec.seed + 1);

  RunResult out;
  out.bounds = derive_bounds(log, spec.bounds_scale, spec.v_max, spec.altitude_relative);
  out.min_eigenvalue = std::numeric_limits<double>::infinity();

  const bool runs_nhc = spec.variant == Variant::kNhcEkf || spec.variant == Variant::kDual;
  const bool runs_inq = spec.variant == Variant::kInqEkf || spec.variant == Variant::kDual;

  const NavState init = initial_state(log.truth.front());
  FilterState main_fs = make_filter_state(init, cfg);  // ekf / nhcekf / dual's nhc side
  FilterState inq_fs = main_fs;

  FusionOptions fopts;
  fopts.literal_weights = spec.literal_weights;

  out.estimate.reserve(log.imu.size());
  out.estimate.push_back(init);
  if (spec.variant == Variant::kDual) {
    out.w_inq.push_back(fuse({init, main_fs.P}, {init, inq_fs.P}, lambda_full_gnss(), fopts).w_inq);
  }

  size_t fix_idx = 0;
  for (size_t k = 1; k < log.imu.size(); ++k) {
    const ImuSample& imu = log.imu[k];
    if (denied && imu.t >= t_stop - kTimeEps) break;

    std::optional<GnssFix> fix;
    while (fix_idx < fixes.size() && fixes[fix_idx].t <= imu.t + 0.5 * dt_nom) {
      const GnssFix& cand = fixes[fix_idx];
      if (cand.t < imu.t - 0.5 * dt_nom) {
        ++fix_idx;  // stale fix between epochs; should not happen on our logs
        continue;
      }
      if (denied && cand.t >= cut - kTimeEps) {
        ++out.fixes_withheld;
      } else {
        fix = cand;
        ++out.fixes_consumed;
        if (denied && cand.t >= cut - kTimeEps) ++out.late_fixes_consumed;
      }
      ++fix_idx;
      break;
    }

    if (spec.variant != Variant::kInqEkf) {
      main_fs = predict(main_fs, imu, cfg);
      if (fix) main_fs = gnss_update(main_fs, *fix, cfg);
      if (runs_nhc) main_fs = nhc_update(main_fs, cfg.r_nhc);
      if (spec.track_health) track_covariance_health(main_fs.P, out);
    }
    if (runs_inq) {
      BranchStepResult step = inequality_branch_step(inq_fs, imu, fix, out.bounds, cfg);
      inq_fs = step.fs;
      if (step.projected) ++out.projections;
      if (step.constrained) ++out.constrained_updates;
      if (step.fallback) ++out.fallbacks;
      out.max_violation = std::max(out.max_violation, step.max_violation);
      if (spec.track_health) track_covariance_health(inq_fs.P, out);
    }

    switch (spec.variant) {
      case Variant::kEkf:
      case Variant::kNhcEkf:
        out.estimate.push_back(main_fs.nominal);
        break;
      case Variant::kInqEkf:
        out.estimate.push_back(inq_fs.nominal);
        break;
      case Variant::kDual: {
        const Vec15 lambda = (denied && imu.t >= cut - kTimeEps)
                                 ? lambda_gnss_denied()
                                 : lambda_full_gnss();
        FusedEstimate fused =
            fuse({main_fs.nominal, main_fs.P}, {inq_fs.nominal, inq_fs.P}, lambda, fopts);
        out.estimate.push_back(fused.state);
        out.w_inq.push_back(fused.w_inq);
        if (fused.att_diverged) ++out.att_guard_epochs;
        break;
      }
    }
  }

  if (!std::isfinite(out.min_eigenvalue)) out.min_eigenvalue = 0.0;

  out.eval_begin = 0;
  if (denied) {
    while (out.eval_begin < out.estimate.size() &&
           out.estimate[out.eval_begin].t < cut - kTimeEps) {
      ++out.eval_begin;
    }
    if (out.eval_begin == out.estimate.size()) {
      throw std::logic_error("empty evaluation window");
    }
  }

  const std::vector<NavState> eval_est(out.estimate.begin() + out.eval_begin,
                                       out.estimate.end());
  const std::vector<TruthSample> eval_truth(log.truth.begin() + out.eval_begin,
                                            log.truth.begin() + out.estimate.size());
  out.metrics = compute_metrics(eval_est, eval_truth);
  return out;
}

std::vector<SweepEntry> run_sweep(const TrajectoryLog& log, const ExperimentSpec& base) {
  std::vector<SweepEntry> entries;
  for (Scenario sc : {Scenario::kFullGnss, Scenario::kGnssDenied}) {
    for (Variant v : {Variant::kEkf, Variant::kNhcEkf, Variant::kInqEkf, Variant::kDual}) {
      ExperimentSpec spec = base;
      spec.scenario = sc;
      spec.variant = v;
      entries.push_back({v, sc, run_variant(log, spec)});
    }
  }
  return entries;
}

}  // namespace cnav
