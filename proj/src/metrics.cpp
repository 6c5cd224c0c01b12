#include "cnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cnav/attitude.hpp"

namespace cnav {

double percentile_linear(std::vector<double> values, double pct) {
  if (values.empty()) throw std::invalid_argument("percentile_linear: empty sample");
  if (pct < 0.0 || pct > 100.0) throw std::invalid_argument("percentile_linear: pct out of range");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * pct / 100.0;
  const auto lo = static_cast<size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

MetricsReport compute_metrics(const std::vector<NavState>& est,
                              const std::vector<TruthSample>& truth) {
  if (est.empty() || est.size() != truth.size()) {
    throw std::invalid_argument("compute_metrics: series size mismatch");
  }

  MetricsReport rep;
  const size_t n = est.size();
  auto& s = rep.series;
  s.t.reserve(n);

  double sum_p = 0.0, sum_h = 0.0, sum_v = 0.0, sum_vel = 0.0, sum_att = 0.0;
  std::vector<double> horiz, vert, pos, vel, att;
  horiz.reserve(n); vert.reserve(n); pos.reserve(n); vel.reserve(n); att.reserve(n);

  for (size_t k = 0; k < n; ++k) {
    if (std::abs(est[k].t - truth[k].t) > 1e-9) {
      throw std::invalid_argument("compute_metrics: timestamps misaligned");
    }
    const Vec3 ep = est[k].p_ned - truth[k].p_ned;
    const Vec3 ev = est[k].v_ned - truth[k].v_ned;
    const Vec3 rpy = quat_to_euler(est[k].q);
    const double er = wrap_angle(rpy.x() - truth[k].rpy.x());
    const double epc = wrap_angle(rpy.y() - truth[k].rpy.y());

    s.t.push_back(est[k].t);
    s.n.push_back(ep.x()); s.e.push_back(ep.y()); s.d.push_back(ep.z());
    s.vn.push_back(ev.x()); s.ve.push_back(ev.y()); s.vd.push_back(ev.z());
    s.roll.push_back(er); s.pitch.push_back(epc);

    const double h2 = ep.x() * ep.x() + ep.y() * ep.y();
    const double v2 = ep.z() * ep.z();
    const double a2 = er * er + epc * epc;
    sum_p += h2 + v2;
    sum_h += h2;
    sum_v += v2;
    sum_vel += ev.squaredNorm();
    sum_att += a2;

    horiz.push_back(std::sqrt(h2));
    vert.push_back(std::abs(ep.z()));
    pos.push_back(ep.norm());
    vel.push_back(ev.norm());
    att.push_back(std::sqrt(a2));
  }

  const double dn = static_cast<double>(n);
  rep.prmse = std::sqrt(sum_p / dn);
  rep.h_prmse = std::sqrt(sum_h / dn);
  rep.v_prmse = std::sqrt(sum_v / dn);
  rep.vrmse = std::sqrt(sum_vel / dn);
  rep.armse = std::sqrt(sum_att / dn);
  rep.p95.horizontal = percentile_linear(horiz, 95.0);
  rep.p95.vertical = percentile_linear(vert, 95.0);
  rep.p95.position = percentile_linear(pos, 95.0);
  rep.p95.velocity = percentile_linear(vel, 95.0);
  rep.p95.attitude = percentile_linear(att, 95.0);
  return rep;
}

}  // namespace cnav
