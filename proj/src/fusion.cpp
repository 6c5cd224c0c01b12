#include "cnav/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cnav/attitude.hpp"
#include "cnav/nav_core.hpp"

namespace cnav {

Vec15 lambda_full_gnss() {
  Vec15 lam = Vec15::Ones();
  lam(kSlotNorth) = 0.85;
  lam(kSlotEast) = 0.85;
  lam(kSlotAlt) = 10.0;
  lam(kSlotVd) = 10.0;
  lam(kSlotRoll) = 10.0;
  lam(kSlotPitch) = 10.0;
  return lam;
}

Vec15 lambda_gnss_denied() {
  Vec15 lam = Vec15::Ones();
  lam(kSlotNorth) = 0.25;
  lam(kSlotEast) = 0.25;
  lam(kSlotAlt) = 10.0;
  return lam;
}

FusedEstimate fuse(const BranchEstimate& nhc, const BranchEstimate& inq,
                   const Vec15& lambda, const FusionOptions& opts) {
  if ((lambda.array() < 0.0).any()) {
    throw std::invalid_argument("fuse: negative lambda entry");
  }

  const StateVector15 x_nhc = to_state_vector(nhc.state);
  const StateVector15 x_inq = to_state_vector(inq.state);

  FusedEstimate out;
  out.att_diverged = quat_angle(nhc.state.q, inq.state.q) > opts.max_att_divergence;
  StateVector15 fused;
  for (int j = 0; j < kStateDim; ++j) {
    const double s2_nhc = nhc.P(j, j);
    const double s2_inq = inq.P(j, j);
    if (s2_nhc <= 0.0 || s2_inq <= 0.0) {
      throw std::invalid_argument("fuse: nonpositive branch variance");
    }
    double w;
    if (opts.literal_weights) {
      w = (1.0 / s2_nhc + 1.0 / s2_inq) * s2_inq * lambda(j);
    } else {
      w = lambda(j) * (1.0 / s2_inq) / (1.0 / s2_inq + 1.0 / s2_nhc);
    }
    w = std::clamp(w, 0.0, 1.0);
    out.w_inq(j) = w;
    out.w_nhc(j) = 1.0 - w;

    const bool angle_slot = (j >= kSlotRoll && j <= kSlotYaw);
    if (angle_slot) {
      fused(j) = wrap_angle(x_nhc(j) + w * wrap_angle(x_inq(j) - x_nhc(j)));
    } else {
      fused(j) = w * x_inq(j) + (1.0 - w) * x_nhc(j);
    }
  }

  out.state = from_state_vector(fused, nhc.state);
  return out;
}

}  // namespace cnav
