// Per-slot variance-weighted fusion of the two branch estimates.
//
// For each flat-state slot j the inequality-branch weight is the normalized
// information share scaled by a per-slot emphasis factor lambda_j and
// clipped into [0, 1]:
//
//   w_inq_j = clip(lambda_j * (1/s2_inq) / (1/s2_inq + 1/s2_nhc), 0, 1)
//   w_nhc_j = 1 - w_inq_j
//
// An alternative unnormalized form, (1/s2_nhc + 1/s2_inq) * s2_inq *
// lambda_j, is available behind the literal_weights switch; with equal
// variances and lambda = 1 it clips to 1 instead of splitting evenly.
#pragma once

#include "cnav/types.hpp"

namespace cnav {

struct BranchEstimate {
  NavState state;
  Mat15 P = Mat15::Identity();
};

struct FusionOptions {
  bool literal_weights = false;
  double max_att_divergence = 0.1745329251994330;  // 10 deg, rad
};

struct FusedEstimate {
  NavState state;
  Vec15 w_inq = Vec15::Zero();
  Vec15 w_nhc = Vec15::Zero();
  bool att_diverged = false;  // branch attitudes differ beyond the guard
};

// Per-slot emphasis factors. The full-coverage preset leans on the
// inequality branch for altitude, roll, pitch and down velocity and keeps
// horizontal position mostly on the equality branch; the denied preset
// pulls horizontal position further toward the equality branch.
Vec15 lambda_full_gnss();
Vec15 lambda_gnss_denied();

// Fuses slot by slot. Angle slots combine along the wrapped difference.
// Rejects nonpositive branch variances and negative lambda entries. Branch
// attitudes more than max_att_divergence apart set the att_diverged
// diagnostic on the result; the fusion itself still runs.
FusedEstimate fuse(const BranchEstimate& nhc, const BranchEstimate& inq,
                   const Vec15& lambda, const FusionOptions& opts = {});

}  // namespace cnav
