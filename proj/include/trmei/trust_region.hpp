#pragma once

#include <cstdint>

#include "trmei/common.hpp"

namespace trmei {

// Zero-valued integer fields resolve against the dimension in resolve().
struct TrustRegionSettings {
  double length_init = 0.8;
  double length_min = 0.0078125;  // 0.5^7
  double length_max = 1.6;
  int success_tolerance = 3;
  int failure_tolerance = 0;  // 0 -> max(5, d)
  int n_candidates = 0;       // 0 -> min(100 d, 5000)
  double perturb_probability = 0.0;  // 0 -> min(20 / d, 1)

  TrustRegionSettings resolve(Eigen::Index d) const;
  void validate() const;
};

// Hyperrectangular trust region in [0,1]^d.
struct TrustRegionState {
  Point center;
  double length = 0.8;
  int n_success = 0;
  int n_failure = 0;
  int tau_success = 3;
  int tau_failure = 5;
  double length_init = 0.8;
  double length_min = 0.0078125;
  double length_max = 1.6;
  // Set by adjust() when the region shrank below length_min.
  bool restart_signaled = false;

  static TrustRegionState initial(const TrustRegionSettings& resolved, Point center);
};

// Box of side L * l_i / geomean(l) around `center`, clipped to [0,1]^d.
Box define_tr(const TrustRegionState& state, const Point& center,
              const Eigen::VectorXd& lengthscales);

struct CandidateBatch {
  PointBatch points;
  // perturbed(i, j): coordinate j of candidate i was drawn rather than copied.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> perturbed;
  std::uint64_t seed = 0;
};

// Coordinate-wise perturbation of `center`: each coordinate is replaced with
// probability p_perturb by the matching coordinate of a scrambled Sobol point
// inside `box`; rows with no coordinate selected get one forced at random.
CandidateBatch gen_candidates(const Box& box, const Point& center, Eigen::Index n_cand,
                              double p_perturb, std::uint64_t seed);

// Success extends the success streak and clears the failure streak, and vice versa.
TrustRegionState update_counters(TrustRegionState state, bool improved);

// Doubling on a full success streak (capped at length_max), halving on a full
// failure streak. A length below length_min sets restart_signaled. No-op
// unless a streak reached its threshold.
TrustRegionState adjust(TrustRegionState state);

// Fresh region at length_init around `center` with cleared counters.
TrustRegionState restart(TrustRegionState state, Point center);

}  // namespace trmei
