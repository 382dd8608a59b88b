#pragma once

#include <cstdint>

#include "trmei/common.hpp"

namespace trmei {

// n points of a Sobol sequence in [0,1)^d with a seeded random digital shift.
PointBatch scrambled_sobol(Eigen::Index n, Eigen::Index d, std::uint64_t seed);

// Space-filling initial design mapped into `domain`.
PointBatch initial_design(const Box& domain, Eigen::Index n_init, std::uint64_t seed);

// Affine maps between a box and [0,1]^d.
Point to_unit(const Box& domain, const Point& x);
Point from_unit(const Box& domain, const Point& u);
PointBatch batch_to_unit(const Box& domain, const PointBatch& xs);

}  // namespace trmei
