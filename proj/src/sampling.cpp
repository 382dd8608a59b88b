#include "trmei/sampling.hpp"

#include <random>

#include <boost/random/sobol.hpp>

namespace trmei {

PointBatch scrambled_sobol(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  if (d < 1) throw InputError("scrambled_sobol: dimension must be >= 1");
  if (n < 0) throw InputError("scrambled_sobol: negative point count");
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> shift(static_cast<std::size_t>(d));
  for (auto& s : shift) s = rng();

  boost::random::sobol engine(static_cast<std::size_t>(d));
  PointBatch out(n, d);
  constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const std::uint64_t v = static_cast<std::uint64_t>(engine()) ^ shift[static_cast<std::size_t>(j)];
      out(i, j) = static_cast<double>(v >> 11) * kInv53;
    }
  }
  return out;
}

PointBatch initial_design(const Box& domain, Eigen::Index n_init, std::uint64_t seed) {
  if (n_init < 2) throw InputError("initial_design: n_init must be >= 2");
  const PointBatch u = scrambled_sobol(n_init, domain.dimension(), seed);
  PointBatch out(n_init, domain.dimension());
  for (Eigen::Index i = 0; i < n_init; ++i) out.row(i) = from_unit(domain, u.row(i).transpose());
  return out;
}

Point to_unit(const Box& domain, const Point& x) {
  return ((x - domain.lower).array() / (domain.upper - domain.lower).array()).matrix();
}

Point from_unit(const Box& domain, const Point& u) {
  return (domain.lower.array() + u.array() * (domain.upper - domain.lower).array()).matrix();
}

PointBatch batch_to_unit(const Box& domain, const PointBatch& xs) {
  PointBatch out(xs.rows(), xs.cols());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out.row(i) = to_unit(domain, Point(xs.row(i).transpose()));
  return out;
}

}  // namespace trmei
