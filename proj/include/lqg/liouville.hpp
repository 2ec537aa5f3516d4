#pragma once

#include <filesystem>
#include <vector>

#include "lqg/field_sampler.hpp"
#include "lqg/grid.hpp"

namespace lqg {

/// Density m(x) = exp(gamma X(x) - gamma^2 sigma^2 / 2) of the Liouville
/// measure against counting measure normalized by n^-2.
struct LiouvilleWeights {
  ScalarGrid grid;
  double gamma = 0.0;
  double total_mass = 0.0;  // (1/n^2) sum_x m(x)
};

/// Rejects gamma outside [0, 2) and any non-finite or non-positive weight.
[[nodiscard]] LiouvilleWeights liouville_weights(const FieldSample& field, double gamma);

/// The k sites with the largest field values, in decreasing order, ties
/// broken by row-major index. With min_separation > 0 a site is skipped when
/// it lies within L-infinity torus distance < min_separation of an already
/// selected site.
[[nodiscard]] std::vector<LatticePoint> high_points(const FieldSample& field, std::size_t k,
                                                    std::size_t min_separation = 0);

/// L-infinity distance on the torus.
[[nodiscard]] std::size_t torus_linf_distance(LatticePoint p, LatticePoint q, TorusSize n);

/// CSV with header "rank,a,b,X"; rank is 1-based.
void write_high_points_csv(const std::filesystem::path& path, const FieldSample& field,
                           const std::vector<LatticePoint>& points);

}  // namespace lqg
