#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "similab/grid.hpp"

namespace similab {

struct PhysicalField {
  double t = 1.0;
  UniformGrid x;
  std::vector<double> values;
};

struct SimilarityField {
  double tau = 0.0;
  UniformGrid xi;
  std::vector<double> values;
};

/// Origin X(T) and real time t(T) sampled on a strictly increasing T grid.
struct MovingFrame {
  std::vector<double> T;
  std::vector<double> X;
  std::vector<double> t;
};

/// Monotone piecewise-cubic resampling; zero outside the source grid.
std::vector<double> resample_pchip(const UniformGrid& from, std::span<const double> values, const UniformGrid& to);

/// tau = log t, xi = x / sqrt t, u = sqrt(t) * field.  Without a target grid
/// the natural grid x/sqrt(t) is used and no interpolation happens.
SimilarityField to_similarity(const PhysicalField& phys, std::optional<UniformGrid> target = std::nullopt);

/// Inverse of to_similarity at time t.
PhysicalField from_similarity(const SimilarityField& sim, double t,
                              std::optional<UniformGrid> target = std::nullopt);

struct FrameLookup {
  double T = 0.0;
  double X = 0.0;
  std::size_t passages = 0;  ///< number of T-intervals whose t-range contains the lookup time
  std::size_t reversals = 0; ///< intervals of the stored path with decreasing t
  bool non_monotone_at_lookup = false;
};

/// Last-passage inversion of t(T): the largest T with t(T) = t, linear within
/// the bracketing interval.  Throws std::out_of_range outside the stored range.
FrameLookup locate_in_frame(const MovingFrame& frame, double t);

struct MovingSimilarity {
  SimilarityField field;
  FrameLookup lookup;
};

/// tau = log T, xi = (x - X(T)) / sqrt T, u = sqrt(T) * field with T matched to phys.t.
MovingSimilarity to_similarity_moving(const PhysicalField& phys, const MovingFrame& frame,
                                      std::optional<UniformGrid> target = std::nullopt);

}  // namespace similab
