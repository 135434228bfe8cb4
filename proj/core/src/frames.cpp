#include "similab/frames.hpp"

#include <cmath>

// Boost 1.74 pchip.hpp calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <stdexcept>

namespace similab {

std::vector<double> resample_pchip(const UniformGrid& from, std::span<const double> values, const UniformGrid& to) {
  if (values.size() != from.count) throw std::invalid_argument("resample_pchip: grid/value size mismatch");
  std::vector<double> xs(from.count), ys(values.begin(), values.end());
  for (std::size_t i = 0; i < from.count; ++i) xs[i] = from.at(i);
  const double lo = xs.front(), hi = xs.back();
  boost::math::interpolators::pchip<std::vector<double>> interp(std::move(xs), std::move(ys));
  std::vector<double> out(to.count, 0.0);
  for (std::size_t i = 0; i < to.count; ++i) {
    const double x = to.at(i);
    if (x >= lo && x <= hi) out[i] = interp(x);
  }
  return out;
}

SimilarityField to_similarity(const PhysicalField& phys, std::optional<UniformGrid> target) {
  if (!(phys.t > 0.0)) throw std::domain_error("to_similarity: t must be positive");
  const double st = std::sqrt(phys.t);
  SimilarityField s;
  s.tau = std::log(phys.t);
  s.xi = {phys.x.origin / st, phys.x.spacing / st, phys.x.count};
  s.values.resize(phys.values.size());
  for (std::size_t i = 0; i < phys.values.size(); ++i) s.values[i] = st * phys.values[i];
  if (target) {
    s.values = resample_pchip(s.xi, s.values, *target);
    s.xi = *target;
  }
  return s;
}

PhysicalField from_similarity(const SimilarityField& sim, double t, std::optional<UniformGrid> target) {
  if (!(t > 0.0)) throw std::domain_error("from_similarity: t must be positive");
  const double st = std::sqrt(t);
  PhysicalField p;
  p.t = t;
  p.x = {sim.xi.origin * st, sim.xi.spacing * st, sim.xi.count};
  p.values.resize(sim.values.size());
  for (std::size_t i = 0; i < sim.values.size(); ++i) p.values[i] = sim.values[i] / st;
  if (target) {
    p.values = resample_pchip(p.x, p.values, *target);
    p.x = *target;
  }
  return p;
}

FrameLookup locate_in_frame(const MovingFrame& frame, double t) {
  const std::size_t n = frame.T.size();
  if (n < 2 || frame.t.size() != n || frame.X.size() != n)
    throw std::invalid_argument("locate_in_frame: frame arrays must share a length of at least 2");
  FrameLookup r;
  double tmin = frame.t[0], tmax = frame.t[0];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(frame.T[i + 1] > frame.T[i])) throw std::invalid_argument("locate_in_frame: T grid must increase");
    if (frame.t[i + 1] < frame.t[i]) ++r.reversals;
    tmin = std::min(tmin, frame.t[i + 1]);
    tmax = std::max(tmax, frame.t[i + 1]);
  }
  if (t < tmin || t > tmax) throw std::out_of_range("locate_in_frame: time outside the stored frame range");

  std::size_t last = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = frame.t[i], b = frame.t[i + 1];
    const bool inside = (t - a) * (t - b) < 0.0 || t == b || (i == 0 && t == a);
    if (inside) {
      ++r.passages;
      last = i;
    }
  }
  const double a = frame.t[last], b = frame.t[last + 1];
  const double f = (b == a) ? 1.0 : (t - a) / (b - a);
  r.T = frame.T[last] + f * (frame.T[last + 1] - frame.T[last]);
  r.X = frame.X[last] + f * (frame.X[last + 1] - frame.X[last]);
  r.non_monotone_at_lookup = r.passages > 1 || b < a;
  return r;
}

MovingSimilarity to_similarity_moving(const PhysicalField& phys, const MovingFrame& frame,
                                      std::optional<UniformGrid> target) {
  MovingSimilarity m;
  m.lookup = locate_in_frame(frame, phys.t);
  const double T = m.lookup.T;
  if (!(T > 0.0)) throw std::domain_error("to_similarity_moving: matched pseudo-time must be positive");
  const double sT = std::sqrt(T);
  m.field.tau = std::log(T);
  m.field.xi = {(phys.x.origin - m.lookup.X) / sT, phys.x.spacing / sT, phys.x.count};
  m.field.values.resize(phys.values.size());
  for (std::size_t i = 0; i < phys.values.size(); ++i) m.field.values[i] = sT * phys.values[i];
  if (target) {
    m.field.values = resample_pchip(m.field.xi, m.field.values, *target);
    m.field.xi = *target;
  }
  return m;
}

}  // namespace similab
