#include "similab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace similab {

void RunningStats::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double d = o.mean_ - mean_;
  const double n = na + nb;
  mean_ += d * nb / n;
  m2_ += o.m2_ + d * d * na * nb / n;
  n_ += o.n_;
}

double RunningStats::std_error() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs two or more paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

RateFit fit_rate(std::span<const double> tau, std::span<const double> series, double lo, double hi,
                 std::uint64_t seed) {
  if (tau.size() != series.size()) throw std::invalid_argument("fit_rate: tau and series differ in length");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < lo || tau[i] > hi) continue;
    if (!(series[i] > 0.0))
      throw FitRefused("fit_rate: non-positive value " + std::to_string(series[i]) + " at tau " +
                       std::to_string(tau[i]));
    xs.push_back(tau[i]);
    ys.push_back(std::log(series[i]));
  }
  if (xs.size() < 3) throw FitRefused("fit_rate: fewer than three samples in the window");

  RateFit out;
  out.rate = fit_line(xs, ys).slope;
  out.samples = xs.size();

  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::vector<double> slopes;
  std::vector<double> bx(xs.size()), by(xs.size());
  for (int b = 0; b < 200; ++b) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const std::size_t j = pick(gen);
      bx[i] = xs[j];
      by[i] = ys[j];
    }
    if (std::all_of(bx.begin(), bx.end(), [&](double v) { return v == bx[0]; })) continue;
    slopes.push_back(fit_line(bx, by).slope);
  }
  out.ci_low = quantile(slopes, 0.025);
  out.ci_high = quantile(slopes, 0.975);
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly).slope;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  const double f = pos - static_cast<double>(i);
  return v[i] * (1.0 - f) + v[i + 1] * f;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace similab
