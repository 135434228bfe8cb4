#include "similab/mixing.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "similab/frames.hpp"
#include "similab/rng.hpp"
#include "similab/stats.hpp"

namespace similab {

namespace {

// Plans are created once per size under a lock (the planner is not
// thread-safe) and executed through the new-array interface, which is.
struct Plans {
  fftw_plan forward;
  fftw_plan backward;
};

const Plans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, Plans> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> r(n);
  std::vector<std::complex<double>> c(n / 2 + 1);
  auto* cc = reinterpret_cast<fftw_complex*>(c.data());
  const int ni = static_cast<int>(n);
  Plans p{fftw_plan_dft_r2c_1d(ni, r.data(), cc, FFTW_ESTIMATE | FFTW_UNALIGNED),
          fftw_plan_dft_c2r_1d(ni, cc, r.data(), FFTW_ESTIMATE | FFTW_UNALIGNED)};
  return cache.emplace(n, p).first->second;
}

std::vector<std::complex<double>> forward(std::span<const double> v) {
  const auto& p = plans_for(v.size());
  std::vector<double> in(v.begin(), v.end());
  std::vector<std::complex<double>> out(v.size() / 2 + 1);
  fftw_execute_dft_r2c(p.forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> backward(const std::vector<std::complex<double>>& c, std::size_t n) {
  const auto& p = plans_for(n);
  std::vector<std::complex<double>> in(c);  // c2r destroys its input
  std::vector<double> out(n);
  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  for (double& x : out) x /= static_cast<double>(n);
  return out;
}

}  // namespace

UniformGrid periodic_grid(double length, std::size_t n) {
  if (!(length > 0.0) || n < 8 || n % 2 != 0) throw std::invalid_argument("periodic grid needs L > 0 and even n >= 8");
  return {-0.5 * length, length / static_cast<double>(n), n};
}

double pipe_mass(const PipePair& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.u1.size(); ++i) s += p.u1[i] + p.u2[i];
  return s * p.x.spacing;
}

PipeSpectrum::PipeSpectrum(const PipePair& p) : x_(p.x), t_(p.t) {
  if (p.u1.size() != p.x.count || p.u2.size() != p.x.count) throw std::invalid_argument("PipeSpectrum: size mismatch");
  const auto a = forward(p.u1), b = forward(p.u2);
  m_.resize(a.size());
  d_.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    m_[j] = 0.5 * (a[j] + b[j]);
    d_[j] = 0.5 * (a[j] - b[j]);
  }
  // A shifted Nyquist mode is not representable by a real field.
  m_.back() = d_.back() = 0.0;
}

void PipeSpectrum::step(double dt, double dw) {
  const double L = length();
  if (std::abs(dw) > 0.5 * L)
    throw IntegrationAbort("pipe shift " + std::to_string(dw) + " exceeds half the domain", 0);
  // Pipe 1 moves by +dw and pipe 2 by -dw: with z_j = e^{-i k_j dw},
  // u1 <- z u1 and u2 <- conj(z) u2, so in (m, d) the shift mixes via
  // cos and i sin.  Powers of z by recurrence; the error grows like j eps.
  const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * dw / L);
  const double decay = std::exp(-dt);
  std::complex<double> z = 1.0;
  const std::size_t n = m_.size() - 1;  // Nyquist stays zero
  for (std::size_t j = 0; j < n; ++j) {
    const double c = z.real();
    const std::complex<double> is(0.0, z.imag());
    const std::complex<double> m = m_[j], d = d_[j];
    m_[j] = c * m + is * d;
    d_[j] = decay * (is * m + c * d);
    z *= z1;
  }
  t_ += dt;
}

PipePair PipeSpectrum::physical() const {
  const std::size_t n = x_.count;
  std::vector<std::complex<double>> a(m_.size()), b(m_.size());
  for (std::size_t j = 0; j < m_.size(); ++j) {
    a[j] = m_[j] + d_[j];
    b[j] = m_[j] - d_[j];
  }
  return {t_, x_, backward(a, n), backward(b, n)};
}

double PipeSpectrum::mass() const { return 2.0 * m_[0].real() * x_.spacing; }

double PipeSpectrum::mean_variance() const {
  const auto m = backward(m_, x_.count);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double x = x_.at(i);
    s0 += m[i];
    s1 += m[i] * x;
  }
  const double mu = s1 / s0;
  for (std::size_t i = 0; i < m.size(); ++i) s2 += m[i] * (x_.at(i) - mu) * (x_.at(i) - mu);
  return s2 / s0;
}

double PipeSpectrum::slaving_deviation(double eta) const {
  const double dk = 2.0 * std::numbers::pi / length();
  double num = 0.0, den = 0.0;
  for (std::size_t j = 1; j + 1 < m_.size(); ++j) {
    const std::complex<double> dm = std::complex<double>(0.0, dk * static_cast<double>(j)) * m_[j];
    num += std::norm(d_[j] / eta + dm);
    den += std::norm(dm);
  }
  num += std::norm(d_[0] / eta);
  return std::sqrt(num / den);
}

PipePair step_pipes(const PipePair& state, double dt, double dw) {
  PipeSpectrum s(state);
  s.step(dt, dw);
  return s.physical();
}

PseudoFrame evolve_pseudo_frame(double dt, std::size_t n_steps, std::uint64_t seed, std::uint64_t path, double T0,
                                double eta0) {
  if (!(T0 > 0.0)) throw std::invalid_argument("pseudo frame needs T0 > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("pseudo frame needs dt > 0");
  const NoiseStream noise(seed, path);
  PseudoFrame f;
  f.t.resize(n_steps + 1);
  f.T.resize(n_steps + 1);
  f.eta.resize(n_steps + 1);
  f.dw.resize(n_steps);
  f.t[0] = 0.0;
  f.T[0] = T0;
  f.eta[0] = eta0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double dw = noise.increment(channel::kAdvection, n, dt);
    const double T = f.T[n], e = f.eta[n];
    const double ep = e - e * dt + dw;
    f.dw[n] = dw;
    f.eta[n + 1] = e - 0.5 * (e + ep) * dt + dw;
    f.T[n + 1] = T + 0.5 * (e + ep) * dw;
    f.t[n + 1] = static_cast<double>(n + 1) * dt;
    if (f.T[n + 1] < T) ++f.reversals;
    if (f.T[n + 1] <= 0.0 && !f.flagged) {
      f.flagged = true;
      f.flagged_at = n + 1;
    }
  }
  return f;
}

MeanDiff mean_diff_transform(const PipePair& pair, double T, const UniformGrid& xi) {
  if (!(T > 0.0)) throw std::domain_error("mean_diff_transform needs T > 0");
  const double sT = std::sqrt(T);
  const std::size_t n = pair.x.count;
  std::vector<double> m(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = 0.5 * (pair.u1[i] + pair.u2[i]);
    d[i] = 0.5 * (pair.u1[i] - pair.u2[i]);
  }
  UniformGrid x_target{xi.origin * sT, xi.spacing * sT, xi.count};
  auto u = resample_pchip(pair.x, m, x_target);
  for (double& v : u) v *= sT;
  return {xi, std::move(u), std::move(d)};
}

SlavingReport check_slaving(const std::vector<SlavingSample>& traj, double eta_min) {
  SlavingReport r;
  for (const auto& s : traj) {
    if (std::abs(s.eta) <= eta_min) {
      ++r.skipped;
      continue;
    }
    r.tau.push_back(s.tau);
    r.deviation.push_back(PipeSpectrum(s.pair).slaving_deviation(s.eta));
  }
  if (r.tau.size() >= 3) r.rate = fit_line(r.tau, [&] {
                                   std::vector<double> l(r.deviation.size());
                                   for (std::size_t i = 0; i < l.size(); ++i) l[i] = std::log(r.deviation[i]);
                                   return l;
                                 }()).slope;
  return r;
}

MixingPath simulate_mixing(const MixingOptions& o, std::uint64_t seed, std::uint64_t path) {
  if (o.sample_every == 0) throw std::invalid_argument("sample_every must be positive");
  if (!(o.release_width > 0.0)) throw std::invalid_argument("release_width must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(o.horizon / o.dt));
  const auto frame = evolve_pseudo_frame(o.dt, steps, seed, path, o.T0, o.eta0);

  PipePair p0;
  p0.x = periodic_grid(o.length, o.n_points);
  p0.u1.resize(o.n_points);
  p0.u2.assign(o.n_points, 0.0);
  const double s2 = o.release_width * o.release_width;
  for (std::size_t i = 0; i < o.n_points; ++i) {
    const double x = p0.x.at(i);
    p0.u1[i] = std::exp(-0.5 * x * x / s2) / std::sqrt(2.0 * std::numbers::pi * s2);
  }
  PipeSpectrum spec(p0);

  MixingPath out;
  out.flagged = frame.flagged;
  out.reversals = frame.reversals;
  out.steps = steps;
  double Tmax = -1.0;
  auto sample = [&](std::size_t n) {
    const double T = frame.T[n], eta = frame.eta[n];
    const bool rec = T > Tmax;
    if (rec) Tmax = T;
    out.t.push_back(frame.t[n]);
    out.T.push_back(T);
    out.eta.push_back(eta);
    out.variance.push_back(spec.mean_variance());
    out.mass.push_back(spec.mass());
    out.deviation.push_back(std::abs(eta) > o.eta_min ? spec.slaving_deviation(eta)
                                                     : std::numeric_limits<double>::quiet_NaN());
    out.record.push_back(rec ? 1 : 0);
  };
  sample(0);
  for (std::size_t n = 0; n < steps; ++n) {
    spec.step(o.dt, frame.dw[n]);
    if ((n + 1) % o.sample_every == 0)
      sample(n + 1);
    else
      Tmax = std::max(Tmax, frame.T[n + 1]);
  }
  out.final_state = spec.physical();
  return out;
}

}  // namespace similab
