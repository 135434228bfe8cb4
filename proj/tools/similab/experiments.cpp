#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <thread>

#include <similab/frames.hpp>
#include <similab/galerkin.hpp>
#include <similab/hermite.hpp>
#include <similab/mixing.hpp>
#include <similab/origin_tracking.hpp>
#include <similab/parallel.hpp>
#include <similab/pde_sim.hpp>
#include <similab/rng.hpp>
#include <similab/slow_manifold.hpp>
#include <similab/stats.hpp>

#ifndef SIMILAB_VERSION
#define SIMILAB_VERSION "unknown"
#endif

namespace similab::cli {

using json = nlohmann::ordered_json;

void RunContext::check_deadline() const {
  if (std::chrono::steady_clock::now() > deadline) throw BudgetExceeded("experiment exceeded its wall-clock budget");
}

std::string code_version() { return SIMILAB_VERSION; }

namespace {

// ---------------------------------------------------------------- helpers

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

double positive(const Config& c, const std::string& key) {
  const double v = c.number(key);
  require(std::isfinite(v) && v > 0.0, key + " must be positive");
  return v;
}

std::size_t count(const Config& c, const std::string& key, std::int64_t min = 1) {
  const auto v = c.integer(key);
  require(v >= min, key + " must be at least " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

std::size_t steps_for(double span, double dt, const std::string& what) {
  const double r = span / dt;
  require(r >= 1.0 - 1e-9 && r < 1e9, what + " must cover at least one step and at most 1e9");
  return static_cast<std::size_t>(std::llround(r));
}

NoiseSpectrum spectrum_of(const Config& c, const std::string& key, bool conservative = false) {
  auto b = c.numbers(key);
  for (double x : b) require(std::isfinite(x), key + " entries must be finite");
  require(b.size() <= channel::kModeChannels, key + " has too many modes");
  try {
    return NoiseSpectrum(std::move(b), conservative);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::vector<double> mode_increments(const NoiseSpectrum& sp, const NoiseStream& ns, std::size_t step, double dt) {
  std::vector<double> dw(sp.modes(), 0.0);
  for (std::size_t k = 0; k < sp.modes(); ++k)
    if (sp.b[k] != 0.0) dw[k] = ns.increment(static_cast<std::uint32_t>(k), step, dt);
  return dw;
}

double gaussian(double x, double centre, double sd) {
  const double z = (x - centre) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

/// Per-record accumulators, merged in block order so results do not depend
/// on the thread count.
struct Moments {
  std::vector<RunningStats> s;
  explicit Moments(std::size_t n = 0) : s(n) {}
  void merge(const Moments& o) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i].merge(o.s[i]);
  }
};

template <class Acc, class Make, class PerPath>
Acc ensemble(std::size_t n_paths, const RunContext& ctx, Make make, PerPath per_path) {
  std::vector<Acc> blocks;
  const std::size_t nb = block_count(n_paths);
  blocks.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) blocks.push_back(make());
  parallel_blocks(n_paths, ctx.threads, [&](std::size_t begin, std::size_t end, std::size_t bi) {
    ctx.check_deadline();
    for (std::size_t p = begin; p < end; ++p) per_path(blocks[bi], p);
  });
  Acc total = make();
  for (const auto& b : blocks) total.merge(b);
  return total;
}

Bundle make_bundle(const std::string& name) {
  Bundle b;
  b.experiment = name;
  return b;
}

// ------------------------------------------------------------ modal-linear

Bundle run_modal_linear(const Config& c, const RunContext& ctx) {
  const auto sp = spectrum_of(c, "b");
  const double dtau = positive(c, "dtau");
  const double horizon = positive(c, "horizon");
  const std::size_t steps = steps_for(horizon, dtau, "horizon");
  const std::size_t every = steps_for(positive(c, "record_interval"), dtau, "record_interval");
  auto u0 = c.numbers("u0");
  const std::size_t n = sp.modes();
  require(u0.size() <= n, "u0 has more entries than b");
  u0.resize(n, 0.0);
  const std::size_t n_rec = (steps + every - 1) / every + 1;

  struct Acc {
    Moments m;
    double mode0_dev = 0.0;
    void merge(const Acc& o) {
      m.merge(o.m);
      mode0_dev = std::max(mode0_dev, o.mode0_dev);
    }
  };
  auto acc = ensemble<Acc>(
      ctx.paths, ctx, [&] { return Acc{Moments(n_rec * n)}; },
      [&](Acc& a, std::size_t p) {
        const NoiseStream ns(ctx.seed, p);
        std::vector<double> u = u0;
        double w0 = 0.0;
        std::size_t done = 0;
        for (std::size_t k = 0; k < n; ++k) a.m.s[k].add(u[k]);
        for (std::size_t r = 1; r < n_rec; ++r) {
          const std::size_t chunk = std::min(every, steps - done);
          advance_modal(u, sp, nullptr, false, dtau, ns, done, chunk);
          if (sp.b[0] != 0.0)
            for (std::size_t s = done; s < done + chunk; ++s) w0 += ns.increment(0, s, dtau);
          done += chunk;
          for (std::size_t k = 0; k < n; ++k) a.m.s[r * n + k].add(u[k]);
          a.mode0_dev = std::max(a.mode0_dev, std::abs(u[0] - (u0[0] + sp.b[0] * w0)));
        }
      });

  Bundle b = make_bundle("modal-linear");
  Series s{"moments", {"tau"}, {}};
  for (std::size_t k = 0; k < n; ++k) {
    s.columns.push_back("mean_u" + std::to_string(k));
    s.columns.push_back("var_u" + std::to_string(k));
  }
  for (std::size_t r = 0; r < n_rec; ++r) {
    std::vector<double> row{std::min(static_cast<double>(r * every), static_cast<double>(steps)) * dtau};
    for (std::size_t k = 0; k < n; ++k) {
      row.push_back(acc.m.s[r * n + k].mean());
      row.push_back(acc.m.s[r * n + k].variance());
    }
    s.add(row);
  }
  b.series.push_back(std::move(s));
  double worst = 0.0;
  json modes = json::array();
  for (std::size_t k = 1; k < n; ++k) {
    if (sp.b[k] == 0.0) continue;
    const double v = acc.m.s[(n_rec - 1) * n + k].variance();
    const double expect = sp.b[k] * sp.b[k] / static_cast<double>(k);
    const double rel = std::abs(v / expect - 1.0);
    worst = std::max(worst, rel);
    modes.push_back({{"k", k}, {"variance", v}, {"expected", expect}, {"rel_err", rel}});
  }
  b.summary["stationary_variance"] = modes;
  b.summary["max_rel_err"] = worst;
  b.summary["mode0_max_deviation"] = acc.mode0_dev;
  return b;
}

// ------------------------------------------------------------- modal-cubic

Bundle run_modal_cubic(const Config& c, const RunContext& ctx) {
  const auto sp = spectrum_of(c, "b");
  const int kmax = static_cast<int>(count(c, "k_max"));
  require(kmax <= 16, "k_max must be at most 16");
  require(sp.modes() <= static_cast<std::size_t>(kmax + 1), "b has more entries than k_max + 1");
  const double a0 = c.number("a0");
  const double dtau = positive(c, "dtau");
  const double horizon = positive(c, "horizon");
  const std::size_t steps = steps_for(horizon, dtau, "horizon");
  const std::size_t every = steps_for(positive(c, "record_interval"), dtau, "record_interval");
  const double lo = c.number("fit_lo"), hi = c.number("fit_hi");
  require(lo < hi && hi <= horizon + 1e-12, "fit window must satisfy fit_lo < fit_hi <= horizon");
  const CubicTensor tensor{BasisSpec(kmax)};
  const std::size_t n = static_cast<std::size_t>(kmax + 1);
  const std::size_t n_rec = (steps + every - 1) / every + 1;

  auto acc = ensemble<Moments>(
      ctx.paths, ctx, [&] { return Moments(2 * n_rec); },
      [&](Moments& m, std::size_t p) {
        const NoiseStream ns(ctx.seed, p);
        std::vector<double> u(n, 0.0);
        u[0] = a0;
        std::size_t done = 0;
        m.s[0].add(u[0]);
        m.s[n_rec].add(u.size() > 1 ? u[1] * u[1] : 0.0);
        for (std::size_t r = 1; r < n_rec; ++r) {
          const std::size_t chunk = std::min(every, steps - done);
          advance_modal(u, sp, &tensor, true, dtau, ns, done, chunk);
          done += chunk;
          m.s[r].add(u[0]);
          m.s[n_rec + r].add(u[1] * u[1]);
        }
      });

  Bundle b = make_bundle("modal-cubic");
  Series s{"mean_amplitude", {"tau", "mean_u0", "stderr_u0", "mean_u1_sq"}, {}};
  std::vector<double> tau(n_rec), mean(n_rec);
  for (std::size_t r = 0; r < n_rec; ++r) {
    tau[r] = std::min(static_cast<double>(r * every), static_cast<double>(steps)) * dtau;
    mean[r] = acc.s[r].mean();
    s.add({tau[r], mean[r], acc.s[r].std_error(), acc.s[n_rec + r].mean()});
  }
  b.series.push_back(std::move(s));
  const auto fit = fit_rate(tau, mean, lo, hi, ctx.seed);
  const double alpha = slow_drift_exponent(sp);
  b.summary["decay_rate"] = -fit.rate;
  b.summary["decay_rate_ci"] = {-fit.ci_high, -fit.ci_low};
  b.summary["fit_samples"] = fit.samples;
  b.summary["alpha_expected"] = alpha;
  b.summary["rel_err"] = alpha != 0.0 ? std::abs(-fit.rate / alpha - 1.0) : std::numeric_limits<double>::quiet_NaN();
  return b;
}

// -------------------------------------------------------------- slow-model

Bundle run_slow_model(const Config& c, const RunContext& ctx) {
  const auto sp = spectrum_of(c, "b");
  require(sp.modes() <= 9, "the slow model has modes 0..8");
  const double a0 = c.number("a0");
  const double dtau = positive(c, "dtau");
  const double horizon = positive(c, "horizon");
  const std::size_t steps = steps_for(horizon, dtau, "horizon");
  const std::size_t every = steps_for(positive(c, "record_interval"), dtau, "record_interval");
  const double lo = c.number("fit_lo"), hi = c.number("fit_hi");
  require(lo < hi && hi <= horizon + 1e-12, "fit window must satisfy fit_lo < fit_hi <= horizon");
  require(steps % every == 0, "horizon must be a multiple of record_interval");
  const std::size_t n_rec = steps / every + 1;

  auto acc = ensemble<Moments>(
      ctx.paths, ctx, [&] { return Moments(n_rec); },
      [&](Moments& m, std::size_t p) {
        const auto a = simulate_slow(a0, sp, horizon, dtau, ctx.seed, p, every);
        for (std::size_t r = 0; r < n_rec && r < a.size(); ++r) m.s[r].add(a[r]);
      });

  Bundle b = make_bundle("slow-model");
  Series s{"amplitude", {"tau", "mean_a", "stderr_a", "cubic_decay"}, {}};
  std::vector<double> tau(n_rec), mean(n_rec);
  double worst = 0.0;
  for (std::size_t r = 0; r < n_rec; ++r) {
    tau[r] = static_cast<double>(r * every) * dtau;
    mean[r] = acc.s[r].mean();
    const double cd = cubic_decay(a0, tau[r]);
    worst = std::max(worst, std::abs(mean[r] - cd) / std::abs(cd));
    s.add({tau[r], mean[r], acc.s[r].std_error(), cd});
  }
  b.series.push_back(std::move(s));
  const auto fit = fit_rate(tau, mean, lo, hi, ctx.seed);
  b.summary["max_rel_dev_from_cubic_decay"] = worst;
  b.summary["decay_rate"] = -fit.rate;
  b.summary["decay_rate_ci"] = {-fit.ci_high, -fit.ci_low};
  b.summary["alpha"] = slow_drift_exponent(sp);
  return b;
}

// ---------------------------------------------------- normal-form-residual

Bundle run_normal_form_residual(const Config& c, const RunContext& ctx) {
  const auto eps = c.numbers("eps");
  require(eps.size() >= 2, "eps needs at least two values");
  for (double e : eps) require(e > 0.0 && e <= 0.3, "eps values must lie in (0, 0.3]");
  ResidualOptions opts;
  opts.noise_exponent = positive(c, "noise_exponent");
  opts.samples = count(c, "samples");
  opts.seed = ctx.seed;
  const auto sp = spectrum_of(c, "b");
  require(sp.modes() == 3, "b must list b_0, b_1, b_2");
  const double a = c.number("a");
  const double dtau = positive(c, "dtau");
  const std::size_t steps = steps_for(positive(c, "horizon"), dtau, "horizon");

  Bundle b = make_bundle("normal-form-residual");
  Series s{"residuals", {"eps", "residual", "residual_linear_transform", "residual_noise_eps1"}, {}};
  std::vector<double> r, rc, r1;
  for (double e : eps) {
    ctx.check_deadline();
    auto o = opts;
    r.push_back(residual_order_check(e, o));
    o.cubic_corrections = false;
    rc.push_back(residual_order_check(e, o));
    o = opts;
    o.noise_exponent = 1.0;
    r1.push_back(residual_order_check(e, o));
    s.add({e, r.back(), rc.back(), r1.back()});
  }
  b.series.push_back(std::move(s));
  b.summary["slope"] = loglog_slope(eps, r);
  b.summary["slope_linear_transform"] = loglog_slope(eps, rc);
  b.summary["slope_noise_eps1"] = loglog_slope(eps, r1);

  struct Acc {
    double max_u12 = 0.0;
    RunningStats final_u0;
    void merge(const Acc& o) {
      max_u12 = std::max(max_u12, o.max_u12);
      final_u0.merge(o.final_u0);
    }
  };
  auto acc = ensemble<Acc>(
      ctx.paths, ctx, [] { return Acc{}; },
      [&](Acc& acc, std::size_t p) {
        NormalFormState s0;
        s0.U = {a, 0.0, 0.0};
        const auto path = simulate_normal_form(s0, sp, steps, dtau, NoiseStream(ctx.seed, p));
        for (const auto& st : path.states)
          acc.max_u12 = std::max({acc.max_u12, std::abs(st.U[1]), std::abs(st.U[2])});
        acc.final_u0.add(path.states.back().U[0]);
      });
  b.summary["invariance_max_abs_U12"] = acc.max_u12;
  b.summary["invariance_mean_final_U0"] = acc.final_u0.mean();
  return b;
}

// ------------------------------------------------------ origin-compensation

Bundle run_origin_compensation(const Config& c, const RunContext& ctx) {
  CompensationOptions o;
  o.a = c.number("a");
  o.b1 = c.number("b1");
  o.b2 = c.number("b2");
  o.horizon = positive(c, "horizon");
  o.dtau = positive(c, "dtau");
  o.t0 = c.number("t0");
  o.u2_0 = c.number("u2_0");
  require(o.a != 0.0, "a must be nonzero");
  const std::size_t steps = steps_for(o.horizon, o.dtau, "horizon");
  o.record_every = steps_for(positive(c, "record_interval"), o.dtau, "record_interval");
  require(steps % o.record_every == 0, "horizon must be a multiple of record_interval");
  const std::size_t n_rec = steps / o.record_every + 1;

  struct Acc {
    Moments off1, off2;
    std::vector<double> max1, max2;
    void merge(const Acc& a) {
      off1.merge(a.off1);
      off2.merge(a.off2);
      for (std::size_t i = 0; i < max1.size(); ++i) {
        max1[i] = std::max(max1[i], a.max1[i]);
        max2[i] = std::max(max2[i], a.max2[i]);
      }
    }
  };
  auto acc = ensemble<Acc>(
      ctx.paths, ctx,
      [&] { return Acc{Moments(n_rec), Moments(n_rec), std::vector<double>(n_rec), std::vector<double>(n_rec)}; },
      [&](Acc& a, std::size_t p) {
        auto on = o;
        on.compensation = true;
        auto off = o;
        off.compensation = false;
        const auto pon = simulate_compensated_modes(on, ctx.seed, p);
        const auto poff = simulate_compensated_modes(off, ctx.seed, p);
        for (std::size_t r = 0; r < n_rec; ++r) {
          a.off1.s[r].add(poff.u1[r]);
          a.off2.s[r].add(poff.u2[r]);
          a.max1[r] = std::max(a.max1[r], std::abs(pon.u1[r]));
          a.max2[r] = std::max(a.max2[r], std::abs(pon.u2[r]));
        }
      });

  Bundle b = make_bundle("origin-compensation");
  Series s{"modes", {"tau", "var_u1_free", "var_u2_free", "max_abs_u1_compensated", "max_abs_u2_compensated"}, {}};
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < n_rec; ++r) {
    s.add({static_cast<double>(r * o.record_every) * o.dtau, acc.off1.s[r].variance(), acc.off2.s[r].variance(),
           acc.max1[r], acc.max2[r]});
    m1 = std::max(m1, acc.max1[r]);
    m2 = std::max(m2, acc.max2[r]);
  }
  b.series.push_back(std::move(s));
  const double v1 = acc.off1.s[n_rec - 1].variance();
  b.summary["compensated_max_abs_u1"] = m1;
  b.summary["compensated_max_abs_u2"] = m2;
  b.summary["free_var_u1"] = v1;
  b.summary["free_var_u1_expected"] = o.b1 * o.b1;
  b.summary["free_var_u1_rel_err"] = o.b1 != 0.0 ? std::abs(v1 / (o.b1 * o.b1) - 1.0) : 0.0;
  b.summary["free_var_u2"] = acc.off2.s[n_rec - 1].variance();
  b.summary["free_var_u2_expected"] = 0.5 * o.b2 * o.b2;
  return b;
}

// ------------------------------------------------------- pseudotime-moments

Bundle run_pseudotime_moments(const Config& c, const RunContext& ctx) {
  const double t0 = c.number("t0");
  const double a = c.number("a");
  const double b1 = c.number("b1");
  const double b2 = c.number("b2");
  const double T_max = positive(c, "T_max");
  const double dT = positive(c, "dT");
  require(a != 0.0, "a must be nonzero");
  require(b2 != 0.0, "b2 must be nonzero for the moment checks");
  const std::size_t steps = steps_for(T_max, dT, "T_max");
  const std::size_t every = steps_for(positive(c, "record_interval"), dT, "record_interval");
  require(steps % every == 0, "T_max must be a multiple of record_interval");
  const std::size_t n_rec = steps / every + 1;
  std::vector<double> Tg(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) Tg[n] = static_cast<double>(n) * dT;
  const double scale = 2.0 * b2 / a;

  struct Acc {
    Moments t, I, X;
    RunningStats reversal_fraction;
    void merge(const Acc& o) {
      t.merge(o.t);
      I.merge(o.I);
      X.merge(o.X);
      reversal_fraction.merge(o.reversal_fraction);
    }
  };
  auto acc = ensemble<Acc>(
      ctx.paths, ctx, [&] { return Acc{Moments(n_rec), Moments(n_rec), Moments(n_rec), {}}; },
      [&](Acc& acc, std::size_t p) {
        const auto pt = build_pseudotime_path(t0, a, b2, Tg, ctx.seed, p);
        const auto op = build_origin_path(a, b1, Tg, ctx.seed, p);
        for (std::size_t r = 0; r < n_rec; ++r) {
          const std::size_t n = r * every;
          acc.t.s[r].add(pt.t[n]);
          acc.I.s[r].add((pt.t[n] - t0 - Tg[n]) / scale);
          acc.X.s[r].add(op.X[n]);
        }
        acc.reversal_fraction.add(static_cast<double>(pt.reversals) / static_cast<double>(steps));
      });

  Bundle b = make_bundle("pseudotime-moments");
  Series s{"moments", {"T", "mean_t", "var_integral", "half_T_sq", "std_fluctuation", "var_X", "var_X_expected"}, {}};
  std::vector<double> Ts, sd;
  for (std::size_t r = 0; r < n_rec; ++r) {
    const double T = Tg[r * every];
    const double vI = acc.I.s[r].variance();
    const double sdf = std::abs(scale) * std::sqrt(vI);
    s.add({T, acc.t.s[r].mean(), vI, 0.5 * T * T, sdf, acc.X.s[r].variance(), 2.0 * b1 * b1 * T / (a * a)});
    if (T >= 0.1 * T_max - 1e-12 && r > 0) {
      Ts.push_back(T);
      sd.push_back(sdf);
    }
  }
  b.series.push_back(std::move(s));
  const auto& tl = acc.t.s[n_rec - 1];
  const double vI = acc.I.s[n_rec - 1].variance();
  b.summary["mean_t"] = tl.mean();
  b.summary["mean_t_expected"] = t0 + T_max;
  b.summary["mean_t_rel_err"] = std::abs(tl.mean() / (t0 + T_max) - 1.0);
  b.summary["var_integral"] = vI;
  b.summary["var_integral_expected"] = 0.5 * T_max * T_max;
  b.summary["var_integral_rel_err"] = std::abs(vI / (0.5 * T_max * T_max) - 1.0);
  b.summary["fluctuation_growth_exponent"] = loglog_slope(Ts, sd);
  if (b1 != 0.0) {
    const double vX = acc.X.s[n_rec - 1].variance();
    b.summary["var_X_rel_err"] = std::abs(vX / (2.0 * b1 * b1 * T_max / (a * a)) - 1.0);
  }
  const auto& rf = acc.reversal_fraction;
  b.summary["reversal_fraction"] = rf.mean();
  b.summary["reversal_fraction_ci"] = {rf.mean() - 1.96 * rf.std_error(), rf.mean() + 1.96 * rf.std_error()};
  return b;
}

// ------------------------------------------------------------------ mixing

struct MixingEnsemble {
  Moments T, var, eta;
  double max_mass_drift = 0.0;
  std::size_t flagged = 0, reversals = 0, steps = 0;
  RunningStats reversal_fraction;
  std::vector<double> lo_bin, hi_bin;
  std::size_t skipped = 0, accepted = 0;
  std::vector<std::array<double, 4>> gauss;  ///< |u_k|/|u_0|, k = 1..4, per path

  void merge(const MixingEnsemble& o) {
    T.merge(o.T);
    var.merge(o.var);
    eta.merge(o.eta);
    max_mass_drift = std::max(max_mass_drift, o.max_mass_drift);
    flagged += o.flagged;
    reversals += o.reversals;
    steps += o.steps;
    reversal_fraction.merge(o.reversal_fraction);
    lo_bin.insert(lo_bin.end(), o.lo_bin.begin(), o.lo_bin.end());
    hi_bin.insert(hi_bin.end(), o.hi_bin.begin(), o.hi_bin.end());
    skipped += o.skipped;
    accepted += o.accepted;
    gauss.insert(gauss.end(), o.gauss.begin(), o.gauss.end());
  }
};

Bundle run_mixing(const Config& c, const RunContext& ctx, const std::string& name) {
  MixingOptions o;
  o.length = positive(c, "length");
  o.n_points = count(c, "n_points", 8);
  require(o.n_points % 2 == 0, "n_points must be even");
  o.dt = positive(c, "dt");
  o.horizon = positive(c, "horizon");
  o.T0 = positive(c, "T0");
  o.eta0 = c.number("eta0");
  o.release_width = positive(c, "release_width");
  o.sample_every = count(c, "sample_every");
  o.eta_min = c.number("eta_min");
  const double fit_from = c.number("fit_from");
  const double lo = c.number("slaving_lo"), hi = c.number("slaving_hi"), width = positive(c, "slaving_width");
  const double xi_half = positive(c, "xi_half_width");
  const std::size_t xi_points = count(c, "xi_points", 16);
  const std::size_t steps = steps_for(o.horizon, o.dt, "horizon");
  require(steps % o.sample_every == 0, "horizon must be a multiple of dt * sample_every");
  require(fit_from >= 0.0 && fit_from < o.horizon, "fit_from must lie in [0, horizon)");
  const std::size_t n_rec = steps / o.sample_every + 1;
  const auto xi = UniformGrid::symmetric(xi_half, xi_points);
  const BasisSpec basis(4);

  auto acc = ensemble<MixingEnsemble>(
      ctx.paths, ctx,
      [&] {
        MixingEnsemble m;
        m.T = m.var = m.eta = Moments(n_rec);
        return m;
      },
      [&](MixingEnsemble& a, std::size_t p) {
        const auto m = simulate_mixing(o, ctx.seed, p);
        for (std::size_t r = 0; r < n_rec; ++r) {
          a.T.s[r].add(m.T[r]);
          a.var.s[r].add(m.variance[r]);
          a.eta.s[r].add(m.eta[r]);
          a.max_mass_drift = std::max(a.max_mass_drift, std::abs(m.mass[r] / m.mass[0] - 1.0));
          if (!(m.T[r] > 0.0) || !m.record[r]) continue;
          if (std::isnan(m.deviation[r])) {
            ++a.skipped;
            continue;
          }
          ++a.accepted;
          const double tau = std::log(m.T[r]);
          if (tau >= lo && tau <= lo + width) a.lo_bin.push_back(m.deviation[r]);
          if (tau >= hi && tau <= hi + width) a.hi_bin.push_back(m.deviation[r]);
        }
        a.flagged += m.flagged ? 1 : 0;
        a.reversals += m.reversals;
        a.steps += m.steps;
        a.reversal_fraction.add(static_cast<double>(m.reversals) / static_cast<double>(m.steps));
        if (m.T.back() > 0.0) {
          const auto md = mean_diff_transform(m.final_state, m.T.back(), xi);
          const auto pr = project_field(md.u, xi, basis);
          std::array<double, 4> g{};
          for (int k = 1; k <= 4; ++k) g[k - 1] = std::abs(pr.coeffs[k]) / std::abs(pr.coeffs[0]);
          a.gauss.push_back(g);
        }
      });

  Bundle b = make_bundle(name);
  Series s{"spread", {"t", "mean_T", "mean_variance", "var_eta"}, {}};
  std::vector<double> fT, fV, ft;
  for (std::size_t r = 0; r < n_rec; ++r) {
    const double t = static_cast<double>(r * o.sample_every) * o.dt;
    s.add({t, acc.T.s[r].mean(), acc.var.s[r].mean(), acc.eta.s[r].variance()});
    if (t >= fit_from) {
      fT.push_back(acc.T.s[r].mean());
      fV.push_back(acc.var.s[r].mean());
      ft.push_back(t);
    }
  }
  const double slope_T = fit_line(fT, fV).slope;
  const double ET = acc.T.s[n_rec - 1].mean() - o.T0;
  b.summary["effective_diffusivity"] = 0.5 * slope_T;
  b.summary["variance_slope_per_T"] = slope_T;
  b.summary["variance_slope_per_t"] = fit_line(ft, fV).slope;
  b.summary["mean_T_growth"] = ET;
  b.summary["mean_T_growth_expected"] = 0.5 * o.horizon;
  b.summary["mean_T_growth_rel_err"] = std::abs(ET / (0.5 * o.horizon) - 1.0);
  b.summary["max_rel_mass_drift"] = acc.max_mass_drift;
  b.summary["flagged_paths"] = acc.flagged;
  const auto& rf = acc.reversal_fraction;
  b.summary["reversal_fraction"] = rf.mean();
  b.summary["reversal_fraction_ci"] = {rf.mean() - 1.96 * rf.std_error(), rf.mean() + 1.96 * rf.std_error()};

  const double mlo = acc.lo_bin.empty() ? std::numeric_limits<double>::quiet_NaN() : median(acc.lo_bin);
  const double mhi = acc.hi_bin.empty() ? std::numeric_limits<double>::quiet_NaN() : median(acc.hi_bin);
  b.summary["slaving_median_early"] = mlo;
  b.summary["slaving_median_late"] = mhi;
  b.summary["slaving_samples_early"] = acc.lo_bin.size();
  b.summary["slaving_samples_late"] = acc.hi_bin.size();
  b.summary["slaving_drop_ratio"] = mlo / mhi;
  b.summary["slaving_skipped"] = acc.skipped;
  b.summary["slaving_accepted"] = acc.accepted;
  json gm = json::array();
  for (int k = 0; k < 4; ++k) {
    std::vector<double> v;
    for (const auto& g : acc.gauss) v.push_back(g[k]);
    gm.push_back(v.empty() ? std::numeric_limits<double>::quiet_NaN() : median(v));
  }
  b.summary["gaussian_mode_ratio_medians"] = gm;

  if (name == "mixing-spread") {
    b.series.push_back(std::move(s));
  } else {
    Series d{"slaving", {"bin", "tau_lo", "tau_hi", "samples", "median_deviation"}, {}};
    d.add({0.0, lo, lo + width, static_cast<double>(acc.lo_bin.size()), mlo});
    d.add({1.0, hi, hi + width, static_cast<double>(acc.hi_bin.size()), mhi});
    b.series.push_back(std::move(d));
  }
  return b;
}

// ------------------------------------------------------- burgers-similarity

Bundle run_burgers_similarity(const Config& c, const RunContext& ctx) {
  GridConfig g{positive(c, "half_width"), count(c, "n_points"), positive(c, "dtau"), Scheme::Similarity};
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double horizon = positive(c, "horizon");
  const double ref_horizon = positive(c, "reference_horizon");
  const double mass = positive(c, "mass");
  const double offset = c.number("offset");
  const double lo = c.number("fit_lo"), hi = c.number("fit_hi");
  require(lo < hi && hi <= horizon + 1e-12, "fit window must satisfy fit_lo < fit_hi <= horizon");
  require(ref_horizon > horizon, "reference_horizon must exceed horizon");
  const auto sp = spectrum_of(c, "b", true);
  const double c_horizon = positive(c, "contraction_horizon");
  const std::size_t every = steps_for(positive(c, "sample_interval"), g.dt, "sample_interval");
  const std::size_t steps = steps_for(horizon, g.dt, "horizon");
  const std::size_t c_steps = steps_for(c_horizon, g.dt, "contraction_horizon");
  require(steps % every == 0 && c_steps % every == 0, "horizons must be multiples of sample_interval");

  GridSolver solver(g, static_cast<int>(std::max<std::size_t>(1, sp.modes())));
  const auto grid = solver.grid();
  std::vector<double> p1(grid.count), p2(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    p1[i] = mass * gaussian(grid.at(i), offset, 1.0);
    p2[i] = mass * gaussian(grid.at(i), -offset, 0.5);
  }
  const double scale = grid_mass(p1, grid.spacing) / grid_mass(p2, grid.spacing);
  for (double& v : p2) v *= scale;

  // Deterministic convergence toward the stationary profile.
  const NoiseSpectrum none;
  auto ref = solver.make_state(p1, 0.0);
  const std::size_t ref_steps = steps_for(ref_horizon, g.dt, "reference_horizon");
  for (std::size_t n = 0; n < ref_steps; ++n) solver.step_burgers_similarity(ref, none, {});
  const auto analytic = stationary_burgers(ref.mass, grid);
  double ana_dev = 0.0;
  for (std::size_t i = 0; i < grid.count; ++i) ana_dev = std::max(ana_dev, std::abs(analytic[i] - ref.values[i]));

  Bundle b = make_bundle("burgers-similarity");
  Series conv{"convergence", {"tau", "l2k_distance", "h1k_distance", "linf_distance", "mass", "boundary_ratio"}, {}};
  auto st = solver.make_state(p1, 0.0);
  std::vector<double> tau, dist;
  std::vector<double> diff(grid.count);
  double max_boundary = 0.0;
  for (std::size_t n = 0;; ++n) {
    if (n % every == 0) {
      for (std::size_t i = 0; i < grid.count; ++i) diff[i] = st.values[i] - ref.values[i];
      const double l2 = weighted_norm(diff, grid, NormKind::L2K);
      tau.push_back(st.time);
      dist.push_back(l2);
      max_boundary = std::max(max_boundary, solver.boundary_ratio(st));
      conv.add({st.time, l2, weighted_norm(diff, grid, NormKind::H1K), weighted_norm(diff, grid, NormKind::Linf),
                st.mass, solver.boundary_ratio(st)});
    }
    if (n == steps) break;
    solver.step_burgers_similarity(st, none, {});
  }
  b.series.push_back(std::move(conv));
  const auto fit = fit_rate(tau, dist, lo, hi, ctx.seed);
  b.summary["decay_rate"] = -fit.rate;
  b.summary["decay_rate_ci"] = {-fit.ci_high, -fit.ci_low};
  b.summary["stationary_mass"] = ref.mass;
  b.summary["stationary_vs_analytic_max_abs"] = ana_dev;
  b.summary["max_boundary_ratio"] = max_boundary;

  // Paired runs under one conservative noise realization.
  const std::size_t n_samp = c_steps / every + 1;
  struct Acc {
    std::size_t increments = 0, decreasing = 0, ch_increments = 0, ch_decreasing = 0;
    double max_mass_drift_rate = 0.0;
    std::vector<std::vector<double>> rows;
    void merge(const Acc& o) {
      increments += o.increments;
      decreasing += o.decreasing;
      ch_increments += o.ch_increments;
      ch_decreasing += o.ch_decreasing;
      max_mass_drift_rate = std::max(max_mass_drift_rate, o.max_mass_drift_rate);
      rows.insert(rows.end(), o.rows.begin(), o.rows.end());
    }
  };
  Acc pairs;
  if (sp.modes() > 0) {
    pairs = ensemble<Acc>(
        ctx.paths, ctx, [] { return Acc{}; },
        [&](Acc& a, std::size_t p) {
          GridSolver s(g, static_cast<int>(sp.modes()));
          const NoiseStream ns(ctx.seed, p);
          auto u = s.make_state(p1, 0.0), v = s.make_state(p2, 0.0);
          const double m0 = u.mass;
          std::vector<std::vector<double>> su, sv;
          std::vector<double> ch, diff(grid.count);
          for (std::size_t n = 0;; ++n) {
            if (n % every == 0) {
              su.push_back(u.values);
              sv.push_back(v.values);
              const auto cu = cole_hopf(u.values, grid), cv = cole_hopf(v.values, grid);
              for (std::size_t i = 0; i < grid.count; ++i) diff[i] = cu[i] - cv[i];
              ch.push_back(weighted_norm(diff, grid, NormKind::L2K));
            }
            if (n == c_steps) break;
            const auto dw = mode_increments(sp, ns, n, g.dt);
            s.step_burgers_similarity(u, sp, dw);
            s.step_burgers_similarity(v, sp, dw);
            a.max_mass_drift_rate = std::max(a.max_mass_drift_rate, std::abs(u.mass - m0) / u.time);
          }
          const auto phi = contraction_diagnostic(su, sv, grid);
          for (std::size_t k = 0; k < phi.size(); ++k) {
            a.rows.push_back({static_cast<double>(p), static_cast<double>(k * every) * g.dt, phi[k], ch[k]});
            if (k == 0) continue;
            ++a.increments;
            ++a.ch_increments;
            if (phi[k] < phi[k - 1]) ++a.decreasing;
            if (ch[k] <= ch[k - 1]) ++a.ch_decreasing;
          }
        });
    Series cs{"contraction", {"path", "tau", "phi", "cole_hopf_l2k"}, std::move(pairs.rows)};
    b.series.push_back(std::move(cs));
    b.summary["contraction_samples_per_path"] = n_samp;
    b.summary["contraction_increments"] = pairs.increments;
    b.summary["contraction_decreasing_fraction"] =
        static_cast<double>(pairs.decreasing) / static_cast<double>(std::max<std::size_t>(1, pairs.increments));
    b.summary["cole_hopf_nonincreasing_fraction"] =
        static_cast<double>(pairs.ch_decreasing) / static_cast<double>(std::max<std::size_t>(1, pairs.ch_increments));
    b.summary["max_mass_drift_per_tau"] = pairs.max_mass_drift_rate;
  }
  return b;
}

// --------------------------------------------------------- burgers-physical

/// Steps st to time `target` with full steps and one shortened final step.
template <class Step>
void advance_to(GridSolver& s, BurgersState& st, double target, double dt, Step&& step) {
  while (st.time < target - 1e-12) {
    const double left = target - st.time;
    if (left < dt * (1.0 + 1e-9)) {
      s.set_step(left);
      step(st);
      s.set_step(dt);
      st.time = target;
    } else {
      step(st);
    }
  }
}

Bundle run_burgers_physical(const Config& c, const RunContext& ctx) {
  const double h = positive(c, "spacing");
  const double sim_half = positive(c, "sim_half_width"), phys_half = positive(c, "phys_half_width");
  const double dt = positive(c, "dt");
  const double t_end = positive(c, "t_end");
  const double mass = positive(c, "mass");
  const double offset = c.number("offset");
  const auto compare = c.numbers("compare_at");
  for (double t : compare) require(t > 1.0 && t <= t_end, "compare_at times must lie in (1, t_end]");
  require(std::is_sorted(compare.begin(), compare.end()), "compare_at must be increasing");
  const auto sp = spectrum_of(c, "b");
  const double forced_horizon = positive(c, "forced_horizon");
  auto n_of = [&](double half) { return static_cast<std::size_t>(std::llround(2.0 * half / h)) + 1; };
  GridConfig gs{sim_half, n_of(sim_half), dt, Scheme::Similarity};
  GridConfig gp{phys_half, n_of(phys_half), dt, Scheme::Physical};
  try {
    gs.validate();
    gp.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  GridSolver S(gs), P(gp);
  const auto xs = S.grid(), xp = P.grid();
  std::vector<double> v(xs.count);
  for (std::size_t i = 0; i < xs.count; ++i) v[i] = mass * gaussian(xs.at(i), offset, 1.0);
  auto ss = S.make_state(v, 0.0);
  const auto pf = from_similarity(SimilarityField{0.0, xs, v}, 1.0, xp);
  auto ps = P.make_state(pf.values, 1.0);

  const NoiseSpectrum none;
  Bundle b = make_bundle("burgers-physical");
  Series s{"agreement", {"t", "rel_max_error", "physical_mass", "similarity_mass"}, {}};
  double worst = 0.0;
  for (double t : compare) {
    ctx.check_deadline();
    advance_to(P, ps, t, dt, [&](BurgersState& st) { P.step_burgers_physical(st, {}); });
    advance_to(S, ss, std::log(t), dt, [&](BurgersState& st) { S.step_burgers_similarity(st, none, {}); });
    const auto back = from_similarity(SimilarityField{ss.time, xs, ss.values}, t, xp);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xp.count; ++i) {
      num = std::max(num, std::abs(back.values[i] - ps.values[i]));
      den = std::max(den, std::abs(ps.values[i]));
    }
    worst = std::max(worst, num / den);
    s.add({t, num / den, ps.mass, ss.mass});
  }
  b.series.push_back(std::move(s));
  b.summary["max_rel_error"] = worst;

  // Mass bookkeeping under forcing: the change in mass equals the integrated forcing.
  if (sp.modes() > 0) {
    GridSolver F(gp);
    auto fs = F.make_state(pf.values, 1.0);
    const double m0 = fs.mass;
    const NoiseStream ns(ctx.seed, 0);
    const std::size_t n_steps = steps_for(forced_horizon, dt, "forced_horizon");
    for (std::size_t n = 0; n < n_steps; ++n) {
      const auto dw = mode_increments(sp, ns, n, dt / fs.time);
      F.step_burgers_physical(fs, F.physical_noise(sp, dw, fs.time));
    }
    b.summary["forced_mass_mismatch"] = std::abs(fs.mass - m0 - fs.forced_mass);
    b.summary["forced_mass_change"] = fs.forced_mass;
  }
  return b;
}

// ------------------------------------------------------------ rd-similarity

Bundle run_rd_similarity(const Config& c, const RunContext& ctx) {
  GridConfig g{positive(c, "half_width"), count(c, "n_points"), positive(c, "dtau"), Scheme::Similarity};
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double amp = c.number("amplitude");
  const double horizon = positive(c, "horizon");
  const std::size_t steps = steps_for(horizon, g.dt, "horizon");
  const std::size_t every = steps_for(positive(c, "record_interval"), g.dt, "record_interval");
  require(steps % every == 0, "horizon must be a multiple of record_interval");
  const auto sp = spectrum_of(c, "b");
  const int kmax = static_cast<int>(count(c, "k_max"));
  require(sp.modes() <= static_cast<std::size_t>(kmax + 1), "b has more entries than k_max + 1");
  const BasisSpec basis(kmax);
  const CubicTensor tensor(basis);

  GridSolver solver(g, kmax + 1);
  const auto grid = solver.grid();
  std::vector<double> u0(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) u0[i] = amp * eval_eigenfunction(0, grid.at(i));

  Bundle b = make_bundle("rd-similarity");
  Series s{"amplitude", {"tau", "grid_u0", "cubic_decay"}, {}};
  const NoiseSpectrum none;
  auto st = solver.make_state(u0, 0.0);
  double worst = 0.0;
  for (std::size_t n = 0;; ++n) {
    if (n % every == 0) {
      const double a = project_field(st.values, grid, basis).coeffs[0];
      const double cd = cubic_decay(amp, st.time);
      worst = std::max(worst, std::abs(a / cd - 1.0));
      s.add({st.time, a, cd});
    }
    if (n == steps) break;
    solver.step_rd_similarity(st, none, {});
  }
  b.series.push_back(std::move(s));
  b.summary["max_rel_dev_from_cubic_decay"] = worst;

  if (sp.modes() > 0) {
    struct Acc {
      double max_diff = 0.0;
      void merge(const Acc& o) { max_diff = std::max(max_diff, o.max_diff); }
    };
    auto acc = ensemble<Acc>(
        ctx.paths, ctx, [] { return Acc{}; },
        [&](Acc& a, std::size_t p) {
          GridSolver gsol(g, kmax + 1);
          const NoiseStream ns(ctx.seed, p);
          auto gs = gsol.make_state(u0, 0.0);
          std::vector<double> um(static_cast<std::size_t>(kmax + 1), 0.0);
          um[0] = amp;
          for (std::size_t n = 0; n < steps; n += every) {
            for (std::size_t k = n; k < n + every; ++k) gsol.step_rd_similarity(gs, sp, mode_increments(sp, ns, k, g.dt));
            advance_modal(um, sp, &tensor, true, g.dt, ns, n, every);
            const auto pr = project_field(gs.values, grid, basis);
            for (int k = 0; k <= kmax; ++k) a.max_diff = std::max(a.max_diff, std::abs(pr.coeffs[k] - um[k]));
          }
        });
    b.summary["grid_vs_modal_max_abs"] = acc.max_diff;
  }
  return b;
}

// ---------------------------------------------------------------- registry

std::vector<Experiment> build_registry() {
  std::vector<Experiment> r;
  r.push_back({"burgers-similarity",
               "Burgers in similarity variables: convergence to the stationary profile, mass and contraction under "
               "conservative noise",
               300.0,
               "100",
               {{"half_width", "12", "xi domain half width"},
                {"n_points", "241", "grid points"},
                {"dtau", "0.004", "time step"},
                {"horizon", "14", "deterministic run length"},
                {"reference_horizon", "40", "run length of the stationary reference"},
                {"mass", "2", "mass of the initial bump"},
                {"offset", "1", "centre of the initial bump"},
                {"fit_lo", "4", "rate fit window start"},
                {"fit_hi", "14", "rate fit window end"},
                {"b", "0,0.2,0.2,0.1", "conservative noise amplitudes b_0..b_K"},
                {"contraction_horizon", "5", "paired-run length"},
                {"sample_interval", "0.5", "diagnostic sampling interval in tau"}},
               run_burgers_similarity});
  r.push_back({"burgers-physical",
               "Physical-variable Burgers solver cross-checked against the similarity solver",
               300.0,
               "1",
               {{"spacing", "0.05", "grid spacing in both frames"},
                {"sim_half_width", "12", "similarity domain half width"},
                {"phys_half_width", "60", "physical domain half width"},
                {"dt", "0.001", "time step in both frames"},
                {"t_end", "20", "final physical time"},
                {"mass", "2", "initial mass"},
                {"offset", "0.5", "centre of the initial bump at t = 1"},
                {"compare_at", "2,5,10,20", "physical comparison times"},
                {"b", "0.05,0.05", "forcing amplitudes for the mass bookkeeping run"},
                {"forced_horizon", "1", "length of the forced run"}},
               run_burgers_physical});
  r.push_back({"rd-similarity",
               "Cubic reaction-diffusion on the grid against the closed-form slow decay and the 9-mode Galerkin model",
               300.0,
               "20",
               {{"half_width", "12", "xi domain half width"},
                {"n_points", "241", "grid points"},
                {"dtau", "0.004", "time step"},
                {"horizon", "10", "run length"},
                {"record_interval", "0.2", "sampling interval"},
                {"amplitude", "0.2", "initial multiple of e_0"},
                {"k_max", "8", "highest Galerkin mode"},
                {"b", "0.02,0.02,0.02,0.02,0.02", "noise amplitudes for the pathwise comparison"}},
               run_rd_similarity});
  r.push_back({"modal-linear",
               "Linear modal SDEs: OU stationary variances and the mode-0 random walk",
               300.0,
               "10000",
               {{"b", "0.5,1,1,1,1", "noise amplitudes b_0..b_K"},
                {"u0", "0", "initial amplitudes (missing entries are 0)"},
                {"dtau", "0.01", "time step"},
                {"horizon", "20", "run length"},
                {"record_interval", "0.5", "sampling interval"}},
               run_modal_linear});
  r.push_back({"modal-cubic",
               "Galerkin cubic reaction: noise-enhanced decay of the mean amplitude",
               300.0,
               "10000",
               {{"b", "0,0.3", "noise amplitudes b_0..b_K"},
                {"k_max", "2", "highest mode"},
                {"a0", "0.02", "initial u_0"},
                {"dtau", "0.01", "time step"},
                {"horizon", "25", "run length"},
                {"record_interval", "0.25", "sampling interval"},
                {"fit_lo", "5", "rate fit window start"},
                {"fit_hi", "25", "rate fit window end"}},
               run_modal_cubic});
  r.push_back({"slow-model",
               "Nine-mode slow model amplitude against the closed-form cubic decay",
               300.0,
               "1",
               {{"b", "0", "noise amplitudes b_0..b_8"},
                {"a0", "0.5", "initial amplitude"},
                {"dtau", "0.01", "time step"},
                {"horizon", "20", "run length"},
                {"record_interval", "0.25", "sampling interval"},
                {"fit_lo", "5", "rate fit window start"},
                {"fit_hi", "20", "rate fit window end"}},
               run_slow_model});
  r.push_back({"normal-form-residual",
               "Residual of the stochastic coordinate transform against amplitude scale, and invariance of U_1 = U_2 = 0",
               300.0,
               "100",
               {{"eps", "0.05,0.1,0.2", "amplitude scales"},
                {"noise_exponent", "2", "noise amplitude scales as eps^p"},
                {"samples", "16", "random (U, z, dw) samples per scale"},
                {"b", "0.1,0.2,0.3", "noise for the invariance run"},
                {"a", "0.3", "initial U_0 of the invariance run"},
                {"dtau", "0.01", "time step of the invariance run"},
                {"horizon", "5", "length of the invariance run"}},
               run_normal_form_residual});
  r.push_back({"origin-compensation",
               "Moving origin and fluctuating time removing the forcing of modes 1 and 2",
               300.0,
               "10000",
               {{"a", "1", "slow amplitude u_0"},
                {"b1", "0.3", "noise on mode 1"},
                {"b2", "0.3", "noise on mode 2"},
                {"horizon", "8", "run length in tau"},
                {"dtau", "0.01", "time step"},
                {"record_interval", "0.5", "sampling interval"},
                {"t0", "1", "real time at tau = 0"},
                {"u2_0", "0", "initial u_2"}},
               run_origin_compensation});
  r.push_back({"pseudotime-moments",
               "Real time against pseudo-time: mean, isometry variance, reversals, and the origin spread",
               300.0,
               "10000",
               {{"t0", "1", "initial real time"},
                {"a", "1", "slow amplitude"},
                {"b1", "0.3", "noise on mode 1 (origin path)"},
                {"b2", "0.25", "noise on mode 2; 2 b2 / a = 0.5 by default"},
                {"T_max", "10", "pseudo-time horizon"},
                {"dT", "0.01", "pseudo-time step"},
                {"record_interval", "0.5", "sampling interval"}},
               run_pseudotime_moments});
  const std::vector<Param> mixing_params{{"length", "160", "periodic domain length"},
                                         {"n_points", "1024", "grid points"},
                                         {"dt", "0.01", "time step"},
                                         {"horizon", "50", "final time"},
                                         {"T0", "1", "initial pseudo-time"},
                                         {"eta0", "0", "initial eta"},
                                         {"release_width", "1", "std of the release in pipe 1"},
                                         {"sample_every", "10", "steps between samples"},
                                         {"eta_min", "0.1", "slaving samples need |eta| above this"},
                                         {"fit_from", "10", "spread fit uses t >= fit_from"},
                                         {"slaving_lo", "0.1", "early tau bin start"},
                                         {"slaving_hi", "2.1", "late tau bin start"},
                                         {"slaving_width", "0.25", "tau bin width"},
                                         {"xi_half_width", "10", "xi window for the Gaussian projection"},
                                         {"xi_points", "201", "xi points for the Gaussian projection"}};
  r.push_back({"mixing-spread", "Two-pipe advection-exchange: spread of the mean field in pseudo-time", 300.0, "1000",
               mixing_params, [](const Config& c, const RunContext& x) { return run_mixing(c, x, "mixing-spread"); }});
  r.push_back({"mixing-slaving", "Two-pipe advection-exchange: slaving of the difference field to -du/dxi", 300.0,
               "1000", mixing_params,
               [](const Config& c, const RunContext& x) { return run_mixing(c, x, "mixing-slaving"); }});
  return r;
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = build_registry();
  return r;
}

const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + name + "' (see 'similab list')");
}

Config resolve(const Experiment& exp, const Config& user) {
  Config c;
  c.set("experiment", exp.name);
  c.set("seed", "1");
  c.set("paths", exp.default_paths);
  c.set("threads", "0");
  c.set("out", "results/" + exp.name);
  for (const auto& p : exp.params) c.set(p.key, p.value);
  for (const auto& [k, v] : user.values()) {
    if (!c.has(k)) throw ConfigError("unknown key '" + k + "' for experiment " + exp.name);
    c.set(k, v);
  }
  require(c.integer("seed") >= 0, "seed must be non-negative");
  count(c, "paths");
  require(c.integer("threads") >= 0, "threads must be non-negative (0 = all cores)");
  return c;
}

Bundle run_experiment(const Config& user) {
  const auto& exp = find_experiment(user.str("experiment"));
  const Config c = resolve(exp, user);
  RunContext ctx;
  ctx.seed = static_cast<std::uint64_t>(c.integer("seed"));
  ctx.paths = static_cast<std::size_t>(c.integer("paths"));
  const auto th = c.integer("threads");
  ctx.threads = th > 0 ? static_cast<unsigned>(th) : std::max(1u, std::thread::hardware_concurrency());
  const auto start = std::chrono::steady_clock::now();
  ctx.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                             std::chrono::duration<double>(exp.budget_seconds));
  Bundle b = exp.run(c, ctx);
  b.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& [k, v] : c.values())
    if (k != "threads") b.config[k] = v;
  return b;
}

void write_bundle(const Bundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json meta;
  meta["experiment"] = b.experiment;
  meta["code_version"] = code_version();
  meta["wall_seconds"] = b.wall_seconds;
  meta["config"] = b.config;
  meta["summary"] = b.summary;
  json files = json::array();
  for (const auto& s : b.series) {
    const auto file = s.name + ".csv";
    std::ofstream f(dir / file);
    if (!f) throw std::runtime_error("cannot write " + (dir / file).string());
    for (std::size_t i = 0; i < s.columns.size(); ++i) f << (i ? "," : "") << s.columns[i];
    f << '\n';
    for (const auto& row : s.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format17(row[i]);
      f << '\n';
    }
    files.push_back({{"file", file}, {"columns", s.columns}, {"rows", s.rows.size()}});
  }
  meta["series"] = files;
  std::ofstream m(dir / "metadata.json");
  if (!m) throw std::runtime_error("cannot write " + (dir / "metadata.json").string());
  m << meta.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

}  // namespace similab::cli
