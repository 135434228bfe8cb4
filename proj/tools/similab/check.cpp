#include "check.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <similab/galerkin.hpp>
#include <similab/hermite.hpp>
#include <similab/mixing.hpp>
#include <similab/origin_tracking.hpp>
#include <similab/pde_sim.hpp>
#include <similab/rng.hpp>

namespace similab::cli {

namespace {

struct Check {
  std::string name;
  std::function<double()> measure;  // returns the deviation
  double tolerance;
};

}  // namespace

int run_checks(std::ostream& out) {
  const std::vector<Check> checks{
      {"orthonormality e_0..e_10",
       [] {
         const HermiteBasis basis(BasisSpec(10, 40));
         const auto& rule = basis.rule();
         double worst = 0.0;
         for (int j = 0; j <= 10; ++j)
           for (int k = 0; k <= 10; ++k) {
             const double ip = weighted_inner_fn([j](double x) { return eval_eigenfunction(j, x); },
                                                 [k](double x) { return eval_eigenfunction(k, x); }, rule);
             worst = std::max(worst, std::abs(ip - (j == k ? 1.0 : 0.0)));
           }
         return worst;
       },
       1e-10},
      {"cubic coefficient of u_0^3 in d_0",
       [] {
         const CubicTensor t(BasisSpec(2));
         return std::abs(t.monomial(0, 0, 0, 0) - 0.5 / std::sqrt(3.0 * M_PI));
       },
       1e-12},
      {"grid mass under conservative noise",
       [] {
         GridSolver s(GridConfig{12.0, 241, 0.004, Scheme::Similarity}, 3);
         std::vector<double> u(241);
         for (std::size_t i = 0; i < u.size(); ++i) u[i] = eval_eigenfunction(0, s.grid().at(i));
         auto st = s.make_state(u, 0.0);
         const double m0 = st.mass;
         const NoiseSpectrum sp({0.0, 0.2, 0.2}, true);
         const NoiseStream ns(3, 0);
         for (std::size_t n = 0; n < 250; ++n) {
           std::vector<double> dw{0.0, ns.increment(1, n, 0.004), ns.increment(2, n, 0.004)};
           s.step_burgers_similarity(st, sp, dw);
         }
         return std::abs(st.mass - m0);
       },
       1e-6},
      {"compensated modes stay at zero",
       [] {
         CompensationOptions o;
         o.b1 = 0.3;
         o.b2 = 0.3;
         o.horizon = 4.0;
         const auto p = simulate_compensated_modes(o, 5, 0);
         double m = 0.0;
         for (std::size_t i = 0; i < p.u1.size(); ++i) m = std::max({m, std::abs(p.u1[i]), std::abs(p.u2[i])});
         return m;
       },
       1e-6},
      {"pipe mass under advection and exchange",
       [] {
         PipePair p;
         p.x = periodic_grid(40.0, 256);
         p.u1.resize(256);
         p.u2.assign(256, 0.0);
         for (std::size_t i = 0; i < 256; ++i) p.u1[i] = std::exp(-p.x.at(i) * p.x.at(i));
         PipeSpectrum s(p);
         const double m0 = s.mass();
         const NoiseStream ns(9, 0);
         for (std::size_t n = 0; n < 500; ++n) s.step(0.01, ns.increment(channel::kAdvection, n, 0.01));
         return std::abs(s.mass() / m0 - 1.0);
       },
       1e-12},
  };
  int failures = 0;
  for (const auto& c : checks) {
    double dev = 0.0;
    bool ok = false;
    try {
      dev = c.measure();
      ok = dev <= c.tolerance;
    } catch (const std::exception& e) {
      out << "FAIL " << c.name << ": " << e.what() << '\n';
      ++failures;
      continue;
    }
    out << (ok ? "ok   " : "FAIL ") << c.name << "  deviation " << dev << " (tolerance " << c.tolerance << ")\n";
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace similab::cli
