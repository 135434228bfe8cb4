#include "similab/hermite.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace similab {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
// log(2 sqrt(pi))
const double kLogTwoSqrtPi = std::log(2.0 * kSqrtPi);
constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

// Orthonormal He_k / sqrt(k!) at zeta, returned with a common log-scale.
void normalized_hermite(int k_max, double zeta, double* h, double& log_scale) {
  log_scale = 0.0;
  h[0] = 1.0;
  if (k_max == 0) return;
  h[1] = zeta;
  for (int k = 1; k < k_max; ++k) {
    h[k + 1] = (zeta * h[k] - std::sqrt(static_cast<double>(k)) * h[k - 1]) / std::sqrt(static_cast<double>(k + 1));
    if (std::abs(h[k + 1]) > kRescale) {
      for (int j = 0; j <= k + 1; ++j) h[j] /= kRescale;
      log_scale += kLogRescale;
    }
  }
}
}  // namespace

double hermite_poly(int k, double zeta) {
  if (k < 0) throw std::invalid_argument("hermite_poly: negative index");
  if (k == 0) return 1.0;
  double hm = 1.0, h = zeta;
  for (int j = 1; j < k; ++j) {
    const double hp = zeta * h - j * hm;
    hm = h;
    h = hp;
  }
  return h;
}

BasisSpec::BasisSpec(int k_max, int q) : max_mode(k_max), quad_order(q) {
  if (k_max < 1) throw std::invalid_argument("BasisSpec: max_mode must be at least 1");
  if (q < 2 * k_max + 8) throw std::invalid_argument("BasisSpec: quad_order must be at least 2*max_mode + 8");
}

QuadratureRule QuadratureRule::gauss_hermite(int order, double beta) {
  if (order < 1 || order > 200) throw std::invalid_argument("gauss_hermite: order must lie in [1, 200]");
  if (!(beta > 0.0)) throw std::invalid_argument("gauss_hermite: beta must be positive");

  const int n = order;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt(0.5 * i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> s(es.eigenvalues().data(), es.eigenvalues().data() + n);

  // Polish with Newton on the orthonormal recurrence, then take weights from
  // the Christoffel sum so tiny tail weights keep full relative accuracy.
  std::vector<double> p(n + 1);
  auto eval = [&](double x) {
    p[0] = 1.0;
    if (n >= 1) p[1] = std::sqrt(2.0) * x;
    for (int k = 1; k < n; ++k)
      p[k + 1] = (std::sqrt(2.0) * x * p[k] - std::sqrt(static_cast<double>(k)) * p[k - 1]) /
                 std::sqrt(static_cast<double>(k + 1));
  };
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double x = s[i];
    for (int it = 0; it < 4; ++it) {
      eval(x);
      const double dp = std::sqrt(2.0 * n) * p[n - 1];
      if (dp == 0.0) break;
      x -= p[n] / dp;
    }
    s[i] = x;
    eval(x);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += p[k] * p[k];
    w[i] = kSqrtPi / sum;
  }
  std::sort(s.begin(), s.end());
  for (int i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (s[n - 1 - i] - s[i]);
    const double wa = 0.5 * (w[i] + w[n - 1 - i]);
    s[i] = -a;
    s[n - 1 - i] = a;
    w[i] = w[n - 1 - i] = wa;
  }
  if (n % 2 == 1) s[n / 2] = 0.0;

  QuadratureRule r;
  r.beta = beta;
  const double scale = 1.0 / std::sqrt(beta);
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = s[i] * scale;
    r.weights[i] = w[i] * scale;
  }
  return r;
}

double log_norm_constant(int k) { return 0.5 * (kLogTwoSqrtPi - std::lgamma(k + 1.0)); }

void eval_scaled_eigenfunctions(int k_max, double xi, double* out) {
  double log_scale;
  normalized_hermite(k_max, xi / std::numbers::sqrt2, out, log_scale);
  const double f = std::exp(log_scale - 0.5 * kLogTwoSqrtPi);
  if (!std::isfinite(f)) throw std::range_error("scaled eigenfunction overflow");
  for (int k = 0; k <= k_max; ++k) out[k] *= f;
}

void eval_eigenfunctions(int k_max, double xi, double* out) {
  double log_scale;
  normalized_hermite(k_max, xi / std::numbers::sqrt2, out, log_scale);
  const double lf = log_scale - 0.5 * kLogTwoSqrtPi - 0.25 * xi * xi;
  if (lf > 700.0) {
    // Still representable if the recurrence value itself is small.
    for (int k = 0; k <= k_max; ++k) {
      const double v = out[k] == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(out[k])) + lf), out[k]);
      if (!std::isfinite(v)) throw std::range_error("eigenfunction value not representable");
      out[k] = v;
    }
    return;
  }
  const double f = std::exp(lf);
  for (int k = 0; k <= k_max; ++k) out[k] *= f;
}

double eval_eigenfunction(int k, double xi) {
  if (k < 0) throw std::invalid_argument("eval_eigenfunction: negative index");
  std::vector<double> v(k + 1);
  eval_eigenfunctions(k, xi, v.data());
  return v[k];
}

double weighted_inner(std::span<const double> f, std::span<const double> g, const QuadratureRule& rule) {
  if (f.size() != rule.nodes.size() || g.size() != rule.nodes.size())
    throw std::invalid_argument("weighted_inner: samples must match the quadrature nodes");
  // integral f g exp(xi^2/4) = sum W_i f_i g_i exp((beta + 1/4) xi_i^2); split the
  // exponential between the two factors to stay in range.
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0 || g[i] == 0.0) continue;
    const double half = std::exp(0.5 * (rule.beta + 0.25) * rule.nodes[i] * rule.nodes[i]);
    s += rule.weights[i] * (f[i] * half) * (g[i] * half);
  }
  return s;
}

HermiteBasis::HermiteBasis(BasisSpec spec)
    : spec_(spec), rule_(QuadratureRule::gauss_hermite(spec.quad_order, 0.25)) {}

std::vector<double> HermiteBasis::synthesize_at_nodes(std::span<const double> coeffs) const {
  const int km = static_cast<int>(coeffs.size()) - 1;
  std::vector<double> out(rule_.nodes.size(), 0.0);
  if (km < 0) return out;
  std::vector<double> e(km + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    eval_eigenfunctions(km, rule_.nodes[i], e.data());
    double s = 0.0;
    for (int k = 0; k <= km; ++k) s += coeffs[k] * e[k];
    out[i] = s;
  }
  return out;
}

Projection project_field(std::span<const double> values, const UniformGrid& grid, const BasisSpec& spec) {
  if (values.size() != grid.count) throw std::invalid_argument("project_field: grid/value size mismatch");
  Projection p;
  p.coeffs.assign(spec.modes(), 0.0);
  std::vector<double> e(spec.modes());
  double vmax = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    vmax = std::max(vmax, std::abs(values[i]));
    const double w = (i == 0 || i + 1 == values.size()) ? 0.5 * grid.spacing : grid.spacing;
    if (values[i] == 0.0) continue;
    eval_scaled_eigenfunctions(spec.max_mode, grid.at(i), e.data());
    for (int k = 0; k < spec.modes(); ++k) p.coeffs[k] += w * values[i] * e[k];
  }
  if (vmax > 0.0) {
    p.boundary_ratio = std::max(std::abs(values.front()), std::abs(values.back())) / vmax;
    if (p.boundary_ratio >= 1e-8) {
      p.boundary_warning = true;
      p.diagnostic = "field does not decay at the grid boundary (ratio " + std::to_string(p.boundary_ratio) + ")";
    }
  }
  return p;
}

std::vector<double> reconstruct(std::span<const double> coeffs, const UniformGrid& grid) {
  std::vector<double> out(grid.count, 0.0);
  if (coeffs.empty()) return out;
  const int km = static_cast<int>(coeffs.size()) - 1;
  std::vector<double> e(km + 1);
  for (std::size_t i = 0; i < grid.count; ++i) {
    eval_eigenfunctions(km, grid.at(i), e.data());
    double s = 0.0;
    for (int k = 0; k <= km; ++k) s += coeffs[k] * e[k];
    out[i] = s;
  }
  return out;
}

std::vector<double> derivative_in_basis(std::span<const double> c, int order, HermiteNormalization norm) {
  if (order != 1 && order != 2) throw std::invalid_argument("derivative_in_basis: order must be 1 or 2");
  std::vector<double> out(c.size() + order, 0.0);
  const bool ortho = norm == HermiteNormalization::Orthonormal;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kk = static_cast<double>(k);
    if (order == 1)
      out[k + 1] += (ortho ? -std::sqrt((kk + 1.0) / 2.0) : -1.0 / std::numbers::sqrt2) * c[k];
    else
      out[k + 2] += (ortho ? 0.5 * std::sqrt((kk + 1.0) * (kk + 2.0)) : 0.5) * c[k];
  }
  return out;
}

std::vector<double> multiply_by_xi(std::span<const double> c, HermiteNormalization norm) {
  std::vector<double> out(c.size() + 1, 0.0);
  const bool ortho = norm == HermiteNormalization::Orthonormal;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] += std::numbers::sqrt2 * (ortho ? std::sqrt(kk + 1.0) : 1.0) * c[k];
    if (k > 0) out[k - 1] += std::numbers::sqrt2 * (ortho ? std::sqrt(kk) : kk) * c[k];
  }
  return out;
}

std::vector<double> apply_similarity_operator(std::span<const double> c, HermiteNormalization norm) {
  std::vector<double> out = derivative_in_basis(c, 2, norm);
  const std::vector<double> d1 = derivative_in_basis(c, 1, norm);
  const std::vector<double> xd1 = multiply_by_xi(d1, norm);
  for (std::size_t i = 0; i < xd1.size(); ++i) out[i] += 0.5 * xd1[i];
  for (std::size_t i = 0; i < c.size(); ++i) out[i] += 0.5 * c[i];
  return out;
}

}  // namespace similab
