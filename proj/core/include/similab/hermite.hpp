#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "similab/grid.hpp"

namespace similab {

/// Probabilists' Hermite polynomial He_k(zeta).
double hermite_poly(int k, double zeta);

/// Number of retained modes and quadrature nodes.  Requires max_mode >= 1 and
/// quad_order >= 2*max_mode + 8.
struct BasisSpec {
  int max_mode = 2;
  int quad_order = 12;

  BasisSpec() = default;
  BasisSpec(int k_max, int q);
  explicit BasisSpec(int k_max) : BasisSpec(k_max, 2 * k_max + 8) {}

  int modes() const { return max_mode + 1; }
};

/// Gauss rule for integral f(xi) exp(-beta xi^2) dxi.  beta = 1/4 is the
/// basis weight G; beta = 3/4 makes quadruple products of e_k exact.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double beta = 0.25;

  static QuadratureRule gauss_hermite(int order, double beta = 0.25);

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// log of c_k = (2 sqrt(pi) / k!)^(1/2).
double log_norm_constant(int k);

/// e_k(xi) = c_k He_k(xi/sqrt2) G(xi), G = exp(-xi^2/4)/(2 sqrt(pi)).
/// Evaluated with a running log-scale; throws std::range_error on overflow.
double eval_eigenfunction(int k, double xi);

/// e_0(xi) .. e_kmax(xi) in one recurrence pass.
void eval_eigenfunctions(int k_max, double xi, double* out);

/// e_k(xi) * exp(xi^2/4), a polynomial of degree k; avoids underflow in tails.
void eval_scaled_eigenfunctions(int k_max, double xi, double* out);

/// integral f g K dxi with K = exp(xi^2/4), from samples at rule.nodes.
double weighted_inner(std::span<const double> f, std::span<const double> g, const QuadratureRule& rule);

template <class F, class G>
double weighted_inner_fn(F&& f, G&& g, const QuadratureRule& rule) {
  std::vector<double> fs(rule.nodes.size()), gs(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    fs[i] = f(rule.nodes[i]);
    gs[i] = g(rule.nodes[i]);
  }
  return weighted_inner(fs, gs, rule);
}

/// Immutable basis object: spec plus its inner-product rule.
class HermiteBasis {
 public:
  explicit HermiteBasis(BasisSpec spec);

  const BasisSpec& spec() const { return spec_; }
  const QuadratureRule& rule() const { return rule_; }

  /// Samples of sum_k c_k e_k at the rule nodes.
  std::vector<double> synthesize_at_nodes(std::span<const double> coeffs) const;

 private:
  BasisSpec spec_;
  QuadratureRule rule_;
};

struct Projection {
  std::vector<double> coeffs;
  double boundary_ratio = 0.0;  ///< max boundary |value| / max |value|
  bool boundary_warning = false;
  std::string diagnostic;
};

/// u_k = integral field e_k K dxi on a uniform grid (trapezoid; e_k K is the
/// polynomial part only, so the sum converges spectrally for Gaussian tails).
Projection project_field(std::span<const double> values, const UniformGrid& grid, const BasisSpec& spec);

/// sum_k coeffs[k] e_k at the grid nodes.
std::vector<double> reconstruct(std::span<const double> coeffs, const UniformGrid& grid);

/// Orthonormal: coefficients refer to e_k (the default everywhere in the
/// library).  HermiteFunction: coefficients refer to He_k(xi/sqrt2) G(xi)
/// without c_k, where d/dxi maps mode k to -1/sqrt2 times mode k+1.
enum class HermiteNormalization { Orthonormal, HermiteFunction };

std::vector<double> derivative_in_basis(std::span<const double> coeffs, int order,
                                        HermiteNormalization norm = HermiteNormalization::Orthonormal);

/// Coefficients of xi * u; output length = input length + 1.
std::vector<double> multiply_by_xi(std::span<const double> coeffs,
                                   HermiteNormalization norm = HermiteNormalization::Orthonormal);

/// Coefficients of L u = u'' + xi u'/2 + u/2; output length = input length + 2.
std::vector<double> apply_similarity_operator(std::span<const double> coeffs,
                                              HermiteNormalization norm = HermiteNormalization::Orthonormal);

}  // namespace similab
