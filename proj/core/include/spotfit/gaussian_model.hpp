#pragma once

// Normalized rotationally symmetric 2D Gaussian profile with amplitude and
// background eliminated in closed form.
//
// Profile values and partials are stored in `Real` (float in the fitting
// engine). The exponent and the residuals use double intermediates and every
// sum over pixels is accumulated in double. The test oracles instantiate
// double throughout.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>

#include "spotfit/image.hpp"

namespace spotfit {

template <std::floating_point Real>
struct BasicShape {
  Real x_bar{};
  Real y_bar{};
  Real sigma{1};

  friend constexpr bool operator==(const BasicShape&, const BasicShape&) = default;
};

template <std::floating_point Real>
struct BasicAmplitudes {
  Real alpha{};
  Real beta{};

  friend constexpr bool operator==(const BasicAmplitudes&, const BasicAmplitudes&) = default;
};

using ShapeParams = BasicShape<float>;
using Amplitudes = BasicAmplitudes<float>;

// Per-pixel partials with respect to (x_bar, y_bar, sigma).
template <std::floating_point Real>
using Partials = std::array<Real, 3>;

inline constexpr std::size_t kShapeParams = 3;

// F, G, bold F, bold G and the normal-equation determinant N*ff - F^2.
struct ProfileSums {
  double n = 0;
  double f_sum = 0;
  double g_sum = 0;
  double ff_sum = 0;
  double fg_sum = 0;
  double denom = 0;
};

// Shape-parameter derivatives of the profile sums. d_ff carries the factor 2.
struct GradientSums {
  std::array<double, 3> d_f{};
  std::array<double, 3> d_ff{};
  std::array<double, 3> d_fg{};
  std::array<double, 3> gamma{};
};

template <std::floating_point Real>
struct AmplitudeFit {
  BasicAmplitudes<Real> amps;
  ProfileSums sums;
};

struct CoefficientGradients {
  std::array<double, 3> d_alpha{};
  std::array<double, 3> d_beta{};
};

// Relative singularity guard on N*ff - F^2.
inline constexpr double kDenomEpsilon = 1e-12;

inline bool is_singular(const ProfileSums& s) noexcept {
  return !(s.denom > kDenomEpsilon * s.n * s.ff_sum);
}

template <std::floating_point Real>
void profile(const BasicShape<Real>& p, const PixelGrid& grid, std::span<Real> f) {
  const double scale = -0.5 / (static_cast<double>(p.sigma) * static_cast<double>(p.sigma));
  std::size_t i = 0;
  for (int y = 0; y < grid.height; ++y) {
    const double dy = y - static_cast<double>(p.y_bar);
    for (int x = 0; x < grid.width; ++x, ++i) {
      const double dx = x - static_cast<double>(p.x_bar);
      f[i] = static_cast<Real>(std::exp(scale * (dx * dx + dy * dy)));
    }
  }
}

// Fills both the profile and its partials with one exponential per pixel.
template <std::floating_point Real>
void profile_gradient(const BasicShape<Real>& p, const PixelGrid& grid, std::span<Real> f,
                      std::span<Partials<Real>> df) {
  const Real inv_sigma = Real(1) / p.sigma;
  const Real inv_sigma2 = inv_sigma * inv_sigma;
  const double scale = -0.5 / (static_cast<double>(p.sigma) * static_cast<double>(p.sigma));
  std::size_t i = 0;
  for (int y = 0; y < grid.height; ++y) {
    const double dy_wide = y - static_cast<double>(p.y_bar);
    const Real dy = static_cast<Real>(dy_wide);
    for (int x = 0; x < grid.width; ++x, ++i) {
      const double dx_wide = x - static_cast<double>(p.x_bar);
      const Real dx = static_cast<Real>(dx_wide);
      const Real r2 = dx * dx + dy * dy;
      const Real fi = static_cast<Real>(std::exp(scale * (dx_wide * dx_wide + dy_wide * dy_wide)));
      const Real w = inv_sigma2 * fi;
      f[i] = fi;
      df[i] = {dx * w, dy * w, r2 * w * inv_sigma};
    }
  }
}

template <std::floating_point Real>
ProfileSums profile_sums(std::span<const Real> f, std::span<const float> g) {
  ProfileSums s;
  s.n = static_cast<double>(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fi = f[i];
    const double gi = g[i];
    s.f_sum += fi;
    s.g_sum += gi;
    s.ff_sum += fi * fi;
    s.fg_sum += fi * gi;
  }
  s.denom = s.n * s.ff_sum - s.f_sum * s.f_sum;
  return s;
}

// Least-squares amplitude and background for a fixed profile. Empty when the
// profile is numerically constant.
template <std::floating_point Real>
std::optional<AmplitudeFit<Real>> alpha_beta(std::span<const Real> f, std::span<const float> g) {
  const ProfileSums s = profile_sums<Real>(f, g);
  if (is_singular(s)) return std::nullopt;
  const double alpha = (s.n * s.fg_sum - s.f_sum * s.g_sum) / s.denom;
  const double beta = (s.g_sum * s.ff_sum - s.f_sum * s.fg_sum) / s.denom;
  return AmplitudeFit<Real>{{static_cast<Real>(alpha), static_cast<Real>(beta)}, s};
}

template <std::floating_point Real>
inline double residual(float g, Real f, const BasicAmplitudes<Real>& amps) noexcept {
  return static_cast<double>(g) -
         (static_cast<double>(amps.alpha) * static_cast<double>(f) + static_cast<double>(amps.beta));
}

template <std::floating_point Real>
double chi_squared(std::span<const float> g, std::span<const Real> f,
                   const BasicAmplitudes<Real>& amps) {
  double chi2 = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = residual(g[i], f[i], amps);
    chi2 += r * r;
  }
  return chi2;
}

template <std::floating_point Real>
GradientSums gradient_sums(std::span<const Real> f, std::span<const Partials<Real>> df,
                           std::span<const float> g, const ProfileSums& sums) {
  GradientSums gs;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fi = f[i];
    const double gi = g[i];
    for (std::size_t j = 0; j < kShapeParams; ++j) {
      const double d = df[i][j];
      gs.d_f[j] += d;
      gs.d_ff[j] += fi * d;
      gs.d_fg[j] += gi * d;
    }
  }
  for (std::size_t j = 0; j < kShapeParams; ++j) {
    gs.d_ff[j] *= 2.0;
    gs.gamma[j] = sums.n * gs.d_ff[j] - 2.0 * sums.f_sum * gs.d_f[j];
  }
  return gs;
}

template <std::floating_point Real>
std::optional<CoefficientGradients> coefficient_gradients(const ProfileSums& s,
                                                          const GradientSums& gs,
                                                          const BasicAmplitudes<Real>& amps) {
  if (is_singular(s)) return std::nullopt;
  const double alpha = amps.alpha;
  const double beta = amps.beta;
  CoefficientGradients cg;
  for (std::size_t j = 0; j < kShapeParams; ++j) {
    cg.d_alpha[j] = (s.n * gs.d_fg[j] - s.g_sum * gs.d_f[j] - alpha * gs.gamma[j]) / s.denom;
    cg.d_beta[j] = (s.g_sum * gs.d_ff[j] - s.fg_sum * gs.d_f[j] - s.f_sum * gs.d_fg[j] -
                    beta * gs.gamma[j]) /
                   s.denom;
  }
  return cg;
}

// Gradient of chi^2 over the shape parameters, summed from the per-pixel
// terms 2 (h_i - g_i) d_ij. The model derivatives d_ij are written to `d`.
template <std::floating_point Real>
std::array<double, 3> chi_gradient(std::span<const float> g, std::span<const Real> f,
                                   std::span<const Partials<Real>> df,
                                   const BasicAmplitudes<Real>& amps,
                                   const CoefficientGradients& cg,
                                   std::span<Partials<Real>> d) {
  Partials<Real> da{};
  Partials<Real> db{};
  for (std::size_t j = 0; j < kShapeParams; ++j) {
    da[j] = static_cast<Real>(cg.d_alpha[j]);
    db[j] = static_cast<Real>(cg.d_beta[j]);
  }
  std::array<double, 3> grad{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double model_minus_data = -residual(g[i], f[i], amps);
    for (std::size_t j = 0; j < kShapeParams; ++j) {
      const Real dij = da[j] * f[i] + amps.alpha * df[i][j] + db[j];
      d[i][j] = dij;
      grad[j] += 2.0 * model_minus_data * static_cast<double>(dij);
    }
  }
  return grad;
}

// Same gradient using the zero-sum residual identities at the implicit
// optimum: -2 alpha sum_i r_i df_ij.
template <std::floating_point Real>
std::array<double, 3> reduced_chi_gradient(std::span<const float> g, std::span<const Real> f,
                                           std::span<const Partials<Real>> df,
                                           const BasicAmplitudes<Real>& amps) {
  std::array<double, 3> acc{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = residual(g[i], f[i], amps);
    for (std::size_t j = 0; j < kShapeParams; ++j) acc[j] += r * static_cast<double>(df[i][j]);
  }
  for (auto& a : acc) a *= -2.0 * static_cast<double>(amps.alpha);
  return acc;
}

}  // namespace spotfit
