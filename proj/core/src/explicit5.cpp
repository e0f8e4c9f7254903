// Five-parameter baseline: x, y, sigma, amplitude and background all iterated
// by the same Levenberg-Marquardt schedule.

#include <algorithm>
#include <cmath>

#include "lm_driver.hpp"
#include "spotfit/lm_solver.hpp"
#include "workspace.hpp"

namespace spotfit {

std::optional<std::array<double, 5>> solve_step(const BasicNormalSystem<5>& sys, double lambda) {
  constexpr std::size_t K = 5;
  std::array<double, K> scale{};
  for (std::size_t j = 0; j < K; ++j) {
    if (!(sys.jtj[j][j] > 0.0)) return std::nullopt;
    scale[j] = 1.0 / std::sqrt(sys.jtj[j][j]);
  }
  // Jacobi scaling makes the damped diagonal exactly 1 + lambda.
  std::array<std::array<double, K + 1>, K> m{};
  for (std::size_t r = 0; r < K; ++r) {
    for (std::size_t c = 0; c < K; ++c) m[r][c] = sys.jtj[r][c] * scale[r] * scale[c];
    m[r][r] = 1.0 + lambda;
    m[r][K] = sys.rhs[r] * scale[r];
  }
  for (std::size_t col = 0; col < K; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < K; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (!(std::abs(m[pivot][col]) > 1e-12)) return std::nullopt;
    std::swap(m[col], m[pivot]);
    for (std::size_t r = col + 1; r < K; ++r) {
      const double factor = m[r][col] / m[col][col];
      for (std::size_t c = col; c <= K; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  std::array<double, K> x{};
  for (std::size_t r = K; r-- > 0;) {
    double acc = m[r][K];
    for (std::size_t c = r + 1; c < K; ++c) acc -= m[r][c] * x[c];
    x[r] = acc / m[r][r];
  }
  for (std::size_t j = 0; j < K; ++j) x[j] *= scale[j];
  return x;
}

namespace {

class ExplicitProblem {
 public:
  static constexpr std::size_t K = 5;
  using Params = std::array<float, 5>;

  ExplicitProblem(ImageView image, const ParameterBounds& bounds, detail::Workspace& ws)
      : image_(image), bounds_(bounds), ws_(ws), n_(image.grid.size()) {}

  ShapeParams shape_of(const Params& p) const { return {p[0], p[1], p[2]}; }

  Params limit(const Params& p) const {
    // Only |sigma| is bounded; the sign is free as in the reference baseline.
    const float magnitude = std::clamp(std::abs(p[2]), bounds_.sigma_min, bounds_.sigma_max);
    const ShapeParams s = spotfit::limit({p[0], p[1], bounds_.sigma_min}, bounds_, image_.grid);
    return {s.x_bar, s.y_bar, std::signbit(p[2]) ? -magnitude : magnitude, p[3], p[4]};
  }

  std::optional<double> evaluate(const Params& p, BasicNormalSystem<5>& sys) {
    const auto f = ws_.f.first(n_);
    const auto df = ws_.df.first(n_);
    const auto g = image_.values;
    profile_gradient<float>(shape_of(p), image_.grid, f, df);
    const float alpha = p[3];
    const float beta = p[4];
    double chi2 = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = residual(g[i], f[i], Amplitudes{alpha, beta});
      chi2 += r * r;
      const std::array<double, 5> j = {alpha * df[i][0], alpha * df[i][1], alpha * df[i][2],
                                       f[i], 1.0};
      for (std::size_t a = 0; a < K; ++a) {
        sys.rhs[a] += r * j[a];
        for (std::size_t b = a; b < K; ++b) sys.jtj[a][b] += j[a] * j[b];
      }
    }
    for (std::size_t a = 0; a < K; ++a) {
      for (std::size_t b = 0; b < a; ++b) sys.jtj[a][b] = sys.jtj[b][a];
    }
    return chi2;
  }

  std::optional<double> chi2(const Params& p) {
    const auto f = ws_.f.first(n_);
    profile<float>(shape_of(p), image_.grid, f);
    return chi_squared<float>(image_.values, f, Amplitudes{p[3], p[4]});
  }

  void finish(const Params& p, FitResult& result) {
    result.shape = shape_of(p);
    result.amps = {p[3], p[4]};
    result.chi2 = chi2(p).value_or(0.0);
    result.normalized_chi2 = static_cast<float>(normalized_chi(result.chi2, n_));
  }

 private:
  ImageView image_;
  ParameterBounds bounds_;
  detail::Workspace& ws_;
  std::size_t n_;
};

}  // namespace

FitResult fit_explicit5(ImageView image, const ShapeParams& init_shape,
                        const Amplitudes& init_amps, const FitConfig& config, FitTrace* trace) {
  validate(image);
  config.validate();
  const ParameterBounds bounds = config.bounds_for(image.grid);
  bounds.validate();
  const ExplicitProblem::Params init = {init_shape.x_bar, init_shape.y_bar, init_shape.sigma,
                                        init_amps.alpha, init_amps.beta};
  for (float v : init) {
    if (!std::isfinite(v)) throw InvalidInput("initial parameters must be finite");
  }
  detail::Workspace ws;
  ExplicitProblem problem(image, bounds, ws);
  return detail::run_levenberg_marquardt(problem, init, config, trace);
}

}  // namespace spotfit
