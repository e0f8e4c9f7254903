#include "spotfit/lm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lm_driver.hpp"
#include "workspace.hpp"

namespace spotfit {

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::MaxError: return "MaxError";
    case StopReason::MinDelta: return "MinDelta";
    case StopReason::MinStep: return "MinStep";
    case StopReason::NotConverged: return "NotConverged";
    case StopReason::MaxIterations: return "MaxIterations";
  }
  return "NotConverged";
}

std::optional<StopReason> parse_stop_reason(std::string_view name) noexcept {
  for (StopReason r : kStopReasons) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

ParameterBounds ParameterBounds::defaults_for(const PixelGrid& grid) noexcept {
  const float side = static_cast<float>(std::max(grid.width, grid.height));
  return {side / 2.0f, 0.3f, side};
}

void ParameterBounds::validate() const {
  if (!(margin >= 0.0f) || !std::isfinite(margin)) throw InvalidInput("bounds: margin must be >= 0");
  if (!(sigma_min > 0.0f)) throw InvalidInput("bounds: sigma_min must be > 0");
  if (!(sigma_max > sigma_min) || !std::isfinite(sigma_max)) {
    throw InvalidInput("bounds: sigma_max must exceed sigma_min");
  }
}

ParameterBounds FitConfig::bounds_for(const PixelGrid& grid) const {
  return bounds.value_or(ParameterBounds::defaults_for(grid));
}

void FitConfig::validate() const {
  if (max_iterations < 1) throw InvalidInput("config: max_iterations must be >= 1");
  if (!(max_error >= 0.0)) throw InvalidInput("config: max_error must be >= 0");
  if (!(min_delta > 0.0)) throw InvalidInput("config: min_delta must be > 0");
  if (!(min_step > 0.0)) throw InvalidInput("config: min_step must be > 0");
  if (!(lambda_init > 0.0) || !(lambda_up > 1.0) || !(lambda_down > 1.0)) {
    throw InvalidInput("config: damping factors must be positive and growth factors > 1");
  }
  if (!(lambda_init < lambda_max)) throw InvalidInput("config: lambda_init must be < lambda_max");
  if (bounds) bounds->validate();
}

std::optional<std::array<double, 3>> solve_step(const NormalSystem& sys, double lambda) {
  std::array<std::array<double, 3>, 3> a = sys.jtj;
  for (std::size_t j = 0; j < 3; ++j) {
    if (!(a[j][j] > 0.0)) return std::nullopt;
    a[j][j] *= 1.0 + lambda;
  }
  const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
  const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
  const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
  if (!(std::abs(det) > 1e-12 * a[0][0] * a[1][1] * a[2][2])) return std::nullopt;

  const double c10 = a[0][2] * a[2][1] - a[0][1] * a[2][2];
  const double c11 = a[0][0] * a[2][2] - a[0][2] * a[2][0];
  const double c12 = a[0][1] * a[2][0] - a[0][0] * a[2][1];
  const double c20 = a[0][1] * a[1][2] - a[0][2] * a[1][1];
  const double c21 = a[0][2] * a[1][0] - a[0][0] * a[1][2];
  const double c22 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const auto& b = sys.rhs;
  // inverse = adjugate / det, adjugate = cofactor matrix transposed
  return std::array<double, 3>{
      (c00 * b[0] + c10 * b[1] + c20 * b[2]) / det,
      (c01 * b[0] + c11 * b[1] + c21 * b[2]) / det,
      (c02 * b[0] + c12 * b[1] + c22 * b[2]) / det,
  };
}

ShapeParams limit(const ShapeParams& p, const ParameterBounds& bounds, const PixelGrid& grid) {
  const float x_max = static_cast<float>(grid.width - 1) + bounds.margin;
  const float y_max = static_cast<float>(grid.height - 1) + bounds.margin;
  return {std::clamp(p.x_bar, -bounds.margin, x_max), std::clamp(p.y_bar, -bounds.margin, y_max),
          std::clamp(p.sigma, bounds.sigma_min, bounds.sigma_max)};
}

double normalized_chi(double chi2, std::size_t pixel_count) noexcept {
  return pixel_count > 5 ? chi2 / static_cast<double>(pixel_count - 5) : chi2;
}

double normalized_chi(ImageView image, std::span<const float> model) {
  double chi2 = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double r = static_cast<double>(image.values[i]) - model[i];
    chi2 += r * r;
  }
  return normalized_chi(chi2, model.size());
}

namespace {

class ImplicitProblem {
 public:
  static constexpr std::size_t K = 3;
  using Params = std::array<float, 3>;

  ImplicitProblem(ImageView image, const ParameterBounds& bounds, detail::Workspace& ws)
      : image_(image), bounds_(bounds), ws_(ws), n_(image.grid.size()) {}

  static Params pack(const ShapeParams& p) { return {p.x_bar, p.y_bar, p.sigma}; }
  ShapeParams shape_of(const Params& p) const { return {p[0], p[1], p[2]}; }

  Params limit(const Params& p) const { return pack(spotfit::limit(shape_of(p), bounds_, image_.grid)); }

  std::optional<double> evaluate(const Params& p, NormalSystem& sys) {
    auto ev = evaluate_with_system(shape_of(p));
    if (!ev) return std::nullopt;
    sys = ev->system;
    return ev->chi2;
  }

  std::optional<ModelEvaluation> evaluate_with_system(const ShapeParams& shape) {
    const auto f = ws_.f.first(n_);
    const auto df = ws_.df.first(n_);
    const auto d = ws_.d.first(n_);
    const auto g = image_.values;
    profile_gradient<float>(shape, image_.grid, f, df);
    const auto fit = alpha_beta<float>(f, g);
    if (!fit) return std::nullopt;
    const GradientSums gs = gradient_sums<float>(f, df, g, fit->sums);
    const auto cg = coefficient_gradients(fit->sums, gs, fit->amps);
    if (!cg) return std::nullopt;

    ModelEvaluation ev;
    ev.amps = fit->amps;
    ev.gradient = chi_gradient<float>(g, f, df, fit->amps, *cg, d);
    NormalSystem& sys = ev.system;
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = residual(g[i], f[i], fit->amps);
      ev.chi2 += r * r;
      const double d0 = d[i][0], d1 = d[i][1], d2 = d[i][2];
      sys.rhs[0] += r * d0;
      sys.rhs[1] += r * d1;
      sys.rhs[2] += r * d2;
      sys.jtj[0][0] += d0 * d0;
      sys.jtj[0][1] += d0 * d1;
      sys.jtj[0][2] += d0 * d2;
      sys.jtj[1][1] += d1 * d1;
      sys.jtj[1][2] += d1 * d2;
      sys.jtj[2][2] += d2 * d2;
    }
    sys.jtj[1][0] = sys.jtj[0][1];
    sys.jtj[2][0] = sys.jtj[0][2];
    sys.jtj[2][1] = sys.jtj[1][2];
    return ev;
  }

  std::optional<double> chi2(const Params& p) {
    const auto f = ws_.f.first(n_);
    profile<float>(shape_of(p), image_.grid, f);
    const auto fit = alpha_beta<float>(f, image_.values);
    if (!fit) return std::nullopt;
    return chi_squared<float>(image_.values, f, fit->amps);
  }

  void finish(const Params& p, FitResult& result) {
    result.shape = shape_of(p);
    const auto f = ws_.f.first(n_);
    profile<float>(result.shape, image_.grid, f);
    if (const auto fit = alpha_beta<float>(f, image_.values)) {
      result.amps = fit->amps;
    } else {
      // Constant profile: only the background is determined.
      const double mean =
          std::accumulate(image_.values.begin(), image_.values.end(), 0.0) / static_cast<double>(n_);
      result.amps = {0.0f, static_cast<float>(mean)};
    }
    result.chi2 = chi_squared<float>(image_.values, f, result.amps);
    result.normalized_chi2 = static_cast<float>(normalized_chi(result.chi2, n_));
  }

 private:
  ImageView image_;
  ParameterBounds bounds_;
  detail::Workspace& ws_;
  std::size_t n_;
};

}  // namespace

std::optional<ModelEvaluation> evaluate_model(ImageView image, const ShapeParams& p) {
  validate(image);
  detail::Workspace ws;
  ImplicitProblem problem(image, ParameterBounds::defaults_for(image.grid), ws);
  return problem.evaluate_with_system(p);
}

FitResult fit_single(ImageView image, const ShapeParams& init, const FitConfig& config,
                     FitTrace* trace) {
  validate(image);
  config.validate();
  const ParameterBounds bounds = config.bounds_for(image.grid);
  bounds.validate();
  if (!std::isfinite(init.x_bar) || !std::isfinite(init.y_bar) || !std::isfinite(init.sigma)) {
    throw InvalidInput("initial parameters must be finite");
  }
  detail::Workspace ws;
  ImplicitProblem problem(image, bounds, ws);
  return detail::run_levenberg_marquardt(problem, ImplicitProblem::pack(init), config, trace);
}

}  // namespace spotfit
