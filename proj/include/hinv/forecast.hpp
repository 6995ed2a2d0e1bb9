#ifndef HINV_FORECAST_HPP
#define HINV_FORECAST_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "hinv/configuration.hpp"
#include "hinv/forward_solver.hpp"

namespace hinv {

enum class Verdict { Persistence, Extinction };

std::string to_string(Verdict v);

/// Long-time prediction for a growth-rate estimate. The verdict depends on
/// the sign of lambda1 only, so gamma is needed just for the steady state.
struct Forecast {
  double lambda1 = 0.0;
  Verdict verdict = Verdict::Extinction;
  std::optional<Field> steady_state;
  double eigen_residual = 0.0;
};

struct ForecastOptions {
  double extinction_tol = 1e-6;
  EigenOptions eigen;
  SteadyStateOptions steady;
};

Forecast forecast(const Field& mu, double diffusion, std::optional<double> gamma, const ForecastOptions& options = {});
Forecast forecast(const HabitatConfiguration& mu_hat, std::shared_ptr<const Grid> grid, double diffusion,
                  std::optional<double> gamma, const ForecastOptions& options = {});

/// JSON summary; the steady state, when present, goes to a separate field file.
void write_forecast_summary(const std::filesystem::path& path, const Forecast& f, std::optional<double> gamma);

}  // namespace hinv

#endif  // HINV_FORECAST_HPP
