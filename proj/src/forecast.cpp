#include "hinv/forecast.hpp"

#include <fstream>

#include <json.hpp>

#include "hinv/error.hpp"

namespace hinv {

std::string to_string(Verdict v) { return v == Verdict::Persistence ? "persistence" : "extinction"; }

Forecast forecast(const Field& mu, double diffusion, std::optional<double> gamma, const ForecastOptions& options) {
  if (!(diffusion > 0.0)) throw InvalidArgument("diffusion coefficient must be positive");
  const EigenPair eig = principal_eigenpair(mu, diffusion, options.eigen);
  Forecast f;
  f.lambda1 = eig.value;
  f.eigen_residual = eig.residual;
  f.verdict = eig.value < -options.extinction_tol ? Verdict::Persistence : Verdict::Extinction;
  if (gamma) {
    if (f.verdict == Verdict::Persistence) {
      SteadyStateOptions steady = options.steady;
      steady.extinction_tol = options.extinction_tol;
      f.steady_state = solve_steady_state(mu, *gamma, diffusion, steady);
    } else {
      f.steady_state = Field::zeros(mu.grid_ptr());
    }
  }
  return f;
}

Forecast forecast(const HabitatConfiguration& mu_hat, std::shared_ptr<const Grid> grid, double diffusion,
                  std::optional<double> gamma, const ForecastOptions& options) {
  return forecast(habitat_to_field(mu_hat, std::move(grid)), diffusion, gamma, options);
}

void write_forecast_summary(const std::filesystem::path& path, const Forecast& f, std::optional<double> gamma) {
  nlohmann::json j = {
      {"lambda1", f.lambda1},
      {"verdict", to_string(f.verdict)},
      {"eigen_residual", f.eigen_residual},
  };
  if (gamma) j["gamma"] = *gamma;
  if (f.steady_state) {
    j["steady_state_max"] = f.steady_state->values().maxCoeff();
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace hinv
