#ifndef HINV_ANNEALING_HPP
#define HINV_ANNEALING_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hinv/configuration.hpp"
#include "hinv/functional.hpp"
#include "hinv/rng.hpp"

namespace hinv {

/// Exponential cooling, theta(n) = theta0 * alpha^n. alpha = 0 selects the
/// zero-temperature chain: theta(n) = 0 for every n, i.e. pure descent.
struct CoolingSchedule {
  double theta0 = 100.0;
  double alpha = 0.99;

  void validate() const;
  double temperature(std::int64_t n) const;
};

struct StopRule {
  std::int64_t max_iterations = 30000;
  std::int64_t quiescence = 500;  // stop after this many iterations without a change

  void validate() const;
};

/// A proposal: move `cell` by `step` levels (+1 or -1).
struct Move {
  int cell = 0;
  int step = 0;
};

int neighbor_count(const HabitatConfiguration& config);
/// The k-th valid move in (cell, downward before upward) order.
Move nth_move(const HabitatConfiguration& config, int k);

HabitatConfiguration sample_initial(std::shared_ptr<const ConfigurationSpace> space, Rng& rng);
/// Uniform over valid (cell, move) pairs.
Move random_move(const HabitatConfiguration& config, Rng& rng);
HabitatConfiguration random_neighbor(const HabitatConfiguration& config, Rng& rng);

struct AcceptDecision {
  bool accepted = false;
  std::optional<double> w;  // uniform draw, present only for uphill proposals
};

/// Acceptance test of the annealing loop: downhill or level moves are taken
/// without drawing; otherwise draw w and accept iff w < exp((g_inc - g_cand) / theta).
AcceptDecision metropolis_decision(double g_incumbent, double g_candidate, double theta, Rng& rng);

struct TraceRow {
  std::int64_t n = 0;
  double g_candidate = 0.0;
  double g_incumbent = 0.0;  // before the decision
  double theta = 0.0;
  bool accepted = false;
  std::optional<double> w;
  int changed_cell = -1;
  int new_level = -1;
};

struct AnnealingTrace {
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
  double initial_g = 0.0;
  double final_g = 0.0;
  std::int64_t last_change = -1;  // iteration of the last incumbent change
  std::int64_t iterations = 0;
  bool quiescent = false;  // stopped by the quiescence rule rather than max_iterations
  std::int64_t evaluations = 0;  // objective calls after memoization
  double early_acceptance_rate = 0.0;  // over the first 100 iterations
  std::vector<std::string> warnings;
};

struct AnnealResult {
  HabitatConfiguration estimate;
  AnnealingTrace trace;
};

using Objective = std::function<double(const HabitatConfiguration&)>;

/// Thrown when the objective fails mid-run; carries the rows completed so far.
class AnnealingAborted : public Error {
 public:
  AnnealingAborted(const std::string& what, AnnealingTrace partial) : Error(what), partial_(std::move(partial)) {}
  const AnnealingTrace& partial() const { return partial_; }

 private:
  AnnealingTrace partial_;
};

struct AnnealOptions {
  std::ostream* trace_sink = nullptr;  // rows are streamed here as CSV when set
  std::size_t memo_capacity = 1u << 18;
};

/// Simulated annealing over `space`. The objective is memoized by
/// configuration, so revisited configurations are not re-evaluated.
AnnealResult anneal(const Objective& objective, std::shared_ptr<const ConfigurationSpace> space,
                    const CoolingSchedule& schedule, const StopRule& stop, std::uint64_t seed,
                    const AnnealOptions& options = {});

AnnealResult anneal(const GEvaluator& evaluator, const CoolingSchedule& schedule, const StopRule& stop,
                    std::uint64_t seed, const AnnealOptions& options = {});

AnnealResult anneal(std::shared_ptr<const MeasurementSet> measurements, std::shared_ptr<const ConfigurationSpace> space,
                    const CoolingSchedule& schedule, const StopRule& stop, std::uint64_t seed,
                    const AnnealOptions& options = {});

void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const TraceRow& row);
void write_trace_csv(std::ostream& out, const AnnealingTrace& trace);

/// "cell,level,value" listing.
void write_cell_listing(std::ostream& out, const HabitatConfiguration& config);
HabitatConfiguration read_cell_listing(std::istream& in, std::shared_ptr<const ConfigurationSpace> space);

}  // namespace hinv

#endif  // HINV_ANNEALING_HPP
