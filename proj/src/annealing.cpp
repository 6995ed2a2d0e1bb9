#include "hinv/annealing.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "hinv/error.hpp"

namespace hinv {

void CoolingSchedule::validate() const {
  if (!(theta0 > 0.0)) throw InvalidArgument("initial temperature must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("cooling factor must lie in [0, 1)");
}

double CoolingSchedule::temperature(std::int64_t n) const {
  if (alpha == 0.0) return 0.0;
  return theta0 * std::pow(alpha, static_cast<double>(n));
}

void StopRule::validate() const {
  if (max_iterations < 1) throw InvalidArgument("max iterations must be positive");
  if (quiescence < 1) throw InvalidArgument("quiescence must be positive");
}

int neighbor_count(const HabitatConfiguration& config) {
  const int top = config.space().levels - 1;
  if (top == 0) return 0;
  int count = 0;
  for (auto l : config.levels()) count += (l > 0) + (l < top);
  return count;
}

Move nth_move(const HabitatConfiguration& config, int k) {
  const int top = config.space().levels - 1;
  for (int c = 0; c < config.cell_count(); ++c) {
    const int l = config.level(c);
    if (l > 0) {
      if (k == 0) return {c, -1};
      --k;
    }
    if (l < top) {
      if (k == 0) return {c, +1};
      --k;
    }
  }
  throw InvalidArgument("move index out of range");
}

HabitatConfiguration sample_initial(std::shared_ptr<const ConfigurationSpace> space, Rng& rng) {
  std::vector<std::uint8_t> levels(static_cast<std::size_t>(space->cell_count()));
  for (auto& l : levels) l = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(space->levels)));
  return HabitatConfiguration(std::move(space), std::move(levels));
}

Move random_move(const HabitatConfiguration& config, Rng& rng) {
  const int count = neighbor_count(config);
  if (count == 0) throw InvalidArgument("configuration has no neighbour (single-valued space)");
  return nth_move(config, static_cast<int>(rng.below(static_cast<std::uint64_t>(count))));
}

HabitatConfiguration random_neighbor(const HabitatConfiguration& config, Rng& rng) {
  const Move mv = random_move(config, rng);
  HabitatConfiguration next = config;
  next.set_level(mv.cell, config.level(mv.cell) + mv.step);
  return next;
}

AcceptDecision metropolis_decision(double g_incumbent, double g_candidate, double theta, Rng& rng) {
  if (g_candidate <= g_incumbent) return {true, std::nullopt};
  const double w = rng.uniform_open();
  // theta = 0 gives exp(-inf) = 0, so uphill moves are never taken.
  const double threshold = theta > 0.0 ? std::exp((g_incumbent - g_candidate) / theta) : 0.0;
  return {w < threshold, w};
}

namespace {

struct LevelsHash {
  std::size_t operator()(const std::vector<std::uint8_t>& v) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : v) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

AnnealResult anneal(const Objective& objective, std::shared_ptr<const ConfigurationSpace> space,
                    const CoolingSchedule& schedule, const StopRule& stop, std::uint64_t seed,
                    const AnnealOptions& options) {
  space->validate();
  schedule.validate();
  stop.validate();

  Rng init_rng = Rng::stream(seed, kInitialStream);
  Rng proposal_rng = Rng::stream(seed, kProposalStream);
  Rng accept_rng = Rng::stream(seed, kAcceptanceStream);

  AnnealingTrace trace;
  trace.seed = seed;
  std::unordered_map<std::vector<std::uint8_t>, double, LevelsHash> memo;
  auto g_of = [&](const HabitatConfiguration& c) {
    if (auto it = memo.find(c.levels()); it != memo.end()) return it->second;
    const double g = objective(c);
    ++trace.evaluations;
    if (memo.size() >= options.memo_capacity) memo.clear();
    memo.emplace(c.levels(), g);
    return g;
  };
  if (options.trace_sink) write_trace_header(*options.trace_sink);

  HabitatConfiguration incumbent = sample_initial(space, init_rng);
  std::int64_t accepted_early = 0;
  std::int64_t since_change = 0;
  try {
    double g_inc = g_of(incumbent);
    trace.initial_g = g_inc;
    for (std::int64_t n = 0; n < stop.max_iterations; ++n) {
      const Move mv = random_move(incumbent, proposal_rng);
      HabitatConfiguration candidate = incumbent;
      candidate.set_level(mv.cell, incumbent.level(mv.cell) + mv.step);
      const double g_cand = g_of(candidate);
      const double theta = schedule.temperature(n);
      const AcceptDecision d = metropolis_decision(g_inc, g_cand, theta, accept_rng);

      TraceRow row{n, g_cand, g_inc, theta, d.accepted, d.w, mv.cell, candidate.level(mv.cell)};
      trace.rows.push_back(row);
      if (options.trace_sink) write_trace_row(*options.trace_sink, row);
      trace.iterations = n + 1;
      if (n < 100 && d.accepted) ++accepted_early;

      if (d.accepted) {
        incumbent = std::move(candidate);
        g_inc = g_cand;
        trace.last_change = n;
        since_change = 0;
      } else if (++since_change >= stop.quiescence) {
        trace.quiescent = true;
        break;
      }
    }
    trace.final_g = g_inc;
  } catch (const Error& e) {
    if (options.trace_sink) options.trace_sink->flush();
    throw AnnealingAborted(std::string("annealing aborted: ") + e.what(), std::move(trace));
  }
  if (options.trace_sink) options.trace_sink->flush();

  const std::int64_t early = std::min<std::int64_t>(100, trace.iterations);
  trace.early_acceptance_rate = early > 0 ? static_cast<double>(accepted_early) / early : 0.0;
  if (trace.early_acceptance_rate < 0.9 && schedule.alpha > 0.0) {
    std::ostringstream msg;
    msg << "acceptance rate over the first " << early << " iterations is " << trace.early_acceptance_rate
        << "; the initial temperature may be too low to accept all changes";
    trace.warnings.push_back(msg.str());
  }
  return AnnealResult{std::move(incumbent), std::move(trace)};
}

AnnealResult anneal(const GEvaluator& evaluator, const CoolingSchedule& schedule, const StopRule& stop,
                    std::uint64_t seed, const AnnealOptions& options) {
  auto space = std::make_shared<const ConfigurationSpace>(evaluator.space());
  return anneal([&](const HabitatConfiguration& c) { return evaluator.evaluate(c).total; }, space, schedule, stop,
                seed, options);
}

AnnealResult anneal(std::shared_ptr<const MeasurementSet> measurements, std::shared_ptr<const ConfigurationSpace> space,
                    const CoolingSchedule& schedule, const StopRule& stop, std::uint64_t seed,
                    const AnnealOptions& options) {
  GEvaluator evaluator(std::move(measurements), space);
  return anneal([&](const HabitatConfiguration& c) { return evaluator.evaluate(c).total; }, space, schedule, stop,
                seed, options);
}

void write_trace_header(std::ostream& out) { out << "n,G_candidate,G_incumbent,theta,accepted,w,changed_cell\n"; }

void write_trace_row(std::ostream& out, const TraceRow& row) {
  out << row.n << ',' << std::setprecision(17) << row.g_candidate << ',' << row.g_incumbent << ',' << row.theta
      << ',' << (row.accepted ? 1 : 0) << ',';
  if (row.w) out << *row.w;
  out << ',' << row.changed_cell << '\n';
}

void write_trace_csv(std::ostream& out, const AnnealingTrace& trace) {
  write_trace_header(out);
  for (const auto& row : trace.rows) write_trace_row(out, row);
}

void write_cell_listing(std::ostream& out, const HabitatConfiguration& config) {
  out << "cell,level,value\n" << std::setprecision(17);
  for (int c = 0; c < config.cell_count(); ++c) out << c << ',' << config.level(c) << ',' << config.value(c) << '\n';
}

HabitatConfiguration read_cell_listing(std::istream& in, std::shared_ptr<const ConfigurationSpace> space) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("cell,level", 0) != 0) throw FormatError("missing cell listing header");
  std::vector<std::uint8_t> levels(static_cast<std::size_t>(space->cell_count()), 0);
  std::vector<bool> seen(levels.size(), false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int cell = -1;
    int level = -1;
    char comma = 0;
    if (!(row >> cell >> comma >> level) || comma != ',') throw FormatError("malformed cell listing row: " + line);
    if (cell < 0 || cell >= space->cell_count() || level < 0 || level >= space->levels)
      throw FormatError("cell listing entry out of range: " + line);
    levels[static_cast<std::size_t>(cell)] = static_cast<std::uint8_t>(level);
    seen[static_cast<std::size_t>(cell)] = true;
  }
  for (bool s : seen) {
    if (!s) throw FormatError("cell listing does not cover every cell");
  }
  return HabitatConfiguration(std::move(space), std::move(levels));
}

}  // namespace hinv
