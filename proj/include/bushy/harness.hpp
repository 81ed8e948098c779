#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bushy/dnc_builder.hpp"
#include "bushy/natural.hpp"

namespace bushy {

enum class ExperimentKind {
  kWalkBound,
  kFireworksTrap,
  kDncBounded,
  kDncUnbounded,
  kFamilyAudit,
  kLemmaSuite
};

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

/// A configuration problem, with the offending field as a dotted path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kWalkBound;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  double confidence = 3.0;
  /// 0 uses the hardware concurrency; results never depend on it.
  std::size_t workers = 0;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();
};

/// {"kind", "trials", "seed", "confidence", "workers", "payload"}; unknown
/// fields are errors.
ExperimentSpec parse_spec(const nlohmann::ordered_json& j);
nlohmann::ordered_json default_payload(ExperimentKind kind);

/// Trial i of an experiment with base seed s uses derive_seed(s, i).
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial);

enum class Direction { kAtLeast, kAtMost, kAll };
const char* to_string(Direction d);

struct Statistic {
  std::string name;
  Direction direction = Direction::kAll;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  Rational bound;
  double frequency = 0;
  double sigma = 0;
  double margin = 0;
  bool pass = false;
};

/// Frequency successes/trials against `bound` with margin
/// confidence * sqrt(b(1-b)/trials), b the bound clamped to [0, 1].
Statistic make_statistic(std::string name, Direction direction, std::uint64_t trials,
                         std::uint64_t successes, const Rational& bound, double confidence);

struct StatsReport {
  ExperimentKind kind = ExperimentKind::kWalkBound;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  double confidence = 3.0;
  std::vector<Statistic> stats;
  std::vector<std::pair<std::string, std::string>> details;
  bool pass = false;
  double wall_clock_seconds = 0;
};

/// Validates the payload (ConfigError on failure) and runs the trials.
StatsReport run_experiment(const ExperimentSpec& spec);

std::string report_json(const StatsReport& report, bool with_wall_clock = true);
std::string report_csv(const StatsReport& report, bool with_wall_clock = true);

/// Traps j < traps: fixed-emitter with j + 3 one-bits reading one input value,
/// first attended at |sigma| = j + 1; then an everywhere-partial pacer
/// attended from |sigma| = 1, whose standing assumption draws once per round.
nlohmann::ordered_json adversarial_roster(std::size_t traps);

BoundedConfig bounded_config_from_payload(const nlohmann::ordered_json& payload);
UnboundedConfig unbounded_config_from_payload(const nlohmann::ordered_json& payload);

}  // namespace bushy
