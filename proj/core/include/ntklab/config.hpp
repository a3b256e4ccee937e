#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ntklab/bench.hpp"
#include "ntklab/trainer.hpp"

namespace ntklab::config {

/// Minimal TOML-style document: [sections] of key = value lines where value
/// is an integer, float, boolean, quoted string, or a flat array of those.
/// Every key must be consumed by a schema; reject_unknown() reports strays
/// with their line numbers.
class Doc {
public:
  struct Value {
    enum class Type { integer, real, boolean, string, array };
    Type type = Type::integer;
    std::int64_t i = 0;
    double d = 0.0;
    bool b = false;
    std::string s;
    std::vector<Value> array;
    std::size_t line = 0;
    mutable bool consumed = false;
  };

  static Doc parse_file(const std::filesystem::path& path);
  static Doc parse_string(const std::string& text, const std::string& name);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::optional<std::int64_t> fallback = std::nullopt) const;
  double get_real(const std::string& section, const std::string& key,
                  std::optional<double> fallback = std::nullopt) const;
  bool get_bool(const std::string& section, const std::string& key,
                std::optional<bool> fallback = std::nullopt) const;
  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = std::nullopt) const;
  std::vector<std::int64_t> get_int_array(const std::string& section,
                                          const std::string& key,
                                          bool required = true) const;
  std::vector<double> get_real_array(const std::string& section, const std::string& key,
                                     bool required = true) const;
  std::vector<std::string> get_string_array(const std::string& section,
                                            const std::string& key,
                                            bool required = true) const;

  /// Marks a whole section as consumed (for schema-owned free-form blocks).
  void consume_section(const std::string& section);

  /// Throws ConfigError naming every unconsumed key.
  void reject_unknown() const;

  const std::string& name() const { return name_; }

private:
  const Value* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& what) const;

  std::string name_;
  std::map<std::string, std::map<std::string, Value>> sections_;
};

/// Full configuration of one training run: net + strategy + optimizer knobs
/// plus the synthetic dataset block.
struct RunConfig {
  trainer::TrainConfig train;
  bench::SynthSpec data;
};

/// Extra blocks carried by suite/sweep documents.
struct SuiteConfig {
  RunConfig base;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
};

struct SweepConfig {
  RunConfig base;
  std::vector<std::uint64_t> seeds;
};

/// Dynamics-validation configuration (lazy-regime experiment).
struct DynamicsConfig {
  std::size_t width = 512;
  std::size_t tasks = 2;
  std::size_t samples = 8;
  std::size_t input_dim = 2;
  double eta = 1e-3;
  double t_end = 200.0;
  double dt = 1e-3;
  std::size_t record_points = 50;
  std::uint64_t seed = 0;
  // Acceptance tolerances; artifact constants, adjustable here.
  double rel_err_max = 0.10;
  double rate_tol = 0.20;
  double spearman_min = 0.9;

  void validate() const;
};

RunConfig parse_run_config(Doc& doc);
SuiteConfig parse_suite_config(Doc& doc);
SweepConfig parse_sweep_config(Doc& doc);
DynamicsConfig parse_dynamics_config(Doc& doc);

/// Canonical serialization; parsing the output reproduces the value exactly.
std::string write_run_config(const RunConfig& cfg);
std::string write_suite_config(const SuiteConfig& cfg);
std::string write_dynamics_config(const DynamicsConfig& cfg);

/// Applies a sweep override such as "strategy.n" = 4 to a run config.
/// Throws ConfigError for unknown parameter names.
void set_param(RunConfig& cfg, const std::string& name, double value);

/// Builds the NetSpec head roster from the dataset block (one head per task,
/// output width from the generator kind).
void finalize_net(RunConfig& cfg);

} // namespace ntklab::config
