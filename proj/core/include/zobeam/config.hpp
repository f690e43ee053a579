// Experiment configuration: a small typed key/value format plus the loader
// that turns a file into scenario, surface, optimizer, and experiment
// settings.
//
// The accepted syntax is the familiar sectioned key = value form:
//   # comment
//   [section]            or [section.subsection]
//   key = 42             integer
//   key = 1.5e-3         real (integers convert where a real is expected)
//   key = true           boolean
//   key = "text"         string with \" \\ \n \t escapes
//   key = [1, 2, 3]      single-line array of scalars
// Keys are addressed fully qualified ("optimizer.step_size"). Duplicate
// keys, malformed lines, and out-of-range numbers are rejected with the
// file name and line number. Loaders consume keys through the typed getters
// and reject any key left over, so misspelled fields fail loudly instead of
// silently falling back to defaults.
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "zobeam/channel.hpp"
#include "zobeam/irs.hpp"
#include "zobeam/optimizer.hpp"

namespace zobeam {

// FNV-1a 64-bit hash, used to fingerprint configuration bytes so artifacts
// can be tied to the exact file that produced them.
std::uint64_t fnv1a64(const std::string& bytes);

struct ConfigValue {
  enum class Kind { integer, real, boolean, text, array };
  Kind kind = Kind::integer;
  long long int_value = 0;
  double real_value = 0.0;
  bool bool_value = false;
  std::string text_value;
  std::vector<ConfigValue> items;
  int line = 0;
};

class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text,
                               const std::string& origin);

  bool has(const std::string& key) const;
  // True when the key exists and holds an array. Throws when absent.
  bool is_array(const std::string& key) const;

  // Typed getters throw std::invalid_argument naming the file, key, and the
  // expected type. The *_or variants fall back when the key is absent.
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long fallback) const;
  double get_real(const std::string& key) const;
  double get_real_or(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::string get_text(const std::string& key) const;
  std::string get_text_or(const std::string& key,
                          const std::string& fallback) const;
  std::vector<double> get_real_array(const std::string& key) const;
  std::vector<long long> get_int_array(const std::string& key) const;
  // Scalar broadcasts to `count` copies; an array must have exactly `count`
  // entries.
  Eigen::VectorXd get_broadcast(const std::string& key, int count) const;

  // Distinct second-level names under a section, in file order: subsections
  // of "schedule" for keys "schedule.x.marks" yields {"x"}.
  std::vector<std::string> subsections(const std::string& section) const;

  // Keys in file order.
  const std::vector<std::string>& keys() const { return order_; }
  const std::string& origin() const { return origin_; }

  // Every key never touched by a typed getter; loaders turn these into
  // unknown-field errors.
  std::vector<std::string> unused_keys() const;

 private:
  const ConfigValue& at(const std::string& key) const;

  std::string origin_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, ConfigValue> values_;
  mutable std::unordered_set<std::string> used_;
};

// A budget schedule with a name, for schedule-comparison experiments.
struct NamedSchedule {
  std::string name;
  std::vector<BudgetStage> stages;
};

// Everything one experiment file describes. Optimizer seed and budget
// schedule members are placeholders: the harness derives per-run seeds from
// spec_seed and installs the budget under test before each run.
struct ExperimentSpec {
  Scenario scenario;
  IrsMap irs;
  OptimizerConfig optimizer;

  std::vector<int> seeds;
  std::uint64_t spec_seed = 1;

  std::vector<int> sweep_budgets;
  int train_budget = 0;
  std::vector<int> deploy_budgets;
  int physical_budget = 10;
  std::vector<NamedSchedule> schedules;

  int eval_realizations = 200;
  int smoothing_window = 200;

  std::uint64_t config_fingerprint = 0;
  std::string config_path;
};

// Parses and validates an experiment file. Throws std::invalid_argument
// naming every offending field.
ExperimentSpec load_experiment(const std::string& path);

}  // namespace zobeam
