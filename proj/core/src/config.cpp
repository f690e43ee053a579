#include "zobeam/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace zobeam {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= static_cast<std::uint64_t>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

namespace {

[[noreturn]] void fail_at(const std::string& origin, int line,
                          const std::string& message) {
  throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " +
                              message);
}

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

bool valid_key(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
          c == '-')) {
      return false;
    }
  }
  return true;
}

bool valid_section(const std::string& s) {
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = s.find('.', start);
    const std::string part =
        dot == std::string::npos ? s.substr(start) : s.substr(start, dot - start);
    if (!valid_key(part)) return false;
    if (dot == std::string::npos) return true;
    start = dot + 1;
  }
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string parse_string_literal(const std::string& text,
                                 const std::string& origin, int line) {
  std::string out;
  for (std::size_t i = 1; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\\') {
      ++i;
      if (i >= text.size()) fail_at(origin, line, "unterminated escape");
      switch (text[i]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default:
          fail_at(origin, line,
                  std::string("unsupported escape '\\") + text[i] + "'");
      }
    } else if (c == '"') {
      if (!trim(text.substr(i + 1)).empty()) {
        fail_at(origin, line, "unexpected text after closing quote");
      }
      return out;
    } else {
      out += c;
    }
  }
  fail_at(origin, line, "unterminated string");
}

bool parse_integer(const std::string& s, long long* out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return false;
  for (std::size_t j = i; j < s.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
  }
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno == ERANGE || end == s.c_str() || *end != '\0') return false;
  *out = v;
  return true;
}

bool parse_real(const std::string& s, double* out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

ConfigValue parse_scalar(const std::string& text, const std::string& origin,
                         int line) {
  ConfigValue v;
  v.line = line;
  if (!text.empty() && text.front() == '"') {
    v.kind = ConfigValue::Kind::text;
    v.text_value = parse_string_literal(text, origin, line);
    return v;
  }
  if (text == "true" || text == "false") {
    v.kind = ConfigValue::Kind::boolean;
    v.bool_value = text == "true";
    return v;
  }
  if (parse_integer(text, &v.int_value)) {
    v.kind = ConfigValue::Kind::integer;
    v.real_value = static_cast<double>(v.int_value);
    return v;
  }
  if (parse_real(text, &v.real_value)) {
    v.kind = ConfigValue::Kind::real;
    return v;
  }
  fail_at(origin, line, "cannot parse value '" + text + "'");
}

std::vector<std::string> split_array_items(const std::string& interior,
                                           const std::string& origin,
                                           int line) {
  std::vector<std::string> parts;
  std::string current;
  bool in_string = false;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const char c = interior[i];
    if (in_string) {
      current += c;
      if (c == '\\' && i + 1 < interior.size()) {
        current += interior[++i];
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
      current += c;
    } else if (c == '[' || c == ']') {
      fail_at(origin, line, "nested arrays are not supported");
    } else if (c == ',') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (in_string) fail_at(origin, line, "unterminated string in array");
  parts.push_back(current);
  // A trailing comma leaves one empty tail entry; drop it.
  if (parts.size() > 1 && trim(parts.back()).empty()) parts.pop_back();
  return parts;
}

ConfigValue parse_value(const std::string& text, const std::string& origin,
                        int line) {
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') {
      fail_at(origin, line, "arrays must open and close on one line");
    }
    ConfigValue v;
    v.kind = ConfigValue::Kind::array;
    v.line = line;
    const std::string interior = trim(text.substr(1, text.size() - 2));
    if (interior.empty()) return v;
    for (const std::string& raw : split_array_items(interior, origin, line)) {
      const std::string item = trim(raw);
      if (item.empty()) fail_at(origin, line, "empty array element");
      v.items.push_back(parse_scalar(item, origin, line));
    }
    return v;
  }
  return parse_scalar(text, origin, line);
}

const char* kind_name(ConfigValue::Kind kind) {
  switch (kind) {
    case ConfigValue::Kind::integer: return "integer";
    case ConfigValue::Kind::real: return "real";
    case ConfigValue::Kind::boolean: return "boolean";
    case ConfigValue::Kind::text: return "string";
    case ConfigValue::Kind::array: return "array";
  }
  return "unknown";
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text,
                                  const std::string& origin) {
  ConfigFile file;
  file.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail_at(origin, line, "unterminated section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (!valid_section(name)) {
        fail_at(origin, line, "invalid section name '" + name + "'");
      }
      section = name;
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      fail_at(origin, line, "expected 'key = value' or '[section]'");
    }
    const std::string key = trim(s.substr(0, eq));
    if (!valid_key(key)) fail_at(origin, line, "invalid key '" + key + "'");
    const std::string value_text = trim(s.substr(eq + 1));
    if (value_text.empty()) {
      fail_at(origin, line, "missing value for key '" + key + "'");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (file.values_.count(full) != 0) {
      fail_at(origin, line,
              "duplicate key '" + full + "' (first defined on line " +
                  std::to_string(file.values_.at(full).line) + ")");
    }
    file.order_.push_back(full);
    file.values_.emplace(full, parse_value(value_text, origin, line));
  }
  return file;
}

bool ConfigFile::has(const std::string& key) const {
  return values_.count(key) != 0;
}

const ConfigValue& ConfigFile::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw std::invalid_argument(origin_ + ": missing required key '" + key +
                                "'");
  }
  used_.insert(key);
  return it->second;
}

bool ConfigFile::is_array(const std::string& key) const {
  return at(key).kind == ConfigValue::Kind::array;
}

long long ConfigFile::get_int(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.kind != ConfigValue::Kind::integer) {
    throw std::invalid_argument(origin_ + ": key '" + key + "' (line " +
                                std::to_string(v.line) +
                                "): expected an integer, got " +
                                kind_name(v.kind));
  }
  return v.int_value;
}

long long ConfigFile::get_int_or(const std::string& key,
                                 long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double ConfigFile::get_real(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.kind != ConfigValue::Kind::integer &&
      v.kind != ConfigValue::Kind::real) {
    throw std::invalid_argument(origin_ + ": key '" + key + "' (line " +
                                std::to_string(v.line) +
                                "): expected a number, got " +
                                kind_name(v.kind));
  }
  return v.kind == ConfigValue::Kind::integer
             ? static_cast<double>(v.int_value)
             : v.real_value;
}

double ConfigFile::get_real_or(const std::string& key, double fallback) const {
  return has(key) ? get_real(key) : fallback;
}

bool ConfigFile::get_bool(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.kind != ConfigValue::Kind::boolean) {
    throw std::invalid_argument(origin_ + ": key '" + key + "' (line " +
                                std::to_string(v.line) +
                                "): expected true or false, got " +
                                kind_name(v.kind));
  }
  return v.bool_value;
}

bool ConfigFile::get_bool_or(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::string ConfigFile::get_text(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.kind != ConfigValue::Kind::text) {
    throw std::invalid_argument(origin_ + ": key '" + key + "' (line " +
                                std::to_string(v.line) +
                                "): expected a string, got " +
                                kind_name(v.kind));
  }
  return v.text_value;
}

std::string ConfigFile::get_text_or(const std::string& key,
                                    const std::string& fallback) const {
  return has(key) ? get_text(key) : fallback;
}

std::vector<double> ConfigFile::get_real_array(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.kind != ConfigValue::Kind::array) {
    throw std::invalid_argument(origin_ + ": key '" + key + "' (line " +
                                std::to_string(v.line) +
                                "): expected an array, got " +
                                kind_name(v.kind));
  }
  std::vector<double> out;
  out.reserve(v.items.size());
  for (std::size_t i = 0; i < v.items.size(); ++i) {
    const ConfigValue& item = v.items[i];
    if (item.kind != ConfigValue::Kind::integer &&
        item.kind != ConfigValue::Kind::real) {
      throw std::invalid_argument(
          origin_ + ": key '" + key + "' (line " + std::to_string(v.line) +
          "): element " + std::to_string(i) + " is not a number");
    }
    out.push_back(item.kind == ConfigValue::Kind::integer
                      ? static_cast<double>(item.int_value)
                      : item.real_value);
  }
  return out;
}

std::vector<long long> ConfigFile::get_int_array(
    const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.kind != ConfigValue::Kind::array) {
    throw std::invalid_argument(origin_ + ": key '" + key + "' (line " +
                                std::to_string(v.line) +
                                "): expected an array, got " +
                                kind_name(v.kind));
  }
  std::vector<long long> out;
  out.reserve(v.items.size());
  for (std::size_t i = 0; i < v.items.size(); ++i) {
    const ConfigValue& item = v.items[i];
    if (item.kind != ConfigValue::Kind::integer) {
      throw std::invalid_argument(
          origin_ + ": key '" + key + "' (line " + std::to_string(v.line) +
          "): element " + std::to_string(i) + " is not an integer");
    }
    out.push_back(item.int_value);
  }
  return out;
}

Eigen::VectorXd ConfigFile::get_broadcast(const std::string& key,
                                          int count) const {
  const ConfigValue& v = at(key);
  if (v.kind == ConfigValue::Kind::array) {
    const std::vector<double> values = get_real_array(key);
    if (static_cast<int>(values.size()) != count) {
      throw std::invalid_argument(
          origin_ + ": key '" + key + "' (line " + std::to_string(v.line) +
          "): expected " + std::to_string(count) + " entries, got " +
          std::to_string(values.size()));
    }
    return Eigen::Map<const Eigen::VectorXd>(values.data(), count);
  }
  return Eigen::VectorXd::Constant(count, get_real(key));
}

std::vector<std::string> ConfigFile::subsections(
    const std::string& section) const {
  const std::string prefix = section + ".";
  std::vector<std::string> names;
  for (const std::string& key : order_) {
    if (key.rfind(prefix, 0) != 0) continue;
    const std::string rest = key.substr(prefix.size());
    const std::size_t dot = rest.find('.');
    if (dot == std::string::npos) continue;
    const std::string name = rest.substr(0, dot);
    bool seen = false;
    for (const std::string& existing : names) {
      if (existing == name) {
        seen = true;
        break;
      }
    }
    if (!seen) names.push_back(name);
  }
  return names;
}

std::vector<std::string> ConfigFile::unused_keys() const {
  std::vector<std::string> out;
  for (const std::string& key : order_) {
    if (used_.count(key) == 0) out.push_back(key);
  }
  return out;
}

// --- Experiment loading -------------------------------------------------------

namespace {

int to_int(long long value, const std::string& origin,
           const std::string& field) {
  if (value < std::numeric_limits<int>::min() ||
      value > std::numeric_limits<int>::max()) {
    throw std::invalid_argument(origin + ": " + field +
                                ": value out of range");
  }
  return static_cast<int>(value);
}

std::vector<int> to_int_list(const std::vector<long long>& values,
                             const std::string& origin,
                             const std::string& field, long long minimum) {
  std::vector<int> out;
  out.reserve(values.size());
  for (long long v : values) {
    if (v < minimum) {
      throw std::invalid_argument(origin + ": " + field + ": entries must be >= " +
                                  std::to_string(minimum));
    }
    out.push_back(to_int(v, origin, field));
  }
  return out;
}

void require_distinct(const std::vector<int>& values,
                      const std::string& origin, const std::string& field) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (values[i] == values[j]) {
        throw std::invalid_argument(origin + ": " + field +
                                    ": entries must be distinct (" +
                                    std::to_string(values[i]) + " repeats)");
      }
    }
  }
}

}  // namespace

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();

  const ConfigFile f = ConfigFile::parse_text(bytes, path);
  ExperimentSpec spec;
  spec.config_path = path;
  spec.config_fingerprint = fnv1a64(bytes);

  Scenario& sc = spec.scenario;
  sc.tx_antennas = to_int(f.get_int("scenario.tx_antennas"), path,
                          "scenario.tx_antennas");
  sc.users = to_int(f.get_int("scenario.users"), path, "scenario.users");
  sc.irs_elements = to_int(f.get_int("scenario.irs_elements"), path,
                           "scenario.irs_elements");
  sc.power_budget_watts = f.get_real("scenario.power_budget_watts");
  const int user_count = std::max(sc.users, 0);
  sc.noise_var_watts = f.get_broadcast("scenario.noise_var_watts", user_count);
  sc.weights = f.has("scenario.weights")
                   ? f.get_broadcast("scenario.weights", user_count)
                   : Eigen::VectorXd::Ones(user_count);
  sc.rician_direct = f.get_real_or("scenario.rician_direct", sc.rician_direct);
  sc.rician_tx_irs = f.get_real_or("scenario.rician_tx_irs", sc.rician_tx_irs);
  sc.rician_irs_user =
      f.get_real_or("scenario.rician_irs_user", sc.rician_irs_user);
  sc.gain_direct = f.get_real_or("scenario.gain_direct", sc.gain_direct);
  sc.gain_tx_irs = f.get_real_or("scenario.gain_tx_irs", sc.gain_tx_irs);
  sc.gain_irs_user = f.get_real_or("scenario.gain_irs_user", sc.gain_irs_user);
  sc.geometry_seed = static_cast<std::uint64_t>(
      f.get_int_or("scenario.geometry_seed", 1));
  sc.irs_correlation =
      f.get_real_or("scenario.irs_correlation", sc.irs_correlation);
  require_valid(sc);

  IrsMap& irs = spec.irs;
  irs.elements = sc.irs_elements;
  const std::string kind = f.get_text_or("irs.kind", "ideal");
  if (kind == "ideal") {
    irs.kind = IrsKind::ideal;
  } else if (kind == "varactor") {
    irs.kind = IrsKind::varactor;
  } else {
    throw std::invalid_argument(path +
                                ": irs.kind: expected \"ideal\" or "
                                "\"varactor\", got \"" +
                                kind + "\"");
  }
  VaractorCircuit& circuit = irs.circuit;
  circuit.frequency_hz = f.get_real_or("irs.frequency_hz",
                                       circuit.frequency_hz);
  circuit.series_resistance_ohms = f.get_real_or(
      "irs.series_resistance_ohms", circuit.series_resistance_ohms);
  circuit.series_inductance_henries = f.get_real_or(
      "irs.series_inductance_henries", circuit.series_inductance_henries);
  circuit.patch_inductance_henries = f.get_real_or(
      "irs.patch_inductance_henries", circuit.patch_inductance_henries);
  circuit.z0_ohms = f.get_real_or("irs.z0_ohms", circuit.z0_ohms);
  circuit.capacitance_min_picofarads =
      f.get_real_or("irs.capacitance_min_picofarads",
                    circuit.capacitance_min_picofarads);
  circuit.capacitance_max_picofarads =
      f.get_real_or("irs.capacitance_max_picofarads",
                    circuit.capacitance_max_picofarads);
  if (irs.kind == IrsKind::varactor) validate_circuit(circuit);

  OptimizerConfig& opt = spec.optimizer;
  opt.iterations =
      to_int(f.get_int("optimizer.iterations"), path, "optimizer.iterations");
  opt.warm_start = f.get_bool_or("optimizer.warm_start", true);
  const std::string step_rule =
      f.get_text_or("optimizer.step_rule", "constant");
  if (step_rule == "constant") {
    opt.step_size = f.get_real("optimizer.step_size");
    if (!(opt.step_size > 0.0) || !std::isfinite(opt.step_size)) {
      throw std::invalid_argument(
          path + ": optimizer.step_size must be a positive real, got " +
          std::to_string(opt.step_size));
    }
  } else if (step_rule == "analytic") {
    try {
      opt.step_size = step_size_analytic(f.get_real("optimizer.step_delta_f"),
                                         f.get_real("optimizer.step_c2"),
                                         f.get_real("optimizer.step_rho"),
                                         opt.iterations);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(path + ": optimizer.step_rule \"analytic\": " +
                                  err.what());
    }
  } else {
    throw std::invalid_argument(path +
                                ": optimizer.step_rule: expected "
                                "\"constant\" or \"analytic\", got \"" +
                                step_rule + "\"");
  }
  const std::string smoothing_rule =
      f.get_text_or("optimizer.smoothing_rule", "constant");
  if (smoothing_rule == "constant") {
    opt.smoothing = f.get_real("optimizer.smoothing");
    if (!(opt.smoothing > 0.0) || !std::isfinite(opt.smoothing)) {
      throw std::invalid_argument(
          path + ": optimizer.smoothing must be a positive real, got " +
          std::to_string(opt.smoothing));
    }
  } else if (smoothing_rule == "dimension") {
    try {
      opt.smoothing =
          smoothing_dimension_rule(f.get_real("optimizer.smoothing_scale"),
                                   sc.effective_dim(), opt.iterations);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(
          path + ": optimizer.smoothing_rule \"dimension\": " + err.what());
    }
  } else {
    throw std::invalid_argument(path +
                                ": optimizer.smoothing_rule: expected "
                                "\"constant\" or \"dimension\", got \"" +
                                smoothing_rule + "\"");
  }
  opt.value_gap_stride = to_int(f.get_int_or("optimizer.value_gap_stride", 0),
                                path, "optimizer.value_gap_stride");
  if (opt.value_gap_stride > 0) {
    opt.reference.restarts =
        to_int(f.get_int_or("optimizer.reference_restarts", 16), path,
               "optimizer.reference_restarts");
    opt.reference.steps = to_int(f.get_int_or("optimizer.reference_steps", 600),
                                 path, "optimizer.reference_steps");
  }

  spec.spec_seed =
      static_cast<std::uint64_t>(f.get_int_or("experiment.spec_seed", 1));
  if (f.has("experiment.seeds")) {
    if (f.is_array("experiment.seeds")) {
      spec.seeds = to_int_list(f.get_int_array("experiment.seeds"), path,
                               "experiment.seeds", 0);
      require_distinct(spec.seeds, path, "experiment.seeds");
      if (spec.seeds.empty()) {
        throw std::invalid_argument(path +
                                    ": experiment.seeds: must not be empty");
      }
    } else {
      const int count = to_int(f.get_int("experiment.seeds"), path,
                               "experiment.seeds");
      if (count < 1) {
        throw std::invalid_argument(path +
                                    ": experiment.seeds: must be >= 1");
      }
      spec.seeds.resize(count);
      for (int i = 0; i < count; ++i) spec.seeds[i] = i;
    }
  } else {
    spec.seeds = {0};
  }

  if (f.has("experiment.sweep_budgets")) {
    spec.sweep_budgets = to_int_list(f.get_int_array("experiment.sweep_budgets"),
                                     path, "experiment.sweep_budgets", 1);
    require_distinct(spec.sweep_budgets, path, "experiment.sweep_budgets");
  }
  spec.train_budget = to_int(f.get_int_or("experiment.train_budget", 0), path,
                             "experiment.train_budget");
  if (spec.train_budget < 0) {
    throw std::invalid_argument(path +
                                ": experiment.train_budget: must be >= 0");
  }
  if (f.has("experiment.deploy_budgets")) {
    spec.deploy_budgets =
        to_int_list(f.get_int_array("experiment.deploy_budgets"), path,
                    "experiment.deploy_budgets", 1);
    require_distinct(spec.deploy_budgets, path, "experiment.deploy_budgets");
  }
  spec.physical_budget =
      to_int(f.get_int_or("experiment.physical_budget", 10), path,
             "experiment.physical_budget");
  if (spec.physical_budget < 1) {
    throw std::invalid_argument(path +
                                ": experiment.physical_budget: must be >= 1");
  }
  spec.eval_realizations =
      to_int(f.get_int_or("experiment.eval_realizations", 200), path,
             "experiment.eval_realizations");
  if (spec.eval_realizations < 1) {
    throw std::invalid_argument(
        path + ": experiment.eval_realizations: must be >= 1");
  }
  spec.smoothing_window =
      to_int(f.get_int_or("experiment.smoothing_window", 200), path,
             "experiment.smoothing_window");
  if (spec.smoothing_window < 1) {
    throw std::invalid_argument(path +
                                ": experiment.smoothing_window: must be >= 1");
  }

  for (const std::string& name : f.subsections("schedule")) {
    const std::string base = "schedule." + name;
    const std::vector<int> marks =
        to_int_list(f.get_int_array(base + ".marks"), path, base + ".marks", 0);
    const std::vector<int> budgets = to_int_list(
        f.get_int_array(base + ".budgets"), path, base + ".budgets", 1);
    if (marks.size() != budgets.size() || marks.empty()) {
      throw std::invalid_argument(
          path + ": " + base +
          ": marks and budgets must have the same nonzero length");
    }
    NamedSchedule schedule;
    schedule.name = name;
    for (std::size_t i = 0; i < marks.size(); ++i) {
      schedule.stages.push_back({marks[i], OracleBudget{budgets[i], {}}});
    }
    try {
      validate_schedule(schedule.stages);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(path + ": " + base + ": " + err.what());
    }
    spec.schedules.push_back(std::move(schedule));
  }

  const std::vector<std::string> leftovers = f.unused_keys();
  if (!leftovers.empty()) {
    std::string joined;
    for (const std::string& key : leftovers) {
      if (!joined.empty()) joined += ", ";
      joined += key;
    }
    throw std::invalid_argument(path + ": unknown or unused keys: " + joined);
  }
  return spec;
}

}  // namespace zobeam
