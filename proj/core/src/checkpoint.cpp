#include "zobeam/checkpoint.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "zobeam/emit.hpp"

namespace zobeam {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "zobeam-checkpoint-1";

json encode_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(format_exact(v(i)));
  }
  return out;
}

Eigen::VectorXd decode_vector(const json& j, const std::string& field) {
  if (!j.is_array()) {
    throw std::runtime_error("field '" + field + "' must be an array");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const json& item : j) {
    if (!item.is_string()) {
      throw std::runtime_error("field '" + field +
                               "' must hold decimal strings");
    }
    out(i++) = parse_exact(item.get<std::string>());
  }
  return out;
}

std::string encode_u64(std::uint64_t value) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

std::uint64_t decode_u64(const json& j, const std::string& field) {
  if (!j.is_string()) {
    throw std::runtime_error("field '" + field + "' must be a hex string");
  }
  const std::string text = j.get<std::string>();
  std::uint64_t value = 0;
  if (std::sscanf(text.c_str(), "%llx",
                  reinterpret_cast<unsigned long long*>(&value)) != 1) {
    throw std::runtime_error("field '" + field + "' is not valid hex");
  }
  return value;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  if (checkpoint.irs_kind != "ideal" && checkpoint.irs_kind != "varactor") {
    throw std::invalid_argument("save_checkpoint: unknown surface kind '" +
                                checkpoint.irs_kind + "'");
  }
  if (checkpoint.theta.size() != checkpoint.box.dim()) {
    throw std::invalid_argument(
        "save_checkpoint: theta length " +
        std::to_string(checkpoint.theta.size()) +
        " does not match the box dimension " +
        std::to_string(checkpoint.box.dim()));
  }
  if (!checkpoint.box.contains(checkpoint.theta, 1e-9)) {
    throw std::invalid_argument(
        "save_checkpoint: theta lies outside the feasible box");
  }
  json j;
  j["format"] = kFormatTag;
  j["irs_kind"] = checkpoint.irs_kind;
  j["theta"] = encode_vector(checkpoint.theta);
  j["returned_theta"] = encode_vector(checkpoint.returned_theta);
  j["returned_index"] = checkpoint.returned_index;
  j["box_lower"] = encode_vector(checkpoint.box.lower);
  j["box_upper"] = encode_vector(checkpoint.box.upper);
  j["config_fingerprint"] = encode_u64(checkpoint.config_fingerprint);
  j["train_budget"] = checkpoint.train_budget;
  j["seed"] = checkpoint.seed;
  j["run_seed"] = encode_u64(checkpoint.run_seed);
  j["train_terminal_mean"] = format_exact(checkpoint.train_terminal_mean);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw std::runtime_error("checkpoint " + path + ": " + err.what());
  }
  try {
    if (!j.contains("format") || j["format"] != kFormatTag) {
      throw std::runtime_error("unrecognized format tag");
    }
    Checkpoint checkpoint;
    checkpoint.irs_kind = j.at("irs_kind").get<std::string>();
    if (checkpoint.irs_kind != "ideal" && checkpoint.irs_kind != "varactor") {
      throw std::runtime_error("unknown surface kind '" +
                               checkpoint.irs_kind + "'");
    }
    checkpoint.theta = decode_vector(j.at("theta"), "theta");
    checkpoint.returned_theta =
        decode_vector(j.at("returned_theta"), "returned_theta");
    checkpoint.returned_index = j.at("returned_index").get<int>();
    if (checkpoint.returned_index < 0) {
      throw std::runtime_error("returned_index must be >= 0");
    }
    checkpoint.box.lower = decode_vector(j.at("box_lower"), "box_lower");
    checkpoint.box.upper = decode_vector(j.at("box_upper"), "box_upper");
    checkpoint.config_fingerprint =
        decode_u64(j.at("config_fingerprint"), "config_fingerprint");
    checkpoint.train_budget = j.at("train_budget").get<int>();
    checkpoint.seed = j.at("seed").get<int>();
    checkpoint.run_seed = decode_u64(j.at("run_seed"), "run_seed");
    checkpoint.train_terminal_mean =
        parse_exact(j.at("train_terminal_mean").get<std::string>());

    validate_box(checkpoint.box);
    if (checkpoint.theta.size() != checkpoint.box.dim()) {
      throw std::runtime_error("theta length does not match the box");
    }
    if (checkpoint.returned_theta.size() != 0 &&
        checkpoint.returned_theta.size() != checkpoint.box.dim()) {
      throw std::runtime_error("returned_theta length does not match the box");
    }
    if (!checkpoint.box.contains(checkpoint.theta, 1e-9)) {
      throw std::runtime_error("theta lies outside the feasible box");
    }
    return checkpoint;
  } catch (const json::exception& err) {
    throw std::runtime_error("checkpoint " + path + ": " + err.what());
  } catch (const std::invalid_argument& err) {
    throw std::runtime_error("checkpoint " + path + ": " + err.what());
  } catch (const std::runtime_error& err) {
    const std::string what = err.what();
    if (what.rfind("checkpoint ", 0) == 0) throw;
    throw std::runtime_error("checkpoint " + path + ": " + what);
  }
}

}  // namespace zobeam
