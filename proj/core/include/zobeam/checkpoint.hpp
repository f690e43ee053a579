// Trained-surface checkpoints.
//
// A checkpoint carries the surface kind, the feasible box, the trained
// parameters, and enough provenance to refuse evaluation under a different
// configuration: the fingerprint of the exact configuration bytes that
// produced the run. Parameters are stored as 17-significant-digit decimal
// strings, which round-trip IEEE doubles exactly, so a reloaded surface is
// bit-identical to the trained one.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "zobeam/irs.hpp"

namespace zobeam {

struct Checkpoint {
  std::string irs_kind;            // "ideal" or "varactor"
  Eigen::VectorXd theta;           // deployed parameters (post-run iterate)
  Eigen::VectorXd returned_theta;  // certificate iterate (uniform index)
  int returned_index = 0;
  ParameterBox box;
  std::uint64_t config_fingerprint = 0;
  int train_budget = 0;
  int seed = 0;                   // seed index within the experiment
  std::uint64_t run_seed = 0;     // derived seed actually used by the run
  double train_terminal_mean = 0.0;  // trailing-window mean of the train curve
};

// Writes the checkpoint as JSON. Throws std::runtime_error on IO failure.
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);

// Loads and validates a checkpoint: known kind, consistent dimensions, a
// well-formed box, and feasible parameters. Throws std::runtime_error naming
// the file and problem.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace zobeam
