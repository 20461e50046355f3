#pragma once

#include <string>

#include <Eigen/Dense>

#include "steincast/network.hpp"
#include "steincast/series.hpp"

namespace steincast {

// A trained ensemble plus everything needed to reproduce its predictions:
// the architecture, the fitted transform, and the window geometry.
struct Checkpoint {
  std::string tag;         // BNN-n | DetNN-MAP | DetNN | MLP
  std::string model_kind;  // "conv" | "mlp"
  ParticleEnsemble ensemble;
  Eigen::MatrixXd accumulators;  // adaptive-step state; may be empty
  Transform transform;
  int stride = 1;
};

// Writes <base>.bin (little-endian float64 particle columns, then accumulator
// columns) and <base>.json (versioned layout sidecar). Byte-deterministic.
void save_checkpoint(const std::string& base, const Checkpoint& checkpoint);

// Rebuilds the network from the sidecar and verifies the stored layout against
// it; any mismatch raises ContractError.
Checkpoint load_checkpoint(const std::string& base);

}  // namespace steincast
