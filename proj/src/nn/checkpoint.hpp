#pragma once

#include <string>

#include "encode/encode.hpp"
#include "encode/reference.hpp"
#include "nn/network.hpp"

namespace pedrisk {

// Everything needed to score a new cohort: the network, the reference layout
// the inputs must be encoded against, and the feature scaler fitted on the
// training data. `meta_json` carries free-form provenance (config hash,
// seeds, training settings) and is preserved verbatim.
struct ModelBundle {
  ArchitectureSpec spec;
  LossKind loss = LossKind::CrossEntropy;
  ReferenceStructure ref;
  NeighborhoodSpec nbr_spec;
  Network net;
  FeatureScaler scaler;
  std::string meta_json = "{}";
};

// Binary checkpoint: magic + version + JSON header + raw little-endian f64
// blocks (parameters, scaler bounds) and an i32 block for the neighborhood
// table. Round-trips bit-exactly.
void save_model(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model(const std::string& path);

}  // namespace pedrisk
