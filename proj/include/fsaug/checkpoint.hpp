#pragma once

#include <filesystem>
#include <string>

#include "fsaug/autoencoder.hpp"
#include "fsaug/datasets.hpp"

namespace fsaug {

// Trained model plus everything needed to reuse it: the normalization fitted
// on its training data and a fingerprint of the config that produced it.
struct Checkpoint {
  AutoencoderModel model;
  NormalizationRecord normalization;
  std::string config_fingerprint;
};

// Versioned binary container: magic + header, the normalization record, then
// each parameter tensor as name, shape, and length-prefixed little-endian
// 64-bit floats. save(load(save(x))) is byte-identical.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// FNV-1a 64 over the config text, as hex.
std::string config_fingerprint(const std::string& config_text);

}  // namespace fsaug
