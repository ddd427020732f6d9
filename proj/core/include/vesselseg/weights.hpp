#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vesselseg/errors.hpp"

namespace vseg {

struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

// A complete, validated set of weights for one U-Net instance. The tensor
// names form the manifest; level count, per-level channel widths and the
// input channel count are derived from it during validation.
//
// Manifest for L levels with widths w0..w{L-1} (kernel layout is
// (out, in, kz, ky, kx)):
//   enc{i}.conv1.{weight,bias}   i = 0..L-2, conv1: w{i-1} (or in_ch) -> wi
//   enc{i}.conv2.{weight,bias}   wi -> wi
//   bottleneck.conv1/conv2.{weight,bias}
//   dec{i}.up.{weight,bias}      w{i+1} -> wi, applied after upsampling
//   dec{i}.conv1.{weight,bias}   2*wi -> wi, input is concat(skip, up)
//   dec{i}.conv2.{weight,bias}   wi -> wi
//   out.{weight,bias}            1x1x1, w0 -> 1
class ModelWeights {
 public:
  // Validates the set and derives the architecture; throws IncompleteWeights
  // on missing, extra, or inconsistently shaped tensors.
  static ModelWeights from_tensors(std::vector<NamedTensor> tensors);

  const NamedTensor& tensor(std::string_view name) const;
  std::span<const NamedTensor> tensors() const { return tensors_; }

  int levels() const { return levels_; }
  int in_channels() const { return in_channels_; }
  const std::vector<int>& widths() const { return widths_; }
  std::size_t parameter_count() const;

 private:
  ModelWeights() = default;

  std::vector<NamedTensor> tensors_;
  std::unordered_map<std::string, std::size_t> by_name_;
  int levels_ = 0;
  int in_channels_ = 0;
  std::vector<int> widths_;
};

// "UNW1" container: magic, u32 tensor count, per tensor (u16 name length,
// name, u8 ndim, u32 dims, f32 payload), all little-endian, closed by a
// CRC-32 of every preceding byte.
ModelWeights decode_weights(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_weights(const ModelWeights& weights);
ModelWeights load_weights(const std::filesystem::path& path);
void save_weights(const ModelWeights& weights,
                  const std::filesystem::path& path);

// He-normal initialization: weight std = sqrt(2 / fan_in) with fan_in =
// in_ch * kernel volume; biases start at zero. Deterministic per seed.
ModelWeights init_weights_random(int levels, int base_width,
                                 std::uint64_t seed, int in_channels = 2);

}  // namespace vseg
