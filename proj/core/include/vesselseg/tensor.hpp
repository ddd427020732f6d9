#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vesselseg/volume.hpp"
#include "vesselseg/windowing.hpp"

namespace vseg {

// Dense feature map with shape (channels, nx, ny, nz); the batch dimension is
// fixed at 1 throughout the engine. Per-channel layout matches Grid3: x
// fastest, then y, then z; channels are contiguous slices.
class Tensor4 {
 public:
  Tensor4() = default;

  Tensor4(int channels, int nx, int ny, int nz, float fill = 0.0f);

  int channels() const { return channels_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  Shape3 spatial_shape() const { return {nx_, ny_, nz_}; }
  std::size_t spatial_size() const {
    return static_cast<std::size_t>(nx_) * ny_ * nz_;
  }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int c, int x, int y, int z) const {
    return ((static_cast<std::size_t>(c) * nz_ + z) * ny_ + y) * nx_ + x;
  }

  float& at(int c, int x, int y, int z) { return data_[index(c, x, y, z)]; }
  float at(int c, int x, int y, int z) const { return data_[index(c, x, y, z)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::span<float> channel(int c) {
    return std::span<float>(data_).subspan(c * spatial_size(), spatial_size());
  }
  std::span<const float> channel(int c) const {
    return std::span<const float>(data_).subspan(c * spatial_size(),
                                                 spatial_size());
  }

 private:
  int channels_ = 0;
  int nx_ = 0;
  int ny_ = 0;
  int nz_ = 0;
  std::vector<float> data_;
};

// Elementwise helpers.
void relu_inplace(Tensor4& t);
Tensor4 sigmoid(const Tensor4& t);
Tensor4 concat_channels(const Tensor4& a, const Tensor4& b);

// Spatial axis permutation per view, applied to every channel.
Tensor4 transpose_view(const Tensor4& t, ViewAxis view);
Tensor4 inverse_transpose_view(const Tensor4& t, ViewAxis view);

// Conversions between the grid world and the tensor world.
Tensor4 tensor_from_channels(const MultiChannelVolume& mcv);
Volume3 volume_from_channel(const Tensor4& t, int channel,
                            const Spacing3& spacing);

}  // namespace vseg
