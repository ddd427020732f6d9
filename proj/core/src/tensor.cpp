#include "vesselseg/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "vesselseg/errors.hpp"

namespace vseg {

Tensor4::Tensor4(int channels, int nx, int ny, int nz, float fill)
    : channels_(channels), nx_(nx), ny_(ny), nz_(nz) {
  if (channels < 1 || nx < 1 || ny < 1 || nz < 1) {
    throw ShapeMismatch("tensor dims must be positive");
  }
  data_.assign(static_cast<std::size_t>(channels) * nx * ny * nz, fill);
}

void relu_inplace(Tensor4& t) {
  for (auto& v : t.data()) v = std::max(v, 0.0f);
}

Tensor4 sigmoid(const Tensor4& t) {
  Tensor4 out(t.channels(), t.nx(), t.ny(), t.nz());
  auto src = t.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(src[i]))));
  }
  return out;
}

Tensor4 concat_channels(const Tensor4& a, const Tensor4& b) {
  if (a.spatial_shape() != b.spatial_shape()) {
    throw ShapeMismatch("concat_channels: spatial shapes differ");
  }
  Tensor4 out(a.channels() + b.channels(), a.nx(), a.ny(), a.nz());
  std::copy(a.data().begin(), a.data().end(), out.data().begin());
  std::copy(b.data().begin(), b.data().end(),
            out.data().begin() + static_cast<std::ptrdiff_t>(a.size()));
  return out;
}

namespace {

Tensor4 permute_spatial(const Tensor4& t, const std::array<int, 3>& perm) {
  const Shape3 s = t.spatial_shape();
  const Shape3 out_shape{s[perm[0]], s[perm[1]], s[perm[2]]};
  Tensor4 out(t.channels(), out_shape[0], out_shape[1], out_shape[2]);
  const std::array<int, 3> inv = invert_permutation(perm);
  for (int c = 0; c < t.channels(); ++c) {
    for (int z = 0; z < s[2]; ++z) {
      for (int y = 0; y < s[1]; ++y) {
        for (int x = 0; x < s[0]; ++x) {
          const std::array<int, 3> src{x, y, z};
          out.at(c, src[inv[0]], src[inv[1]], src[inv[2]]) = t.at(c, x, y, z);
        }
      }
    }
  }
  return out;
}

}  // namespace

Tensor4 transpose_view(const Tensor4& t, ViewAxis view) {
  return permute_spatial(t, view_permutation(view));
}

Tensor4 inverse_transpose_view(const Tensor4& t, ViewAxis view) {
  return permute_spatial(t, invert_permutation(view_permutation(view)));
}

Tensor4 tensor_from_channels(const MultiChannelVolume& mcv) {
  if (mcv.channels.empty()) {
    throw ShapeMismatch("tensor_from_channels: no channels");
  }
  const Shape3& s = mcv.shape();
  Tensor4 out(mcv.channel_count(), s[0], s[1], s[2]);
  for (int c = 0; c < mcv.channel_count(); ++c) {
    if (mcv.channels[c].shape() != s) {
      throw ShapeMismatch("tensor_from_channels: channel shapes differ");
    }
    auto src = mcv.channels[c].data();
    auto dst = out.channel(c);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

Volume3 volume_from_channel(const Tensor4& t, int channel,
                            const Spacing3& spacing) {
  if (channel < 0 || channel >= t.channels()) {
    throw ShapeMismatch("volume_from_channel: channel out of range");
  }
  auto src = t.channel(channel);
  return Volume3(t.spatial_shape(), spacing,
                 std::vector<float>(src.begin(), src.end()));
}

}  // namespace vseg
