#include "vesselseg/backend.hpp"

#include <string>

#include "vesselseg/errors.hpp"

namespace vseg {

Tensor4 AnalyticBackend::infer(const Tensor4& patch) const {
  const int channels = static_cast<int>(channel_weights_.size());
  if (patch.channels() != channels) {
    throw ShapeMismatch("analytic backend configured for " +
                        std::to_string(channels) + " channels, patch has " +
                        std::to_string(patch.channels()));
  }
  Tensor4 out(1, patch.nx(), patch.ny(), patch.nz());
  auto dst = out.data();
  const std::size_t n = patch.spatial_size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = -offset_;
    for (int c = 0; c < channels; ++c) {
      acc += channel_weights_[c] * static_cast<double>(patch.channel(c)[i]);
    }
    dst[i] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace vseg
