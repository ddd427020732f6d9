#pragma once

#include <span>

#include "vesselseg/tensor.hpp"
#include "vesselseg/weights.hpp"

namespace vseg {

// Shape-preserving 3D cross-correlation with zero padding and stride 1.
// Kernel layout is (out_ch, in_ch, kz, ky, kx) with odd k; accumulation is
// in f64 so results are reproducible to within f32 rounding everywhere.
Tensor4 conv3d(const Tensor4& input, std::span<const float> kernel, int out_ch,
               int in_ch, int k, std::span<const float> bias, int threads = 1);

// Factor-2 max reduction over 2x2x2 blocks; all spatial dims must be even.
Tensor4 maxpool2(const Tensor4& input);

// Factor-2 nearest-neighbor replication.
Tensor4 upsample2_nearest(const Tensor4& input);

// Full encoder/decoder forward pass. Input channels must match the weights'
// manifest and every spatial dim must be divisible by 2^(levels-1).
// Returns 1-channel logits at the input's spatial shape; no final
// activation (it is applied once after multi-view averaging).
Tensor4 unet_forward(const ModelWeights& weights, const Tensor4& patch,
                     int threads = 1);

}  // namespace vseg
