#pragma once

#include <vector>

#include "vesselseg/tensor.hpp"
#include "vesselseg/unet3d.hpp"

namespace vseg {

// Inference abstraction: a deterministic map from a windowed multi-channel
// patch to 1-channel logits at the same spatial shape. The real network sits
// behind this; so does the analytic test double.
class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;
  virtual Tensor4 infer(const Tensor4& patch) const = 0;
};

// Voxelwise linear classifier: logit = sum_c w_c * ch_c - offset. Being
// strictly voxelwise it commutes with any axis permutation, which makes it
// the reference backend for multi-view tests and for phantom runs without
// trained weights.
class AnalyticBackend final : public InferenceBackend {
 public:
  AnalyticBackend() : channel_weights_{1.0, 1.0}, offset_(0.75) {}
  AnalyticBackend(std::vector<double> channel_weights, double offset)
      : channel_weights_(std::move(channel_weights)), offset_(offset) {}

  Tensor4 infer(const Tensor4& patch) const override;

 private:
  std::vector<double> channel_weights_;
  double offset_;
};

// U-Net forward pass over a loaded weight set.
class UnetBackend final : public InferenceBackend {
 public:
  explicit UnetBackend(ModelWeights weights, int threads = 1)
      : weights_(std::move(weights)), threads_(threads) {}

  Tensor4 infer(const Tensor4& patch) const override {
    return unet_forward(weights_, patch, threads_);
  }

  const ModelWeights& weights() const { return weights_; }

 private:
  ModelWeights weights_;
  int threads_;
};

}  // namespace vseg
