#include "vesselseg/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "vesselseg/parallel.hpp"

namespace vseg {

void validate(const SegConfig& cfg) {
  for (int a = 0; a < 3; ++a) {
    if (cfg.coarse_shape[a] < 1 || cfg.fine_patch[a] < 1) {
      throw ConfigError("patch shapes must be positive");
    }
  }
  if (cfg.roi_margin_voxels < 0) {
    throw ConfigError("roi_margin_voxels must be >= 0");
  }
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) {
    throw ConfigError("threshold must lie strictly between 0 and 1");
  }
  if (cfg.views.empty()) throw ConfigError("at least one view required");
  if (cfg.windows.empty()) throw ConfigError("at least one window required");
  for (const auto& w : cfg.windows) {
    if (!(w.lo < w.hi)) throw ConfigError("window lo must be below hi");
  }
}

int restore_coordinate(int c, double resized_spacing, double original_spacing,
                       int original_size) {
  const double restored = c * resized_spacing / original_spacing;
  const long long rounded = std::llround(restored);
  return static_cast<int>(
      std::clamp<long long>(rounded, 0, original_size - 1));
}

namespace {

Mask3 threshold_probability(const Tensor4& prob, const Spacing3& spacing,
                            double threshold) {
  Mask3 mask(prob.spatial_shape(), spacing);
  auto src = prob.channel(0);
  auto dst = mask.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] > threshold ? 1 : 0;
  }
  return mask;
}

}  // namespace

BBox3 coarse_locate(const Volume3& vol, const InferenceBackend& backend,
                    const SegConfig& cfg) {
  validate(cfg);
  const Shape3& s = vol.shape();
  if (static_cast<std::size_t>(s[0]) * s[1] * s[2] <= 1) {
    throw ShapeMismatch("coarse_locate: volume must be larger than one voxel");
  }

  const Volume3 resized = resample_trilinear(vol, cfg.coarse_shape);
  const MultiChannelVolume channels = make_channels(resized, cfg.windows);
  const Tensor4 logits = backend.infer(tensor_from_channels(channels));
  const Tensor4 prob = sigmoid(logits);
  const Mask3 pred = threshold_probability(prob, resized.spacing(), cfg.threshold);
  if (count_foreground(pred) == 0) {
    throw EmptyPrediction("coarse stage predicted no foreground");
  }

  const BBox3 box = bounding_box(pred);
  BBox3 out;
  out.frame_spacing = vol.spacing();
  for (int a = 0; a < 3; ++a) {
    // Margin is added in resized coordinates before restoration; the final
    // clamp to the original grid happens inside restore_coordinate.
    const int lo = box.lo[a] - cfg.roi_margin_voxels;
    const int hi = box.hi[a] + cfg.roi_margin_voxels;
    out.lo[a] = restore_coordinate(lo, resized.spacing()[a], vol.spacing()[a],
                                   s[a]);
    out.hi[a] = restore_coordinate(hi, resized.spacing()[a], vol.spacing()[a],
                                   s[a]);
  }
  return out;
}

Tensor4 multiview_infer(const MultiChannelVolume& patch,
                        const InferenceBackend& backend,
                        std::span<const ViewAxis> views) {
  if (views.empty()) {
    throw ConfigError("multiview_infer: at least one view required");
  }
  const Tensor4 input = tensor_from_channels(patch);

  std::vector<double> acc(input.spatial_size(), 0.0);
  Shape3 expected = input.spatial_shape();
  for (ViewAxis view : views) {
    const Tensor4 transposed = transpose_view(input, view);
    const Tensor4 logits = backend.infer(transposed);
    if (logits.channels() != 1) {
      throw ShapeMismatch("backend must return 1-channel logits");
    }
    const Tensor4 back = inverse_transpose_view(logits, view);
    if (back.spatial_shape() != expected) {
      throw ShapeMismatch("backend changed the spatial shape");
    }
    auto data = back.channel(0);
    for (std::size_t i = 0; i < data.size(); ++i) acc[i] += data[i];
  }

  // Average the per-view logits, then activate once.
  const double inv = 1.0 / static_cast<double>(views.size());
  Tensor4 prob(1, input.nx(), input.ny(), input.nz());
  auto dst = prob.data();
  for (std::size_t i = 0; i < acc.size(); ++i) {
    dst[i] = static_cast<float>(1.0 / (1.0 + std::exp(-(acc[i] * inv))));
  }
  return prob;
}

TilePlan make_tile_plan(const Shape3& region_shape, const Shape3& patch) {
  TilePlan plan;
  plan.region_shape = region_shape;
  plan.patch = patch;
  for (int a = 0; a < 3; ++a) {
    if (region_shape[a] < 1 || patch[a] < 1) {
      throw ShapeMismatch("make_tile_plan: shapes must be positive");
    }
    plan.tile_counts[a] = (region_shape[a] + patch[a] - 1) / patch[a];
    plan.padded[a] = plan.tile_counts[a] * patch[a];
  }
  plan.origins.reserve(static_cast<std::size_t>(plan.tile_counts[0]) *
                       plan.tile_counts[1] * plan.tile_counts[2]);
  for (int tz = 0; tz < plan.tile_counts[2]; ++tz) {
    for (int ty = 0; ty < plan.tile_counts[1]; ++ty) {
      for (int tx = 0; tx < plan.tile_counts[0]; ++tx) {
        plan.origins.push_back(
            {tx * patch[0], ty * patch[1], tz * patch[2]});
      }
    }
  }
  return plan;
}

std::vector<Volume3> sliding_window_infer(
    const Volume3& region_vol,
    std::span<const InferenceBackend* const> backends, const SegConfig& cfg) {
  validate(cfg);
  if (backends.empty()) {
    throw ConfigError("sliding_window_infer: at least one backend required");
  }

  const TilePlan plan = make_tile_plan(region_vol.shape(), cfg.fine_patch);
  Volume3 padded(plan.padded, region_vol.spacing(), kBackgroundHu);
  embed(padded, Shape3{0, 0, 0}, region_vol);

  std::vector<Volume3> outputs(
      backends.size(), Volume3(plan.padded, region_vol.spacing(), 0.0f));

  // Tiles never overlap, so each output voxel is written by exactly one
  // tile and the assembly is independent of scheduling.
  parallel_for(plan.origins.size(), cfg.threads, [&](std::size_t tile) {
    const Shape3& lo = plan.origins[tile];
    const BBox3 tile_box{
        lo,
        {lo[0] + cfg.fine_patch[0] - 1, lo[1] + cfg.fine_patch[1] - 1,
         lo[2] + cfg.fine_patch[2] - 1},
        region_vol.spacing()};
    const Volume3 patch_vol = crop(padded, tile_box);
    const MultiChannelVolume channels = make_channels(patch_vol, cfg.windows);
    for (std::size_t m = 0; m < backends.size(); ++m) {
      const Tensor4 prob = multiview_infer(channels, *backends[m], cfg.views);
      const Volume3 prob_vol =
          volume_from_channel(prob, 0, region_vol.spacing());
      embed(outputs[m], lo, prob_vol);
    }
  });

  if (plan.padded != region_vol.shape()) {
    const BBox3 region_box{{0, 0, 0},
                           {region_vol.shape()[0] - 1, region_vol.shape()[1] - 1,
                            region_vol.shape()[2] - 1},
                           region_vol.spacing()};
    for (auto& out : outputs) out = crop(out, region_box);
  }
  return outputs;
}

Mask3 fuse_models(std::span<const Volume3> prob_volumes, double threshold) {
  if (prob_volumes.empty()) {
    throw ShapeMismatch("fuse_models: no probability volumes");
  }
  const Shape3& s = prob_volumes.front().shape();
  for (const auto& p : prob_volumes) {
    if (p.shape() != s) {
      throw ShapeMismatch("fuse_models: probability volume shapes differ");
    }
  }

  // Union of the binarized model outputs: adding another model can only add
  // foreground.
  Mask3 out(s, prob_volumes.front().spacing());
  auto dst = out.data();
  for (const auto& p : prob_volumes) {
    auto src = p.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] > threshold) dst[i] = 1;
    }
  }
  return out;
}

Mask3 segment(const Volume3& vol,
              std::span<const InferenceBackend* const> backends,
              const SegConfig& cfg, const FixpointConfig& fixpoint_cfg) {
  validate(cfg);
  validate(fixpoint_cfg);
  if (backends.empty()) {
    throw ConfigError("segment: at least one backend required");
  }

  const BBox3 roi = coarse_locate(vol, *backends.front(), cfg);
  const Volume3 roi_vol = crop(vol, roi);
  const std::vector<Volume3> probs = sliding_window_infer(roi_vol, backends, cfg);
  const Mask3 roi_mask = fuse_models(probs, cfg.threshold);

  Mask3 full(vol.shape(), vol.spacing(), 0);
  embed(full, roi.lo, roi_mask);
  return fixpoint_refine(vol, full, backends, fixpoint_cfg, cfg);
}

bool classify_patch(const BBox3& patch_box, const Mask3& labels) {
  Shape3 center;
  for (int a = 0; a < 3; ++a) {
    center[a] = patch_box.lo[a] + (patch_box.hi[a] - patch_box.lo[a]) / 2;
  }
  if (!labels.in_bounds(center[0], center[1], center[2])) {
    throw ShapeMismatch("classify_patch: patch center outside label grid");
  }
  return labels.at(center[0], center[1], center[2]) != 0;
}

}  // namespace vseg
