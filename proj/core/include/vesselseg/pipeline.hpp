#pragma once

#include <span>
#include <string>
#include <vector>

#include "vesselseg/backend.hpp"
#include "vesselseg/fixpoint.hpp"
#include "vesselseg/tensor.hpp"
#include "vesselseg/volume.hpp"
#include "vesselseg/windowing.hpp"

namespace vseg {

// HU used to pad sliding-window borders (air).
inline constexpr float kBackgroundHu = -1024.0f;

// Two-stage segmentation parameters. model_paths is consumed by the CLI to
// build one backend per fine-stage model; the first model also serves the
// coarse stage.
struct SegConfig {
  Shape3 coarse_shape{192, 192, 192};
  Shape3 fine_patch{192, 192, 192};
  int roi_margin_voxels = 2;
  double threshold = 0.5;
  std::vector<ViewAxis> views{ViewAxis::axial, ViewAxis::coronal,
                              ViewAxis::sagittal};
  std::vector<WindowSpec> windows = default_windows();
  std::vector<std::string> model_paths;
  int threads = 1;  // sliding-window tile workers; 0 = auto
};

void validate(const SegConfig& cfg);

// Maps a voxel index between grids of the same physical extent:
// round(c * resized_spacing / original_spacing), clamped to
// [0, original_size-1]. Rounding is half away from zero.
int restore_coordinate(int c, double resized_spacing, double original_spacing,
                       int original_size);

// Coarse stage: resample to cfg.coarse_shape, window, infer, threshold,
// take the prediction's bounding box, widen it by cfg.roi_margin_voxels in
// resized coordinates, then restore to original voxel coordinates.
// Throws EmptyPrediction when nothing clears the threshold.
BBox3 coarse_locate(const Volume3& vol, const InferenceBackend& backend,
                    const SegConfig& cfg);

// Per view: transpose, infer, transpose back; logits are averaged across
// views and the sigmoid is applied once to the average.
Tensor4 multiview_infer(const MultiChannelVolume& patch,
                        const InferenceBackend& backend,
                        std::span<const ViewAxis> views);

// Zero-overlap tiling: the region is padded up to a patch multiple, so every
// voxel belongs to exactly one tile.
struct TilePlan {
  Shape3 region_shape{0, 0, 0};
  Shape3 patch{0, 0, 0};
  Shape3 padded{0, 0, 0};
  std::array<int, 3> tile_counts{0, 0, 0};
  std::vector<Shape3> origins;  // tile lower corners in the padded grid
};

TilePlan make_tile_plan(const Shape3& region_shape, const Shape3& patch);

// Runs multi-view inference tile by tile over the region for every backend;
// pads with background HU, assembles disjoint tiles, crops the padding away.
// Returns one probability volume per backend. Tiles are processed in
// parallel by cfg.threads workers; assembly is write-disjoint, so the result
// does not depend on the worker count.
std::vector<Volume3> sliding_window_infer(
    const Volume3& region_vol, std::span<const InferenceBackend* const> backends,
    const SegConfig& cfg);

// Binarizes each model's probabilities at the threshold and takes the
// voxelwise union.
Mask3 fuse_models(std::span<const Volume3> prob_volumes, double threshold);

// Full pipeline: coarse ROI localization, fine sliding-window inference over
// the cropped ROI, model fusion, embedding into the full grid and fixpoint
// refinement.
Mask3 segment(const Volume3& vol,
              std::span<const InferenceBackend* const> backends,
              const SegConfig& cfg, const FixpointConfig& fixpoint_cfg);

// Training-time patch sampling predicate: positive iff the patch's center
// voxel is labeled foreground. Ships as a utility; no training loop uses it
// here.
bool classify_patch(const BBox3& patch_box, const Mask3& labels);

}  // namespace vseg
