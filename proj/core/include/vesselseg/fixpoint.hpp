#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vesselseg/volume.hpp"

namespace vseg {

struct SegConfig;
class InferenceBackend;

// Parameters of the iterated refinement postprocess.
struct FixpointConfig {
  int iterations = 2;
  int expand_voxels = 5;
  int connectivity = 26;  // 6 or 26
};

void validate(const FixpointConfig& cfg);

// Labeling of all foreground voxels into connected components. Labels are
// contiguous from 1 in first-encounter scan order (x fastest); sizes[i] is
// the voxel count of label i+1.
struct ComponentLabels {
  std::vector<std::int32_t> labels;  // 0 = background
  std::vector<std::size_t> sizes;

  std::size_t component_count() const { return sizes.size(); }
};

ComponentLabels connected_components(const Mask3& mask, int connectivity);

// Keeps only the largest component; ties go to the smallest label, i.e. the
// component encountered first in scan order.
Mask3 max_component(const Mask3& mask, int connectivity);

// Bounding box of the mask dilated by n voxels per face, clamped to the grid.
BBox3 expand_region(const Mask3& mask, int n);

// Iterated (max component -> region expansion -> re-inference) refinement.
// Each iteration re-runs the fine-stage sliding-window inference over the
// expanded region; voxels outside it become background. If an iteration
// produces an empty mask the last non-empty mask is returned with a warning.
Mask3 fixpoint_refine(const Volume3& vol, const Mask3& mask,
                      std::span<const InferenceBackend* const> backends,
                      const FixpointConfig& cfg, const SegConfig& seg_cfg);

}  // namespace vseg
