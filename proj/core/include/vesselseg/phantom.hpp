#pragma once

#include <cstdint>
#include <optional>

#include "vesselseg/volume.hpp"

namespace vseg {

// Sphere written into the volume only, never into the ground-truth mask;
// used to provoke false positives for refinement tests.
struct PhantomBlob {
  Shape3 center{0, 0, 0};
  double radius_voxels = 3.0;
  double hu = 150.0;
};

// Synthetic vessel-like CT volume with exactly known ground truth. The trunk
// is a curved tube along z; branches are straight tubes rooted on the trunk
// centerline. Tube membership is the exact predicate
// distance(voxel center, polyline) <= radius, evaluated in voxel units.
struct PhantomSpec {
  Shape3 shape{96, 96, 96};
  Spacing3 spacing{1.0, 1.0, 1.0};
  std::uint64_t seed = 1;
  double trunk_radius_voxels = 6.0;
  int branch_count = 2;
  double trunk_hu = 150.0;
  double branch_hu = -450.0;
  double background_hu = -1024.0;
  double noise_std = 20.0;
  std::optional<PhantomBlob> false_positive_blob;
};

struct Phantom {
  Volume3 volume;
  Mask3 mask;
};

// Deterministic for a given spec; throws DegenerateSpec when the tube cannot
// fit the requested shape.
Phantom generate_phantom(const PhantomSpec& spec);

}  // namespace vseg
