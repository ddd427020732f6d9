#include "vesselseg/fixpoint.hpp"

#include <algorithm>
#include <iostream>

#include "vesselseg/pipeline.hpp"

namespace vseg {

void validate(const FixpointConfig& cfg) {
  if (cfg.iterations < 0) throw ConfigError("fixpoint iterations must be >= 0");
  if (cfg.expand_voxels < 0) {
    throw ConfigError("fixpoint expand_voxels must be >= 0");
  }
  if (cfg.connectivity != 6 && cfg.connectivity != 26) {
    throw ConfigError("fixpoint connectivity must be 6 or 26");
  }
}

namespace {

std::vector<std::array<int, 3>> neighbor_offsets(int connectivity) {
  std::vector<std::array<int, 3>> offsets;
  if (connectivity == 6) {
    offsets = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
               {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  } else {
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          offsets.push_back({dx, dy, dz});
        }
      }
    }
  }
  return offsets;
}

}  // namespace

ComponentLabels connected_components(const Mask3& mask, int connectivity) {
  if (connectivity != 6 && connectivity != 26) {
    throw ConfigError("connected_components: connectivity must be 6 or 26");
  }
  const Shape3& s = mask.shape();
  const auto offsets = neighbor_offsets(connectivity);

  ComponentLabels out;
  out.labels.assign(mask.voxel_count(), 0);

  // Iterative BFS in scan order; labels are assigned in first-encounter
  // order, which fixes the max_component tie-break.
  std::vector<std::array<int, 3>> frontier;
  std::int32_t next_label = 0;
  for (int z = 0; z < s[2]; ++z) {
    for (int y = 0; y < s[1]; ++y) {
      for (int x = 0; x < s[0]; ++x) {
        const std::size_t idx = mask.index(x, y, z);
        if (mask.data()[idx] == 0 || out.labels[idx] != 0) continue;
        ++next_label;
        std::size_t size = 0;
        frontier.clear();
        frontier.push_back({x, y, z});
        out.labels[idx] = next_label;
        while (!frontier.empty()) {
          const auto [cx, cy, cz] = frontier.back();
          frontier.pop_back();
          ++size;
          for (const auto& d : offsets) {
            const int nxp = cx + d[0], nyp = cy + d[1], nzp = cz + d[2];
            if (!mask.in_bounds(nxp, nyp, nzp)) continue;
            const std::size_t nidx = mask.index(nxp, nyp, nzp);
            if (mask.data()[nidx] == 0 || out.labels[nidx] != 0) continue;
            out.labels[nidx] = next_label;
            frontier.push_back({nxp, nyp, nzp});
          }
        }
        out.sizes.push_back(size);
      }
    }
  }
  return out;
}

Mask3 max_component(const Mask3& mask, int connectivity) {
  const ComponentLabels cc = connected_components(mask, connectivity);
  if (cc.component_count() == 0) {
    throw EmptyMask("max_component: mask has no foreground");
  }
  std::int32_t best = 1;
  for (std::size_t i = 1; i < cc.sizes.size(); ++i) {
    if (cc.sizes[i] > cc.sizes[best - 1]) best = static_cast<std::int32_t>(i + 1);
  }
  Mask3 out(mask.shape(), mask.spacing());
  auto dst = out.data();
  for (std::size_t i = 0; i < cc.labels.size(); ++i) {
    dst[i] = cc.labels[i] == best ? 1 : 0;
  }
  return out;
}

BBox3 expand_region(const Mask3& mask, int n) {
  BBox3 box = bounding_box(mask);  // EmptyMask propagates
  const Shape3& s = mask.shape();
  for (int a = 0; a < 3; ++a) {
    box.lo[a] = std::max(box.lo[a] - n, 0);
    box.hi[a] = std::min(box.hi[a] + n, s[a] - 1);
  }
  return box;
}

Mask3 fixpoint_refine(const Volume3& vol, const Mask3& mask,
                      std::span<const InferenceBackend* const> backends,
                      const FixpointConfig& cfg, const SegConfig& seg_cfg) {
  validate(cfg);
  if (mask.shape() != vol.shape()) {
    throw ShapeMismatch("fixpoint_refine: mask not aligned to volume");
  }

  Mask3 current = mask;
  for (int it = 0; it < cfg.iterations; ++it) {
    if (count_foreground(current) == 0) {
      std::cerr << "vesselseg: warning: fixpoint iteration " << it
                << " received an empty mask; stopping" << std::endl;
      return current;
    }
    const Mask3 largest = max_component(current, cfg.connectivity);
    const BBox3 region = expand_region(largest, cfg.expand_voxels);

    const Volume3 region_vol = crop(vol, region);
    const std::vector<Volume3> probs =
        sliding_window_infer(region_vol, backends, seg_cfg);
    const Mask3 region_mask = fuse_models(probs, seg_cfg.threshold);

    Mask3 next(vol.shape(), vol.spacing(), 0);
    embed(next, region.lo, region_mask);
    if (count_foreground(next) == 0) {
      std::cerr << "vesselseg: warning: fixpoint re-inference emptied the "
                   "mask; keeping the previous one"
                << std::endl;
      return current;
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace vseg
