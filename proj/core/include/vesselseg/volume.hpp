#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vesselseg/errors.hpp"

namespace vseg {

using Shape3 = std::array<int, 3>;
using Spacing3 = std::array<double, 3>;

// Regular 3D scalar grid with per-axis voxel spacing in mm.
// Linear layout: x fastest, then y, then z.
template <typename T>
class Grid3 {
 public:
  Grid3() = default;

  Grid3(Shape3 shape, Spacing3 spacing, T fill = T{})
      : shape_(shape), spacing_(spacing) {
    validate();
    data_.assign(voxel_product(), fill);
  }

  Grid3(Shape3 shape, Spacing3 spacing, std::vector<T> data)
      : shape_(shape), spacing_(spacing), data_(std::move(data)) {
    validate();
    if (data_.size() != voxel_product()) {
      throw ShapeMismatch("grid data length does not match shape");
    }
  }

  const Shape3& shape() const { return shape_; }
  const Spacing3& spacing() const { return spacing_; }
  int nx() const { return shape_[0]; }
  int ny() const { return shape_[1]; }
  int nz() const { return shape_[2]; }

  std::size_t voxel_count() const { return data_.size(); }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>((z * shape_[1] + y)) * shape_[0] + x;
  }

  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && x < shape_[0] && y >= 0 && y < shape_[1] && z >= 0 &&
           z < shape_[2];
  }

  T& at(int x, int y, int z) { return data_[index(x, y, z)]; }
  const T& at(int x, int y, int z) const { return data_[index(x, y, z)]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

 private:
  std::size_t voxel_product() const {
    return static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];
  }

  void validate() const {
    for (int a = 0; a < 3; ++a) {
      if (shape_[a] < 1) {
        throw ShapeMismatch("grid axis " + std::to_string(a) +
                            " must have at least 1 voxel");
      }
      if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a])) {
        throw ShapeMismatch("grid spacing must be positive and finite");
      }
    }
  }

  Shape3 shape_{0, 0, 0};
  Spacing3 spacing_{1.0, 1.0, 1.0};
  std::vector<T> data_;
};

// CT volume in Hounsfield units.
using Volume3 = Grid3<float>;

// Binary segmentation mask aligned to a Volume3; values are 0 or 1.
using Mask3 = Grid3<std::uint8_t>;

// Inclusive voxel-index box plus the spacing of the grid the indices live
// in. Carrying the frame spacing is what makes coordinate restoration
// between grids of different resolution possible.
struct BBox3 {
  Shape3 lo{0, 0, 0};
  Shape3 hi{0, 0, 0};
  Spacing3 frame_spacing{1.0, 1.0, 1.0};

  Shape3 extent() const {
    return {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
  }

  bool contains(const BBox3& inner) const {
    for (int a = 0; a < 3; ++a) {
      if (inner.lo[a] < lo[a] || inner.hi[a] > hi[a]) return false;
    }
    return true;
  }

  bool contains_point(int x, int y, int z) const {
    return x >= lo[0] && x <= hi[0] && y >= lo[1] && y <= hi[1] && z >= lo[2] &&
           z <= hi[2];
  }
};

// The three inference planes, expressed as fixed axis permutations.
// axial is the identity; coronal swaps y/z; sagittal swaps x/z.
enum class ViewAxis { axial, coronal, sagittal };

// Output axis d of the transposed grid takes input axis perm[d].
std::array<int, 3> view_permutation(ViewAxis view);
std::array<int, 3> invert_permutation(const std::array<int, 3>& perm);
const char* view_name(ViewAxis view);
std::optional<ViewAxis> view_from_name(std::string_view name);

namespace detail {

template <typename T>
Grid3<T> apply_permutation(const Grid3<T>& g, const std::array<int, 3>& perm) {
  const Shape3& s = g.shape();
  const Spacing3& sp = g.spacing();
  Shape3 out_shape{s[perm[0]], s[perm[1]], s[perm[2]]};
  Spacing3 out_spacing{sp[perm[0]], sp[perm[1]], sp[perm[2]]};
  Grid3<T> out(out_shape, out_spacing);
  const std::array<int, 3> inv = invert_permutation(perm);
  for (int z = 0; z < s[2]; ++z) {
    for (int y = 0; y < s[1]; ++y) {
      for (int x = 0; x < s[0]; ++x) {
        const std::array<int, 3> src{x, y, z};
        out.at(src[inv[0]], src[inv[1]], src[inv[2]]) = g.at(x, y, z);
      }
    }
  }
  return out;
}

}  // namespace detail

template <typename T>
Grid3<T> transpose_view(const Grid3<T>& g, ViewAxis view) {
  return detail::apply_permutation(g, view_permutation(view));
}

template <typename T>
Grid3<T> inverse_transpose_view(const Grid3<T>& g, ViewAxis view) {
  return detail::apply_permutation(g, invert_permutation(view_permutation(view)));
}

template <typename T>
Grid3<T> crop(const Grid3<T>& g, const BBox3& box) {
  const Shape3& s = g.shape();
  for (int a = 0; a < 3; ++a) {
    if (box.lo[a] < 0 || box.hi[a] >= s[a] || box.lo[a] > box.hi[a]) {
      throw ShapeMismatch("crop box outside grid bounds");
    }
  }
  const Shape3 ext = box.extent();
  Grid3<T> out(ext, g.spacing());
  for (int z = 0; z < ext[2]; ++z) {
    for (int y = 0; y < ext[1]; ++y) {
      for (int x = 0; x < ext[0]; ++x) {
        out.at(x, y, z) = g.at(box.lo[0] + x, box.lo[1] + y, box.lo[2] + z);
      }
    }
  }
  return out;
}

// Pastes src into dst with src's origin at lo. The region must fit.
template <typename T>
void embed(Grid3<T>& dst, const Shape3& lo, const Grid3<T>& src) {
  const Shape3& ss = src.shape();
  const Shape3& ds = dst.shape();
  for (int a = 0; a < 3; ++a) {
    if (lo[a] < 0 || lo[a] + ss[a] > ds[a]) {
      throw ShapeMismatch("embed region outside grid bounds");
    }
  }
  for (int z = 0; z < ss[2]; ++z) {
    for (int y = 0; y < ss[1]; ++y) {
      for (int x = 0; x < ss[0]; ++x) {
        dst.at(lo[0] + x, lo[1] + y, lo[2] + z) = src.at(x, y, z);
      }
    }
  }
}

std::size_t count_foreground(const Mask3& mask);

// Trilinear resampling with the corner-aligned convention: output corner
// voxels sample input corner voxels and the output carries spacing scaled by
// (input_shape-1)/(target_shape-1) per axis. Out-of-range sample positions
// clamp to the boundary voxel. A 1-voxel input axis resampled to a larger
// target replicates and emits a warning on stderr.
Volume3 resample_trilinear(const Volume3& vol, Shape3 target_shape);

// Nearest-neighbor resampling under the same coordinate convention; output
// stays binary.
Mask3 resample_nearest(const Mask3& mask, Shape3 target_shape);

// Tightest inclusive box containing all foreground voxels.
// Throws EmptyMask when there is none.
BBox3 bounding_box(const Mask3& mask);

}  // namespace vseg
