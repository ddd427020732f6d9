#include "vesselseg/volume.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace vseg {

std::array<int, 3> view_permutation(ViewAxis view) {
  switch (view) {
    case ViewAxis::axial:
      return {0, 1, 2};
    case ViewAxis::coronal:
      return {0, 2, 1};
    case ViewAxis::sagittal:
      return {2, 1, 0};
  }
  return {0, 1, 2};
}

std::array<int, 3> invert_permutation(const std::array<int, 3>& perm) {
  std::array<int, 3> inv{};
  for (int d = 0; d < 3; ++d) inv[perm[d]] = d;
  return inv;
}

const char* view_name(ViewAxis view) {
  switch (view) {
    case ViewAxis::axial:
      return "axial";
    case ViewAxis::coronal:
      return "coronal";
    case ViewAxis::sagittal:
      return "sagittal";
  }
  return "axial";
}

std::optional<ViewAxis> view_from_name(std::string_view name) {
  if (name == "axial") return ViewAxis::axial;
  if (name == "coronal") return ViewAxis::coronal;
  if (name == "sagittal") return ViewAxis::sagittal;
  return std::nullopt;
}

std::size_t count_foreground(const Mask3& mask) {
  std::size_t n = 0;
  for (auto v : mask.data()) n += (v != 0);
  return n;
}

namespace {

void check_target_shape(const Shape3& target) {
  for (int a = 0; a < 3; ++a) {
    if (target[a] < 1) {
      throw ShapeMismatch("resample target shape must be positive");
    }
  }
}

// Corner-aligned source position scale per axis: output index t samples
// input position t * scale.
double sample_scale(int src, int dst) {
  if (dst > 1) return static_cast<double>(src - 1) / (dst - 1);
  return 0.0;  // single output voxel samples the corner
}

// Spacing of the resampled grid, kept strictly positive in the degenerate
// single-voxel cases.
double output_spacing(double spacing, int src, int dst) {
  if (src > 1 && dst > 1) return spacing * (src - 1) / (dst - 1);
  if (src > 1 && dst == 1) return spacing * (src - 1);
  return spacing;
}

void warn_degenerate_axes(const Shape3& src, const Shape3& dst) {
  for (int a = 0; a < 3; ++a) {
    if (src[a] == 1 && dst[a] > 1) {
      std::cerr << "vesselseg: warning: axis " << a
                << " has a single voxel; replicating instead of interpolating"
                << std::endl;
    }
  }
}

}  // namespace

Volume3 resample_trilinear(const Volume3& vol, Shape3 target_shape) {
  check_target_shape(target_shape);
  const Shape3& s = vol.shape();
  warn_degenerate_axes(s, target_shape);

  Spacing3 out_spacing;
  std::array<double, 3> scale;
  for (int a = 0; a < 3; ++a) {
    scale[a] = sample_scale(s[a], target_shape[a]);
    out_spacing[a] = output_spacing(vol.spacing()[a], s[a], target_shape[a]);
  }

  Volume3 out(target_shape, out_spacing);
  const int snx = s[0], sny = s[1], snz = s[2];
  auto clampi = [](int v, int lo, int hi) { return std::clamp(v, lo, hi); };

  for (int z = 0; z < target_shape[2]; ++z) {
    const double pz = z * scale[2];
    int z0 = static_cast<int>(std::floor(pz));
    z0 = clampi(z0, 0, std::max(snz - 2, 0));
    const double fz = snz > 1 ? pz - z0 : 0.0;
    const int z1 = clampi(z0 + 1, 0, snz - 1);
    for (int y = 0; y < target_shape[1]; ++y) {
      const double py = y * scale[1];
      int y0 = static_cast<int>(std::floor(py));
      y0 = clampi(y0, 0, std::max(sny - 2, 0));
      const double fy = sny > 1 ? py - y0 : 0.0;
      const int y1 = clampi(y0 + 1, 0, sny - 1);
      for (int x = 0; x < target_shape[0]; ++x) {
        const double px = x * scale[0];
        int x0 = static_cast<int>(std::floor(px));
        x0 = clampi(x0, 0, std::max(snx - 2, 0));
        const double fx = snx > 1 ? px - x0 : 0.0;
        const int x1 = clampi(x0 + 1, 0, snx - 1);

        const double c000 = vol.at(x0, y0, z0);
        const double c100 = vol.at(x1, y0, z0);
        const double c010 = vol.at(x0, y1, z0);
        const double c110 = vol.at(x1, y1, z0);
        const double c001 = vol.at(x0, y0, z1);
        const double c101 = vol.at(x1, y0, z1);
        const double c011 = vol.at(x0, y1, z1);
        const double c111 = vol.at(x1, y1, z1);

        const double c00 = c000 + (c100 - c000) * fx;
        const double c10 = c010 + (c110 - c010) * fx;
        const double c01 = c001 + (c101 - c001) * fx;
        const double c11 = c011 + (c111 - c011) * fx;
        const double c0 = c00 + (c10 - c00) * fy;
        const double c1 = c01 + (c11 - c01) * fy;
        out.at(x, y, z) = static_cast<float>(c0 + (c1 - c0) * fz);
      }
    }
  }
  return out;
}

Mask3 resample_nearest(const Mask3& mask, Shape3 target_shape) {
  check_target_shape(target_shape);
  const Shape3& s = mask.shape();

  Spacing3 out_spacing;
  std::array<double, 3> scale;
  for (int a = 0; a < 3; ++a) {
    scale[a] = sample_scale(s[a], target_shape[a]);
    out_spacing[a] = output_spacing(mask.spacing()[a], s[a], target_shape[a]);
  }

  Mask3 out(target_shape, out_spacing);
  std::vector<int> src_x(target_shape[0]), src_y(target_shape[1]),
      src_z(target_shape[2]);
  for (int x = 0; x < target_shape[0]; ++x) {
    src_x[x] = std::clamp<int>(std::llround(x * scale[0]), 0, s[0] - 1);
  }
  for (int y = 0; y < target_shape[1]; ++y) {
    src_y[y] = std::clamp<int>(std::llround(y * scale[1]), 0, s[1] - 1);
  }
  for (int z = 0; z < target_shape[2]; ++z) {
    src_z[z] = std::clamp<int>(std::llround(z * scale[2]), 0, s[2] - 1);
  }

  for (int z = 0; z < target_shape[2]; ++z) {
    for (int y = 0; y < target_shape[1]; ++y) {
      for (int x = 0; x < target_shape[0]; ++x) {
        out.at(x, y, z) = mask.at(src_x[x], src_y[y], src_z[z]);
      }
    }
  }
  return out;
}

BBox3 bounding_box(const Mask3& mask) {
  const Shape3& s = mask.shape();
  Shape3 lo{s[0], s[1], s[2]};
  Shape3 hi{-1, -1, -1};
  for (int z = 0; z < s[2]; ++z) {
    for (int y = 0; y < s[1]; ++y) {
      for (int x = 0; x < s[0]; ++x) {
        if (mask.at(x, y, z) == 0) continue;
        lo[0] = std::min(lo[0], x);
        lo[1] = std::min(lo[1], y);
        lo[2] = std::min(lo[2], z);
        hi[0] = std::max(hi[0], x);
        hi[1] = std::max(hi[1], y);
        hi[2] = std::max(hi[2], z);
      }
    }
  }
  if (hi[0] < 0) throw EmptyMask("bounding_box: mask has no foreground");
  return BBox3{lo, hi, mask.spacing()};
}

}  // namespace vseg
