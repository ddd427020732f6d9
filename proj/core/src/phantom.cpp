#include "vesselseg/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "vesselseg/rng.hpp"

namespace vseg {

namespace {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Squared distance from point p to segment [a, b], in voxel units.
double point_segment_dist2(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = sub(b, a);
  const Vec3 ap = sub(p, a);
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(ap, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec3 q{a.x + t * ab.x, a.y + t * ab.y, a.z + t * ab.z};
  const Vec3 d = sub(p, q);
  return dot(d, d);
}

// Marks every voxel whose center lies within `radius` of the polyline.
// Rasterization IS the membership predicate, evaluated per segment over the
// segment's bounding slab, so the union over segments is exact.
void rasterize_tube(const std::vector<Vec3>& polyline, double radius,
                    const Shape3& shape, std::vector<std::uint8_t>& flags) {
  const double r2 = radius * radius;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Vec3& a = polyline[i];
    const Vec3& b = polyline[i + 1];
    Shape3 lo, hi;
    for (int axis = 0; axis < 3; ++axis) {
      const double av = axis == 0 ? a.x : axis == 1 ? a.y : a.z;
      const double bv = axis == 0 ? b.x : axis == 1 ? b.y : b.z;
      lo[axis] = std::max(
          0, static_cast<int>(std::floor(std::min(av, bv) - radius - 1.0)));
      hi[axis] = std::min(
          shape[axis] - 1,
          static_cast<int>(std::ceil(std::max(av, bv) + radius + 1.0)));
    }
    for (int z = lo[2]; z <= hi[2]; ++z) {
      for (int y = lo[1]; y <= hi[1]; ++y) {
        for (int x = lo[0]; x <= hi[0]; ++x) {
          const std::size_t idx =
              (static_cast<std::size_t>(z) * shape[1] + y) * shape[0] + x;
          if (flags[idx]) continue;
          const Vec3 p{static_cast<double>(x), static_cast<double>(y),
                       static_cast<double>(z)};
          if (point_segment_dist2(p, a, b) <= r2) flags[idx] = 1;
        }
      }
    }
  }
}

}  // namespace

Phantom generate_phantom(const PhantomSpec& spec) {
  const Shape3& s = spec.shape;
  for (int a = 0; a < 3; ++a) {
    if (s[a] < 16) {
      throw DegenerateSpec("phantom shape must be at least 16 per axis");
    }
  }
  const double r = spec.trunk_radius_voxels;
  if (r < 1.0) throw DegenerateSpec("trunk radius must be at least 1 voxel");
  if (spec.branch_count < 0) throw DegenerateSpec("negative branch count");
  if (spec.noise_std < 0.0) throw DegenerateSpec("negative noise std");

  const double cx = (s[0] - 1) / 2.0;
  const double cy = (s[1] - 1) / 2.0;
  const double amp_max_x = (s[0] - 1) / 2.0 - r - 2.0;
  const double amp_max_y = (s[1] - 1) / 2.0 - r - 2.0;
  const double z0 = std::ceil(r) + 2.0;
  const double z1 = s[2] - 1 - (std::ceil(r) + 2.0);
  if (amp_max_x < 0.0 || amp_max_y < 0.0 || z1 - z0 < 4.0) {
    throw DegenerateSpec("trunk tube does not fit the requested shape");
  }

  CounterRng rng(spec.seed);
  const double amp_x = amp_max_x * rng.uniform(0.25, 0.6);
  const double amp_y = amp_max_y * rng.uniform(0.25, 0.6);
  const double freq_x = rng.uniform(0.5, 1.0);
  const double freq_y = rng.uniform(0.5, 1.0);
  const double phase_x = rng.uniform(0.0, kTwoPi);
  const double phase_y = rng.uniform(0.0, kTwoPi);

  const int samples = 4 * s[2];
  std::vector<Vec3> trunk(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    trunk[i] = {cx + amp_x * std::sin(kTwoPi * freq_x * t + phase_x),
                cy + amp_y * std::sin(kTwoPi * freq_y * t + phase_y),
                z0 + t * (z1 - z0)};
  }

  const double branch_radius = std::max(1.5, r / 2.0);
  std::vector<std::vector<Vec3>> branches;
  const double min_dim = std::min({s[0], s[1], s[2]});
  for (int b = 0; b < spec.branch_count; ++b) {
    const double t = rng.uniform(0.25, 0.75);
    const Vec3 root = trunk[static_cast<std::size_t>(t * (samples - 1))];
    Vec3 dir{rng.normal(), rng.normal(), rng.normal()};
    const double len = norm(dir);
    if (len < 1e-6) {
      dir = {1.0, 0.0, 0.0};
    } else {
      dir = {dir.x / len, dir.y / len, dir.z / len};
    }
    const double reach = rng.uniform(0.18, 0.30) * min_dim;
    Vec3 tip{root.x + reach * dir.x, root.y + reach * dir.y,
             root.z + reach * dir.z};
    tip.x = std::clamp(tip.x, branch_radius + 2.0, s[0] - 3.0 - branch_radius);
    tip.y = std::clamp(tip.y, branch_radius + 2.0, s[1] - 3.0 - branch_radius);
    tip.z = std::clamp(tip.z, branch_radius + 2.0, s[2] - 3.0 - branch_radius);
    branches.push_back({root, tip});
  }

  const std::size_t voxels =
      static_cast<std::size_t>(s[0]) * s[1] * s[2];
  std::vector<std::uint8_t> trunk_flags(voxels, 0), branch_flags(voxels, 0);
  rasterize_tube(trunk, r, s, trunk_flags);
  for (const auto& br : branches) {
    rasterize_tube(br, branch_radius, s, branch_flags);
  }

  Volume3 vol(s, spec.spacing, static_cast<float>(spec.background_hu));
  Mask3 mask(s, spec.spacing, 0);
  auto vdata = vol.data();
  auto mdata = mask.data();
  for (std::size_t i = 0; i < voxels; ++i) {
    if (trunk_flags[i]) {
      vdata[i] = static_cast<float>(spec.trunk_hu);
      mdata[i] = 1;
    } else if (branch_flags[i]) {
      vdata[i] = static_cast<float>(spec.branch_hu);
      mdata[i] = 1;
    }
  }

  if (spec.false_positive_blob) {
    const PhantomBlob& blob = *spec.false_positive_blob;
    const double br2 = blob.radius_voxels * blob.radius_voxels;
    const int reach = static_cast<int>(std::ceil(blob.radius_voxels));
    for (int z = std::max(0, blob.center[2] - reach);
         z <= std::min(s[2] - 1, blob.center[2] + reach); ++z) {
      for (int y = std::max(0, blob.center[1] - reach);
           y <= std::min(s[1] - 1, blob.center[1] + reach); ++y) {
        for (int x = std::max(0, blob.center[0] - reach);
             x <= std::min(s[0] - 1, blob.center[0] + reach); ++x) {
          const double dx = x - blob.center[0];
          const double dy = y - blob.center[1];
          const double dz = z - blob.center[2];
          if (dx * dx + dy * dy + dz * dz <= br2) {
            vol.at(x, y, z) = static_cast<float>(blob.hu);  // volume only
          }
        }
      }
    }
  }

  if (spec.noise_std > 0.0) {
    const std::uint64_t noise_seed = mix64(spec.seed ^ 0x6e6f697365ull);
    for (std::size_t i = 0; i < voxels; ++i) {
      vdata[i] += static_cast<float>(spec.noise_std * gaussian_at(noise_seed, i));
    }
  }

  return Phantom{std::move(vol), std::move(mask)};
}

}  // namespace vseg
