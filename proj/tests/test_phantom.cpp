#include <doctest.h>

#include <set>

#include "vesselseg/fixpoint.hpp"
#include "vesselseg/phantom.hpp"

using namespace vseg;

TEST_SUITE("phantom") {

TEST_CASE("noise-free trunk-only phantom has exactly two intensity values") {
  PhantomSpec spec;
  spec.shape = {48, 48, 48};
  spec.branch_count = 0;
  spec.noise_std = 0.0;
  spec.trunk_radius_voxels = 5.0;
  const Phantom ph = generate_phantom(spec);

  std::set<float> values(ph.volume.data().begin(), ph.volume.data().end());
  CHECK(values == std::set<float>{-1024.0f, 150.0f});

  // The mask is exactly the set of trunk-intensity voxels.
  for (std::size_t i = 0; i < ph.volume.voxel_count(); ++i) {
    CHECK((ph.volume.data()[i] == 150.0f) == (ph.mask.data()[i] == 1));
  }
}

TEST_CASE("same seed is bit-identical, different seed is not") {
  PhantomSpec spec;
  spec.shape = {32, 32, 32};
  spec.trunk_radius_voxels = 4.0;
  spec.seed = 42;
  const Phantom a = generate_phantom(spec);
  const Phantom b = generate_phantom(spec);
  CHECK(std::equal(a.volume.data().begin(), a.volume.data().end(),
                   b.volume.data().begin()));
  CHECK(std::equal(a.mask.data().begin(), a.mask.data().end(),
                   b.mask.data().begin()));

  spec.seed = 43;
  const Phantom c = generate_phantom(spec);
  CHECK(!std::equal(a.volume.data().begin(), a.volume.data().end(),
                    c.volume.data().begin()));
}

TEST_CASE("ground truth is a single 26-connected component") {
  for (std::uint64_t seed : {1ull, 7ull, 19ull}) {
    PhantomSpec spec;
    spec.shape = {64, 64, 64};
    spec.seed = seed;
    spec.branch_count = 3;
    spec.trunk_radius_voxels = 5.0;
    const Phantom ph = generate_phantom(spec);
    CHECK(connected_components(ph.mask, 26).component_count() == 1);
  }
}

TEST_CASE("foreground HU values come from the declared classes") {
  PhantomSpec spec;
  spec.shape = {48, 48, 48};
  spec.seed = 3;
  spec.branch_count = 2;
  spec.noise_std = 0.0;
  spec.trunk_radius_voxels = 5.0;
  const Phantom ph = generate_phantom(spec);
  for (std::size_t i = 0; i < ph.volume.voxel_count(); ++i) {
    const float v = ph.volume.data()[i];
    if (ph.mask.data()[i]) {
      CHECK((v == 150.0f || v == -450.0f));
    } else {
      CHECK(v == -1024.0f);
    }
  }
}

TEST_CASE("foreground fraction stays inside the sanity envelope") {
  for (std::uint64_t seed : {2ull, 11ull, 29ull}) {
    PhantomSpec spec;
    spec.seed = seed;  // default 96^3, radius 6, two branches
    const Phantom ph = generate_phantom(spec);
    const double fraction = static_cast<double>(count_foreground(ph.mask)) /
                            static_cast<double>(ph.mask.voxel_count());
    CHECK(fraction > 0.001);
    CHECK(fraction < 0.10);
  }
}

TEST_CASE("false-positive blob lands in the volume but not the mask") {
  PhantomSpec spec;
  spec.shape = {64, 64, 64};
  spec.seed = 4;
  spec.branch_count = 0;
  spec.noise_std = 0.0;
  spec.trunk_radius_voxels = 5.0;
  PhantomBlob blob;
  blob.center = {6, 6, 6};
  blob.radius_voxels = 3.0;
  blob.hu = 150.0;
  spec.false_positive_blob = blob;
  const Phantom ph = generate_phantom(spec);

  CHECK(ph.volume.at(6, 6, 6) == 150.0f);
  CHECK(ph.mask.at(6, 6, 6) == 0);

  // Same spec without the blob differs only inside the blob sphere.
  spec.false_positive_blob.reset();
  const Phantom clean = generate_phantom(spec);
  CHECK(std::equal(ph.mask.data().begin(), ph.mask.data().end(),
                   clean.mask.data().begin()));
  std::size_t changed = 0;
  for (std::size_t i = 0; i < ph.volume.voxel_count(); ++i) {
    if (ph.volume.data()[i] != clean.volume.data()[i]) ++changed;
  }
  CHECK(changed > 0);
  CHECK(changed < 200);  // ~4/3 pi r^3 voxels
}

TEST_CASE("impossible geometry raises DegenerateSpec") {
  PhantomSpec spec;
  spec.shape = {24, 24, 24};
  spec.trunk_radius_voxels = 64.0;  // cannot fit
  CHECK_THROWS_AS(generate_phantom(spec), DegenerateSpec);

  PhantomSpec tiny;
  tiny.shape = {8, 8, 8};  // below the minimum
  CHECK_THROWS_AS(generate_phantom(tiny), DegenerateSpec);

  PhantomSpec bad_radius;
  bad_radius.trunk_radius_voxels = 0.5;
  CHECK_THROWS_AS(generate_phantom(bad_radius), DegenerateSpec);
}

TEST_CASE("noise perturbs every voxel around its class value") {
  PhantomSpec spec;
  spec.shape = {32, 32, 32};
  spec.seed = 8;
  spec.branch_count = 0;
  spec.trunk_radius_voxels = 4.0;
  spec.noise_std = 20.0;
  const Phantom ph = generate_phantom(spec);

  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ph.volume.voxel_count(); ++i) {
    if (ph.mask.data()[i]) continue;
    const double d = ph.volume.data()[i] - (-1024.0);
    sum += d;
    sq += d * d;
    ++n;
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 1.0);
  CHECK(stddev == doctest::Approx(20.0).epsilon(0.05));
}

}  // TEST_SUITE
