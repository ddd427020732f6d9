#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "vesselseg/pipeline.hpp"
#include "vesselseg/volume.hpp"

using namespace vseg;

TEST_SUITE("volume_core") {

TEST_CASE("trilinear resample of a constant volume stays constant") {
  Volume3 vol({8, 8, 8}, {1, 1, 1}, 7.0f);
  const Volume3 out = resample_trilinear(vol, {16, 16, 16});
  CHECK(out.shape() == Shape3{16, 16, 16});
  for (float v : out.data()) CHECK(v == doctest::Approx(7.0f).epsilon(1e-6));
}

TEST_CASE("trilinear resample reproduces a linear ramp exactly") {
  Volume3 vol({9, 9, 9}, {1, 1, 1});
  for (int z = 0; z < 9; ++z) {
    for (int y = 0; y < 9; ++y) {
      for (int x = 0; x < 9; ++x) vol.at(x, y, z) = static_cast<float>(x);
    }
  }
  const Volume3 out = resample_trilinear(vol, {5, 5, 5});
  for (int z = 0; z < 5; ++z) {
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 5; ++x) {
        // corner-aligned: output x maps to source position x * 8/4
        CHECK(out.at(x, y, z) == doctest::Approx(2.0 * x).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("trilinear resample matches direct interpolation formula") {
  std::mt19937 rng(11);
  const Volume3 vol = oracle::random_volume(rng, {6, 6, 6}, -1000.f, 400.f);
  const Shape3 target{12, 12, 12};
  const Volume3 out = resample_trilinear(vol, target);

  std::uniform_int_distribution<int> pick(0, 11);
  for (int i = 0; i < 10; ++i) {
    const int x = pick(rng), y = pick(rng), z = pick(rng);
    const double expect =
        oracle::trilinear_at(vol, oracle::sample_position(x, 6, 12),
                             oracle::sample_position(y, 6, 12),
                             oracle::sample_position(z, 6, 12));
    CHECK(out.at(x, y, z) == doctest::Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("trilinear resample to the same shape is the identity") {
  std::mt19937 rng(12);
  const Volume3 vol = oracle::random_volume(rng, {7, 5, 6}, -500.f, 500.f);
  const Volume3 out = resample_trilinear(vol, vol.shape());
  for (std::size_t i = 0; i < vol.voxel_count(); ++i) {
    CHECK(out.data()[i] == doctest::Approx(vol.data()[i]).epsilon(1e-6));
  }
}

TEST_CASE("resample output range stays within source range") {
  std::mt19937 rng(13);
  for (int round = 0; round < 5; ++round) {
    const Volume3 vol = oracle::random_volume(rng, {5, 6, 7}, -1024.f, 300.f);
    const auto src = vol.data();
    const float lo = *std::min_element(src.begin(), src.end());
    const float hi = *std::max_element(src.begin(), src.end());
    const Volume3 out = resample_trilinear(vol, {9, 4, 11});
    for (float v : out.data()) {
      CHECK(v >= lo);
      CHECK(v <= hi);
    }
  }
}

TEST_CASE("trilinear resample scales spacing by the corner-aligned ratio") {
  Volume3 vol({9, 9, 9}, {0.5, 1.0, 2.0});
  const Volume3 out = resample_trilinear(vol, {5, 3, 9});
  CHECK(out.spacing()[0] == doctest::Approx(0.5 * 8.0 / 4.0));
  CHECK(out.spacing()[1] == doctest::Approx(1.0 * 8.0 / 2.0));
  CHECK(out.spacing()[2] == doctest::Approx(2.0));
}

TEST_CASE("nearest resample keeps masks binary") {
  std::mt19937 rng(14);
  const Mask3 mask = oracle::random_mask(rng, {6, 7, 5}, 0.4);
  for (const Shape3 target : {Shape3{3, 3, 3}, Shape3{13, 10, 9}}) {
    const Mask3 out = resample_nearest(mask, target);
    for (auto v : out.data()) CHECK((v == 0 || v == 1));
  }
}

TEST_CASE("nearest resample to the same shape is the identity") {
  std::mt19937 rng(15);
  const Mask3 mask = oracle::random_mask(rng, {5, 6, 7}, 0.3);
  const Mask3 out = resample_nearest(mask, mask.shape());
  CHECK(std::equal(mask.data().begin(), mask.data().end(), out.data().begin()));
}

TEST_CASE("2x upsample of a centered voxel matches the per-voxel NN oracle") {
  Mask3 mask({5, 5, 5}, {1, 1, 1});
  mask.at(2, 2, 2) = 1;
  const Shape3 target{10, 10, 10};
  const Mask3 out = resample_nearest(mask, target);

  std::size_t fg = 0;
  for (int z = 0; z < 10; ++z) {
    for (int y = 0; y < 10; ++y) {
      for (int x = 0; x < 10; ++x) {
        const int sx = oracle::nearest_index(x, 5, 10);
        const int sy = oracle::nearest_index(y, 5, 10);
        const int sz = oracle::nearest_index(z, 5, 10);
        CHECK(out.at(x, y, z) == mask.at(sx, sy, sz));
        fg += out.at(x, y, z);
      }
    }
  }
  CHECK(fg == 8);  // the 8 target voxels nearest the source voxel
}

TEST_CASE("nearest resample matches the oracle on random masks") {
  std::mt19937 rng(16);
  for (int round = 0; round < 5; ++round) {
    const Mask3 mask = oracle::random_mask(rng, {6, 5, 7}, 0.35);
    const Shape3 target{9, 11, 4};
    const Mask3 out = resample_nearest(mask, target);
    for (int z = 0; z < target[2]; ++z) {
      for (int y = 0; y < target[1]; ++y) {
        for (int x = 0; x < target[0]; ++x) {
          CHECK(out.at(x, y, z) ==
                mask.at(oracle::nearest_index(x, 6, 9),
                        oracle::nearest_index(y, 5, 11),
                        oracle::nearest_index(z, 7, 4)));
        }
      }
    }
  }
}

TEST_CASE("bounding box of a single voxel") {
  Mask3 mask({8, 8, 8}, {1, 1, 1});
  mask.at(3, 4, 5) = 1;
  const BBox3 box = bounding_box(mask);
  CHECK(box.lo == Shape3{3, 4, 5});
  CHECK(box.hi == Shape3{3, 4, 5});
}

TEST_CASE("bounding box of a full mask spans the grid") {
  Mask3 mask({8, 8, 8}, {1, 1, 1}, 1);
  const BBox3 box = bounding_box(mask);
  CHECK(box.lo == Shape3{0, 0, 0});
  CHECK(box.hi == Shape3{7, 7, 7});
}

TEST_CASE("bounding box equals the exhaustive scan on random masks") {
  std::mt19937 rng(17);
  for (int round = 0; round < 10; ++round) {
    Mask3 mask = oracle::random_mask(rng, {10, 9, 8}, 0.05);
    mask.at(4, 4, 4) = 1;  // never empty
    const BBox3 box = bounding_box(mask);

    Shape3 lo{10, 9, 8}, hi{-1, -1, -1};
    for (int z = 0; z < 8; ++z) {
      for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 10; ++x) {
          if (!mask.at(x, y, z)) continue;
          lo = {std::min(lo[0], x), std::min(lo[1], y), std::min(lo[2], z)};
          hi = {std::max(hi[0], x), std::max(hi[1], y), std::max(hi[2], z)};
        }
      }
    }
    CHECK(box.lo == lo);
    CHECK(box.hi == hi);
  }
}

TEST_CASE("bounding box of an empty mask throws") {
  Mask3 mask({4, 4, 4}, {1, 1, 1});
  CHECK_THROWS_AS(bounding_box(mask), EmptyMask);
}

TEST_CASE("axial transpose is the identity") {
  std::mt19937 rng(18);
  const Volume3 vol = oracle::random_volume(rng, {4, 5, 6}, 0.f, 1.f);
  const Volume3 out = transpose_view(vol, ViewAxis::axial);
  CHECK(out.shape() == vol.shape());
  CHECK(std::equal(vol.data().begin(), vol.data().end(), out.data().begin()));
}

TEST_CASE("coronal transpose then inverse is bit-exact") {
  std::mt19937 rng(19);
  const Volume3 vol = oracle::random_volume(rng, {4, 5, 6}, -5.f, 5.f);
  const Volume3 back =
      inverse_transpose_view(transpose_view(vol, ViewAxis::coronal),
                             ViewAxis::coronal);
  CHECK(back.shape() == vol.shape());
  CHECK(std::equal(vol.data().begin(), vol.data().end(), back.data().begin()));
}

TEST_CASE("sagittal transpose places elements per the declared permutation") {
  std::mt19937 rng(20);
  const Volume3 vol = oracle::random_volume(rng, {4, 5, 6}, -5.f, 5.f);
  const Volume3 out = transpose_view(vol, ViewAxis::sagittal);
  // sagittal = (z, y, x): output shape (nz, ny, nx)
  CHECK(out.shape() == Shape3{6, 5, 4});
  std::uniform_int_distribution<int> px(0, 3), py(0, 4), pz(0, 5);
  for (int i = 0; i < 50; ++i) {
    const int x = px(rng), y = py(rng), z = pz(rng);
    CHECK(out.at(z, y, x) == vol.at(x, y, z));
  }
}

TEST_CASE("every view round-trips masks and permutes spacing") {
  std::mt19937 rng(21);
  const Mask3 mask = oracle::random_mask(rng, {3, 4, 5}, 0.5, {0.5, 1.0, 2.0});
  for (ViewAxis view :
       {ViewAxis::axial, ViewAxis::coronal, ViewAxis::sagittal}) {
    const Mask3 t = transpose_view(mask, view);
    const auto perm = view_permutation(view);
    for (int a = 0; a < 3; ++a) {
      CHECK(t.spacing()[a] == mask.spacing()[perm[a]]);
      CHECK(t.shape()[a] == mask.shape()[perm[a]]);
    }
    const Mask3 back = inverse_transpose_view(t, view);
    CHECK(std::equal(mask.data().begin(), mask.data().end(),
                     back.data().begin()));
  }
}

TEST_CASE("nearest-resampled bbox restores into the source bbox +/- 1") {
  std::mt19937 rng(22);
  for (int round = 0; round < 10; ++round) {
    Mask3 mask = oracle::random_mask(rng, {12, 12, 12}, 0.02);
    mask.at(6, 6, 6) = 1;
    const BBox3 src_box = bounding_box(mask);

    const Shape3 target{5, 9, 17};
    const Mask3 small = resample_nearest(mask, target);
    if (count_foreground(small) == 0) continue;
    const BBox3 box = bounding_box(small);

    for (int a = 0; a < 3; ++a) {
      const int lo = restore_coordinate(box.lo[a], small.spacing()[a],
                                        mask.spacing()[a], mask.shape()[a]);
      const int hi = restore_coordinate(box.hi[a], small.spacing()[a],
                                        mask.spacing()[a], mask.shape()[a]);
      CHECK(lo >= src_box.lo[a] - 1);
      CHECK(hi <= src_box.hi[a] + 1);
    }
  }
}

TEST_CASE("degenerate single-voxel axis replicates instead of failing") {
  Volume3 vol({1, 4, 4}, {1, 1, 1}, 3.0f);
  const Volume3 out = resample_trilinear(vol, {5, 4, 4});
  CHECK(out.shape()[0] == 5);
  for (float v : out.data()) CHECK(v == 3.0f);
}

TEST_CASE("crop and embed are inverse on interior boxes") {
  std::mt19937 rng(23);
  const Volume3 vol = oracle::random_volume(rng, {8, 8, 8}, -10.f, 10.f);
  const BBox3 box{{2, 1, 3}, {6, 5, 7}, vol.spacing()};
  const Volume3 patch = crop(vol, box);
  CHECK(patch.shape() == Shape3{5, 5, 5});
  Volume3 dst(vol.shape(), vol.spacing(), 0.0f);
  embed(dst, box.lo, patch);
  for (int z = box.lo[2]; z <= box.hi[2]; ++z) {
    for (int y = box.lo[1]; y <= box.hi[1]; ++y) {
      for (int x = box.lo[0]; x <= box.hi[0]; ++x) {
        CHECK(dst.at(x, y, z) == vol.at(x, y, z));
      }
    }
  }
}

}  // TEST_SUITE
