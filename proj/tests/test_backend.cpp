#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "vesselseg/backend.hpp"

using namespace vseg;

TEST_SUITE("backend") {

TEST_CASE("analytic backend with zero channels input gives -offset") {
  const AnalyticBackend backend;  // weights (1,1), offset 0.75
  const Tensor4 zero(2, 4, 4, 4, 0.0f);
  const Tensor4 logits = backend.infer(zero);
  REQUIRE(logits.channels() == 1);
  for (float v : logits.data()) CHECK(v == doctest::Approx(-0.75));
}

TEST_CASE("analytic backend decision boundary at ch1 = 0.75") {
  const AnalyticBackend backend;
  Tensor4 patch(2, 2, 2, 2, 0.0f);
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) patch.at(1, x, y, z) = 0.75f;
    }
  }
  const Tensor4 logits = backend.infer(patch);
  for (float v : logits.data()) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("analytic backend commutes with axis permutations exactly") {
  std::mt19937 rng(101);
  const AnalyticBackend backend;
  const Tensor4 patch = oracle::random_tensor(rng, 2, 4, 5, 6);
  for (ViewAxis view :
       {ViewAxis::axial, ViewAxis::coronal, ViewAxis::sagittal}) {
    const Tensor4 a = transpose_view(backend.infer(patch), view);
    const Tensor4 b = backend.infer(transpose_view(patch, view));
    REQUIRE(a.spatial_shape() == b.spatial_shape());
    CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
  }
}

TEST_CASE("analytic backend rejects wrong channel counts") {
  const AnalyticBackend backend;
  CHECK_THROWS_AS(backend.infer(Tensor4(3, 2, 2, 2)), ShapeMismatch);
}

TEST_CASE("custom channel weights separate two intensity classes") {
  // Windowed values for trunk-like (150 HU) and branch-like (-450 HU)
  // tissue under the stock windows; weights chosen so both classes land
  // above the decision boundary while background stays below.
  const AnalyticBackend backend({2.0, 0.1}, 0.5);
  Tensor4 patch(2, 3, 1, 1);
  // voxel 0: trunk, voxel 1: branch, voxel 2: background
  patch.at(0, 0, 0, 0) = (150.0f + 900.0f) / 900.0f;
  patch.at(1, 0, 0, 0) = 150.0f / 300.0f;
  patch.at(0, 1, 0, 0) = (-450.0f + 900.0f) / 900.0f;
  patch.at(1, 1, 0, 0) = -450.0f / 300.0f;
  patch.at(0, 2, 0, 0) = (-1024.0f + 900.0f) / 900.0f;
  patch.at(1, 2, 0, 0) = -1024.0f / 300.0f;
  const Tensor4 logits = backend.infer(patch);
  CHECK(logits.at(0, 0, 0, 0) > 0.0f);
  CHECK(logits.at(0, 1, 0, 0) > 0.0f);
  CHECK(logits.at(0, 2, 0, 0) < 0.0f);
}

}  // TEST_SUITE
