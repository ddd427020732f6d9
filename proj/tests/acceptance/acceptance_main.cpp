// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria 6 and 8 drive the installed CLI binary, passed
// via --cli.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "vesselseg/backend.hpp"
#include "vesselseg/fixpoint.hpp"
#include "vesselseg/metrics.hpp"
#include "vesselseg/nifti.hpp"
#include "vesselseg/phantom.hpp"
#include "vesselseg/pipeline.hpp"
#include "vesselseg/weights.hpp"

namespace fs = std::filesystem;
using namespace vseg;

namespace {

std::string g_cli_path;
fs::path g_work;

int run_cli(const std::string& args) {
  const std::string cmd = g_cli_path + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::vector<std::uint8_t> file_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
}

// --- criterion 1: metric oracle equivalence --------------------------------

bool metric_oracle_equivalence(std::string& detail) {
  std::mt19937 rng(1001);
  std::uniform_int_distribution<int> dim(3, 16);
  std::uniform_real_distribution<double> dens(0.05, 0.5);
  for (int i = 0; i < 200; ++i) {
    const Shape3 shape{dim(rng), dim(rng), dim(rng)};
    Mask3 a = oracle::random_mask(rng, shape, dens(rng));
    Mask3 b = oracle::random_mask(rng, shape, dens(rng));
    a.at(0, 0, 0) = 1;  // keep both nonempty
    b.at(shape[0] - 1, shape[1] - 1, shape[2] - 1) = 1;

    const auto counts = oracle::brute_dice_counts(a, b);
    const double dice_expected =
        2.0 * static_cast<double>(counts.intersection) /
        static_cast<double>(counts.a + counts.b);
    if (dice(a, b) != dice_expected) {
      detail = "dice mismatch at pair " + std::to_string(i);
      return false;
    }

    if (directed_hausdorff(a, b) != oracle::brute_directed_hausdorff(a, b) ||
        directed_hausdorff(b, a) != oracle::brute_directed_hausdorff(b, a)) {
      detail = "hausdorff mismatch at pair " + std::to_string(i);
      return false;
    }
    const double h = hausdorff(a, b);
    if (h != std::max(oracle::brute_directed_hausdorff(a, b),
                      oracle::brute_directed_hausdorff(b, a))) {
      detail = "symmetric hausdorff mismatch at pair " + std::to_string(i);
      return false;
    }
  }
  detail = "200 pairs exact";
  return true;
}

// --- criterion 2: convolution correctness -----------------------------------

bool convolution_correctness(std::string& detail) {
  std::mt19937 rng(1002);
  std::uniform_int_distribution<int> chan_in(1, 3), chan_out(1, 4), dim(3, 7);
  for (int i = 0; i < 50; ++i) {
    const int in_ch = chan_in(rng), out_ch = chan_out(rng);
    const Tensor4 in =
        oracle::random_tensor(rng, in_ch, dim(rng), dim(rng), dim(rng));
    const auto kernel = oracle::random_floats(rng, out_ch * in_ch * 27);
    const auto bias = oracle::random_floats(rng, out_ch);
    const Tensor4 fast = conv3d(in, kernel, out_ch, in_ch, 3, bias);
    const Tensor4 slow =
        oracle::naive_conv3d(in, kernel, out_ch, in_ch, 3, bias);
    for (std::size_t j = 0; j < fast.size(); ++j) {
      if (std::abs(fast.data()[j] - slow.data()[j]) > 1e-5) {
        detail = "conv case " + std::to_string(i) + " off by " +
                 std::to_string(std::abs(fast.data()[j] - slow.data()[j]));
        return false;
      }
    }
  }

  for (const int n : {16, 32}) {
    for (const int width : {4, 8}) {
      const ModelWeights w = init_weights_random(5, width, 7);
      std::mt19937 prng(2000 + n + width);
      const Tensor4 in = oracle::random_tensor(prng, 2, n, n, n);
      const Tensor4 out = unet_forward(w, in);
      if (out.channels() != 1 || out.spatial_shape() != Shape3{n, n, n}) {
        detail = "unet_forward shape contract broken at n=" +
                 std::to_string(n) + " width=" + std::to_string(width);
        return false;
      }
    }
  }
  detail = "50 conv cases within 1e-5; forward shapes hold";
  return true;
}

// --- criterion 3: tiling exactness ------------------------------------------

bool tiling_exactness(std::string& detail) {
  std::mt19937 rng(1003);
  std::uniform_int_distribution<int> dim(3, 70);
  for (int round = 0; round < 20; ++round) {
    const Shape3 region{dim(rng), dim(rng), dim(rng)};
    const Shape3 patch{16, 16, 16};
    const TilePlan plan = make_tile_plan(region, patch);

    std::vector<int> cover(
        static_cast<std::size_t>(region[0]) * region[1] * region[2], 0);
    for (const auto& lo : plan.origins) {
      for (int z = lo[2]; z < lo[2] + patch[2]; ++z) {
        for (int y = lo[1]; y < lo[1] + patch[1]; ++y) {
          for (int x = lo[0]; x < lo[0] + patch[0]; ++x) {
            if (x < region[0] && y < region[1] && z < region[2]) {
              ++cover[(static_cast<std::size_t>(z) * region[1] + y) *
                          region[0] +
                      x];
            }
          }
        }
      }
    }
    for (int c : cover) {
      if (c != 1) {
        detail = "coverage count " + std::to_string(c) + " in round " +
                 std::to_string(round);
        return false;
      }
    }
  }
  detail = "20 region shapes covered exactly once";
  return true;
}

// --- criterion 4: multi-view collapse ----------------------------------------

bool multiview_collapse(std::string& detail) {
  std::mt19937 rng(1004);
  const AnalyticBackend analytic;
  const Volume3 vol = oracle::random_volume(rng, {12, 10, 14}, -1200.f, 400.f);
  const MultiChannelVolume patch = make_channels(vol, default_windows());
  const std::vector<ViewAxis> all{ViewAxis::axial, ViewAxis::coronal,
                                  ViewAxis::sagittal};
  const std::vector<ViewAxis> axial{ViewAxis::axial};
  const Tensor4 multi = multiview_infer(patch, analytic, all);
  const Tensor4 single = multiview_infer(patch, analytic, axial);
  if (!std::equal(multi.data().begin(), multi.data().end(),
                  single.data().begin())) {
    detail = "analytic multiview differs from single view";
    return false;
  }

  const ModelWeights w = init_weights_random(5, 4, 11);
  const UnetBackend unet(w);
  const Volume3 uvol = oracle::random_volume(rng, {32, 32, 32}, -1200.f, 400.f);
  const MultiChannelVolume upatch = make_channels(uvol, default_windows());
  const Tensor4 fused = multiview_infer(upatch, unet, all);

  const Tensor4 input = tensor_from_channels(upatch);
  std::vector<Tensor4> logits;
  for (ViewAxis v : all) {
    logits.push_back(
        inverse_transpose_view(unet.infer(transpose_view(input, v)), v));
  }
  for (std::size_t i = 0; i < fused.size(); ++i) {
    const double mean = (static_cast<double>(logits[0].data()[i]) +
                         logits[1].data()[i] + logits[2].data()[i]) /
                        3.0;
    const double expect = 1.0 / (1.0 + std::exp(-mean));
    if (std::abs(fused.data()[i] - expect) > 1e-6) {
      detail = "unet fusion differs from recomputed mean-of-logits";
      return false;
    }
  }
  detail = "analytic bit-exact; unet fusion within 1e-6";
  return true;
}

// --- criterion 5: coordinate restoration containment -------------------------

bool roi_containment(std::string& detail) {
  const AnalyticBackend backend;
  SegConfig cfg;
  cfg.coarse_shape = {48, 48, 48};
  cfg.fine_patch = {32, 32, 32};
  cfg.roi_margin_voxels = 2;

  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PhantomSpec spec;
    spec.shape = {64, 64, 64};
    spec.seed = seed;
    spec.branch_count = 0;
    spec.trunk_radius_voxels = 5.0;
    const Phantom ph = generate_phantom(spec);
    const BBox3 roi = coarse_locate(ph.volume, backend, cfg);
    const BBox3 truth = bounding_box(ph.mask);
    if (roi.contains(truth)) {
      ++hits;
    } else {
      std::cerr << "  containment miss at seed " << seed << "\n";
    }
  }
  detail = std::to_string(hits) + "/20 restored ROIs contain the truth box";
  return hits == 20;
}

// --- criteria 6 and 8: end-to-end phantom runs through the CLI ---------------

struct E2ePaths {
  fs::path prefix;
  fs::path volume;
  fs::path gt_mask;
  fs::path config;
  fs::path config_nofix;
};

// 96^3 phantom with a far-away false-positive blob; geometry validated
// against the library generator before the CLI run.
bool prepare_e2e(E2ePaths& paths, std::string& detail) {
  const std::uint64_t seed = 7;
  PhantomSpec spec;
  spec.shape = {96, 96, 96};
  spec.seed = seed;
  spec.branch_count = 0;
  spec.trunk_radius_voxels = 6.0;
  const Phantom clean = generate_phantom(spec);
  const BBox3 truth = bounding_box(clean.mask);

  // The blob center must sit at least 40 voxels from every vessel voxel and
  // outside the expanded re-inference region (bbox + 5 + radius margin).
  const Shape3 blob_center{10, 10, 10};
  const double min_needed = 40.0;
  double min_dist = 1e9;
  for (int z = 0; z < 96; ++z) {
    for (int y = 0; y < 96; ++y) {
      for (int x = 0; x < 96; ++x) {
        if (!clean.mask.at(x, y, z)) continue;
        const double dx = x - blob_center[0], dy = y - blob_center[1],
                     dz = z - blob_center[2];
        min_dist = std::min(min_dist, std::sqrt(dx * dx + dy * dy + dz * dz));
      }
    }
  }
  bool outside_region = false;
  for (int a = 0; a < 3; ++a) {
    if (blob_center[a] + 3 + 1 < truth.lo[a] - 5 ||
        blob_center[a] - 3 - 1 > truth.hi[a] + 5) {
      outside_region = true;
    }
  }
  if (min_dist < min_needed || !outside_region) {
    detail = "phantom geometry unsuitable (blob distance " +
             std::to_string(min_dist) + ")";
    return false;
  }

  paths.prefix = g_work / "e2e";
  paths.volume = paths.prefix.string() + "_volume.nii.gz";
  paths.gt_mask = paths.prefix.string() + "_mask.nii.gz";
  if (run_cli("phantom --out-prefix " + paths.prefix.string() +
              " --seed 7 --shape 96 --branch-count 0 --trunk-radius 6"
              " --blob 10 10 10 3 150") != 0) {
    detail = "phantom generation through the CLI failed";
    return false;
  }

  paths.config = g_work / "e2e.conf";
  std::ofstream(paths.config) << "coarse_shape = 64\nfine_patch = 32\n";
  paths.config_nofix = g_work / "e2e_nofix.conf";
  std::ofstream(paths.config_nofix)
      << "coarse_shape = 64\nfine_patch = 32\nfixpoint_iterations = 0\n";
  return true;
}

bool end_to_end_phantom(std::string& detail) {
  E2ePaths paths;
  if (!prepare_e2e(paths, detail)) return false;

  // Without refinement the blob must show up as a second component,
  // otherwise removing it proves nothing.
  const fs::path raw_mask = g_work / "e2e_raw.nii.gz";
  if (run_cli("segment --input " + paths.volume.string() + " --output " +
              raw_mask.string() + " --backend analytic --config " +
              paths.config_nofix.string()) != 0) {
    detail = "segment (fixpoint disabled) failed";
    return false;
  }
  const Mask3 raw = read_nifti_mask(raw_mask);
  const std::size_t raw_components =
      connected_components(raw, 26).component_count();
  if (raw_components < 2) {
    detail = "blob did not register as a false positive";
    return false;
  }

  const fs::path out_mask = g_work / "e2e_out.nii.gz";
  if (run_cli("segment --input " + paths.volume.string() + " --output " +
              out_mask.string() + " --backend analytic --config " +
              paths.config.string()) != 0) {
    detail = "segment failed";
    return false;
  }

  const Mask3 mask = read_nifti_mask(out_mask);
  const Mask3 truth = read_nifti_mask(paths.gt_mask);
  const double d = dice(mask, truth);
  if (d < 0.95) {
    detail = "dice " + std::to_string(d) + " below 0.95";
    return false;
  }
  const double hd = hausdorff(mask, truth);
  if (!std::isfinite(hd)) {
    detail = "hausdorff not finite";
    return false;
  }
  const std::size_t components =
      connected_components(mask, 26).component_count();
  if (components != 1) {
    detail = "expected 1 component after refinement, got " +
             std::to_string(components);
    return false;
  }
  std::ostringstream os;
  os << "dice " << d << ", hd " << hd << " mm, blob removed (" << raw_components
     << " components -> 1)";
  detail = os.str();
  return true;
}

bool determinism_and_threads(std::string& detail) {
  E2ePaths paths;
  if (!prepare_e2e(paths, detail)) return false;

  const fs::path a = g_work / "det_a.nii.gz";
  const fs::path b = g_work / "det_b.nii.gz";
  const fs::path c = g_work / "det_c.nii.gz";
  const std::string base = "segment --input " + paths.volume.string() +
                           " --backend analytic --config " +
                           paths.config.string();
  if (run_cli(base + " --output " + a.string() + " --threads 1") != 0 ||
      run_cli(base + " --output " + b.string() + " --threads 1") != 0 ||
      run_cli(base + " --output " + c.string() + " --threads 8") != 0) {
    detail = "segment run failed";
    return false;
  }
  if (file_bytes(a) != file_bytes(b)) {
    detail = "two identical runs differ";
    return false;
  }
  if (file_bytes(a) != file_bytes(c)) {
    detail = "--threads 1 and --threads 8 outputs differ";
    return false;
  }
  detail = "reruns and thread counts byte-identical";
  return true;
}

// --- criterion 7: connected components vs flood fill -------------------------

bool component_partition_equality(std::string& detail) {
  std::mt19937 rng(1007);
  std::uniform_real_distribution<double> dens(0.1, 0.5);
  for (int i = 0; i < 100; ++i) {
    const Mask3 mask = oracle::random_mask(rng, {12, 12, 12}, dens(rng));
    for (int conn : {6, 26}) {
      const ComponentLabels cc = connected_components(mask, conn);
      const auto flood = oracle::flood_fill_components(mask, conn);
      if (!oracle::same_partition(cc.labels, flood.labels)) {
        detail = "partition mismatch, mask " + std::to_string(i) +
                 " connectivity " + std::to_string(conn);
        return false;
      }
    }
  }
  detail = "100 masks, both connectivities";
  return true;
}

// --- criterion 9: format robustness ------------------------------------------

bool format_robustness(std::string& detail) {
  // Valid round trips are bit-exact.
  std::mt19937 rng(1009);
  const Volume3 vol = oracle::random_volume(rng, {6, 5, 7}, -1024.f, 400.f,
                                            {0.7, 1.0, 1.4});
  const auto encoded = encode_nifti(vol);
  const Volume3 back = decode_nifti_volume(encoded);
  if (encode_nifti(back) != encoded) {
    detail = "nifti round trip not bit-exact";
    return false;
  }
  const ModelWeights weights = init_weights_random(3, 2, 55);
  const auto wbytes = encode_weights(weights);
  if (encode_weights(decode_weights(wbytes)) != wbytes) {
    detail = "weight round trip not bit-exact";
    return false;
  }

  // 1000 mutated NIfTI headers/payloads: structured errors or clean reads.
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<std::size_t> npos(0, encoded.size() - 1);
  for (int i = 0; i < 1000; ++i) {
    auto bad = encoded;
    const int flips = 1 + (i % 8);
    for (int f = 0; f < flips; ++f) {
      bad[npos(rng)] = static_cast<std::uint8_t>(byte(rng));
    }
    try {
      (void)decode_nifti_volume(bad);
    } catch (const Error&) {
      // structured error: fine
    } catch (...) {
      detail = "nifti fuzz case " + std::to_string(i) +
               " escaped the error hierarchy";
      return false;
    }
  }

  std::uniform_int_distribution<std::size_t> wpos(0, wbytes.size() - 1);
  for (int i = 0; i < 1000; ++i) {
    auto bad = wbytes;
    const int flips = 1 + (i % 8);
    for (int f = 0; f < flips; ++f) {
      bad[wpos(rng)] = static_cast<std::uint8_t>(byte(rng));
    }
    try {
      (void)decode_weights(bad);
    } catch (const Error&) {
      // structured error: fine
    } catch (...) {
      detail = "weights fuzz case " + std::to_string(i) +
               " escaped the error hierarchy";
      return false;
    }
  }
  detail = "2000 mutations handled; round trips bit-exact";
  return true;
}

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  g_cli_path = "tools/vesselseg";
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];
  }
  g_work = fs::temp_directory_path() / "vesselseg_acceptance";
  fs::create_directories(g_work);

  const std::vector<Criterion> criteria{
      {1, "metric oracle equivalence", metric_oracle_equivalence},
      {2, "convolution correctness", convolution_correctness},
      {3, "tiling exactness", tiling_exactness},
      {4, "multi-view collapse", multiview_collapse},
      {5, "restored ROI containment", roi_containment},
      {6, "end-to-end phantom with refinement", end_to_end_phantom},
      {7, "connected components vs flood fill", component_partition_equality},
      {8, "determinism and thread-independence", determinism_and_threads},
      {9, "format robustness", format_robustness},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::ostringstream line;
    line << (ok ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name << " ("
         << detail << ") [" << std::fixed << std::setprecision(1) << seconds
         << "s]";
    std::cout << line.str() << std::endl;
    if (!ok) ++failures;
    if (c.id == 1 && seconds >= 60.0) {
      std::cout << "[FAIL] 1. metric oracle equivalence exceeded 60 s"
                << std::endl;
      ++failures;
    }
  }

  if (failures != 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance criteria passed" << std::endl;
  return 0;
}
