#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vesselseg/volume.hpp"

namespace vseg {

// Dice overlap 2|X n Y| / (|X| + |Y|); two empty masks agree perfectly (1.0).
double dice(const Mask3& pred, const Mask3& gt);

// max over a in A of min over b in B of the Euclidean distance between
// foreground voxel centers, in mm via each grid's spacing. Both masks must be
// nonempty. Backed by an exact Euclidean distance transform; equivalent to
// the brute-force all-pairs definition.
double directed_hausdorff(const Mask3& a, const Mask3& b);

// Symmetric Hausdorff distance, max of the two directed values.
double hausdorff(const Mask3& a, const Mask3& b);

// Squared Euclidean distance (mm^2) from every voxel center to the nearest
// foreground voxel center; +inf where the mask is empty. Exposed for tests
// and benchmarks.
std::vector<double> squared_distance_transform(const Mask3& mask);

struct EvalPair {
  std::string id;
  const Mask3* pred = nullptr;
  const Mask3* gt = nullptr;
};

struct EvalCaseResult {
  std::string id;
  double dice = 0.0;
  double hausdorff_mm = 0.0;
  std::string error;  // nonempty = metrics invalid for this case

  bool ok() const { return error.empty(); }
};

// Batch report. Aggregates are arithmetic means over cases without errors;
// an empty-vs-nonempty pair contributes an infinite Hausdorff value, which
// propagates into the mean by design.
struct EvalReport {
  std::vector<EvalCaseResult> cases;
  double mean_dice = 0.0;
  double mean_hausdorff_mm = 0.0;
  std::size_t valid_cases = 0;
};

// Per-case errors are recorded in the report, never thrown.
EvalReport evaluate_set(std::span<const EvalPair> pairs);

// CSV columns: case_id,dice,hd_mm. Metrics print with 6 decimals; infinities
// as "inf", error cases as "nan". The JSON mirror carries the same values
// plus per-case error strings and the aggregate means.
void write_report_csv(const EvalReport& report,
                      const std::filesystem::path& path);
void write_report_json(const EvalReport& report,
                       const std::filesystem::path& path);

}  // namespace vseg
