#pragma once

#include <filesystem>
#include <string_view>

#include "vesselseg/fixpoint.hpp"
#include "vesselseg/pipeline.hpp"

namespace vseg {

// Everything a pipeline run needs, as read from the plain-text config file.
struct PipelineOptions {
  SegConfig seg;
  FixpointConfig fixpoint;
};

// Config file grammar: one `key = value` per line, `#` starts a comment,
// blank lines are ignored. Unknown keys are rejected. Keys:
//
//   windows                  comma-separated lo:hi pairs, e.g. -900:0, 0:300
//   coarse_shape             three ints (or one int for a cube)
//   fine_patch               three ints (or one int for a cube)
//   roi_margin_voxels        int >= 0
//   threshold                real in (0, 1)
//   views                    subset of axial, coronal, sagittal
//   model                    weight file path; repeat the key per model
//   fixpoint_iterations      int >= 0
//   fixpoint_expand_voxels   int >= 0
//   fixpoint_connectivity    6 or 26
//
// Every key has a default except model, which is required for U-Net runs.
PipelineOptions parse_config_text(std::string_view text);
PipelineOptions parse_config_file(const std::filesystem::path& path);

}  // namespace vseg
