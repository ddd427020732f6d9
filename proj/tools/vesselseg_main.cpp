// vesselseg command-line front end: segment / eval / phantom / weights.
//
// Exit codes: 0 success, 2 empty coarse prediction, 64 usage or config
// error, 65 malformed input data, 70 internal error. Standard output carries
// exactly one JSON summary line per run; diagnostics go to standard error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vesselseg/backend.hpp"
#include "vesselseg/config.hpp"
#include "vesselseg/fixpoint.hpp"
#include "vesselseg/metrics.hpp"
#include "vesselseg/nifti.hpp"
#include "vesselseg/phantom.hpp"
#include "vesselseg/pipeline.hpp"
#include "vesselseg/volume.hpp"
#include "vesselseg/weights.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEmptyPrediction = 2;
constexpr int kExitUsage = 64;
constexpr int kExitDataFormat = 65;
constexpr int kExitInternal = 70;

void print_summary(const json& j) { std::cout << j.dump() << std::endl; }

json metric_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

struct SegmentArgs {
  std::string input;
  std::string output;
  std::string config_path;
  std::string backend = "unet";
  int threads = 0;
};

int run_segment(const SegmentArgs& args) {
  vseg::PipelineOptions opts;
  if (!args.config_path.empty()) {
    opts = vseg::parse_config_file(args.config_path);
  }
  opts.seg.threads = args.threads;

  std::vector<std::unique_ptr<vseg::InferenceBackend>> owned;
  if (args.backend == "analytic") {
    owned.push_back(std::make_unique<vseg::AnalyticBackend>());
  } else if (args.backend == "unet") {
    if (opts.seg.model_paths.empty()) {
      throw vseg::ConfigError(
          "unet backend requires at least one 'model' entry in the config");
    }
    for (const auto& path : opts.seg.model_paths) {
      owned.push_back(std::make_unique<vseg::UnetBackend>(
          vseg::load_weights(path), args.threads));
    }
  } else {
    throw vseg::ConfigError("unknown backend '" + args.backend + "'");
  }
  std::vector<const vseg::InferenceBackend*> backends;
  for (const auto& b : owned) backends.push_back(b.get());

  const vseg::Volume3 vol = vseg::read_nifti_volume(args.input);
  const vseg::Mask3 mask =
      vseg::segment(vol, backends, opts.seg, opts.fixpoint);
  vseg::write_nifti(mask, args.output);

  json j;
  j["status"] = "ok";
  j["command"] = "segment";
  j["input"] = args.input;
  j["output"] = args.output;
  j["backend"] = args.backend;
  j["models"] = owned.size();
  j["foreground_voxels"] = vseg::count_foreground(mask);
  j["shape"] = {mask.shape()[0], mask.shape()[1], mask.shape()[2]};
  j["threads"] = args.threads;
  print_summary(j);
  return kExitOk;
}

bool is_nifti_name(const fs::path& p) {
  const std::string name = p.filename().string();
  return name.size() > 4 && (name.ends_with(".nii") || name.ends_with(".nii.gz"));
}

std::string case_id_of(const fs::path& p) {
  std::string name = p.filename().string();
  if (name.ends_with(".nii.gz")) return name.substr(0, name.size() - 7);
  if (name.ends_with(".nii")) return name.substr(0, name.size() - 4);
  return name;
}

struct EvalArgs {
  std::string pred_dir;
  std::string gt_dir;
  std::string report;
};

int run_eval(const EvalArgs& args) {
  if (!fs::is_directory(args.pred_dir)) {
    throw vseg::ConfigError("--pred is not a directory: " + args.pred_dir);
  }
  if (!fs::is_directory(args.gt_dir)) {
    throw vseg::ConfigError("--gt is not a directory: " + args.gt_dir);
  }

  std::map<std::string, fs::path> pred_files, gt_files;
  for (const auto& entry : fs::directory_iterator(args.pred_dir)) {
    if (entry.is_regular_file() && is_nifti_name(entry.path())) {
      pred_files[case_id_of(entry.path())] = entry.path();
    }
  }
  for (const auto& entry : fs::directory_iterator(args.gt_dir)) {
    if (entry.is_regular_file() && is_nifti_name(entry.path())) {
      gt_files[case_id_of(entry.path())] = entry.path();
    }
  }

  // Keep the loaded masks alive for the whole evaluation; the report refers
  // to them by pointer. Per-case load failures become report errors.
  std::vector<std::unique_ptr<vseg::Mask3>> storage;
  std::vector<vseg::EvalPair> pairs;
  std::vector<std::pair<std::string, std::string>> load_errors;
  for (const auto& [id, pred_path] : pred_files) {
    vseg::EvalPair pair;
    pair.id = id;
    const auto gt_it = gt_files.find(id);
    if (gt_it == gt_files.end()) {
      load_errors.emplace_back(id, "missing ground truth for " + id);
      pairs.push_back(pair);  // evaluates to an in-report error
      continue;
    }
    try {
      storage.push_back(
          std::make_unique<vseg::Mask3>(vseg::read_nifti_mask(pred_path)));
      pair.pred = storage.back().get();
      storage.push_back(
          std::make_unique<vseg::Mask3>(vseg::read_nifti_mask(gt_it->second)));
      pair.gt = storage.back().get();
    } catch (const vseg::Error& e) {
      pair.pred = nullptr;
      pair.gt = nullptr;
      load_errors.emplace_back(id, e.what());
    }
    pairs.push_back(pair);
  }
  for (const auto& [id, gt_path] : gt_files) {
    if (!pred_files.count(id)) {
      vseg::EvalPair pair;
      pair.id = id;
      load_errors.emplace_back(id, "missing prediction for " + id);
      pairs.push_back(pair);
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  vseg::EvalReport report = vseg::evaluate_set(pairs);
  for (auto& c : report.cases) {
    if (!c.ok()) {
      for (const auto& [id, message] : load_errors) {
        if (id == c.id) {
          c.error = message;
          break;
        }
      }
    }
  }

  const fs::path csv_path = args.report;
  fs::path json_path = csv_path;
  json_path.replace_extension(".json");
  vseg::write_report_csv(report, csv_path);
  vseg::write_report_json(report, json_path);

  json j;
  j["status"] = "ok";
  j["command"] = "eval";
  j["cases"] = report.cases.size();
  j["valid_cases"] = report.valid_cases;
  j["mean_dice"] = metric_json(report.mean_dice);
  j["mean_hd_mm"] = metric_json(report.mean_hausdorff_mm);
  j["report_csv"] = csv_path.string();
  j["report_json"] = json_path.string();
  print_summary(j);
  return kExitOk;
}

struct PhantomArgs {
  std::string out_prefix;
  std::vector<int> shape{96};
  std::vector<double> spacing{1.0};
  std::uint64_t seed = 1;
  double trunk_radius = 6.0;
  int branch_count = 2;
  double trunk_hu = 150.0;
  double branch_hu = -450.0;
  double background_hu = -1024.0;
  double noise_std = 20.0;
  std::vector<double> blob;  // cx cy cz radius hu
};

int run_phantom(const PhantomArgs& args) {
  vseg::PhantomSpec spec;
  if (args.shape.size() == 1) {
    spec.shape = {args.shape[0], args.shape[0], args.shape[0]};
  } else if (args.shape.size() == 3) {
    spec.shape = {args.shape[0], args.shape[1], args.shape[2]};
  } else {
    throw vseg::ConfigError("--shape takes one or three integers");
  }
  if (args.spacing.size() == 1) {
    spec.spacing = {args.spacing[0], args.spacing[0], args.spacing[0]};
  } else if (args.spacing.size() == 3) {
    spec.spacing = {args.spacing[0], args.spacing[1], args.spacing[2]};
  } else {
    throw vseg::ConfigError("--spacing takes one or three reals");
  }
  spec.seed = args.seed;
  spec.trunk_radius_voxels = args.trunk_radius;
  spec.branch_count = args.branch_count;
  spec.trunk_hu = args.trunk_hu;
  spec.branch_hu = args.branch_hu;
  spec.background_hu = args.background_hu;
  spec.noise_std = args.noise_std;
  if (!args.blob.empty()) {
    if (args.blob.size() != 5) {
      throw vseg::ConfigError("--blob takes cx cy cz radius hu");
    }
    vseg::PhantomBlob blob;
    blob.center = {static_cast<int>(args.blob[0]),
                   static_cast<int>(args.blob[1]),
                   static_cast<int>(args.blob[2])};
    blob.radius_voxels = args.blob[3];
    blob.hu = args.blob[4];
    spec.false_positive_blob = blob;
  }

  const vseg::Phantom phantom = vseg::generate_phantom(spec);
  const std::string volume_path = args.out_prefix + "_volume.nii.gz";
  const std::string mask_path = args.out_prefix + "_mask.nii.gz";
  vseg::write_nifti(phantom.volume, volume_path);
  vseg::write_nifti(phantom.mask, mask_path);

  json j;
  j["status"] = "ok";
  j["command"] = "phantom";
  j["volume"] = volume_path;
  j["mask"] = mask_path;
  j["seed"] = spec.seed;
  j["foreground_voxels"] = vseg::count_foreground(phantom.mask);
  print_summary(j);
  return kExitOk;
}

struct WeightsInitArgs {
  std::string out;
  int levels = 5;
  int base_width = 8;
  int in_channels = 2;
  std::uint64_t seed = 1;
};

int run_weights_init(const WeightsInitArgs& args) {
  const vseg::ModelWeights weights = vseg::init_weights_random(
      args.levels, args.base_width, args.seed, args.in_channels);
  vseg::save_weights(weights, args.out);

  json j;
  j["status"] = "ok";
  j["command"] = "weights-init";
  j["output"] = args.out;
  j["levels"] = weights.levels();
  j["widths"] = weights.widths();
  j["in_channels"] = weights.in_channels();
  j["parameters"] = weights.parameter_count();
  j["seed"] = args.seed;
  print_summary(j);
  return kExitOk;
}

int run_weights_inspect(const std::string& file) {
  const vseg::ModelWeights weights = vseg::load_weights(file);

  json j;
  j["status"] = "ok";
  j["command"] = "weights-inspect";
  j["file"] = file;
  j["levels"] = weights.levels();
  j["widths"] = weights.widths();
  j["in_channels"] = weights.in_channels();
  j["parameters"] = weights.parameter_count();
  j["tensors"] = json::array();
  for (const auto& t : weights.tensors()) {
    json jt;
    jt["name"] = t.name;
    jt["shape"] = t.dims;
    jt["elements"] = t.element_count();
    j["tensors"].push_back(std::move(jt));
  }
  print_summary(j);
  return kExitOk;
}

int exit_code_for(const vseg::Error& e) {
  if (dynamic_cast<const vseg::EmptyPrediction*>(&e)) return kExitEmptyPrediction;
  if (dynamic_cast<const vseg::ConfigError*>(&e)) return kExitUsage;
  if (dynamic_cast<const vseg::DegenerateSpec*>(&e)) return kExitUsage;
  if (dynamic_cast<const vseg::MalformedHeader*>(&e) ||
      dynamic_cast<const vseg::UnsupportedDatatype*>(&e) ||
      dynamic_cast<const vseg::TruncatedData*>(&e) ||
      dynamic_cast<const vseg::BadMagic*>(&e) ||
      dynamic_cast<const vseg::ChecksumMismatch*>(&e) ||
      dynamic_cast<const vseg::IncompleteWeights*>(&e) ||
      dynamic_cast<const vseg::IoFailure*>(&e)) {
    return kExitDataFormat;
  }
  return kExitInternal;
}

int fail(const std::string& message, int code) {
  std::cerr << "vesselseg: error: " << message << std::endl;
  json j;
  j["status"] = "error";
  j["error"] = message;
  j["exit"] = code;
  print_summary(j);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse-to-fine multi-view CT vessel segmentation toolkit"};
  app.require_subcommand(1);

  SegmentArgs seg_args;
  CLI::App* seg = app.add_subcommand(
      "segment", "Segment a CT volume into a binary vessel mask");
  seg->add_option("--input", seg_args.input, "Input CT volume (.nii/.nii.gz)")
      ->required();
  seg->add_option("--output", seg_args.output, "Output mask path")->required();
  seg->add_option("--config", seg_args.config_path,
                  "Pipeline config file (defaults apply when omitted)");
  seg->add_option("--backend", seg_args.backend, "unet or analytic")
      ->check(CLI::IsMember({"unet", "analytic"}));
  seg->add_option("--threads", seg_args.threads,
                  "Worker threads, 0 = all cores");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "Evaluate predicted masks against ground truth");
  eval->add_option("--pred", eval_args.pred_dir, "Directory of predictions")
      ->required();
  eval->add_option("--gt", eval_args.gt_dir, "Directory of ground truth")
      ->required();
  eval->add_option("--report", eval_args.report, "Output CSV path")->required();

  PhantomArgs ph_args;
  CLI::App* ph = app.add_subcommand(
      "phantom", "Generate a synthetic vessel phantom with ground truth");
  ph->add_option("--out-prefix", ph_args.out_prefix, "Output path prefix")
      ->required();
  ph->add_option("--shape", ph_args.shape, "Volume shape (1 or 3 ints)")
      ->expected(1, 3);
  ph->add_option("--spacing", ph_args.spacing, "Voxel spacing mm (1 or 3)")
      ->expected(1, 3);
  ph->add_option("--seed", ph_args.seed, "Random seed");
  ph->add_option("--trunk-radius", ph_args.trunk_radius,
                 "Trunk tube radius in voxels");
  ph->add_option("--branch-count", ph_args.branch_count, "Number of branches");
  ph->add_option("--trunk-hu", ph_args.trunk_hu, "Trunk intensity (HU)");
  ph->add_option("--branch-hu", ph_args.branch_hu, "Branch intensity (HU)");
  ph->add_option("--background-hu", ph_args.background_hu, "Background HU");
  ph->add_option("--noise-std", ph_args.noise_std, "Gaussian noise std (HU)");
  ph->add_option("--blob", ph_args.blob,
                 "False-positive blob: cx cy cz radius hu")
      ->expected(5);

  CLI::App* weights = app.add_subcommand("weights", "Weight file utilities");
  weights->require_subcommand(1);
  WeightsInitArgs wi_args;
  CLI::App* winit = weights->add_subcommand(
      "init", "Write randomly initialized weights");
  winit->add_option("--out", wi_args.out, "Output weight file")->required();
  winit->add_option("--levels", wi_args.levels, "U-Net level count");
  winit->add_option("--base-width", wi_args.base_width, "Level-0 channels");
  winit->add_option("--in-channels", wi_args.in_channels, "Input channels");
  winit->add_option("--seed", wi_args.seed, "Random seed");
  std::string inspect_file;
  CLI::App* winspect =
      weights->add_subcommand("inspect", "Print a weight file manifest");
  winspect->add_option("--file", inspect_file, "Weight file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "vesselseg: " << e.what() << std::endl;
    return kExitUsage;
  }

  try {
    if (seg->parsed()) return run_segment(seg_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (ph->parsed()) return run_phantom(ph_args);
    if (weights->parsed()) {
      if (winit->parsed()) return run_weights_init(wi_args);
      if (winspect->parsed()) return run_weights_inspect(inspect_file);
    }
    std::cerr << "vesselseg: no subcommand" << std::endl;
    return kExitUsage;
  } catch (const vseg::Error& e) {
    return fail(e.what(), exit_code_for(e));
  } catch (const std::exception& e) {
    return fail(std::string("internal error: ") + e.what(), kExitInternal);
  }
}
