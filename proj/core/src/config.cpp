#include "vesselseg/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace vseg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!current.empty()) parts.push_back(std::move(current)), current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) parts.push_back(std::move(current));
  return parts;
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

int parse_int(std::string_view text, int line) {
  int value = 0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    fail(line, "expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view text, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + std::string(text) + "'");
  }
}

Shape3 parse_shape(std::string_view value, int line) {
  const auto parts = split_list(value);
  if (parts.size() == 1) {
    const int n = parse_int(parts[0], line);
    return {n, n, n};
  }
  if (parts.size() != 3) fail(line, "expected one or three integers");
  return {parse_int(parts[0], line), parse_int(parts[1], line),
          parse_int(parts[2], line)};
}

std::vector<WindowSpec> parse_windows(std::string_view value, int line) {
  std::vector<WindowSpec> windows;
  for (const auto& token : split_list(value)) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      fail(line, "window must be lo:hi, got '" + token + "'");
    }
    WindowSpec w;
    w.lo = parse_real(std::string_view(token).substr(0, colon), line);
    w.hi = parse_real(std::string_view(token).substr(colon + 1), line);
    if (!(w.lo < w.hi)) fail(line, "window lo must be below hi");
    windows.push_back(w);
  }
  if (windows.empty()) fail(line, "at least one window required");
  return windows;
}

std::vector<ViewAxis> parse_views(std::string_view value, int line) {
  std::vector<ViewAxis> views;
  for (const auto& token : split_list(value)) {
    const auto view = view_from_name(token);
    if (!view) fail(line, "unknown view '" + token + "'");
    views.push_back(*view);
  }
  if (views.empty()) fail(line, "at least one view required");
  return views;
}

}  // namespace

PipelineOptions parse_config_text(std::string_view text) {
  PipelineOptions opts;
  bool windows_set = false, views_set = false;

  std::istringstream stream{std::string(text)};
  std::string raw_line;
  int line = 0;
  while (std::getline(stream, raw_line)) {
    ++line;
    std::string_view sv = raw_line;
    const auto comment = sv.find('#');
    if (comment != std::string_view::npos) sv = sv.substr(0, comment);
    sv = trim(sv);
    if (sv.empty()) continue;

    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) fail(line, "expected key = value");
    const std::string key{trim(sv.substr(0, eq))};
    const std::string_view value = trim(sv.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (value.empty()) fail(line, "empty value for key '" + key + "'");

    if (key == "windows") {
      if (windows_set) fail(line, "duplicate key 'windows'");
      opts.seg.windows = parse_windows(value, line);
      windows_set = true;
    } else if (key == "coarse_shape") {
      opts.seg.coarse_shape = parse_shape(value, line);
    } else if (key == "fine_patch") {
      opts.seg.fine_patch = parse_shape(value, line);
    } else if (key == "roi_margin_voxels") {
      opts.seg.roi_margin_voxels = parse_int(value, line);
    } else if (key == "threshold") {
      opts.seg.threshold = parse_real(value, line);
    } else if (key == "views") {
      if (views_set) fail(line, "duplicate key 'views'");
      opts.seg.views = parse_views(value, line);
      views_set = true;
    } else if (key == "model") {
      opts.seg.model_paths.emplace_back(value);
    } else if (key == "fixpoint_iterations") {
      opts.fixpoint.iterations = parse_int(value, line);
    } else if (key == "fixpoint_expand_voxels") {
      opts.fixpoint.expand_voxels = parse_int(value, line);
    } else if (key == "fixpoint_connectivity") {
      opts.fixpoint.connectivity = parse_int(value, line);
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }

  validate(opts.seg);
  validate(opts.fixpoint);
  return opts;
}

PipelineOptions parse_config_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << f.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace vseg
