#include "vesselseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace vseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared distance transform (Felzenszwalb & Huttenlocher) under
// d(p, q) = w * (p - q)^2 + f(q). Entries with f = +inf contribute no
// parabola. Values stay exact in f64 for integer-weight grids because every
// term is an exact integer product.
void dt_1d(const double* f, int n, double w, double* d, int* v, double* z) {
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    for (;;) {
      const int r = v[k];
      s = ((f[q] + w * q * q) - (f[r] + w * r * r)) / (2.0 * w * (q - r));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }

  if (k < 0) {
    std::fill(d, d + n, kInf);
    return;
  }
  int j = 0;
  for (int p = 0; p < n; ++p) {
    while (z[j + 1] < p) ++j;
    const int r = v[j];
    d[p] = w * (p - r) * (p - r) + f[r];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const Mask3& mask) {
  const Shape3& s = mask.shape();
  const Spacing3& sp = mask.spacing();
  const int nx = s[0], ny = s[1], nz = s[2];
  std::vector<double> dist(mask.voxel_count());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    dist[i] = mask.data()[i] ? 0.0 : kInf;
  }

  const int nmax = std::max({nx, ny, nz});
  std::vector<double> row(nmax), out(nmax), z(nmax + 1);
  std::vector<int> v(nmax);

  // x pass
  const double wx = sp[0] * sp[0];
  for (int zc = 0; zc < nz; ++zc) {
    for (int y = 0; y < ny; ++y) {
      double* base = dist.data() + mask.index(0, y, zc);
      dt_1d(base, nx, wx, out.data(), v.data(), z.data());
      std::copy(out.begin(), out.begin() + nx, base);
    }
  }
  // y pass
  const double wy = sp[1] * sp[1];
  for (int zc = 0; zc < nz; ++zc) {
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) row[y] = dist[mask.index(x, y, zc)];
      dt_1d(row.data(), ny, wy, out.data(), v.data(), z.data());
      for (int y = 0; y < ny; ++y) dist[mask.index(x, y, zc)] = out[y];
    }
  }
  // z pass
  const double wz = sp[2] * sp[2];
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      for (int zc = 0; zc < nz; ++zc) row[zc] = dist[mask.index(x, y, zc)];
      dt_1d(row.data(), nz, wz, out.data(), v.data(), z.data());
      for (int zc = 0; zc < nz; ++zc) dist[mask.index(x, y, zc)] = out[zc];
    }
  }
  return dist;
}

double dice(const Mask3& pred, const Mask3& gt) {
  if (pred.shape() != gt.shape()) {
    throw ShapeMismatch("dice: mask shapes differ");
  }
  std::size_t inter = 0, a = 0, b = 0;
  auto pd = pred.data();
  auto gd = gt.data();
  for (std::size_t i = 0; i < pd.size(); ++i) {
    const bool p = pd[i] != 0, g = gd[i] != 0;
    inter += (p && g);
    a += p;
    b += g;
  }
  if (a + b == 0) return 1.0;  // two empty masks agree
  return 2.0 * static_cast<double>(inter) / static_cast<double>(a + b);
}

double directed_hausdorff(const Mask3& a, const Mask3& b) {
  if (a.shape() != b.shape() || a.spacing() != b.spacing()) {
    throw ShapeMismatch("directed_hausdorff: masks on different grids");
  }
  if (count_foreground(a) == 0 || count_foreground(b) == 0) {
    throw EmptyMask("directed_hausdorff: undefined on empty masks");
  }
  const std::vector<double> dist_to_b = squared_distance_transform(b);
  double worst = 0.0;
  auto ad = a.data();
  for (std::size_t i = 0; i < ad.size(); ++i) {
    if (ad[i] != 0) worst = std::max(worst, dist_to_b[i]);
  }
  return std::sqrt(worst);
}

double hausdorff(const Mask3& a, const Mask3& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

EvalReport evaluate_set(std::span<const EvalPair> pairs) {
  EvalReport report;
  report.cases.reserve(pairs.size());
  double dice_sum = 0.0, hd_sum = 0.0;
  for (const auto& pair : pairs) {
    EvalCaseResult r;
    r.id = pair.id;
    try {
      if (pair.pred == nullptr || pair.gt == nullptr) {
        throw IoFailure("missing mask");
      }
      r.dice = dice(*pair.pred, *pair.gt);
      const std::size_t np = count_foreground(*pair.pred);
      const std::size_t ng = count_foreground(*pair.gt);
      if (np == 0 && ng == 0) {
        r.hausdorff_mm = 0.0;
      } else if (np == 0 || ng == 0) {
        r.hausdorff_mm = kInf;  // sentinel, never fatal in batch mode
      } else {
        r.hausdorff_mm = hausdorff(*pair.pred, *pair.gt);
      }
      dice_sum += r.dice;
      hd_sum += r.hausdorff_mm;
      ++report.valid_cases;
    } catch (const Error& e) {
      r.error = e.what();
    }
    report.cases.push_back(std::move(r));
  }
  if (report.valid_cases > 0) {
    report.mean_dice = dice_sum / static_cast<double>(report.valid_cases);
    report.mean_hausdorff_mm = hd_sum / static_cast<double>(report.valid_cases);
  } else {
    report.mean_dice = std::numeric_limits<double>::quiet_NaN();
    report.mean_hausdorff_mm = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

namespace {

std::string metric_text(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

nlohmann::json metric_json(double v) {
  if (std::isfinite(v)) return v;
  return metric_text(v);
}

}  // namespace

void write_report_csv(const EvalReport& report,
                      const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoFailure("cannot open report file " + path.string());
  f << "case_id,dice,hd_mm\n";
  for (const auto& c : report.cases) {
    if (c.ok()) {
      f << c.id << ',' << metric_text(c.dice) << ',' << metric_text(c.hausdorff_mm)
        << '\n';
    } else {
      f << c.id << ",nan,nan\n";
    }
  }
  f.flush();
  if (!f) throw IoFailure("report write failed " + path.string());
}

void write_report_json(const EvalReport& report,
                       const std::filesystem::path& path) {
  nlohmann::json j;
  j["cases"] = nlohmann::json::array();
  for (const auto& c : report.cases) {
    nlohmann::json jc;
    jc["case_id"] = c.id;
    if (c.ok()) {
      jc["dice"] = metric_json(c.dice);
      jc["hd_mm"] = metric_json(c.hausdorff_mm);
    } else {
      jc["error"] = c.error;
    }
    j["cases"].push_back(std::move(jc));
  }
  j["mean_dice"] = metric_json(report.mean_dice);
  j["mean_hd_mm"] = metric_json(report.mean_hausdorff_mm);
  j["valid_cases"] = report.valid_cases;
  j["case_count"] = report.cases.size();

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoFailure("cannot open report file " + path.string());
  f << j.dump(2) << '\n';
  f.flush();
  if (!f) throw IoFailure("report write failed " + path.string());
}

}  // namespace vseg
