#include "vesselseg/windowing.hpp"

#include <cmath>

namespace vseg {

std::vector<WindowSpec> default_windows() {
  return {{-900.0, 0.0}, {0.0, 300.0}};
}

MultiChannelVolume make_channels(const Volume3& vol,
                                 std::span<const WindowSpec> windows) {
  if (windows.empty()) {
    throw InvalidWindow("make_channels: at least one window required");
  }
  for (const auto& w : windows) {
    if (!(w.lo < w.hi) || !std::isfinite(w.lo) || !std::isfinite(w.hi)) {
      throw InvalidWindow("make_channels: window lo must be below hi");
    }
  }

  MultiChannelVolume out;
  out.windows.assign(windows.begin(), windows.end());
  out.channels.reserve(windows.size());
  for (const auto& w : windows) {
    Volume3 ch(vol.shape(), vol.spacing());
    const double inv_width = 1.0 / (w.hi - w.lo);
    auto src = vol.data();
    auto dst = ch.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = static_cast<float>((src[i] - w.lo) * inv_width);
    }
    out.channels.push_back(std::move(ch));
  }
  return out;
}

}  // namespace vseg
