#pragma once

#include <span>
#include <vector>

#include "vesselseg/volume.hpp"

namespace vseg {

// One Hounsfield window [lo, hi] mapped linearly onto [0, 1].
struct WindowSpec {
  double lo = 0.0;
  double hi = 0.0;
};

// The two stock windows: one for the low-intensity branch range, one for the
// high-intensity trunk range.
std::vector<WindowSpec> default_windows();

// Stack of windowed channels derived from a single volume; channel order
// matches window order.
struct MultiChannelVolume {
  std::vector<Volume3> channels;
  std::vector<WindowSpec> windows;

  const Shape3& shape() const { return channels.front().shape(); }
  const Spacing3& spacing() const { return channels.front().spacing(); }
  int channel_count() const { return static_cast<int>(channels.size()); }
};

// channel_k(v) = (v - lo_k) / (hi_k - lo_k), deliberately NOT clamped:
// values outside the window keep their linear image below 0 or above 1.
MultiChannelVolume make_channels(const Volume3& vol,
                                 std::span<const WindowSpec> windows);

}  // namespace vseg
