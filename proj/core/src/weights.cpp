#include "vesselseg/weights.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "byte_io.hpp"
#include "vesselseg/rng.hpp"

namespace vseg {

namespace {

constexpr char kMagic[4] = {'U', 'N', 'W', '1'};
constexpr std::size_t kMaxTensorDims = 8;
constexpr std::size_t kMaxTensorElements = std::size_t{1} << 31;

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

struct ExpectedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
};

// The full manifest for (levels, widths, in_channels), in canonical order.
std::vector<ExpectedTensor> manifest(int levels, const std::vector<int>& widths,
                                     int in_channels) {
  std::vector<ExpectedTensor> out;
  auto conv = [&](const std::string& stem, int out_ch, int in_ch, int k) {
    out.push_back({stem + ".weight",
                   {static_cast<std::uint32_t>(out_ch),
                    static_cast<std::uint32_t>(in_ch),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k),
                    static_cast<std::uint32_t>(k)}});
    out.push_back({stem + ".bias", {static_cast<std::uint32_t>(out_ch)}});
  };

  int prev = in_channels;
  for (int l = 0; l < levels - 1; ++l) {
    const std::string stem = "enc" + std::to_string(l);
    conv(stem + ".conv1", widths[l], prev, 3);
    conv(stem + ".conv2", widths[l], widths[l], 3);
    prev = widths[l];
  }
  conv("bottleneck.conv1", widths[levels - 1], prev, 3);
  conv("bottleneck.conv2", widths[levels - 1], widths[levels - 1], 3);
  for (int l = levels - 2; l >= 0; --l) {
    const std::string stem = "dec" + std::to_string(l);
    conv(stem + ".up", widths[l], widths[l + 1], 3);
    conv(stem + ".conv1", widths[l], 2 * widths[l], 3);
    conv(stem + ".conv2", widths[l], widths[l], 3);
  }
  conv("out", 1, widths[0], 1);
  return out;
}

}  // namespace

ModelWeights ModelWeights::from_tensors(std::vector<NamedTensor> tensors) {
  ModelWeights w;
  w.tensors_ = std::move(tensors);
  for (std::size_t i = 0; i < w.tensors_.size(); ++i) {
    const auto& t = w.tensors_[i];
    if (t.data.size() != t.element_count()) {
      throw IncompleteWeights("tensor " + t.name + " has inconsistent size");
    }
    if (!w.by_name_.emplace(t.name, i).second) {
      throw IncompleteWeights("duplicate tensor name " + t.name);
    }
  }

  auto find = [&](const std::string& name) -> const NamedTensor* {
    auto it = w.by_name_.find(name);
    return it == w.by_name_.end() ? nullptr : &w.tensors_[it->second];
  };

  // Derive the architecture from the manifest.
  const NamedTensor* first = find("enc0.conv1.weight");
  if (!first || first->dims.size() != 5) {
    throw IncompleteWeights("weights missing enc0.conv1.weight");
  }
  w.in_channels_ = static_cast<int>(first->dims[1]);

  int enc_levels = 0;
  std::vector<int> widths;
  while (true) {
    const NamedTensor* t =
        find("enc" + std::to_string(enc_levels) + ".conv1.weight");
    if (!t) break;
    if (t->dims.size() != 5) {
      throw IncompleteWeights("encoder weight tensor has wrong rank");
    }
    widths.push_back(static_cast<int>(t->dims[0]));
    ++enc_levels;
  }
  const NamedTensor* bott = find("bottleneck.conv1.weight");
  if (enc_levels < 1 || !bott || bott->dims.size() != 5) {
    throw IncompleteWeights("weights do not form a complete U-Net");
  }
  widths.push_back(static_cast<int>(bott->dims[0]));
  w.levels_ = enc_levels + 1;
  w.widths_ = widths;

  // Every expected tensor must exist with the expected shape, and nothing
  // else may be present.
  const auto expected = manifest(w.levels_, w.widths_, w.in_channels_);
  if (expected.size() != w.tensors_.size()) {
    throw IncompleteWeights(
        "weight set has " + std::to_string(w.tensors_.size()) +
        " tensors, architecture requires " + std::to_string(expected.size()));
  }
  for (const auto& e : expected) {
    const NamedTensor* t = find(e.name);
    if (!t) throw IncompleteWeights("missing tensor " + e.name);
    if (t->dims != e.dims) {
      throw IncompleteWeights("tensor " + e.name + " has unexpected shape");
    }
  }
  return w;
}

const NamedTensor& ModelWeights::tensor(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) {
    throw IncompleteWeights("missing tensor " + std::string(name));
  }
  return tensors_[it->second];
}

std::size_t ModelWeights::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.element_count();
  return n;
}

ModelWeights decode_weights(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) + 8) {
    throw TruncatedData("weights: file too small");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw BadMagic("weights: magic is not UNW1");
  }

  // Trailing CRC-32 covers every preceding byte, so any flipped bit in the
  // payload is caught before structural parsing.
  detail::ByteReader tail(bytes.subspan(bytes.size() - 4));
  const std::uint32_t stored_crc = tail.u32("crc32");
  const std::uint32_t actual_crc = crc_of(bytes.first(bytes.size() - 4));
  if (stored_crc != actual_crc) {
    throw ChecksumMismatch("weights: CRC-32 mismatch");
  }

  detail::ByteReader r(bytes.first(bytes.size() - 4));
  r.seek(sizeof(kMagic), "tensor count");
  const std::uint32_t count = r.u32("tensor count");
  std::vector<NamedTensor> tensors;
  tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    const std::uint16_t name_len = r.u16("name length");
    const auto name_bytes = r.raw(name_len, "tensor name");
    t.name.assign(reinterpret_cast<const char*>(name_bytes.data()), name_len);
    const std::uint8_t ndim = r.u8("ndim");
    if (ndim == 0 || ndim > kMaxTensorDims) {
      throw IncompleteWeights("weights: tensor rank out of range");
    }
    std::size_t elements = 1;
    for (std::uint8_t d = 0; d < ndim; ++d) {
      const std::uint32_t dim = r.u32("dim");
      if (dim == 0) throw IncompleteWeights("weights: zero tensor dim");
      elements *= dim;
      if (elements > kMaxTensorElements) {
        throw IncompleteWeights("weights: tensor too large");
      }
      t.dims.push_back(dim);
    }
    r.require(elements * 4, "tensor payload");
    t.data.resize(elements);
    const auto payload = r.raw(elements * 4, "tensor payload");
    std::memcpy(t.data.data(), payload.data(), payload.size());
    tensors.push_back(std::move(t));
  }
  if (r.remaining() != 0) {
    throw IncompleteWeights("weights: trailing bytes after last tensor");
  }
  return ModelWeights::from_tensors(std::move(tensors));
}

std::vector<std::uint8_t> encode_weights(const ModelWeights& weights) {
  detail::ByteWriter w;
  w.raw(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(kMagic), sizeof(kMagic)));
  w.u32(static_cast<std::uint32_t>(weights.tensors().size()));
  for (const auto& t : weights.tensors()) {
    w.u16(static_cast<std::uint16_t>(t.name.size()));
    w.raw(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(t.name.data()), t.name.size()));
    w.u8(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) w.u32(d);
    for (float v : t.data) w.f32(v);
  }
  w.u32(crc_of(w.bytes()));
  return std::move(w.bytes());
}

ModelWeights load_weights(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot open weights file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_weights(bytes);
}

void save_weights(const ModelWeights& weights,
                  const std::filesystem::path& path) {
  const auto bytes = encode_weights(weights);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open weights file for write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  f.flush();
  if (!f) throw IoFailure("weights write failed " + path.string());
}

ModelWeights init_weights_random(int levels, int base_width,
                                 std::uint64_t seed, int in_channels) {
  if (levels < 2 || base_width < 1 || in_channels < 1) {
    throw IncompleteWeights("init_weights_random: invalid architecture");
  }
  std::vector<int> widths(levels);
  for (int l = 0; l < levels; ++l) widths[l] = base_width << l;

  CounterRng rng(seed);
  std::vector<NamedTensor> tensors;
  for (const auto& e : manifest(levels, widths, in_channels)) {
    NamedTensor t;
    t.name = e.name;
    t.dims = e.dims;
    t.data.resize(t.element_count());
    if (t.dims.size() == 5) {
      // fan_in = in_ch * kernel volume
      const std::size_t fan_in = static_cast<std::size_t>(t.dims[1]) *
                                 t.dims[2] * t.dims[3] * t.dims[4];
      const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
      for (auto& v : t.data) v = static_cast<float>(rng.normal(0.0, stddev));
    } else {
      std::fill(t.data.begin(), t.data.end(), 0.0f);  // biases start at zero
    }
    tensors.push_back(std::move(t));
  }
  return ModelWeights::from_tensors(std::move(tensors));
}

}  // namespace vseg
