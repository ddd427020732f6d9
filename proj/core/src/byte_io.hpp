#pragma once

// Bounds-checked little-endian readers/writers shared by the NIfTI and
// weight-file codecs. The reader never touches memory past the span it was
// given; running out of bytes raises TruncatedData.

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "vesselseg/errors.hpp"

namespace vseg::detail {

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void require(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw TruncatedData(std::string("unexpected end of data reading ") +
                          what);
    }
  }

  void seek(std::size_t pos, const char* what) {
    if (pos > bytes_.size()) {
      throw TruncatedData(std::string("seek past end of data for ") + what);
    }
    pos_ = pos;
  }

  std::uint8_t u8(const char* what) {
    require(1, what);
    return bytes_[pos_++];
  }

  std::uint16_t u16(const char* what) {
    require(2, what);
    const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_]) |
                            static_cast<std::uint16_t>(bytes_[pos_ + 1]) << 8;
    pos_ += 2;
    return v;
  }

  std::uint32_t u32(const char* what) {
    require(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }

  std::int16_t i16(const char* what) { return static_cast<std::int16_t>(u16(what)); }
  std::int32_t i32(const char* what) { return static_cast<std::int32_t>(u32(what)); }

  float f32(const char* what) {
    const std::uint32_t raw = u32(what);
    float out;
    std::memcpy(&out, &raw, sizeof(out));
    return out;
  }

  std::span<const std::uint8_t> raw(std::size_t n, const char* what) {
    require(n, what);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class ByteWriter {
 public:
  std::vector<std::uint8_t>& bytes() { return bytes_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  void u8(std::uint8_t v) { bytes_.push_back(v); }

  void u16(std::uint16_t v) {
    bytes_.push_back(static_cast<std::uint8_t>(v));
    bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
  }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }

  void f32(float v) {
    std::uint32_t raw;
    std::memcpy(&raw, &v, sizeof(raw));
    u32(raw);
  }

  void raw(std::span<const std::uint8_t> data) {
    bytes_.insert(bytes_.end(), data.begin(), data.end());
  }

  void fill(std::size_t n, std::uint8_t v = 0) {
    bytes_.insert(bytes_.end(), n, v);
  }

  // Overwrites in place; the region must already exist.
  void patch_u16_at(std::size_t pos, std::uint16_t v) {
    bytes_[pos] = static_cast<std::uint8_t>(v);
    bytes_[pos + 1] = static_cast<std::uint8_t>(v >> 8);
  }

 private:
  std::vector<std::uint8_t> bytes_;
};

}  // namespace vseg::detail
