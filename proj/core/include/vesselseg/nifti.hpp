#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vesselseg/volume.hpp"

namespace vseg {

// Supported NIfTI-1 datatype codes.
inline constexpr int kNiftiUint8 = 2;
inline constexpr int kNiftiInt16 = 4;
inline constexpr int kNiftiFloat32 = 16;

// The header subset this toolkit reads and writes. Single-file little-endian
// NIfTI-1 ("n+1" magic) only; 3D images only; orientation matrices are
// ignored and spacing comes from pixdim, so flipped-axis inputs are the
// caller's responsibility.
struct NiftiHeader {
  Shape3 dims{0, 0, 0};
  Spacing3 pixdim{1.0, 1.0, 1.0};
  int datatype_code = 0;
  double scl_slope = 1.0;
  double scl_inter = 0.0;
  std::uint64_t vox_offset = 352;
};

// Parses and validates a header from complete file bytes (already
// decompressed). Never reads past the span.
NiftiHeader parse_nifti_header(std::span<const std::uint8_t> bytes);

// In-memory decode; stored values are mapped through v * scl_slope +
// scl_inter.
Volume3 decode_nifti_volume(std::span<const std::uint8_t> bytes);

// Mask decode: any nonzero mapped value becomes foreground.
Mask3 decode_nifti_mask(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_nifti(const Volume3& vol);   // float32
std::vector<std::uint8_t> encode_nifti(const Mask3& mask);    // uint8 {0,1}

// File front ends. A 2-byte gzip magic is sniffed regardless of extension;
// writers gzip-compress when the path ends in ".gz".
Volume3 read_nifti_volume(const std::filesystem::path& path);
Mask3 read_nifti_mask(const std::filesystem::path& path);
void write_nifti(const Volume3& vol, const std::filesystem::path& path);
void write_nifti(const Mask3& mask, const std::filesystem::path& path);

// Whole-file read with transparent gzip decompression (sniffed, not
// extension-driven).
std::vector<std::uint8_t> read_file_maybe_gzip(const std::filesystem::path& path);

}  // namespace vseg
