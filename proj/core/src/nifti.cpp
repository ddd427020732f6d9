#include "vesselseg/nifti.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "byte_io.hpp"

namespace vseg {

namespace {

constexpr std::size_t kHeaderBytes = 348;
constexpr std::size_t kMinVoxOffset = 352;
constexpr std::size_t kMaxDecompressedBytes = std::size_t{1} << 32;

// NIfTI-1 field offsets within the 348-byte header.
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffMagic = 344;

int bitpix_for(int datatype) {
  switch (datatype) {
    case kNiftiUint8:
      return 8;
    case kNiftiInt16:
      return 16;
    case kNiftiFloat32:
      return 32;
  }
  return 0;
}

bool looks_gzipped(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<std::uint8_t> gzip_decompress(std::span<const std::uint8_t> in) {
  z_stream strm{};
  if (inflateInit2(&strm, 15 + 32) != Z_OK) {
    throw MalformedHeader("gzip: inflate init failed");
  }
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> buf(1 << 16);
  strm.next_in = const_cast<Bytef*>(in.data());
  strm.avail_in = static_cast<uInt>(in.size());
  int rc = Z_OK;
  do {
    strm.next_out = buf.data();
    strm.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&strm, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&strm);
      throw MalformedHeader("gzip: corrupt compressed stream");
    }
    out.insert(out.end(), buf.data(), buf.data() + (buf.size() - strm.avail_out));
    if (out.size() > kMaxDecompressedBytes) {
      inflateEnd(&strm);
      throw MalformedHeader("gzip: decompressed stream too large");
    }
  } while (rc != Z_STREAM_END);
  inflateEnd(&strm);
  return out;
}

std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> in) {
  z_stream strm{};
  if (deflateInit2(&strm, 6, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) !=
      Z_OK) {
    throw IoFailure("gzip: deflate init failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&strm, in.size()));
  strm.next_in = const_cast<Bytef*>(in.data());
  strm.avail_in = static_cast<uInt>(in.size());
  strm.next_out = out.data();
  strm.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&strm, Z_FINISH);
  if (rc != Z_STREAM_END) {
    deflateEnd(&strm);
    throw IoFailure("gzip: compression failed");
  }
  out.resize(out.size() - strm.avail_out);
  deflateEnd(&strm);
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot open " + path.string());
  f.seekg(0, std::ios::end);
  const auto size = f.tellg();
  if (size < 0) throw IoFailure("cannot stat " + path.string());
  f.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0) {
    f.read(reinterpret_cast<char*>(bytes.data()), size);
  }
  if (!f) throw IoFailure("short read on " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open for write: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  f.flush();
  if (!f) throw IoFailure("write failed: " + path.string());
}

template <typename Decode>
void decode_payload(std::span<const std::uint8_t> payload, std::size_t count,
                    std::size_t elem_size, const Decode& decode) {
  const std::uint8_t* p = payload.data();
  for (std::size_t i = 0; i < count; ++i) decode(i, p + i * elem_size);
}

// Decodes the data section into HU floats with the header's affine rescale.
std::vector<float> decode_values(const NiftiHeader& hdr,
                                 std::span<const std::uint8_t> bytes) {
  const std::size_t count = static_cast<std::size_t>(hdr.dims[0]) *
                            hdr.dims[1] * hdr.dims[2];
  const std::size_t elem = bitpix_for(hdr.datatype_code) / 8;
  if (bytes.size() < hdr.vox_offset ||
      bytes.size() - hdr.vox_offset < count * elem) {
    throw TruncatedData("nifti: data payload shorter than declared dims");
  }
  const auto payload = bytes.subspan(hdr.vox_offset, count * elem);

  // slope 0 means "no scaling" by NIfTI-1 convention
  const double slope = hdr.scl_slope == 0.0 ? 1.0 : hdr.scl_slope;
  const double inter = hdr.scl_inter;
  const bool identity = slope == 1.0 && inter == 0.0;

  std::vector<float> values(count);
  switch (hdr.datatype_code) {
    case kNiftiUint8:
      decode_payload(payload, count, 1, [&](std::size_t i, const std::uint8_t* p) {
        values[i] = static_cast<float>(*p * slope + inter);
      });
      break;
    case kNiftiInt16:
      decode_payload(payload, count, 2, [&](std::size_t i, const std::uint8_t* p) {
        std::int16_t v = static_cast<std::int16_t>(
            static_cast<std::uint16_t>(p[0]) |
            static_cast<std::uint16_t>(p[1]) << 8);
        values[i] = static_cast<float>(v * slope + inter);
      });
      break;
    case kNiftiFloat32:
      decode_payload(payload, count, 4, [&](std::size_t i, const std::uint8_t* p) {
        std::uint32_t raw = 0;
        for (int b = 3; b >= 0; --b) raw = (raw << 8) | p[b];
        float v;
        std::memcpy(&v, &raw, sizeof(v));
        values[i] = identity ? v : static_cast<float>(v * slope + inter);
      });
      break;
    default:
      throw UnsupportedDatatype("nifti: unreachable datatype");
  }
  return values;
}

std::vector<std::uint8_t> encode_common(const Shape3& shape,
                                        const Spacing3& spacing, int datatype,
                                        std::span<const std::uint8_t> payload) {
  detail::ByteWriter w;
  w.i32(static_cast<std::int32_t>(kHeaderBytes));  // sizeof_hdr
  w.fill(kOffDim - w.bytes().size());
  w.i16(3);  // dim[0] = number of dimensions
  for (int a = 0; a < 3; ++a) w.i16(static_cast<std::int16_t>(shape[a]));
  for (int a = 0; a < 4; ++a) w.i16(1);  // dim[4..7]
  w.fill(kOffDatatype - w.bytes().size());
  w.i16(static_cast<std::int16_t>(datatype));
  w.i16(static_cast<std::int16_t>(bitpix_for(datatype)));
  w.fill(kOffPixdim - w.bytes().size());
  w.f32(1.0f);  // pixdim[0] (qfac)
  for (int a = 0; a < 3; ++a) w.f32(static_cast<float>(spacing[a]));
  for (int a = 0; a < 4; ++a) w.f32(1.0f);  // pixdim[4..7]
  w.f32(static_cast<float>(kMinVoxOffset));  // vox_offset
  w.f32(1.0f);                               // scl_slope
  w.f32(0.0f);                               // scl_inter
  w.fill(kOffXyztUnits - w.bytes().size());
  w.u8(2);  // spatial units: mm
  w.fill(kOffMagic - w.bytes().size());
  w.raw(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>("n+1\0"), 4));
  w.fill(kMinVoxOffset - w.bytes().size());  // 4-byte extension stub, all zero
  w.raw(payload);
  return std::move(w.bytes());
}

void write_grid_file(const std::filesystem::path& path,
                     std::vector<std::uint8_t> encoded) {
  if (path.empty()) throw IoFailure("empty output path");
  if (path.extension() == ".gz") {
    write_file_bytes(path, gzip_compress(encoded));
  } else {
    write_file_bytes(path, encoded);
  }
}

}  // namespace

NiftiHeader parse_nifti_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw MalformedHeader("nifti: file shorter than the 348-byte header");
  }
  detail::ByteReader r(bytes);
  const std::int32_t sizeof_hdr = r.i32("sizeof_hdr");
  if (sizeof_hdr != static_cast<std::int32_t>(kHeaderBytes)) {
    throw MalformedHeader("nifti: sizeof_hdr is not 348");
  }

  r.seek(kOffMagic, "magic");
  const auto magic = r.raw(4, "magic");
  if (!(magic[0] == 'n' && magic[1] == '+' && magic[2] == '1' &&
        magic[3] == '\0')) {
    throw MalformedHeader("nifti: magic is not single-file \"n+1\"");
  }

  r.seek(kOffDim, "dim");
  const std::int16_t ndim = r.i16("dim[0]");
  if (ndim != 3) {
    throw MalformedHeader("nifti: only 3D images supported (dim[0] must be 3)");
  }
  NiftiHeader hdr;
  for (int a = 0; a < 3; ++a) {
    const std::int16_t d = r.i16("dim");
    if (d < 1) throw MalformedHeader("nifti: nonpositive axis length");
    hdr.dims[a] = d;
  }
  for (int a = 4; a <= 7; ++a) {
    const std::int16_t d = r.i16("dim");
    if (d > 1) {
      throw MalformedHeader("nifti: trailing dims must be 1 for 3D images");
    }
  }

  r.seek(kOffDatatype, "datatype");
  hdr.datatype_code = r.i16("datatype");
  if (hdr.datatype_code != kNiftiUint8 && hdr.datatype_code != kNiftiInt16 &&
      hdr.datatype_code != kNiftiFloat32) {
    throw UnsupportedDatatype("nifti: datatype code " +
                              std::to_string(hdr.datatype_code) +
                              " outside supported {uint8, int16, float32}");
  }
  const std::int16_t bitpix = r.i16("bitpix");
  if (bitpix != bitpix_for(hdr.datatype_code)) {
    throw MalformedHeader("nifti: bitpix inconsistent with datatype");
  }

  r.seek(kOffPixdim, "pixdim");
  r.f32("pixdim[0]");
  for (int a = 0; a < 3; ++a) {
    const float p = r.f32("pixdim");
    if (!(p > 0.0f) || !std::isfinite(p)) {
      throw MalformedHeader("nifti: pixdim must be positive and finite");
    }
    hdr.pixdim[a] = p;
  }

  r.seek(kOffVoxOffset, "vox_offset");
  const float vox_offset = r.f32("vox_offset");
  if (!std::isfinite(vox_offset) || vox_offset < kMinVoxOffset ||
      vox_offset != std::floor(vox_offset)) {
    throw MalformedHeader("nifti: vox_offset must be an integer >= 352");
  }
  hdr.vox_offset = static_cast<std::uint64_t>(vox_offset);

  const float slope = r.f32("scl_slope");
  const float inter = r.f32("scl_inter");
  if (!std::isfinite(slope) || !std::isfinite(inter)) {
    throw MalformedHeader("nifti: non-finite scl_slope/scl_inter");
  }
  hdr.scl_slope = slope;
  hdr.scl_inter = inter;
  return hdr;
}

Volume3 decode_nifti_volume(std::span<const std::uint8_t> bytes) {
  const NiftiHeader hdr = parse_nifti_header(bytes);
  std::vector<float> values = decode_values(hdr, bytes);
  return Volume3(hdr.dims, hdr.pixdim, std::move(values));
}

Mask3 decode_nifti_mask(std::span<const std::uint8_t> bytes) {
  const NiftiHeader hdr = parse_nifti_header(bytes);
  const std::vector<float> values = decode_values(hdr, bytes);
  std::vector<std::uint8_t> bits(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    bits[i] = values[i] != 0.0f ? 1 : 0;
  }
  return Mask3(hdr.dims, hdr.pixdim, std::move(bits));
}

std::vector<std::uint8_t> encode_nifti(const Volume3& vol) {
  detail::ByteWriter payload;
  for (float v : vol.data()) payload.f32(v);
  return encode_common(vol.shape(), vol.spacing(), kNiftiFloat32,
                       payload.bytes());
}

std::vector<std::uint8_t> encode_nifti(const Mask3& mask) {
  std::vector<std::uint8_t> payload(mask.voxel_count());
  auto src = mask.data();
  for (std::size_t i = 0; i < src.size(); ++i) payload[i] = src[i] ? 1 : 0;
  return encode_common(mask.shape(), mask.spacing(), kNiftiUint8, payload);
}

std::vector<std::uint8_t> read_file_maybe_gzip(
    const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes = read_file_bytes(path);
  if (looks_gzipped(bytes)) return gzip_decompress(bytes);
  return bytes;
}

Volume3 read_nifti_volume(const std::filesystem::path& path) {
  return decode_nifti_volume(read_file_maybe_gzip(path));
}

Mask3 read_nifti_mask(const std::filesystem::path& path) {
  return decode_nifti_mask(read_file_maybe_gzip(path));
}

void write_nifti(const Volume3& vol, const std::filesystem::path& path) {
  write_grid_file(path, encode_nifti(vol));
}

void write_nifti(const Mask3& mask, const std::filesystem::path& path) {
  write_grid_file(path, encode_nifti(mask));
}

}  // namespace vseg
