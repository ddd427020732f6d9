#include "vesselseg/unet3d.hpp"

#include <string>

#include "vesselseg/parallel.hpp"

namespace vseg {

Tensor4 conv3d(const Tensor4& input, std::span<const float> kernel, int out_ch,
               int in_ch, int k, std::span<const float> bias, int threads) {
  if (input.channels() != in_ch) {
    throw ShapeMismatch("conv3d: input has " +
                        std::to_string(input.channels()) +
                        " channels, kernel expects " + std::to_string(in_ch));
  }
  if (k < 1 || k % 2 == 0) {
    throw ShapeMismatch("conv3d: kernel size must be odd");
  }
  const std::size_t kvol = static_cast<std::size_t>(k) * k * k;
  if (kernel.size() != static_cast<std::size_t>(out_ch) * in_ch * kvol) {
    throw ShapeMismatch("conv3d: kernel element count mismatch");
  }
  if (bias.size() != static_cast<std::size_t>(out_ch)) {
    throw ShapeMismatch("conv3d: bias length mismatch");
  }

  const int nx = input.nx(), ny = input.ny(), nz = input.nz();
  const int pad = k / 2;
  Tensor4 out(out_ch, nx, ny, nz);

  // One work item per (output channel, z slice); writes are disjoint and the
  // per-voxel accumulation order is fixed, so the result is identical for
  // any thread count. Interior voxels skip bounds checks entirely.
  const std::size_t jobs = static_cast<std::size_t>(out_ch) * nz;
  const float* in_data = input.data().data();
  const std::size_t plane = static_cast<std::size_t>(nx) * ny;
  const std::size_t chan = plane * nz;
  parallel_for(jobs, threads, [&](std::size_t job) {
    const int oc = static_cast<int>(job / nz);
    const int z = static_cast<int>(job % nz);
    const float* kbase = kernel.data() +
                         static_cast<std::size_t>(oc) * in_ch * kvol;
    const bool z_interior = z >= pad && z < nz - pad;
    for (int y = 0; y < ny; ++y) {
      const bool yz_interior = z_interior && y >= pad && y < ny - pad;
      for (int x = 0; x < nx; ++x) {
        double acc = bias[oc];
        if (yz_interior && x >= pad && x < nx - pad) {
          const float* kw = kbase;
          for (int ic = 0; ic < in_ch; ++ic) {
            const float* base = in_data + ic * chan +
                                static_cast<std::size_t>(z - pad) * plane +
                                static_cast<std::size_t>(y - pad) * nx +
                                (x - pad);
            for (int dz = 0; dz < k; ++dz) {
              for (int dy = 0; dy < k; ++dy) {
                const float* row = base + static_cast<std::size_t>(dz) * plane +
                                   static_cast<std::size_t>(dy) * nx;
                for (int dx = 0; dx < k; ++dx) {
                  acc += static_cast<double>(row[dx]) * kw[dx];
                }
                kw += k;
              }
            }
          }
        } else {
          for (int ic = 0; ic < in_ch; ++ic) {
            const float* kw = kbase + static_cast<std::size_t>(ic) * kvol;
            for (int dz = 0; dz < k; ++dz) {
              const int sz = z + dz - pad;
              if (sz < 0 || sz >= nz) continue;
              for (int dy = 0; dy < k; ++dy) {
                const int sy = y + dy - pad;
                if (sy < 0 || sy >= ny) continue;
                const float* krow =
                    kw + (static_cast<std::size_t>(dz) * k + dy) * k;
                const float* row = in_data + ic * chan +
                                   static_cast<std::size_t>(sz) * plane +
                                   static_cast<std::size_t>(sy) * nx;
                for (int dx = 0; dx < k; ++dx) {
                  const int sx = x + dx - pad;
                  if (sx < 0 || sx >= nx) continue;
                  acc += static_cast<double>(row[sx]) * krow[dx];
                }
              }
            }
          }
        }
        out.at(oc, x, y, z) = static_cast<float>(acc);
      }
    }
  });
  return out;
}

Tensor4 maxpool2(const Tensor4& input) {
  const int nx = input.nx(), ny = input.ny(), nz = input.nz();
  if (nx % 2 != 0 || ny % 2 != 0 || nz % 2 != 0) {
    throw OddDimension("maxpool2: spatial dims must be even");
  }
  Tensor4 out(input.channels(), nx / 2, ny / 2, nz / 2);
  for (int c = 0; c < input.channels(); ++c) {
    for (int z = 0; z < nz / 2; ++z) {
      for (int y = 0; y < ny / 2; ++y) {
        for (int x = 0; x < nx / 2; ++x) {
          float m = input.at(c, 2 * x, 2 * y, 2 * z);
          for (int dz = 0; dz < 2; ++dz) {
            for (int dy = 0; dy < 2; ++dy) {
              for (int dx = 0; dx < 2; ++dx) {
                m = std::max(m, input.at(c, 2 * x + dx, 2 * y + dy, 2 * z + dz));
              }
            }
          }
          out.at(c, x, y, z) = m;
        }
      }
    }
  }
  return out;
}

Tensor4 upsample2_nearest(const Tensor4& input) {
  const int nx = input.nx(), ny = input.ny(), nz = input.nz();
  Tensor4 out(input.channels(), nx * 2, ny * 2, nz * 2);
  for (int c = 0; c < input.channels(); ++c) {
    for (int z = 0; z < nz * 2; ++z) {
      for (int y = 0; y < ny * 2; ++y) {
        for (int x = 0; x < nx * 2; ++x) {
          out.at(c, x, y, z) = input.at(c, x / 2, y / 2, z / 2);
        }
      }
    }
  }
  return out;
}

namespace {

Tensor4 conv_named(const Tensor4& input, const ModelWeights& w,
                   const std::string& stem, int threads) {
  const NamedTensor& kernel = w.tensor(stem + ".weight");
  const NamedTensor& bias = w.tensor(stem + ".bias");
  const int out_ch = static_cast<int>(kernel.dims[0]);
  const int in_ch = static_cast<int>(kernel.dims[1]);
  const int k = static_cast<int>(kernel.dims[2]);
  return conv3d(input, kernel.data, out_ch, in_ch, k, bias.data, threads);
}

Tensor4 conv_relu(const Tensor4& input, const ModelWeights& w,
                  const std::string& stem, int threads) {
  Tensor4 out = conv_named(input, w, stem, threads);
  relu_inplace(out);
  return out;
}

}  // namespace

Tensor4 unet_forward(const ModelWeights& weights, const Tensor4& patch,
                     int threads) {
  const int levels = weights.levels();
  if (patch.channels() != weights.in_channels()) {
    throw ShapeMismatch("unet_forward: patch has " +
                        std::to_string(patch.channels()) +
                        " channels, weights expect " +
                        std::to_string(weights.in_channels()));
  }
  const int divisor = 1 << (levels - 1);
  const Shape3 s = patch.spatial_shape();
  for (int a = 0; a < 3; ++a) {
    if (s[a] % divisor != 0) {
      throw ShapeMismatch("unet_forward: spatial dims must be divisible by " +
                          std::to_string(divisor));
    }
  }

  std::vector<Tensor4> skips;
  skips.reserve(levels - 1);
  Tensor4 x = patch;
  for (int l = 0; l < levels - 1; ++l) {
    const std::string stem = "enc" + std::to_string(l);
    x = conv_relu(x, weights, stem + ".conv1", threads);
    x = conv_relu(x, weights, stem + ".conv2", threads);
    skips.push_back(x);
    x = maxpool2(x);
  }

  x = conv_relu(x, weights, "bottleneck.conv1", threads);
  x = conv_relu(x, weights, "bottleneck.conv2", threads);

  for (int l = levels - 2; l >= 0; --l) {
    const std::string stem = "dec" + std::to_string(l);
    x = upsample2_nearest(x);
    x = conv_relu(x, weights, stem + ".up", threads);
    x = concat_channels(skips[l], x);
    x = conv_relu(x, weights, stem + ".conv1", threads);
    x = conv_relu(x, weights, stem + ".conv2", threads);
  }

  return conv_named(x, weights, "out", threads);  // logits, no activation
}

}  // namespace vseg
