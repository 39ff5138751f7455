#pragma once

// Lossy stage: prequantization onto the 2*eb lattice, blockwise first-order
// Lorenzo prediction against a zero padding layer, and postquantization of
// the integer residuals into codes. Every value the predictor reads during
// compression is a prequantized input, never a reconstructed output, so each
// point's code depends only on the input field and blocks (and points) can
// be processed in any order. Reconstruction is the reverse and is sequential
// within a block.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdqz/core.hpp"
#include "sdqz/error.hpp"
#include "sdqz/parallel.hpp"

namespace sdqz {

// |d°| above this would let the 7-term 3D predictor lose integer exactness
// in double arithmetic.
inline constexpr double kMaxPrequantMagnitude = 562949953421312.0;  // 2^49

struct PrequantField {
  std::vector<double> values;
  Dims dims;
};

struct Outlier {
  std::uint64_t index = 0;
  double value = 0.0;  // prequantized value d°, in units of 2*eb

  friend bool operator==(const Outlier&, const Outlier&) = default;
};

struct QuantOutput {
  std::vector<std::uint16_t> codes;
  std::vector<Outlier> outliers;  // sorted by index
  Dims dims;
  QuantConfig cfg;
};

/// round-half-away-from-zero(d / (2 eb)); std::round has exactly this tie rule.
inline double prequantize_value(double d, double eb) { return std::round(d / (2.0 * eb)); }

template <std::floating_point T>
PrequantField prequantize(std::span<const T> data, const Dims& dims, double eb,
                          unsigned threads = 1) {
  if (!(eb > 0.0) || !std::isfinite(eb))
    throw Error(Errc::invalid_argument, "error bound must be positive");
  std::size_t n = checked_volume(dims);
  if (data.size() != n)
    throw Error(Errc::length_mismatch, "data has " + std::to_string(data.size()) +
                                           " values but dims imply " + std::to_string(n));
  PrequantField out{std::vector<double>(n), dims};
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double d = static_cast<double>(data[i]);
      if (!std::isfinite(d))
        throw Error(Errc::nonfinite_input,
                    "nonfinite value at index " + std::to_string(i) + "; NaN/Inf are not supported");
      double q = prequantize_value(d, eb);
      if (std::fabs(q) > kMaxPrequantMagnitude)
        throw Error(Errc::invalid_argument,
                    "error bound too small for the data magnitude (value " + std::to_string(d) +
                        " at index " + std::to_string(i) + ")");
      out.values[i] = q;
    }
  });
  return out;
}

// Per-block working buffer with one leading layer of zeros on every axis.
// Block-local coordinates (z, y, x) map to padded coordinates (z+1, y+1, x+1).
class PredictionContext {
 public:
  explicit PredictionContext(std::size_t rank) : rank_(rank) {}

  std::size_t rank() const { return rank_; }
  const std::array<std::size_t, 3>& extent() const { return extent_; }

  void reset(const std::array<std::size_t, 3>& extent) {
    extent_ = extent;
    stride_y_ = extent[2] + 1;
    stride_z_ = (extent[1] + 1) * stride_y_;
    buf_.assign((extent[0] + 1) * stride_z_, 0.0);
  }

  // Copies a block of a row-major field into the interior; padding stays 0.
  void load(std::span<const double> field, const std::array<std::size_t, 3>& shape,
            const Block& b) {
    reset(b.extent);
    for (std::size_t z = 0; z < b.extent[0]; ++z)
      for (std::size_t y = 0; y < b.extent[1]; ++y) {
        std::size_t src = ((b.origin[0] + z) * shape[1] + b.origin[1] + y) * shape[2] + b.origin[2];
        std::copy_n(field.begin() + static_cast<std::ptrdiff_t>(src), b.extent[2],
                    buf_.begin() + static_cast<std::ptrdiff_t>(padded(z, y, 0)));
      }
  }

  double& at(std::size_t z, std::size_t y, std::size_t x) { return buf_[padded(z, y, x)]; }
  double at(std::size_t z, std::size_t y, std::size_t x) const { return buf_[padded(z, y, x)]; }

  // Raw padded access; index 0 on an axis is the padding layer.
  double padded_at(std::size_t pz, std::size_t py, std::size_t px) const {
    return buf_[pz * stride_z_ + py * stride_y_ + px];
  }

 private:
  std::size_t padded(std::size_t z, std::size_t y, std::size_t x) const {
    return (z + 1) * stride_z_ + (y + 1) * stride_y_ + (x + 1);
  }

  std::size_t rank_;
  std::array<std::size_t, 3> extent_{};
  std::size_t stride_y_ = 0;
  std::size_t stride_z_ = 0;
  std::vector<double> buf_;
};

/// First-order Lorenzo prediction for block-local point (z, y, x). Lower ranks
/// use only the trailing axes; out-of-block neighbours read the zero padding.
inline double lorenzo_predict(const PredictionContext& ctx, std::size_t z, std::size_t y,
                              std::size_t x) {
  const std::size_t k = z + 1, j = y + 1, i = x + 1;
  switch (ctx.rank()) {
    case 1:
      return ctx.padded_at(k, j, i - 1);
    case 2:
      return ctx.padded_at(k, j - 1, i) + ctx.padded_at(k, j, i - 1) -
             ctx.padded_at(k, j - 1, i - 1);
    default:
      return ctx.padded_at(k - 1, j, i) + ctx.padded_at(k, j - 1, i) + ctx.padded_at(k, j, i - 1) -
             ctx.padded_at(k - 1, j - 1, i) - ctx.padded_at(k - 1, j, i - 1) -
             ctx.padded_at(k, j - 1, i - 1) + ctx.padded_at(k - 1, j - 1, i - 1);
  }
}

// Residual delta = d° - p°. In-cap iff -radius < delta < radius; code 0 is
// reserved for outliers.
inline std::uint16_t postquantize_value(double delta, std::uint32_t radius) {
  double r = static_cast<double>(radius);
  if (delta > -r && delta < r) return static_cast<std::uint16_t>(delta + r);
  return 0;
}

/// Quantizes one loaded block. Codes go to their global flat positions;
/// outliers are appended in block raster order.
inline void postquantize_block(const PredictionContext& ctx, const QuantConfig& cfg,
                               const std::array<std::size_t, 3>& shape, const Block& b,
                               std::span<std::uint16_t> codes, std::vector<Outlier>& outliers) {
  for (std::size_t z = 0; z < b.extent[0]; ++z)
    for (std::size_t y = 0; y < b.extent[1]; ++y)
      for (std::size_t x = 0; x < b.extent[2]; ++x) {
        std::size_t gi = ((b.origin[0] + z) * shape[1] + b.origin[1] + y) * shape[2] + b.origin[2] + x;
        double value = ctx.at(z, y, x);
        std::uint16_t q = postquantize_value(value - lorenzo_predict(ctx, z, y, x), cfg.radius);
        codes[gi] = q;
        if (q == 0) outliers.push_back({gi, value});
      }
}

inline QuantOutput quantize_prequantized(const PrequantField& pre, const QuantConfig& cfg,
                                         unsigned threads = 1) {
  cfg.validate();
  BlockGrid grid = partition_blocks(pre.dims, cfg);
  auto shape = to_shape3(pre.dims);
  QuantOutput out{std::vector<std::uint16_t>(pre.values.size()), {}, pre.dims, cfg};

  std::vector<std::vector<Outlier>> per_worker(worker_count(grid.total_blocks, threads));
  parallel_for_workers(grid.total_blocks, threads,
                       [&](std::size_t w, std::size_t begin, std::size_t end) {
                         PredictionContext ctx(pre.dims.size());
                         for (std::size_t bi = begin; bi < end; ++bi) {
                           Block b = grid.block(bi);
                           ctx.load(pre.values, shape, b);
                           postquantize_block(ctx, cfg, shape, b, out.codes, per_worker[w]);
                         }
                       });
  for (auto& v : per_worker) out.outliers.insert(out.outliers.end(), v.begin(), v.end());
  std::sort(out.outliers.begin(), out.outliers.end(),
            [](const Outlier& a, const Outlier& b) { return a.index < b.index; });
  return out;
}

template <std::floating_point T>
QuantOutput compress_field(std::span<const T> data, const Dims& dims, const QuantConfig& cfg,
                           unsigned threads = 1) {
  cfg.validate();
  if (cfg.block_shape.size() != dims.size())
    throw Error(Errc::invalid_argument, "block shape rank does not match field rank");
  return quantize_prequantized(prequantize(data, dims, cfg.eb, threads), cfg, threads);
}

/// Checks the code/outlier pairing: outlier indices strictly increasing and
/// in range, each pointing at a code 0, and no code 0 without an outlier.
inline void validate_quant_output(const QuantOutput& q) {
  q.cfg.validate();
  std::size_t n = checked_volume(q.dims);
  if (q.codes.size() != n)
    throw Error(Errc::corrupt_data, "code count " + std::to_string(q.codes.size()) +
                                        " does not match field size " + std::to_string(n));
  std::size_t zeros = 0;
  for (auto c : q.codes) {
    if (c >= q.cfg.cap)
      throw Error(Errc::corrupt_data, "quantization code " + std::to_string(c) + " exceeds cap");
    zeros += (c == 0);
  }
  for (std::size_t i = 0; i < q.outliers.size(); ++i) {
    const auto& o = q.outliers[i];
    if (o.index >= n)
      throw Error(Errc::corrupt_data, "outlier index " + std::to_string(o.index) + " out of range");
    if (i > 0 && o.index <= q.outliers[i - 1].index)
      throw Error(Errc::corrupt_data, "outlier indices are not strictly increasing");
    if (q.codes[o.index] != 0)
      throw Error(Errc::corrupt_data,
                  "outlier at index " + std::to_string(o.index) + " has a nonzero code");
    if (!std::isfinite(o.value))
      throw Error(Errc::corrupt_data, "nonfinite outlier value");
  }
  if (zeros != q.outliers.size())
    throw Error(Errc::corrupt_data, std::to_string(zeros) + " outlier codes but " +
                                        std::to_string(q.outliers.size()) + " outlier entries");
}

/// Reconstructed field in prequant units (multiples of 1, i.e. of 2*eb).
inline std::vector<double> reconstruct_prequantized(const QuantOutput& q, unsigned threads = 1) {
  validate_quant_output(q);
  BlockGrid grid = partition_blocks(q.dims, q.cfg);
  auto shape = to_shape3(q.dims);
  std::vector<double> out(q.codes.size(), 0.0);
  for (const auto& o : q.outliers) out[o.index] = o.value;
  const double r = static_cast<double>(q.cfg.radius);

  parallel_for(grid.total_blocks, threads, [&](std::size_t begin, std::size_t end) {
    PredictionContext ctx(q.dims.size());
    for (std::size_t bi = begin; bi < end; ++bi) {
      Block b = grid.block(bi);
      ctx.reset(b.extent);
      // Each point's prediction reads points decoded earlier in raster order.
      for (std::size_t z = 0; z < b.extent[0]; ++z)
        for (std::size_t y = 0; y < b.extent[1]; ++y)
          for (std::size_t x = 0; x < b.extent[2]; ++x) {
            std::size_t gi =
                ((b.origin[0] + z) * shape[1] + b.origin[1] + y) * shape[2] + b.origin[2] + x;
            std::uint16_t c = q.codes[gi];
            double v = c == 0 ? out[gi] : lorenzo_predict(ctx, z, y, x) + (c - r);
            ctx.at(z, y, x) = v;
            out[gi] = v;
          }
    }
  });
  return out;
}

template <std::floating_point T>
std::vector<T> reconstruct_field(const QuantOutput& q, unsigned threads = 1) {
  std::vector<double> pre = reconstruct_prequantized(q, threads);
  std::vector<T> out(pre.size());
  const double step = 2.0 * q.cfg.eb;
  for (std::size_t i = 0; i < pre.size(); ++i) out[i] = static_cast<T>(pre[i] * step);
  return out;
}

}  // namespace sdqz
