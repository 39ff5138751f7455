#pragma once

// Distortion and size metrics, and rate-distortion sweeps over a list of
// error bounds.

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sdqz/core.hpp"
#include "sdqz/error.hpp"
#include "sdqz/pipeline.hpp"

namespace sdqz {

struct QualityReport {
  double rmse = 0.0;
  double psnr = 0.0;  // +inf when the arrays are identical
  double max_abs_error = 0.0;
  double value_range = 0.0;
};

/// PSNR = 20 log10((max - min) / RMSE), with max/min taken over `orig`.
template <std::floating_point T>
QualityReport quality(std::span<const T> orig, std::span<const T> recon) {
  if (orig.size() != recon.size())
    throw Error(Errc::length_mismatch, "original has " + std::to_string(orig.size()) +
                                           " values, reconstruction has " + std::to_string(recon.size()));
  if (orig.empty()) throw Error(Errc::invalid_argument, "cannot compare empty arrays");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double sq = 0.0, max_err = 0.0;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    double d = orig[i];
    if (!std::isfinite(d)) throw Error(Errc::nonfinite_input, "original contains NaN or Inf");
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    double e = std::fabs(d - static_cast<double>(recon[i]));
    if (std::isnan(e)) e = std::numeric_limits<double>::infinity();
    sq += e * e;
    max_err = std::max(max_err, e);
  }
  QualityReport r;
  r.rmse = std::sqrt(sq / static_cast<double>(orig.size()));
  r.max_abs_error = max_err;
  r.value_range = hi - lo;
  if (r.rmse == 0.0) {
    r.psnr = std::numeric_limits<double>::infinity();
  } else if (r.value_range == 0.0) {
    throw Error(Errc::invalid_argument, "PSNR is undefined for a zero-range field with nonzero error");
  } else {
    r.psnr = 20.0 * std::log10(r.value_range / r.rmse);
  }
  return r;
}

struct SizeReport {
  std::size_t original_bytes = 0;
  std::size_t compressed_bytes = 0;
  double compression_ratio = 0.0;
  double bitrate = 0.0;  // compressed bits per value
};

inline SizeReport size_report(const FieldDescriptor& fd, std::size_t archive_bytes,
                              unsigned value_bits = 32) {
  if (archive_bytes == 0) throw Error(Errc::invalid_argument, "archive size must be positive");
  SizeReport s;
  s.original_bytes = fd.n_points * value_bits / 8;
  s.compressed_bytes = archive_bytes;
  s.compression_ratio = static_cast<double>(s.original_bytes) / static_cast<double>(archive_bytes);
  s.bitrate = 8.0 * static_cast<double>(archive_bytes) / static_cast<double>(fd.n_points);
  return s;
}

struct SweepRow {
  ErrorBoundSpec spec;
  double eb = 0.0;  // resolved, data units
  double bitrate = 0.0;
  double cr = 0.0;
  double psnr = 0.0;
  double max_abs_error = 0.0;
  std::size_t n_outliers = 0;
  std::optional<std::string> error;  // set when this bound failed
};

/// Full compress -> archive -> decompress -> quality cycle per bound, in the
/// order given. A failing bound yields a row with `error` set.
template <std::floating_point T>
std::vector<SweepRow> rd_sweep(std::span<const T> data, const Dims& dims,
                               std::span<const ErrorBoundSpec> bounds, std::uint32_t cap = kDefaultCap,
                               unsigned threads = 1) {
  if (bounds.empty()) throw Error(Errc::invalid_argument, "sweep needs at least one error bound");
  std::vector<SweepRow> rows;
  for (const auto& spec : bounds) {
    SweepRow row;
    row.spec = spec;
    try {
      Compressed c = compress(data, dims, spec, CompressOptions{cap, 0, threads});
      std::vector<T> recon = decompress_as<T>(c.bytes, threads);
      QualityReport q = quality<T>(data, recon);
      SizeReport s = size_report(c.field, c.bytes.size(), sizeof(T) * 8);
      row.eb = c.eb;
      row.bitrate = s.bitrate;
      row.cr = s.compression_ratio;
      row.psnr = q.psnr;
      row.max_abs_error = q.max_abs_error;
      row.n_outliers = c.n_outliers;
    } catch (const Error& e) {
      row.eb = spec.magnitude;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Shortest round-trip representation; "inf" for infinities.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kSweepCsvHeader = "eb,bitrate,cr,psnr_db,max_abs_err,n_outliers";

/// Failed rows keep their eb column and carry "error" in every other column.
inline void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << format_number(r.eb);
    if (r.error) {
      os << ",error,error,error,error,error\n";
      continue;
    }
    os << ',' << format_number(r.bitrate) << ',' << format_number(r.cr) << ','
       << format_number(r.psnr) << ',' << format_number(r.max_abs_error) << ',' << r.n_outliers
       << '\n';
  }
}

}  // namespace sdqz
