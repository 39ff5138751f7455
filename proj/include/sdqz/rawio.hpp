#pragma once

// Raw little-endian binary arrays, the usual interchange format for
// scientific benchmark fields.

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "sdqz/error.hpp"

namespace sdqz {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::io, "error reading '" + path.string() + "'");
  return bytes;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(Errc::io, "error writing '" + path.string() + "'");
}

template <std::floating_point T>
std::vector<T> decode_raw(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % sizeof(T) != 0)
    throw Error(Errc::length_mismatch, "raw input size " + std::to_string(bytes.size()) +
                                           " is not a multiple of " + std::to_string(sizeof(T)) +
                                           " bytes");
  std::vector<T> out(bytes.size() / sizeof(T));
  std::memcpy(out.data(), bytes.data(), bytes.size());
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = reinterpret_cast<std::uint8_t*>(out.data());
    for (std::size_t i = 0; i < out.size(); ++i) std::reverse(p + i * sizeof(T), p + (i + 1) * sizeof(T));
  }
  return out;
}

template <std::floating_point T>
std::vector<std::uint8_t> encode_raw(std::span<const T> values) {
  std::vector<std::uint8_t> out(values.size_bytes());
  std::memcpy(out.data(), values.data(), out.size());
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < values.size(); ++i)
      std::reverse(out.begin() + i * sizeof(T), out.begin() + (i + 1) * sizeof(T));
  }
  return out;
}

template <std::floating_point T>
std::vector<T> read_raw(const std::filesystem::path& path) {
  return decode_raw<T>(read_file(path));
}

template <std::floating_point T>
void write_raw(const std::filesystem::path& path, std::span<const T> values) {
  write_file(path, encode_raw(values));
}

}  // namespace sdqz
