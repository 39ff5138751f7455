#pragma once

// Deterministic synthetic fields for testing and demos. Random numbers come
// from std::mt19937_64, whose output sequence is fixed by the standard; the
// uniform and normal transforms are done here because the standard library
// distributions are implementation-defined.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sdqz/core.hpp"
#include "sdqz/error.hpp"

namespace sdqz {

enum class Profile { smooth, ramp, sparse_near_zero, constant, gaussian_noise };

inline constexpr std::array<std::string_view, 5> kProfileNames{
    "smooth", "ramp", "sparse-near-zero", "constant", "gaussian-noise"};

inline std::string profile_list() {
  std::string s;
  for (auto n : kProfileNames) s += (s.empty() ? "" : ", ") + std::string(n);
  return s;
}

inline Profile parse_profile(std::string_view name) {
  for (std::size_t i = 0; i < kProfileNames.size(); ++i)
    if (kProfileNames[i] == name) return static_cast<Profile>(i);
  throw Error(Errc::invalid_argument,
              "unknown profile '" + std::string(name) + "'; available profiles: " + profile_list());
}

inline std::string_view profile_name(Profile p) { return kProfileNames[static_cast<std::size_t>(p)]; }

class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  // Box-Muller; uses both outputs of each pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct SynthOptions {
  std::uint64_t seed = 1;
  double value = 0.0;  // constant profile only
  double sparse_fraction = 0.9;  // share of exact zeros in sparse-near-zero
  double sparse_scale = 2.05e-3;  // peak magnitude of the nonzero tail
};

namespace detail {

// Sum of random plane waves over normalised coordinates, roughly in [-1, 1].
inline std::vector<double> plane_waves(const Dims& dims, SynthRng& rng) {
  constexpr int kWaves = 6;
  auto shape = to_shape3(dims);
  std::array<std::array<double, 3>, kWaves> freq{};
  std::array<double, kWaves> amp{}, phase{};
  for (int k = 0; k < kWaves; ++k) {
    for (int a = 0; a < 3; ++a) freq[k][a] = shape[a] > 1 ? rng.integer(1, 4) : 0;
    amp[k] = rng.uniform(0.5, 1.0) / kWaves;
    phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  std::vector<double> out(shape[0] * shape[1] * shape[2]);
  std::size_t i = 0;
  for (std::size_t z = 0; z < shape[0]; ++z)
    for (std::size_t y = 0; y < shape[1]; ++y)
      for (std::size_t x = 0; x < shape[2]; ++x, ++i) {
        std::array<double, 3> u{double(z) / shape[0], double(y) / shape[1], double(x) / shape[2]};
        double v = 0;
        for (int k = 0; k < kWaves; ++k)
          v += amp[k] * std::sin(2.0 * std::numbers::pi * (freq[k][0] * u[0] + freq[k][1] * u[1] + freq[k][2] * u[2]) + phase[k]);
        out[i] = v;
      }
  return out;
}

}  // namespace detail

/// Generates a row-major field. `sparse-near-zero` sets a `sparse_fraction`
/// share of points to exactly 0 (the minimum), mimicking cloud/snow mixing
/// ratio fields; the rest is a smooth positive tail.
template <std::floating_point T>
std::vector<T> generate_field(Profile profile, const Dims& dims, const SynthOptions& opt = {}) {
  std::size_t n = checked_volume(dims);
  SynthRng rng(opt.seed);
  std::vector<double> v;
  switch (profile) {
    case Profile::smooth:
      v = detail::plane_waves(dims, rng);
      break;
    case Profile::ramp: {
      auto shape = to_shape3(dims);
      std::array<double, 3> slope{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
      double offset = rng.uniform(-10.0, 10.0);
      v.resize(n);
      std::size_t i = 0;
      for (std::size_t z = 0; z < shape[0]; ++z)
        for (std::size_t y = 0; y < shape[1]; ++y)
          for (std::size_t x = 0; x < shape[2]; ++x) v[i++] = offset + slope[0] * z + slope[1] * y + slope[2] * x;
      break;
    }
    case Profile::sparse_near_zero: {
      v = detail::plane_waves(dims, rng);
      std::vector<double> sorted = v;
      auto k = static_cast<std::size_t>(std::ceil(opt.sparse_fraction * static_cast<double>(n)));
      k = std::min(k, n - 1);
      std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
      double threshold = sorted[k];
      double peak = *std::max_element(v.begin(), v.end()) - threshold;
      double scale = peak > 0 ? opt.sparse_scale / peak : 0.0;
      for (auto& x : v) x = x > threshold ? (x - threshold) * scale : 0.0;
      break;
    }
    case Profile::constant:
      v.assign(n, opt.value);
      break;
    case Profile::gaussian_noise:
      v.resize(n);
      for (auto& x : v) x = rng.normal();
      break;
  }
  return std::vector<T>(v.begin(), v.end());
}

}  // namespace sdqz
