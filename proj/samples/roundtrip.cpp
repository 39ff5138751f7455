// Compresses a synthetic 3D field at a value-range-relative bound of 1e-4,
// decompresses it and prints size and quality figures.

#include <iostream>

#include "sdqz/sdqz.hpp"

int main() {
  const sdqz::Dims dims{64, 64, 64};
  auto field = sdqz::generate_field<float>(sdqz::Profile::smooth, dims, {.seed = 42});

  auto c = sdqz::compress<float>(field, dims, sdqz::ErrorBoundSpec::valrel(1e-4));
  auto recon = sdqz::decompress_as<float>(c.bytes);

  auto size = sdqz::size_report(c.field, c.bytes.size());
  auto q = sdqz::quality<float>(field, recon);
  std::cout << "eb=" << c.eb << " cr=" << size.compression_ratio << " bitrate=" << size.bitrate
            << " psnr_db=" << q.psnr << " max_abs_err=" << q.max_abs_error << '\n';
  return q.max_abs_error <= c.eb ? 0 : 1;
}
