#pragma once

// MSB-first bit writer/reader over a caller-owned byte range. The first bit
// written lands in bit 7 of byte 0.

#include <cstddef>
#include <cstdint>
#include <span>

namespace sdqz {

class BitWriter {
 public:
  // `out` must be zero-initialised; bits are OR-ed in.
  explicit BitWriter(std::span<std::uint8_t> out) : out_(out) {}

  // Writes the low `nbits` bits of `value`, most significant first. nbits <= 64.
  void write(std::uint64_t value, unsigned nbits) {
    while (nbits > 0) {
      unsigned room = 8 - static_cast<unsigned>(pos_ & 7);
      unsigned take = nbits < room ? nbits : room;
      std::uint64_t chunk = (value >> (nbits - take)) & ((std::uint64_t{1} << take) - 1);
      out_[pos_ >> 3] |= static_cast<std::uint8_t>(chunk << (room - take));
      pos_ += take;
      nbits -= take;
    }
  }

  std::size_t bits_written() const { return pos_; }

 private:
  std::span<std::uint8_t> out_;
  std::size_t pos_ = 0;
};

class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> in, std::size_t nbits) : in_(in), limit_(nbits) {}

  bool exhausted() const { return pos_ >= limit_; }
  std::size_t bits_read() const { return pos_; }
  std::size_t bits_left() const { return limit_ - pos_; }

  // Caller checks exhausted() first.
  unsigned read_bit() {
    unsigned b = (in_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
    ++pos_;
    return b;
  }

  std::uint64_t read(unsigned nbits) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < nbits; ++i) v = (v << 1) | read_bit();
    return v;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

}  // namespace sdqz
