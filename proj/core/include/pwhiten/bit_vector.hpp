#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pwhiten {

/// Packed bit string. Bit 0 is the most significant bit of byte 0, so the
/// string "0001" has only bit 3 set. Unused low bits of the last byte are
/// always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t bits) : bits_(bits), bytes_((bits + 7) / 8) {}

  /// Parses a string of '0'/'1' characters; anything else is a contract error.
  static BitVector from_string(std::string_view text);
  /// Takes the first `bits` bits of `bytes`.
  static BitVector from_bytes(std::span<const std::uint8_t> bytes,
                              std::size_t bits);

  std::size_t size() const noexcept { return bits_; }
  bool empty() const noexcept { return bits_ == 0; }

  bool get(std::size_t i) const noexcept {
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1U;
  }
  void set(std::size_t i, bool value) noexcept {
    const auto mask = static_cast<std::uint8_t>(0x80U >> (i & 7));
    if (value) {
      bytes_[i >> 3] |= mask;
    } else {
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }
  }

  std::size_t popcount() const noexcept;
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  std::string to_string() const;

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint8_t> bytes_;
};

}  // namespace pwhiten
