#include "pwhiten/bit_vector.hpp"

#include <algorithm>
#include <bit>

#include "pwhiten/error.hpp"

namespace pwhiten {

BitVector BitVector::from_string(std::string_view text) {
  BitVector v(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw Error(ErrorKind::contract, "bit string may only contain 0 and 1");
    }
    v.set(i, text[i] == '1');
  }
  return v;
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes,
                                std::size_t bits) {
  if (bits > bytes.size() * 8) {
    throw Error(ErrorKind::contract, "not enough bytes for requested bit count");
  }
  BitVector v(bits);
  std::copy_n(bytes.begin(), v.bytes_.size(), v.bytes_.begin());
  if (const auto spare = bits & 7; spare != 0) {
    v.bytes_.back() &= static_cast<std::uint8_t>(0xFF00U >> spare);
  }
  return v;
}

std::size_t BitVector::popcount() const noexcept {
  std::size_t total = 0;
  for (const auto b : bytes_) total += static_cast<std::size_t>(std::popcount(b));
  return total;
}

std::string BitVector::to_string() const {
  std::string s(bits_, '0');
  for (std::size_t i = 0; i < bits_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

}  // namespace pwhiten
