#pragma once

// Little-endian field helpers shared by the pool and trace file formats.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>

#include <zlib.h>

#include "pwhiten/error.hpp"

namespace pwhiten::detail {

inline std::uint32_t crc32_of(std::span<const std::uint8_t> bytes,
                              std::uint32_t crc = 0) {
  // zlib takes uInt lengths; feed in bounded slices.
  uLong value = crc;
  while (!bytes.empty()) {
    const auto n = std::min<std::size_t>(bytes.size(), 1U << 30);
    value = ::crc32(value, bytes.data(), static_cast<uInt>(n));
    bytes = bytes.subspan(n);
  }
  return static_cast<std::uint32_t>(value);
}

/// Writes little-endian integers and keeps a running CRC-32 of everything
/// written.
class LeWriter {
 public:
  explicit LeWriter(std::ostream& out) : out_(out) {}

  void bytes(std::span<const std::uint8_t> data) {
    out_.write(reinterpret_cast<const char*>(data.data()),
               static_cast<std::streamsize>(data.size()));
    if (!out_) throw Error(ErrorKind::io, "write failed");
    crc_ = crc32_of(data, crc_);
  }
  template <typename T>
  void uint(T value) {
    std::uint8_t buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf[i] = static_cast<std::uint8_t>(value >> (8 * i));
    }
    bytes(buf);
  }
  std::uint32_t crc() const noexcept { return crc_; }

 private:
  std::ostream& out_;
  std::uint32_t crc_ = 0;
};

/// Reads little-endian integers; short reads raise ErrorKind::format
/// ("truncated").
class LeReader {
 public:
  LeReader(std::istream& in, const char* what) : in_(in), what_(what) {}

  void bytes(std::span<std::uint8_t> data) {
    in_.read(reinterpret_cast<char*>(data.data()),
             static_cast<std::streamsize>(data.size()));
    if (static_cast<std::size_t>(in_.gcount()) != data.size()) {
      throw Error(ErrorKind::format, std::string(what_) + ": truncated file");
    }
    crc_ = crc32_of(data, crc_);
  }
  template <typename T>
  T uint() {
    std::uint8_t buf[sizeof(T)];
    bytes(buf);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<T>(buf[i]) << (8 * i));
    }
    return value;
  }
  std::uint32_t crc() const noexcept { return crc_; }
  void reset_crc() noexcept { crc_ = 0; }

 private:
  std::istream& in_;
  const char* what_;
  std::uint32_t crc_ = 0;
};

}  // namespace pwhiten::detail
