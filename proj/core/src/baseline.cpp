#include "pwhiten/baseline.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "pwhiten/error.hpp"

namespace pwhiten {

namespace {

constexpr std::size_t kBufferBytes = 1U << 16;

std::size_t read_into(std::istream& in, std::vector<std::uint8_t>& buf) {
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (in.bad()) throw Error(ErrorKind::io, "read failed");
  return static_cast<std::size_t>(in.gcount());
}

void write_out(std::ostream& out, std::span<const std::uint8_t> bytes) {
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write failed");
}

}  // namespace

std::uint64_t xor_combine(std::istream& a, std::istream& b, std::ostream& out) {
  std::vector<std::uint8_t> buf_a(kBufferBytes);
  std::vector<std::uint8_t> buf_b(kBufferBytes);
  std::uint64_t written = 0;
  for (;;) {
    const auto got_a = read_into(a, buf_a);
    const auto got_b = read_into(b, buf_b);
    if (written == 0 && (got_a == 0 || got_b == 0)) {
      throw Error(ErrorKind::precondition, "xor: both inputs must be non-empty");
    }
    const auto n = std::min(got_a, got_b);
    for (std::size_t i = 0; i < n; ++i) buf_a[i] ^= buf_b[i];
    write_out(out, std::span(buf_a).first(n));
    written += n;
    if (n < kBufferBytes) break;
  }
  out.flush();
  return written;
}

void VonNeumannExtractor::emit(bool bit, std::vector<std::uint8_t>& out) {
  acc_ = static_cast<std::uint8_t>(acc_ << 1 | (bit ? 1U : 0U));
  ++output_bits_;
  if (++acc_bits_ == 8) {
    out.push_back(acc_);
    acc_ = 0;
    acc_bits_ = 0;
  }
}

void VonNeumannExtractor::feed(std::span<const std::uint8_t> bytes,
                               std::vector<std::uint8_t>& out) {
  for (const auto byte : bytes) {
    for (int shift = 7; shift >= 0; --shift) {
      const bool bit = (byte >> shift) & 1U;
      if (!pending_) {
        pending_ = bit;
        continue;
      }
      const bool first = *pending_;
      pending_.reset();
      if (first != bit) emit(first, out);  // 01 -> 0, 10 -> 1
    }
  }
}

void VonNeumannExtractor::finish(std::vector<std::uint8_t>& out) {
  pending_.reset();
  if (acc_bits_ != 0) {
    out.push_back(static_cast<std::uint8_t>(acc_ << (8 - acc_bits_)));
    acc_ = 0;
    acc_bits_ = 0;
  }
}

std::uint64_t von_neumann(std::istream& input, std::ostream& out) {
  VonNeumannExtractor vn;
  std::vector<std::uint8_t> buf(kBufferBytes);
  std::vector<std::uint8_t> produced;
  for (;;) {
    const auto got = read_into(input, buf);
    if (got == 0) break;
    produced.clear();
    vn.feed(std::span(buf).first(got), produced);
    write_out(out, produced);
  }
  produced.clear();
  vn.finish(produced);
  write_out(out, produced);
  out.flush();
  return vn.output_bits();
}

}  // namespace pwhiten
