#include "pwhiten/entropy_source.hpp"

#include <algorithm>
#include <bit>

#include <sodium.h>

#include "pwhiten/error.hpp"

namespace pwhiten {

namespace {

void ensure_sodium() {
  if (sodium_init() < 0) {
    throw Error(ErrorKind::io, "libsodium initialization failed");
  }
}

constexpr std::size_t kCounterBufferBytes = 4096;  // 64 ChaCha20 blocks
constexpr unsigned kMaxRejections = 1024;

}  // namespace

const char* to_string(SourceKind kind) noexcept {
  switch (kind) {
    case SourceKind::os: return "os";
    case SourceKind::seed_file: return "seed-file";
    case SourceKind::counter: return "counter";
  }
  return "unknown";
}

SourceKind source_kind_from_string(const std::string& name) {
  if (name == "os") return SourceKind::os;
  if (name == "seed-file") return SourceKind::seed_file;
  if (name == "counter") return SourceKind::counter;
  throw Error(ErrorKind::usage, "unknown entropy source '" + name +
                                    "' (expected os, seed-file or counter)");
}

std::uint64_t EntropySource::random_int(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw Error(ErrorKind::contract, "random_int: lo > hi");
  const std::uint64_t span = hi - lo;
  if (span == 0) return lo;

  using u128 = unsigned __int128;
  const int width = (std::bit_width(span) + 7) / 8;
  const u128 range = static_cast<u128>(span) + 1;
  const u128 space = u128{1} << (8 * width);
  const u128 limit = space / range * range;

  std::uint8_t buf[8];
  for (unsigned attempt = 0; attempt < kMaxRejections; ++attempt) {
    fill(std::span<std::uint8_t>(buf, static_cast<std::size_t>(width)));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
    if (v < limit) return lo + static_cast<std::uint64_t>(v % range);
  }
  // Each draw is rejected with probability < 1/2 for a uniform source.
  throw Error(ErrorKind::exhausted,
              describe() + " rejected " + std::to_string(kMaxRejections) +
                  " consecutive draws; source is not producing usable bytes");
}

std::uint64_t EntropySource::random_index(std::uint64_t m) {
  if (m == 0) throw Error(ErrorKind::contract, "random_index: m must be >= 1");
  return random_int(1, m) - 1;
}

OsEntropy::OsEntropy() { ensure_sodium(); }

void OsEntropy::fill(std::span<std::uint8_t> out) {
  randombytes_buf(out.data(), out.size());
}

SeedFileEntropy::SeedFileEntropy(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) {
    throw Error(ErrorKind::io, "cannot open seed file " + path.string());
  }
}

void SeedFileEntropy::fill(std::span<std::uint8_t> out) {
  in_.read(reinterpret_cast<char*>(out.data()),
           static_cast<std::streamsize>(out.size()));
  const auto got = static_cast<std::size_t>(in_.gcount());
  offset_ += got;
  if (got != out.size()) {
    throw Error(ErrorKind::exhausted,
                "seed file " + path_.string() + " exhausted after " +
                    std::to_string(offset_) + " bytes");
  }
}

std::string SeedFileEntropy::describe() const {
  return "seed-file:" + path_.filename().string();
}

CounterEntropy::CounterEntropy(std::uint64_t key, std::uint64_t nonce,
                               std::uint64_t counter)
    : key_value_(key),
      nonce_value_(nonce),
      start_counter_(counter),
      next_block_(counter),
      buffer_(kCounterBufferBytes),
      pos_(kCounterBufferBytes) {
  ensure_sodium();
  for (std::size_t i = 0; i < 8; ++i) {
    key_[i] = static_cast<std::uint8_t>(key >> (8 * i));
    nonce_[i] = static_cast<std::uint8_t>(nonce >> (8 * i));
  }
}

void CounterEntropy::refill() {
  std::fill(buffer_.begin(), buffer_.end(), std::uint8_t{0});
  crypto_stream_chacha20_xor_ic(buffer_.data(), buffer_.data(), buffer_.size(),
                                nonce_.data(), next_block_, key_.data());
  next_block_ += buffer_.size() / 64;
  pos_ = 0;
}

void CounterEntropy::fill(std::span<std::uint8_t> out) {
  while (!out.empty()) {
    if (pos_ == buffer_.size()) refill();
    const auto n = std::min(out.size(), buffer_.size() - pos_);
    std::copy_n(buffer_.begin() + static_cast<std::ptrdiff_t>(pos_), n,
                out.begin());
    pos_ += n;
    out = out.subspan(n);
  }
}

std::string CounterEntropy::describe() const {
  return "counter:chacha20:key=" + std::to_string(key_value_) +
         ":nonce=" + std::to_string(nonce_value_) +
         ":counter=" + std::to_string(start_counter_);
}

std::unique_ptr<EntropySource> make_source(const SourceOptions& options) {
  switch (options.kind) {
    case SourceKind::os:
      return std::make_unique<OsEntropy>();
    case SourceKind::seed_file:
      if (options.seed_file.empty()) {
        throw Error(ErrorKind::usage, "seed-file source needs a seed file path");
      }
      return std::make_unique<SeedFileEntropy>(options.seed_file);
    case SourceKind::counter:
      return std::make_unique<CounterEntropy>(options.key, options.nonce,
                                              options.counter);
  }
  throw Error(ErrorKind::usage, "unknown entropy source");
}

}  // namespace pwhiten
