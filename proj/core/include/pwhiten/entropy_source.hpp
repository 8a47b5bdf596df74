#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pwhiten {

enum class SourceKind { os, seed_file, counter };

const char* to_string(SourceKind kind) noexcept;
SourceKind source_kind_from_string(const std::string& name);

/// Byte-level randomness provider. Integers are derived from bytes by
/// `random_int`, so every source kind yields the same draw for the same bytes.
///
/// A handle is not thread-safe; give each worker its own.
class EntropySource {
 public:
  virtual ~EntropySource() = default;

  /// Fills `out` completely or throws (ErrorKind::exhausted / io).
  virtual void fill(std::span<std::uint8_t> out) = 0;
  virtual SourceKind kind() const noexcept = 0;
  /// Short provenance string, stored in pool files.
  virtual std::string describe() const = 0;

  /// Uniform integer in [lo, hi] by rejection sampling.
  ///
  /// The draw reads the smallest number of bytes w that can represent
  /// hi - lo, interprets them as a little-endian integer v, and accepts when
  /// v < floor(256^w / range) * range, returning lo + v % range. Rejected
  /// draws discard their bytes and read again; 1024 consecutive rejections
  /// raise ErrorKind::exhausted. A one-value range reads nothing.
  std::uint64_t random_int(std::uint64_t lo, std::uint64_t hi);

  /// Uniform index in [0, m - 1].
  std::uint64_t random_index(std::uint64_t m);
};

/// Kernel randomness (getrandom via libsodium).
class OsEntropy final : public EntropySource {
 public:
  OsEntropy();
  void fill(std::span<std::uint8_t> out) override;
  SourceKind kind() const noexcept override { return SourceKind::os; }
  std::string describe() const override { return "os"; }
};

/// Reads a raw byte file strictly sequentially; never rewinds.
class SeedFileEntropy final : public EntropySource {
 public:
  explicit SeedFileEntropy(const std::filesystem::path& path);
  void fill(std::span<std::uint8_t> out) override;
  SourceKind kind() const noexcept override { return SourceKind::seed_file; }
  std::string describe() const override;
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t offset_ = 0;
};

/// Deterministic keyed byte stream: the original (64-bit nonce, 64-bit block
/// counter) ChaCha20 keystream. The 32-byte key is the little-endian
/// encoding of `key` followed by 24 zero bytes; the nonce is the
/// little-endian encoding of `nonce`; output starts at block `counter`.
/// Distinct nonces give independent streams under one key.
class CounterEntropy final : public EntropySource {
 public:
  explicit CounterEntropy(std::uint64_t key, std::uint64_t nonce = 0,
                          std::uint64_t counter = 0);
  void fill(std::span<std::uint8_t> out) override;
  SourceKind kind() const noexcept override { return SourceKind::counter; }
  std::string describe() const override;

 private:
  void refill();

  std::uint64_t key_value_;
  std::uint64_t nonce_value_;
  std::uint64_t start_counter_;
  std::array<std::uint8_t, 32> key_{};
  std::array<std::uint8_t, 8> nonce_{};
  std::uint64_t next_block_;
  std::vector<std::uint8_t> buffer_;
  std::size_t pos_;
};

struct SourceOptions {
  SourceKind kind = SourceKind::os;
  std::filesystem::path seed_file;
  std::uint64_t key = 0;
  std::uint64_t nonce = 0;
  std::uint64_t counter = 0;
};

std::unique_ptr<EntropySource> make_source(const SourceOptions& options);

}  // namespace pwhiten
