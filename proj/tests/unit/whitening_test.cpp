#include "pwhiten/whitening.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <sstream>

#include "pwhiten/error.hpp"
#include "test_support.hpp"

namespace pwhiten {
namespace {

using testing::as_bytes;
using testing::as_string;
using testing::ScriptedSource;

MatrixPool make_pool(unsigned n, std::size_t m, std::uint64_t key,
                     ShuffleMode mode = ShuffleMode::naive) {
  CounterEntropy rng(key);
  return generate_pool(n, m, mode, rng, "test");
}

WhitenConfig config_for(const MatrixPool& pool, bool record = true,
                        unsigned workers = 1) {
  WhitenConfig cfg;
  cfg.n_qubits = pool.n_qubits();
  cfg.pool_count = pool.count();
  cfg.record_selections = record;
  cfg.workers = workers;
  return cfg;
}

struct Whitened {
  std::string bytes;
  SelectionTrace trace;
};

Whitened whiten(const std::vector<std::uint8_t>& input, const MatrixPool& pool,
                EntropySource& selector, unsigned workers = 1) {
  std::istringstream in(as_string(input));
  std::ostringstream out;
  auto trace = whiten_stream(in, pool, config_for(pool, true, workers), selector, out);
  return {out.str(), std::move(trace)};
}

std::string unwhiten(const std::string& input, const MatrixPool& pool,
                     const SelectionTrace& trace) {
  std::istringstream in(input);
  std::ostringstream out;
  unwhiten_stream(in, pool, trace, out);
  return out.str();
}

// Reference transform built only from BitVector and apply().
std::vector<std::uint8_t> reference_whiten(const std::vector<std::uint8_t>& input,
                                           const MatrixPool& pool,
                                           const SelectionTrace& trace) {
  const std::size_t n = pool.chunk_bits();
  const auto all = BitVector::from_bytes(input, input.size() * 8);
  BitVector out(all.size());
  const auto framing = frame(all.size(), n);
  for (std::uint64_t k = 0; k < framing.full_chunks; ++k) {
    BitVector chunk(n);
    for (std::size_t i = 0; i < n; ++i) chunk.set(i, all.get(k * n + i));
    const auto permuted = apply(pool[trace.indices[k]], chunk);
    for (std::size_t i = 0; i < n; ++i) out.set(k * n + i, permuted.get(i));
  }
  for (std::uint64_t i = framing.full_chunks * n; i < all.size(); ++i) {
    out.set(i, all.get(i));
  }
  return {out.bytes().begin(), out.bytes().end()};
}

TEST(Frame, Examples) {
  EXPECT_EQ(frame(8192ULL * 1000, 8192), (ChunkFraming{1000, 0}));
  EXPECT_EQ(frame(8192ULL * 1000 + 7, 8192), (ChunkFraming{1000, 7}));
  EXPECT_EQ(frame(0, 8192), (ChunkFraming{0, 0}));
  EXPECT_THROW(frame(10, 0), Error);
}

TEST(Whiten, WorkedExampleConcatenatesChunks) {
  // Two 4-bit chunks 0001 0001 through the example matrix -> 0010 0010.
  const MatrixPool pool(2, {IndexPermutation({0, 2, 3, 1})}, "example");
  CounterEntropy selector(1);
  const auto w = whiten({0x11}, pool, selector);
  EXPECT_EQ(as_bytes(w.bytes), (std::vector<std::uint8_t>{0x22}));
  EXPECT_EQ(w.trace.indices, (std::vector<std::uint32_t>{0, 0}));
}

TEST(Whiten, ChunkAlignedOutputHasInputLength) {
  const auto pool = make_pool(13, 4, 10);
  CounterEntropy selector(2);
  const auto input = testing::counter_bytes(1024 * 7, 3);
  const auto w = whiten(input, pool, selector);
  EXPECT_EQ(w.bytes.size(), input.size());
  EXPECT_EQ(w.trace.indices.size(), 7U);
  EXPECT_EQ(w.trace.chunk_bits, 8192U);
}

TEST(Whiten, IdentityPoolIsTransparent) {
  const MatrixPool pool(13, {IndexPermutation::identity(8192)}, "id");
  CounterEntropy selector(2);
  const auto input = testing::counter_bytes(100'003, 4);
  EXPECT_EQ(as_bytes(whiten(input, pool, selector).bytes), input);
}

TEST(Whiten, MatchesReferenceForEveryChunkSize) {
  for (unsigned n = 1; n <= 13; ++n) {
    const auto pool = make_pool(n, 5, 100 + n);
    CounterEntropy selector(200 + n);
    const auto input = testing::counter_bytes(3000 + 37 * n, 300 + n);
    const auto w = whiten(input, pool, selector);
    EXPECT_EQ(as_bytes(w.bytes), reference_whiten(input, pool, w.trace)) << n;
    EXPECT_EQ(w.trace.indices.size(), frame(input.size() * 8, pool.chunk_bits()).full_chunks);
  }
}

TEST(Whiten, TailPassesThroughUnchanged) {
  const auto pool = make_pool(13, 8, 7);
  CounterEntropy selector(8);
  const auto input = testing::counter_bytes(1024 * 3 + 100, 9);
  const auto out = as_bytes(whiten(input, pool, selector).bytes);
  ASSERT_EQ(out.size(), input.size());
  EXPECT_TRUE(std::equal(out.end() - 100, out.end(), input.end() - 100));
  EXPECT_NE(out, input);
}

TEST(Whiten, PreservesHammingWeightPerChunk) {
  const auto pool = make_pool(10, 16, 70);
  CounterEntropy selector(71);
  const auto input = testing::counter_bytes(128 * 50, 72);
  const auto out = as_bytes(whiten(input, pool, selector).bytes);
  for (std::size_t k = 0; k < 50; ++k) {
    int before = 0, after = 0;
    for (std::size_t b = 0; b < 128; ++b) {
      before += std::popcount(input[k * 128 + b]);
      after += std::popcount(out[k * 128 + b]);
    }
    ASSERT_EQ(before, after);
  }
}

TEST(Whiten, ByteHistogramNotPreservedAtSixteenBits) {
  // One 16-bit chunk 0xFF00 under the swap-halves-interleaving permutation.
  std::vector<std::uint32_t> map(16);
  for (std::uint32_t i = 0; i < 16; ++i) map[i] = (i % 2 == 0) ? i / 2 : 8 + i / 2;
  const MatrixPool pool(4, {IndexPermutation(map)}, "witness");
  CounterEntropy selector(0);
  const auto out = as_bytes(whiten({0xFF, 0x00}, pool, selector).bytes);
  EXPECT_EQ(out, (std::vector<std::uint8_t>{0xAA, 0xAA}));
}

TEST(Whiten, DeterministicAcrossRunsAndWorkerCounts) {
  const auto pool = make_pool(13, 32, 5);
  const auto input = testing::counter_bytes(3 * (1 << 20) + 12345, 6);
  CounterEntropy s1(77), s2(77), s3(77);
  const auto a = whiten(input, pool, s1, 1);
  const auto b = whiten(input, pool, s2, 1);
  const auto c = whiten(input, pool, s3, 4);
  EXPECT_EQ(a.bytes, b.bytes);
  EXPECT_EQ(a.bytes, c.bytes);
  EXPECT_EQ(a.trace, c.trace);
}

TEST(Whiten, SelectionsFollowSelectorDraws) {
  const auto pool = make_pool(3, 7, 1);
  CounterEntropy selector(31), replay(31);
  const auto w = whiten(testing::counter_bytes(500, 2), pool, selector);
  for (auto idx : w.trace.indices) ASSERT_EQ(idx, replay.random_index(7));
}

TEST(Whiten, TraceOffByDefault) {
  const auto pool = make_pool(3, 2, 1);
  CounterEntropy selector(3);
  std::istringstream in(std::string(64, 'x'));
  std::ostringstream out;
  const auto trace = whiten_stream(in, pool, config_for(pool, false), selector, out);
  EXPECT_TRUE(trace.indices.empty());
  EXPECT_EQ(out.str().size(), 64U);
}

TEST(Whiten, RejectsPoolConfigMismatch) {
  const auto pool = make_pool(3, 2, 1);
  auto cfg = config_for(pool);
  cfg.n_qubits = 13;
  CounterEntropy selector(3);
  std::istringstream in("abc");
  std::ostringstream out;
  EXPECT_THROW(whiten_stream(in, pool, cfg, selector, out), Error);
  cfg = config_for(pool);
  cfg.pool_count = 32;
  EXPECT_THROW(whiten_stream(in, pool, cfg, selector, out), Error);
}

TEST(Whiten, SelectorExhaustionPropagates) {
  const auto pool = make_pool(3, 4, 1);
  ScriptedSource selector({0, 1, 2});
  std::istringstream in(std::string(10, 'x'));
  std::ostringstream out;
  try {
    whiten_stream(in, pool, config_for(pool), selector, out);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::exhausted);
  }
}

TEST(Unwhiten, RoundTripRandomLengths) {
  CounterEntropy lengths(12);
  for (int trial = 0; trial < 40; ++trial) {
    const unsigned n = static_cast<unsigned>(lengths.random_int(1, 13));
    const auto pool = make_pool(n, 1 + lengths.random_int(0, 40), 500 + trial);
    const auto input =
        testing::counter_bytes(lengths.random_int(0, 200'000), 600 + trial);
    CounterEntropy selector(700 + trial);
    const auto w = whiten(input, pool, selector);
    ASSERT_EQ(w.bytes.size(), input.size());
    ASSERT_EQ(as_bytes(unwhiten(w.bytes, pool, w.trace)), input);
  }
}

TEST(Unwhiten, EmptyInputEmptyTrace) {
  const auto pool = make_pool(13, 32, 1);
  SelectionTrace trace{8192, {}};
  EXPECT_EQ(unwhiten("", pool, trace), "");
}

TEST(Unwhiten, BadTraceIndexWritesNothing) {
  const auto pool = make_pool(3, 4, 1);
  SelectionTrace trace{8, {0, 1, 4}};
  std::istringstream in("abc");
  std::ostringstream out;
  try {
    unwhiten_stream(in, pool, trace, out);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
  }
  EXPECT_TRUE(out.str().empty());
}

TEST(Unwhiten, TraceLengthMismatchDetectedUpFront) {
  const auto pool = make_pool(3, 4, 1);
  std::ostringstream out;
  std::istringstream short_trace_in("abcd");
  EXPECT_THROW(unwhiten_stream(short_trace_in, pool, SelectionTrace{8, {0, 1}}, out),
               Error);
  std::istringstream long_trace_in("a");
  EXPECT_THROW(unwhiten_stream(long_trace_in, pool, SelectionTrace{8, {0, 1}}, out),
               Error);
  EXPECT_TRUE(out.str().empty());
  std::istringstream wrong_size("ab");
  EXPECT_THROW(unwhiten_stream(wrong_size, pool, SelectionTrace{16, {0}}, out), Error);
}

TEST(PermuteBlock, ValidatesShapes) {
  const auto p = IndexPermutation::identity(16);
  std::vector<const IndexPermutation*> sel{&p};
  std::vector<std::uint8_t> in(2, 0xAB), out(2, 0);
  permute_block(in, out, sel);
  EXPECT_EQ(out, in);
  std::vector<std::uint8_t> wrong(3);
  EXPECT_THROW(permute_block(wrong, wrong, sel), Error);
}

TEST(TraceFile, RoundTripAndCorruption) {
  SelectionTrace trace{8192, {}};
  CounterEntropy rng(4);
  for (int i = 0; i < 100'000; ++i) {
    trace.indices.push_back(static_cast<std::uint32_t>(rng.random_index(32)));
  }
  std::stringstream buf;
  trace_save(trace, buf);
  const auto bytes = buf.str();
  EXPECT_EQ(bytes.size(), 4 + 2 + 4 + 8 + 4 * trace.indices.size() + 4);
  EXPECT_EQ(bytes.substr(0, 4), "PWTR");
  {
    std::istringstream in(bytes);
    EXPECT_EQ(trace_load(in), trace);
  }
  for (const std::size_t pos : {std::size_t{0}, std::size_t{4}, std::size_t{20},
                                bytes.size() - 1}) {
    auto corrupt = bytes;
    corrupt[pos] = static_cast<char>(corrupt[pos] ^ 0x10);
    std::istringstream in(corrupt);
    EXPECT_THROW(trace_load(in), Error) << pos;
  }
  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(trace_load(truncated), Error);
}

TEST(TraceFile, EmptyTraceLayout) {
  std::stringstream buf;
  trace_save(SelectionTrace{4, {}}, buf);
  const auto b = as_bytes(buf.str());
  ASSERT_EQ(b.size(), 22U);
  EXPECT_EQ(std::vector<std::uint8_t>(b.begin() + 4, b.begin() + 18),
            (std::vector<std::uint8_t>{1, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
}

}  // namespace
}  // namespace pwhiten
