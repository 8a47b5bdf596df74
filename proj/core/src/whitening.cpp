#include "pwhiten/whitening.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

#include "binary_io.hpp"
#include "pwhiten/error.hpp"

namespace pwhiten {

namespace {

constexpr std::uint8_t kTraceMagic[4] = {'P', 'W', 'T', 'R'};
constexpr std::size_t kBatchBytes = std::size_t{1} << 20;

// kSpread[v] holds the 8 bits of v, MSB first, one per byte in memory order.
const std::array<std::uint64_t, 256>& spread_table() {
  static const auto table = [] {
    std::array<std::uint64_t, 256> t{};
    for (unsigned v = 0; v < 256; ++v) {
      std::uint8_t bits[8];
      for (unsigned k = 0; k < 8; ++k) bits[k] = (v >> (7 - k)) & 1U;
      std::memcpy(&t[v], bits, 8);
    }
    return t;
  }();
  return table;
}

// Inverse of the spread: eight 0/1 bytes in memory order -> one MSB-first
// byte. The multiplier moves byte k's low bit to bit 63 - k with no carries.
inline std::uint8_t gather_byte(const std::uint8_t* bits) {
  std::uint64_t x;
  std::memcpy(&x, bits, 8);
  if constexpr (std::endian::native == std::endian::little) {
    return static_cast<std::uint8_t>((x * 0x8040201008040201ULL) >> 56);
  } else {
    std::uint8_t v = 0;
    for (unsigned k = 0; k < 8; ++k) v = static_cast<std::uint8_t>(v << 1 | bits[k]);
    return v;
  }
}

struct Geometry {
  std::size_t chunk_bits;
  std::size_t unit_bytes;       // smallest whole-byte run holding whole chunks
  std::size_t chunks_per_unit;
};

Geometry geometry_for(std::size_t chunk_bits) {
  const std::size_t unit_bits = std::max<std::size_t>(chunk_bits, 8);
  return {chunk_bits, unit_bits / 8, unit_bits / chunk_bits};
}

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

void permute_units(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                   std::span<const IndexPermutation* const> selections,
                   const Geometry& g) {
  const auto& spread = spread_table();
  const std::size_t unit_bits = g.unit_bytes * 8;
  thread_local std::vector<std::uint8_t> src;
  thread_local std::vector<std::uint8_t> dst;
  src.resize(unit_bits);
  dst.resize(unit_bits);

  const std::size_t units = in.size() / g.unit_bytes;
  for (std::size_t u = 0; u < units; ++u) {
    const auto* ip = in.data() + u * g.unit_bytes;
    for (std::size_t b = 0; b < g.unit_bytes; ++b) {
      std::memcpy(src.data() + 8 * b, &spread[ip[b]], 8);
    }
    for (std::size_t c = 0; c < g.chunks_per_unit; ++c) {
      const auto map = selections[u * g.chunks_per_unit + c]->map();
      const std::uint8_t* s = src.data() + c * g.chunk_bits;
      std::uint8_t* d = dst.data() + c * g.chunk_bits;
      for (std::size_t i = 0; i < g.chunk_bits; ++i) d[i] = s[map[i]];
    }
    auto* op = out.data() + u * g.unit_bytes;
    for (std::size_t b = 0; b < g.unit_bytes; ++b) {
      op[b] = gather_byte(dst.data() + 8 * b);
    }
  }
}

void permute_parallel(std::span<const std::uint8_t> in,
                      std::span<std::uint8_t> out,
                      std::span<const IndexPermutation* const> selections,
                      const Geometry& g, unsigned workers) {
  const std::size_t units = in.size() / g.unit_bytes;
  const std::size_t used = std::min<std::size_t>(workers, units);
  if (used <= 1) {
    permute_units(in, out, selections, g);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(used);
  const std::size_t per = (units + used - 1) / used;
  for (std::size_t w = 0; w < used; ++w) {
    const std::size_t first = w * per;
    const std::size_t last = std::min(units, first + per);
    if (first >= last) break;
    pool.emplace_back([=, &g] {
      permute_units(in.subspan(first * g.unit_bytes, (last - first) * g.unit_bytes),
                    out.subspan(first * g.unit_bytes, (last - first) * g.unit_bytes),
                    selections.subspan(first * g.chunks_per_unit,
                                       (last - first) * g.chunks_per_unit),
                    g);
    });
  }
}

std::size_t read_some(std::istream& in, std::span<std::uint8_t> buf) {
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (in.bad()) throw Error(ErrorKind::io, "read failed");
  return static_cast<std::size_t>(in.gcount());
}

void write_all(std::ostream& out, std::span<const std::uint8_t> buf) {
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorKind::io, "write failed");
}

// Runs the batch loop shared by both directions. `choose(k)` returns the
// permutation for chunk ordinal k.
template <typename Choose>
void transform_stream(std::istream& input, std::ostream& output,
                      const Geometry& g, unsigned workers, Choose&& choose) {
  const std::size_t batch_units =
      std::max<std::size_t>(1, kBatchBytes / g.unit_bytes);
  std::vector<std::uint8_t> in(batch_units * g.unit_bytes);
  std::vector<std::uint8_t> out(in.size());
  std::vector<const IndexPermutation*> selections(batch_units *
                                                  g.chunks_per_unit);
  std::uint64_t ordinal = 0;
  for (;;) {
    const std::size_t got = read_some(input, in);
    if (got == 0) break;
    const std::size_t units = got / g.unit_bytes;
    const std::size_t aligned = units * g.unit_bytes;
    const std::size_t chunks = units * g.chunks_per_unit;
    // Selections are fixed in chunk order before any parallel work starts.
    for (std::size_t c = 0; c < chunks; ++c) selections[c] = &choose(ordinal++);
    permute_parallel(std::span(in).first(aligned), std::span(out).first(aligned),
                     std::span(selections).first(chunks), g, workers);
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(aligned),
              in.begin() + static_cast<std::ptrdiff_t>(got),
              out.begin() + static_cast<std::ptrdiff_t>(aligned));
    write_all(output, std::span(out).first(got));
    if (got < in.size()) break;
  }
  output.flush();
  if (!output) throw Error(ErrorKind::io, "write failed");
}

}  // namespace

ChunkFraming frame(std::uint64_t input_bits, std::uint64_t chunk_bits) {
  if (chunk_bits == 0) throw Error(ErrorKind::contract, "chunk size must be >= 1");
  return {input_bits / chunk_bits, input_bits % chunk_bits};
}

void permute_block(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                   std::span<const IndexPermutation* const> selections) {
  if (selections.empty()) {
    if (!in.empty()) throw Error(ErrorKind::contract, "permute_block: no selections");
    return;
  }
  const auto g = geometry_for(selections.front()->size());
  if (in.size() != out.size() ||
      in.size() * 8 != selections.size() * g.chunk_bits ||
      in.size() % g.unit_bytes != 0) {
    throw Error(ErrorKind::contract, "permute_block: size mismatch");
  }
  for (const auto* p : selections) {
    if (p->size() != g.chunk_bits) {
      throw Error(ErrorKind::contract, "permute_block: mixed permutation sizes");
    }
  }
  permute_units(in, out, selections, g);
}

SelectionTrace whiten_stream(std::istream& input, const MatrixPool& pool,
                             const WhitenConfig& cfg, EntropySource& selector,
                             std::ostream& output) {
  if (pool.n_qubits() != cfg.n_qubits || pool.count() != cfg.pool_count) {
    throw Error(ErrorKind::usage,
                "pool (n_qubits=" + std::to_string(pool.n_qubits()) +
                    ", count=" + std::to_string(pool.count()) +
                    ") does not match configuration (n_qubits=" +
                    std::to_string(cfg.n_qubits) +
                    ", count=" + std::to_string(cfg.pool_count) + ")");
  }
  const auto g = geometry_for(pool.chunk_bits());
  SelectionTrace trace;
  trace.chunk_bits = static_cast<std::uint32_t>(pool.chunk_bits());
  transform_stream(input, output, g, resolve_workers(cfg.workers),
                   [&](std::uint64_t) -> const IndexPermutation& {
                     const auto index = selector.random_index(pool.count());
                     if (cfg.record_selections) {
                       trace.indices.push_back(static_cast<std::uint32_t>(index));
                     }
                     return pool[index];
                   });
  return trace;
}

void unwhiten_stream(std::istream& input, const MatrixPool& pool,
                     const SelectionTrace& trace, std::ostream& output,
                     unsigned workers) {
  if (trace.chunk_bits != pool.chunk_bits()) {
    throw Error(ErrorKind::format, "trace chunk size " +
                                       std::to_string(trace.chunk_bits) +
                                       " does not match pool chunk size " +
                                       std::to_string(pool.chunk_bits()));
  }
  for (std::size_t k = 0; k < trace.indices.size(); ++k) {
    if (trace.indices[k] >= pool.count()) {
      throw Error(ErrorKind::format,
                  "trace entry " + std::to_string(k) + " selects pool index " +
                      std::to_string(trace.indices[k]) + " but the pool has " +
                      std::to_string(pool.count()) + " permutations");
    }
  }
  if (const auto start = input.tellg(); start != std::streampos(-1)) {
    input.seekg(0, std::ios::end);
    const auto end = input.tellg();
    input.seekg(start);
    if (end != std::streampos(-1) && input) {
      const auto bits = static_cast<std::uint64_t>(end - start) * 8;
      const auto chunks = frame(bits, pool.chunk_bits()).full_chunks;
      if (chunks != trace.indices.size()) {
        throw Error(ErrorKind::format,
                    "trace has " + std::to_string(trace.indices.size()) +
                        " entries but input has " + std::to_string(chunks) +
                        " full chunks");
      }
    }
    input.clear();
  }

  std::vector<IndexPermutation> inverses;
  inverses.reserve(pool.count());
  for (const auto& p : pool.permutations()) inverses.push_back(invert(p));

  transform_stream(input, output, geometry_for(pool.chunk_bits()),
                   resolve_workers(workers),
                   [&](std::uint64_t k) -> const IndexPermutation& {
                     if (k >= trace.indices.size()) {
                       throw Error(ErrorKind::format,
                                   "trace shorter than input chunk count");
                     }
                     return inverses[trace.indices[k]];
                   });
}

void trace_save(const SelectionTrace& trace, std::ostream& out) {
  detail::LeWriter w(out);
  w.bytes(kTraceMagic);
  w.uint<std::uint16_t>(kTraceFormatVersion);
  w.uint<std::uint32_t>(trace.chunk_bits);
  w.uint<std::uint64_t>(trace.indices.size());
  std::vector<std::uint8_t> buf;
  buf.reserve(4 * std::min<std::size_t>(trace.indices.size(), 1U << 16));
  for (std::size_t k = 0; k < trace.indices.size(); ++k) {
    for (unsigned b = 0; b < 4; ++b) {
      buf.push_back(static_cast<std::uint8_t>(trace.indices[k] >> (8 * b)));
    }
    if (buf.size() >= 4U << 16) {
      w.bytes(buf);
      buf.clear();
    }
  }
  w.bytes(buf);
  w.uint<std::uint32_t>(w.crc());
  out.flush();
  if (!out) throw Error(ErrorKind::io, "failed to write trace");
}

SelectionTrace trace_load(std::istream& in) {
  detail::LeReader r(in, "trace");
  std::uint8_t magic[4];
  r.bytes(magic);
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kTraceMagic))) {
    throw Error(ErrorKind::format, "trace: bad magic (not a PWTR file)");
  }
  if (const auto version = r.uint<std::uint16_t>();
      version != kTraceFormatVersion) {
    throw Error(ErrorKind::format,
                "trace: unsupported version " + std::to_string(version));
  }
  SelectionTrace trace;
  trace.chunk_bits = r.uint<std::uint32_t>();
  if (trace.chunk_bits == 0) {
    throw Error(ErrorKind::format, "trace: chunk_bits is zero");
  }
  const auto count = r.uint<std::uint64_t>();
  std::vector<std::uint8_t> buf;
  for (std::uint64_t done = 0; done < count;) {
    const auto take = std::min<std::uint64_t>(count - done, 1U << 16);
    buf.resize(static_cast<std::size_t>(take) * 4);
    r.bytes(buf);
    for (std::size_t i = 0; i < take; ++i) {
      trace.indices.push_back(std::uint32_t{buf[4 * i]} |
                              std::uint32_t{buf[4 * i + 1]} << 8 |
                              std::uint32_t{buf[4 * i + 2]} << 16 |
                              std::uint32_t{buf[4 * i + 3]} << 24);
    }
    done += take;
  }
  const auto expected = r.crc();
  if (r.uint<std::uint32_t>() != expected) {
    throw Error(ErrorKind::format, "trace: CRC mismatch");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::format, "trace: trailing bytes after CRC");
  }
  return trace;
}

}  // namespace pwhiten
