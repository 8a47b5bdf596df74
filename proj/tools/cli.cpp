#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <CLI11.hpp>

#include "pwhiten/baseline.hpp"
#include "pwhiten/ent.hpp"
#include "pwhiten/entropy_source.hpp"
#include "pwhiten/error.hpp"
#include "pwhiten/nist_lite.hpp"
#include "pwhiten/permutation.hpp"
#include "pwhiten/report.hpp"
#include "pwhiten/whitening.hpp"

namespace pwhiten::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return kUsage;
    case ErrorKind::io: return kIo;
    case ErrorKind::format: return kFormat;
    case ErrorKind::precondition: return kPrecondition;
    case ErrorKind::exhausted: return kExhausted;
    case ErrorKind::contract: return kFailure;
  }
  return kFailure;
}

// ---------------------------------------------------------------- paths ---

void require_input(const fs::path& p) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) {
    throw Error(ErrorKind::io, "input file not found: " + p.string());
  }
}

void require_output(const fs::path& p, const std::vector<fs::path>& inputs) {
  std::error_code ec;
  const auto parent = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  if (!fs::is_directory(parent, ec)) {
    throw Error(ErrorKind::io, "output directory does not exist: " + parent.string());
  }
  if (fs::is_directory(p, ec)) {
    throw Error(ErrorKind::io, "output path is a directory: " + p.string());
  }
  for (const auto& in : inputs) {
    if (fs::exists(p, ec) && fs::equivalent(p, in, ec)) {
      throw Error(ErrorKind::usage,
                  "output " + p.string() + " would overwrite input " + in.string());
    }
  }
}

std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + p.string());
  return in;
}

/// Output written to a sibling temporary and renamed into place on commit, so
/// a failed command never leaves a partial file behind.
class StagedOutput {
 public:
  explicit StagedOutput(fs::path target)
      : target_(std::move(target)),
        temp_(target_.string() + ".tmp-" + std::to_string(::getpid())),
        out_(temp_, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorKind::io, "cannot create " + temp_.string());
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;
  ~StagedOutput() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(temp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.close();
    if (!out_) throw Error(ErrorKind::io, "failed to write " + target_.string());
    std::error_code ec;
    fs::rename(temp_, target_, ec);
    if (ec) {
      throw Error(ErrorKind::io, "cannot rename into " + target_.string() +
                                     ": " + ec.message());
    }
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

// -------------------------------------------------------- source options ---

struct SourceFlags {
  std::string kind = "os";
  std::string seed_file;
  std::uint64_t key = 0;
  std::uint64_t nonce = 0;
  std::uint64_t counter = 0;

  SourceOptions options() const {
    SourceOptions o;
    o.kind = source_kind_from_string(kind);
    o.seed_file = seed_file;
    o.key = key;
    o.nonce = nonce;
    o.counter = counter;
    if (o.kind == SourceKind::seed_file) require_input(o.seed_file);
    return o;
  }
};

void add_source_flags(CLI::App* cmd, SourceFlags& f, std::uint64_t default_nonce) {
  f.nonce = default_nonce;
  cmd->add_option("--source", f.kind, "Entropy source: os, seed-file or counter")
      ->check(CLI::IsMember({"os", "seed-file", "counter"}))
      ->capture_default_str();
  cmd->add_option("--seed-file", f.seed_file,
                  "Raw random bytes consumed sequentially by --source seed-file");
  cmd->add_option("--key", f.key, "Key for --source counter")->capture_default_str();
  cmd->add_option("--nonce", f.nonce, "Stream nonce for --source counter")
      ->capture_default_str();
  cmd->add_option("--counter", f.counter, "First keystream block for --source counter")
      ->capture_default_str();
}

MatrixPool load_pool(const fs::path& p) {
  require_input(p);
  auto in = open_input(p);
  return pool_load(in);
}

// ------------------------------------------------------------- commands ---

struct GenPoolArgs {
  std::string output;
  unsigned n_qubits = 13;
  std::size_t count = 32;
  std::string shuffle = "naive";
  std::string tag;
  unsigned max_qubits = kDefaultMaxQubits;
  SourceFlags source;
};

int cmd_gen_pool(const GenPoolArgs& a, std::ostream& out) {
  const fs::path target(a.output);
  require_output(target, {});
  const auto mode = shuffle_mode_from_string(a.shuffle);
  auto rng = make_source(a.source.options());
  const auto tag = a.tag.empty()
                       ? rng->describe() + ";shuffle=" + to_string(mode)
                       : a.tag;
  const auto pool =
      generate_pool(a.n_qubits, a.count, mode, *rng, tag, a.max_qubits);
  StagedOutput staged(target);
  pool_save(pool, staged.stream());
  staged.commit();
  out << "wrote pool " << target.string() << ": n_qubits=" << pool.n_qubits()
      << " N=" << pool.chunk_bits() << " M=" << pool.count()
      << " shuffle=" << to_string(mode) << '\n';
  return kOk;
}

struct WhitenArgs {
  std::string input;
  std::string output;
  std::string pool;
  std::string save_pool;
  std::string trace;
  unsigned n_qubits = 13;
  std::size_t count = 32;
  std::string shuffle = "naive";
  unsigned max_qubits = kDefaultMaxQubits;
  unsigned workers = 1;
  std::uint64_t pool_nonce = 0;
  SourceFlags source;
  bool n_given = false;
  bool count_given = false;
};

int cmd_whiten(const WhitenArgs& a, std::ostream& out) {
  const fs::path input(a.input);
  const fs::path target(a.output);
  require_input(input);
  require_output(target, {input});
  if (!a.trace.empty()) require_output(a.trace, {input});
  if (!a.save_pool.empty()) require_output(a.save_pool, {input});

  const auto opts = a.source.options();
  auto selector = make_source(opts);

  std::optional<MatrixPool> pool;
  if (!a.pool.empty()) {
    pool = load_pool(a.pool);
    if ((a.n_given && pool->n_qubits() != a.n_qubits) ||
        (a.count_given && pool->count() != a.count)) {
      throw Error(ErrorKind::usage, "pool file " + a.pool +
                                        " does not match --qubits/--count");
    }
  } else {
    // Fresh pool per run. Counter streams get their own nonce; other sources
    // are consumed sequentially, pool first.
    std::unique_ptr<EntropySource> pool_source;
    EntropySource* pool_rng = selector.get();
    if (opts.kind == SourceKind::counter) {
      auto pool_opts = opts;
      pool_opts.nonce = a.pool_nonce;
      pool_source = make_source(pool_opts);
      pool_rng = pool_source.get();
    }
    const auto mode = shuffle_mode_from_string(a.shuffle);
    pool = generate_pool(a.n_qubits, a.count, mode, *pool_rng,
                         pool_rng->describe() + ";shuffle=" + to_string(mode),
                         a.max_qubits);
  }

  WhitenConfig cfg;
  cfg.n_qubits = pool->n_qubits();
  cfg.pool_count = pool->count();
  cfg.shuffle_mode = shuffle_mode_from_string(a.shuffle);
  cfg.selection_source = opts.kind;
  cfg.record_selections = !a.trace.empty();
  cfg.workers = a.workers;

  auto in = open_input(input);
  StagedOutput staged(target);
  const auto trace = whiten_stream(in, *pool, cfg, *selector, staged.stream());

  std::optional<StagedOutput> staged_trace;
  if (!a.trace.empty()) {
    staged_trace.emplace(a.trace);
    trace_save(trace, staged_trace->stream());
  }
  std::optional<StagedOutput> staged_pool;
  if (!a.save_pool.empty()) {
    staged_pool.emplace(a.save_pool);
    pool_save(*pool, staged_pool->stream());
  }
  staged.commit();
  if (staged_trace) staged_trace->commit();
  if (staged_pool) staged_pool->commit();

  const auto bytes = fs::file_size(target);
  const auto framing = frame(bytes * 8, pool->chunk_bits());
  out << "whitened " << input.string() << " -> " << target.string() << ": "
      << bytes << " bytes, " << framing.full_chunks << " chunks of "
      << pool->chunk_bits() << " bits, tail " << framing.tail_bits << " bits\n";
  return kOk;
}

struct UnwhitenArgs {
  std::string input;
  std::string output;
  std::string pool;
  std::string trace;
  unsigned workers = 1;
};

int cmd_unwhiten(const UnwhitenArgs& a, std::ostream& out) {
  const fs::path input(a.input);
  const fs::path target(a.output);
  require_input(input);
  if (a.pool.empty()) {
    throw Error(ErrorKind::usage, "unwhiten needs --pool (or PWHITEN_POOL)");
  }
  require_input(a.trace);
  require_output(target, {input, a.pool, a.trace});
  const auto pool = load_pool(a.pool);
  auto trace_in = open_input(a.trace);
  const auto trace = trace_load(trace_in);

  auto in = open_input(input);
  StagedOutput staged(target);
  unwhiten_stream(in, pool, trace, staged.stream(), a.workers);
  staged.commit();
  out << "restored " << target.string() << " (" << fs::file_size(target)
      << " bytes)\n";
  return kOk;
}

struct AnalyzeArgs {
  std::string input;
  std::string csv;
  bool no_nist = false;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const fs::path input(a.input);
  require_input(input);
  if (!a.csv.empty()) require_output(a.csv, {input});

  EntAccumulator ent;
  NistLiteAccumulator nist;
  {
    auto in = open_input(input);
    std::vector<std::uint8_t> buf(1U << 16);
    for (;;) {
      in.read(reinterpret_cast<char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
      if (in.bad()) throw Error(ErrorKind::io, "read failed: " + input.string());
      const auto got = static_cast<std::size_t>(in.gcount());
      if (got == 0) break;
      const auto chunk = std::span(buf).first(got);
      ent.feed(chunk);
      if (!a.no_nist) nist.feed(chunk);
    }
  }
  const auto ent_report = ent.report();
  std::optional<NistLiteReport> nist_report;
  if (!a.no_nist && nist.bit_count() >= kNistMinBits) nist_report = nist.report();

  out << "ENT byte-mode statistics for " << input.string() << '\n';
  write_ent_text(ent_report, out);
  if (nist_report) {
    out << "\nNIST-lite (significance 0.01)\n";
    write_nist_text(*nist_report, out);
  } else if (!a.no_nist) {
    out << "\nNIST-lite skipped: input shorter than 100 bits\n";
  }
  if (!a.csv.empty()) {
    StagedOutput staged(a.csv);
    write_report_csv(ent_report, nist_report ? &*nist_report : nullptr,
                     staged.stream());
    staged.commit();
  }
  return kOk;
}

struct CompareArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::string figure_csv;
};

EntReport report_for(const fs::path& p) {
  require_input(p);
  auto in = open_input(p);
  std::string head(16, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  in.clear();
  in.seekg(0);
  if (looks_like_report_csv(head)) return read_report_csv(in);
  return ent_analyze(in);
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  if (a.inputs.size() < 2) {
    throw Error(ErrorKind::usage, "compare needs at least two inputs");
  }
  if (!a.labels.empty() && a.labels.size() != a.inputs.size()) {
    throw Error(ErrorKind::usage, "--labels must name every input");
  }
  std::vector<fs::path> paths(a.inputs.begin(), a.inputs.end());
  for (const auto& p : paths) require_input(p);
  if (!a.figure_csv.empty()) require_output(a.figure_csv, paths);

  std::vector<std::string> labels = a.labels;
  if (labels.empty()) {
    for (const auto& p : paths) labels.push_back(p.filename().string());
  }
  std::vector<EntReport> reports;
  for (const auto& p : paths) reports.push_back(report_for(p));

  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (i > 1) out << '\n';
    write_comparison_text(compare_reports(reports[0], reports[i]), labels[0],
                          labels[i], out);
  }
  if (!a.figure_csv.empty()) {
    std::vector<FigureRow> rows;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      rows.push_back({labels[i], reports[i].chi_square, reports[i].arithmetic_mean});
    }
    StagedOutput staged(a.figure_csv);
    write_figure_csv(rows, staged.stream());
    staged.commit();
  }
  return kOk;
}

struct XorArgs {
  std::string a;
  std::string b;
  std::string output;
};

int cmd_xor(const XorArgs& x, std::ostream& out) {
  require_input(x.a);
  require_input(x.b);
  require_output(x.output, {x.a, x.b});
  auto in_a = open_input(x.a);
  auto in_b = open_input(x.b);
  StagedOutput staged(x.output);
  const auto n = xor_combine(in_a, in_b, staged.stream());
  staged.commit();
  out << "wrote " << n << " bytes to " << x.output << '\n';
  return kOk;
}

struct VnArgs {
  std::string input;
  std::string output;
};

int cmd_vn(const VnArgs& v, std::ostream& out) {
  require_input(v.input);
  require_output(v.output, {v.input});
  auto in = open_input(v.input);
  StagedOutput staged(v.output);
  const auto bits = von_neumann(in, staged.stream());
  staged.commit();
  out << "extracted " << bits << " bits (" << (bits + 7) / 8 << " bytes) to "
      << v.output << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Permutation-matrix whitening and randomness analysis", "pwhiten"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read option values from a key=value file");

  GenPoolArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-pool", "Generate a permutation pool file");
  gen_cmd->add_option("-o,--output", gen.output, "Pool file to write")->required();
  gen_cmd->add_option("-n,--qubits", gen.n_qubits, "Chunk size is 2^qubits bits")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_cmd->add_option("-m,--count", gen.count, "Number of permutations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_cmd->add_option("--shuffle", gen.shuffle, "naive or unbiased")
      ->check(CLI::IsMember({"naive", "unbiased"}))
      ->capture_default_str();
  gen_cmd->add_option("--tag", gen.tag, "Provenance tag stored in the file");
  gen_cmd->add_option("--max-qubits", gen.max_qubits, "Size cap on --qubits")
      ->capture_default_str();
  add_source_flags(gen_cmd, gen.source, 0);

  WhitenArgs wh;
  auto* wh_cmd = app.add_subcommand("whiten", "Whiten a file with a permutation pool");
  wh_cmd->add_option("-i,--input", wh.input, "Raw input file")->required();
  wh_cmd->add_option("-o,--output", wh.output, "Whitened output file")->required();
  wh_cmd->add_option("--pool", wh.pool, "Pool file (omit to generate a fresh pool)")
      ->envname("PWHITEN_POOL");
  wh_cmd->add_option("--save-pool", wh.save_pool, "Save the pool that was used");
  wh_cmd->add_option("--trace", wh.trace, "Record per-chunk selections here");
  auto* wh_n = wh_cmd->add_option("-n,--qubits", wh.n_qubits, "Qubits for a fresh pool")
                   ->check(CLI::PositiveNumber)
                   ->capture_default_str();
  auto* wh_m = wh_cmd->add_option("-m,--count", wh.count, "Permutations in a fresh pool")
                   ->check(CLI::PositiveNumber)
                   ->capture_default_str();
  wh_cmd->add_option("--shuffle", wh.shuffle, "Shuffle for a fresh pool")
      ->check(CLI::IsMember({"naive", "unbiased"}))
      ->capture_default_str();
  wh_cmd->add_option("--max-qubits", wh.max_qubits, "Size cap on --qubits")
      ->capture_default_str();
  wh_cmd->add_option("--pool-nonce", wh.pool_nonce,
                     "Counter nonce used for a fresh pool")
      ->capture_default_str();
  wh_cmd->add_option("--workers", wh.workers, "Worker threads (0 = all cores)")
      ->envname("PWHITEN_WORKERS")
      ->capture_default_str();
  add_source_flags(wh_cmd, wh.source, 1);

  UnwhitenArgs un;
  auto* un_cmd = app.add_subcommand("unwhiten", "Invert a whitening run from its trace");
  un_cmd->add_option("-i,--input", un.input, "Whitened file")->required();
  un_cmd->add_option("-o,--output", un.output, "Restored file")->required();
  un_cmd->add_option("--pool", un.pool, "Pool used for whitening")->envname("PWHITEN_POOL");
  un_cmd->add_option("--trace", un.trace, "Trace written by whiten --trace")->required();
  un_cmd->add_option("--workers", un.workers, "Worker threads (0 = all cores)")
      ->envname("PWHITEN_WORKERS")
      ->capture_default_str();

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "ENT statistics and NIST-lite tests");
  an_cmd->add_option("input", an.input, "File to analyze")->required();
  an_cmd->add_option("--csv", an.csv, "Also write a parameter,value CSV report");
  an_cmd->add_flag("--no-nist", an.no_nist, "Skip the NIST-lite tests");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand(
      "compare", "Compare the first input against each other input");
  cmp_cmd->add_option("inputs", cmp.inputs, "Raw files or report CSVs")
      ->required()
      ->expected(2, -1);
  cmp_cmd->add_option("--labels", cmp.labels, "One label per input")->delimiter(',');
  cmp_cmd->add_option("--figure-csv", cmp.figure_csv,
                      "Write label,chi_square,arithmetic_mean rows");

  XorArgs xr;
  auto* xor_cmd = app.add_subcommand("xor", "XOR two streams byte by byte");
  xor_cmd->add_option("a", xr.a, "First input")->required();
  xor_cmd->add_option("b", xr.b, "Second input")->required();
  xor_cmd->add_option("-o,--output", xr.output, "Output file")->required();

  VnArgs vn;
  auto* vn_cmd = app.add_subcommand("vn", "Von Neumann extractor");
  vn_cmd->add_option("-i,--input", vn.input, "Input file")->required();
  vn_cmd->add_option("-o,--output", vn.output, "Output file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_pool(gen, out);
    if (*wh_cmd) {
      wh.n_given = wh_n->count() > 0;
      wh.count_given = wh_m->count() > 0;
      return cmd_whiten(wh, out);
    }
    if (*un_cmd) return cmd_unwhiten(un, out);
    if (*an_cmd) return cmd_analyze(an, out);
    if (*cmp_cmd) return cmd_compare(cmp, out);
    if (*xor_cmd) return cmd_xor(xr, out);
    if (*vn_cmd) return cmd_vn(vn, out);
  } catch (const Error& e) {
    err << "pwhiten: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "pwhiten: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace pwhiten::cli
