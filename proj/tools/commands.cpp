#include <unistd.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"
#include "blobgraph/db/ingest.hpp"
#include "blobgraph/index/bench.hpp"
#include "blobgraph/index/vector_index.hpp"
#include "blobgraph/replication/scenario.hpp"
#include "cli.hpp"

namespace blobgraph::cli {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidConfig: return Usage;
    case ErrorCode::InvalidInput:
    case ErrorCode::CorruptFile:
    case ErrorCode::IoError:
    case ErrorCode::LexError:
    case ErrorCode::ParseError:
    case ErrorCode::UnboundVariable:
    case ErrorCode::ChecksumMismatch: return DataError;
    default: return EngineError;
  }
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::string data;
  std::uint64_t seed = 1;
  std::string format = "tsv";
};

Config config_of(const Globals& g) {
  Config c = g.config.empty() ? Config{} : Config::load(g.config);
  if (!g.data.empty()) c.data_dir = g.data;
  return c;
}

Config store_config(const Globals& g) {
  Config c = config_of(g);
  if (!c.data_dir) throw UsageError("no data directory: pass --data or set data_dir in the config");
  return c;
}

ResultFormat format_of(const Globals& g) {
  if (g.format == "tsv") return ResultFormat::Tsv;
  if (g.format == "json-lines") return ResultFormat::JsonLines;
  throw UsageError("unknown format " + g.format + " (tsv or json-lines)");
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& cell : split_csv_line(text)) {
    auto v = parse_cell(cell);
    if (!std::holds_alternative<std::int64_t>(v) || std::get<std::int64_t>(v) <= 0)
      throw UsageError("k must be a positive integer: " + cell);
    out.push_back(static_cast<std::size_t>(std::get<std::int64_t>(v)));
  }
  return out;
}

void print_stats(Database& db, std::ostream& out) {
  auto s = db.stats();
  out << "nodes\t" << s.node_count << "\nrels\t" << s.rel_count << "\n";
  for (const auto& [l, n] : s.label_counts) out << "label:" << l << "\t" << n << "\n";
  for (const auto& [t, n] : s.rel_type_counts) out << "type:" << t << "\t" << n << "\n";
}

int repl(Database& db, ResultFormat fmt, std::istream& in, std::ostream& out, std::ostream& err, bool prompt) {
  std::string line;
  while (true) {
    if (prompt) out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    line = line.substr(b);
    if (line == ":quit") break;
    try {
      if (line == ":stats") {
        print_stats(db, out);
      } else if (line.rfind(":explain", 0) == 0) {
        out << db.explain(line.substr(8));
      } else if (line[0] == ':') {
        err << "unknown command " << line << " (:quit, :stats, :explain <query>)\n";
      } else {
        out << db.render(db.run(line), fmt);
      }
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
    }
  }
  return Ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Property graph database with unstructured properties", "blobgraph"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "config file (key = value lines)");
  app.add_option("--data", g.data, "data directory (overrides data_dir)");
  app.add_option("--seed", g.seed, "seed for randomized commands");
  app.add_option("--format", g.format, "result format: tsv or json-lines");

  auto* init = app.add_subcommand("init", "create the store layout");

  IngestSpec ingest_spec;
  std::string blob_dir;
  auto* load = app.add_subcommand("load", "ingest node and relationship CSV files");
  load->add_option("--nodes", ingest_spec.nodes, "nodes CSV: id,labels,<prop>...[,blob_path]");
  load->add_option("--rels", ingest_spec.rels, "relationships CSV: src,tgt,type,<prop>...");
  load->add_option("--blob-dir", blob_dir, "directory holding blob_path files");
  load->add_option("--blob-key", ingest_spec.blob_key, "property that receives the blob");

  std::string text, file, params;
  auto* query = app.add_subcommand("query", "run one statement");
  query->add_option("text", text, "query text");
  query->add_option("--file", file, "read the query from a file");
  query->add_option("--params", params, "parameters k=v,...");

  std::string explain_text;
  auto* explain = app.add_subcommand("explain", "print the chosen plan");
  explain->add_option("text", explain_text, "query text")->required();

  auto* repl_cmd = app.add_subcommand("repl", "interactive session (:quit, :stats, :explain <query>)");

  IndexBenchSpec bench;
  std::string ks = "1,10,100,500";
  auto* bench_cmd = app.add_subcommand("bench-index", "vector index recall and latency against brute force");
  bench_cmd->add_option("--vectors", bench.vectors);
  bench_cmd->add_option("--dim", bench.dim);
  bench_cmd->add_option("--clusters", bench.clusters, "0: uniform vectors");
  bench_cmd->add_option("--buckets", bench.buckets, "0: from bucket_divisor / min_buckets");
  bench_cmd->add_option("--nprobe", bench.nprobe, "0: every bucket");
  bench_cmd->add_option("--ks", ks, "comma-separated k values");
  bench_cmd->add_option("--repeats", bench.repeats);

  ScenarioSpec scenario;
  std::optional<std::size_t> replicas;
  std::optional<double> drop;
  std::optional<std::uint32_t> max_delay;
  std::string trace_path;
  auto* sim = app.add_subcommand("cluster-sim", "scripted replication run; prints per-replica digests");
  sim->add_option("--writes", scenario.writes);
  sim->add_option("--late-lag", scenario.late_lag, "versions the late joiner is behind; 0 disables");
  sim->add_option("--read-every", scenario.read_every);
  sim->add_option("--replicas", replicas);
  sim->add_option("--drop", drop);
  sim->add_option("--max-delay", max_delay);
  sim->add_option("--trace", trace_path, "write the event trace to a file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return Usage;
  }

  try {
    if (*init) {
      Database db(store_config(g).database_options());
      db.checkpoint();
      out << "initialized " << store_config(g).data_dir->string() << "\n";
      return Ok;
    }
    if (*load) {
      if (ingest_spec.nodes.empty() && ingest_spec.rels.empty()) throw UsageError("load needs --nodes or --rels");
      Config c = store_config(g);
      if (!blob_dir.empty()) ingest_spec.blob_dir = blob_dir;
      ingest_spec.manifest = *c.data_dir / "ingested";
      Database db(c.database_options());
      auto r = ingest(db, ingest_spec);
      if (r.skipped) {
        out << "already loaded (content hash " << std::hex << r.content_hash << std::dec << ")\n";
        return Ok;
      }
      out << "rows " << r.rows << ", nodes " << r.nodes_created << ", rels " << r.rels_created << ", rejected "
          << r.rejected.size() << "\n";
      for (const auto& why : r.rejected) err << "rejected " << why << "\n";
      return r.rejected.empty() ? Ok : DataError;
    }
    if (*query) {
      if (text.empty() == file.empty()) throw UsageError("query needs exactly one of <text> or --file");
      if (!file.empty()) text = read_file(file);
      auto fmt = format_of(g);
      Database db(store_config(g).database_options());
      out << db.render(db.run(text, parse_params(params)), fmt);
      return Ok;
    }
    if (*explain) {
      Database db(store_config(g).database_options());
      out << db.explain(explain_text);
      return Ok;
    }
    if (*repl_cmd) {
      auto fmt = format_of(g);
      Database db(store_config(g).database_options());
      return repl(db, fmt, in, out, err, &in == &std::cin && ::isatty(0));
    }
    if (*bench_cmd) {
      Config c = config_of(g);
      bench.ks = parse_ks(ks);
      bench.seed = g.seed;
      if (bench.buckets == 0) {
        BuildOptions bo;
        bo.bucket_divisor = c.bucket_divisor;
        bo.min_buckets = c.min_buckets;
        bench.buckets = bucket_count_for(bench.vectors, bo);
      }
      out << format_bench_report(bench_index(bench));
      return Ok;
    }
    if (*sim) {
      Config c = config_of(g);
      if (replicas) c.replicas = *replicas;
      if (drop) c.drop_probability = *drop;
      if (max_delay) c.max_delay = *max_delay;
      scenario.cluster = c.cluster_options(g.seed);
      scenario.workload_seed = g.seed;
      auto r = run_scenario(scenario);
      out << format_scenario(r);
      if (!trace_path.empty()) write_file_atomic(trace_path, r.trace);
      return r.converged ? Ok : EngineError;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return Usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return EngineError;
  }
  return Usage;
}

}  // namespace blobgraph::cli
