#include "blobgraph/db/database.hpp"

#include <mutex>
#include <sstream>

#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"
#include "blobgraph/extraction/stub_extractors.hpp"
#include "blobgraph/graph/snapshot.hpp"
#include "blobgraph/query/parser.hpp"
#include "blobgraph/replication/digest.hpp"

namespace blobgraph {

namespace fs = std::filesystem;

const char* query_kind_name(QueryKind k) noexcept { return k == QueryKind::Write ? "write" : "read"; }

QueryKind classify(std::string_view text) {
  return query::parse_query(text).is_write() ? QueryKind::Write : QueryKind::Read;
}

Database::Database(DatabaseOptions opts) : opts_(std::move(opts)), speeds_(opts_.ema_k) {
  if (opts_.data_dir) {
    fs::create_directories(*opts_.data_dir);
    blobs_ = std::make_unique<BlobStore>(*opts_.data_dir / "blobs", opts_.blob);
  } else {
    blobs_ = std::make_unique<BlobStore>(opts_.blob);
  }
  extraction_ = std::make_unique<ExtractionService>(*blobs_, opts_.extraction);
  if (opts_.stub_extractors) stubs::register_default_stubs(*extraction_);
  if (opts_.similarity_threshold) extraction_->comparators().set_default_threshold(*opts_.similarity_threshold);
  for (const auto& [key, t] : opts_.space_thresholds) extraction_->comparators().set_threshold(key, t);
  if (opts_.data_dir) load_state();
}

Database::~Database() = default;

void Database::load_state() {
  const fs::path& dir = *opts_.data_dir;
  if (fs::exists(dir / "graph.snap")) {
    auto contents = read_snapshot(dir / "graph.snap");
    graph_ = std::move(contents.graph);
    blobs_->restore_inline_payloads(std::move(contents.inline_blobs));
  }
  if (fs::exists(dir / "indexes")) {
    std::istringstream in(read_file(dir / "indexes"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) raise(ErrorCode::CorruptFile, "bad index manifest line: " + line);
      graph_.create_index(line.substr(0, tab), line.substr(tab + 1));
    }
  }
  if (fs::exists(dir / "extraction.cache")) extraction_->load_cache(dir / "extraction.cache");
  speeds_.load(dir / "speeds");
}

void Database::save_state() {
  const fs::path& dir = *opts_.data_dir;
  save_snapshot(graph_, blobs_->inline_payloads(), dir / "graph.snap");
  std::string manifest;
  for (const auto& [label, key] : graph_.index_definitions()) manifest += label + "\t" + key + "\n";
  write_file_atomic(dir / "indexes", manifest);
  extraction_->save_cache(dir / "extraction.cache");
  speeds_.save(dir / "speeds");
}

void Database::checkpoint() {
  if (!opts_.data_dir) return;
  std::shared_lock lock(mu_);
  save_state();
}

plan::PlanningContext Database::planning_context() const {
  plan::PlanningContext p;
  p.stats = graph_.stats();
  p.speeds = speeds_.snapshot();
  p.card = opts_.card;
  p.cost = opts_.cost;
  for (const auto& d : graph_.index_definitions()) p.indexes.insert(d);
  return p;
}

ExecContext Database::exec_context(const std::map<std::string, Value>& params, const ExecOptions& exec) {
  ExecContext ctx;
  ctx.graph = &graph_;
  ctx.blobs = blobs_.get();
  ctx.extraction = extraction_.get();
  ctx.speeds = &speeds_;
  ctx.params = params;
  ctx.clock = opts_.clock;
  ctx.fetcher = opts_.fetcher;
  ctx.options = exec;
  return ctx;
}

ResultSet Database::run(std::string_view text, const std::map<std::string, Value>& params) {
  return run(text, params, opts_.exec);
}

ResultSet Database::run(std::string_view text, const std::map<std::string, Value>& params, const ExecOptions& exec) {
  auto ast = query::parse_query(text);
  auto qg = query::to_query_graph(ast);
  ++statements_;
  if (ast.is_write()) {
    std::unique_lock lock(mu_);
    auto p = plan::Planner(qg, planning_context()).optimize().plan;
    auto ctx = exec_context(params, exec);
    auto rs = execute_statement(ast, *p, ctx);
    if (opts_.data_dir && opts_.checkpoint_on_write) save_state();
    return rs;
  }
  std::shared_lock lock(mu_);
  auto p = plan::Planner(qg, planning_context()).optimize().plan;
  auto ctx = exec_context(params, exec);
  return execute(*p, ctx);
}

plan::PlanPtr Database::plan(std::string_view text) const {
  auto qg = query::to_query_graph(query::parse_query(text));
  std::shared_lock lock(mu_);
  return plan::Planner(qg, planning_context()).optimize().plan;
}

std::string Database::explain(std::string_view text) const { return plan::explain(*plan(text)); }

std::string Database::render(const ResultSet& rs, ResultFormat format) const {
  return blobgraph::render(rs, *blobs_, format);
}

void Database::create_index(const std::string& label, const std::string& key) {
  std::unique_lock lock(mu_);
  graph_.create_index(label, key);
  if (opts_.data_dir && opts_.checkpoint_on_write) save_state();
}

std::uint64_t Database::digest() const {
  std::shared_lock lock(mu_);
  return state_digest(graph_, *blobs_);
}

GraphStats Database::stats() const {
  std::shared_lock lock(mu_);
  return graph_.stats();
}

void Database::write(const std::function<void(GraphStore&, BlobStore&)>& fn) {
  std::unique_lock lock(mu_);
  fn(graph_, *blobs_);
}

void Database::read(const std::function<void(const GraphStore&, const BlobStore&)>& fn) const {
  std::shared_lock lock(mu_);
  fn(graph_, *blobs_);
}

}  // namespace blobgraph
