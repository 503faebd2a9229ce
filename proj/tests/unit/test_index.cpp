#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <random>
#include <thread>

#include <unistd.h>

#include "doctest.h"
#include "blobgraph/common/error.hpp"
#include "blobgraph/index/scalar_index.hpp"
#include "blobgraph/index/vector_index.hpp"
#include "support/clustered_data.hpp"

using namespace blobgraph;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::CorruptFile;
}

std::vector<float> rand_vec(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<float> u(-1, 1);
  std::vector<float> v(dim);
  for (auto& x : v) x = u(rng);
  return v;
}

SemanticSpace random_space(std::mt19937_64& rng, std::size_t n, std::uint32_t dim) {
  SemanticSpace s("vec", 1, SemanticKind::Vector, dim);
  for (std::size_t i = 0; i < n; ++i) s.add(i * 3 + 1, rand_vec(rng, dim));
  return s;
}

// Independent top-k: k rounds of "smallest not yet taken".
KnnResult selection_knn(const SemanticSpace& s, const std::vector<float>& q, std::size_t k) {
  std::vector<std::pair<ItemId, double>> all;
  for (const auto& [id, v] : s.members()) {
    const auto& x = std::get<std::vector<float>>(v);
    double d = 0;
    for (std::size_t i = 0; i < q.size(); ++i) d += (double(x[i]) - q[i]) * (double(x[i]) - q[i]);
    all.emplace_back(id, d);
  }
  KnnResult out;
  std::vector<bool> taken(all.size(), false);
  for (std::size_t r = 0; r < std::min(k, all.size()); ++r) {
    std::size_t best = all.size();
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (taken[i]) continue;
      if (best == all.size() || all[i].second < all[best].second ||
          (all[i].second == all[best].second && all[i].first < all[best].first)) {
        best = i;
      }
    }
    taken[best] = true;
    out.push_back({all[best].first, std::sqrt(all[best].second)});
  }
  return out;
}

std::vector<ItemId> ids_of(const KnnResult& r) {
  std::vector<ItemId> out;
  for (const auto& n : r) out.push_back(n.id);
  return out;
}

}  // namespace

TEST_CASE("semantic space validates members") {
  SemanticSpace s("face", 2, SemanticKind::Vector, 3);
  s.add(1, std::vector<float>{1, 2, 3});
  CHECK(code_of([&] { s.add(1, std::vector<float>{1, 2, 3}); }) == ErrorCode::DuplicateId);
  CHECK(code_of([&] { s.add(2, std::vector<float>{1, 2}); }) == ErrorCode::DimMismatch);
  CHECK(code_of([&] { s.add(3, SemanticValue{1.0}); }) == ErrorCode::KindMismatch);
  CHECK(s.size() == 1);
  CHECK(code_of([] { SemanticSpace("x", 1, SemanticKind::Vector, 0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("bucket count rule") {
  BuildOptions o;
  CHECK(bucket_count_for(250000, o) == 2);
  CHECK(bucket_count_for(50, o) == 1);
  CHECK(bucket_count_for(99999, o) == 1);
  o.min_buckets = 4;
  CHECK(bucket_count_for(50, o) == 4);
  o.bucket_count = 100;
  CHECK(bucket_count_for(10000, o) == 100);
  CHECK(bucket_count_for(30, o) == 30);
}

TEST_CASE("pick_bucket matches an explicit distance table") {
  std::mt19937_64 rng(3);
  std::vector<std::vector<float>> cores;
  for (int i = 0; i < 20; ++i) cores.push_back(rand_vec(rng, 8));
  VectorIndex idx(8, cores, 1);
  for (std::size_t b = 0; b < cores.size(); ++b) CHECK(idx.pick_bucket(cores[b]) == b);
  for (int t = 0; t < 1000; ++t) {
    auto v = rand_vec(rng, 8);
    std::vector<double> table;
    for (const auto& c : cores) {
      double d = 0;
      for (int i = 0; i < 8; ++i) d += (double(v[i]) - c[i]) * (double(v[i]) - c[i]);
      table.push_back(d);
    }
    auto expect = static_cast<std::size_t>(std::min_element(table.begin(), table.end()) - table.begin());
    CHECK(idx.pick_bucket(v) == expect);
  }
  // Equidistant: (0,0) vs cores (1,0) and (-1,0).
  VectorIndex tie(2, {{1, 0}, {-1, 0}}, 1);
  CHECK(tie.pick_bucket(std::vector<float>{0, 0}) == 0);
  CHECK(code_of([&] { idx.pick_bucket(std::vector<float>{1, 2}); }) == ErrorCode::DimMismatch);
}

TEST_CASE("batch build partitions the space deterministically") {
  std::mt19937_64 rng(11);
  auto space = random_space(rng, 2000, 6);
  BuildOptions o;
  o.bucket_count = 25;
  o.seed = 42;
  auto a = VectorIndex::build(space, o);
  auto b = VectorIndex::build(space, o);
  REQUIRE(a.bucket_count() == 25);
  std::map<ItemId, int> seen;
  for (std::size_t k = 0; k < a.bucket_count(); ++k) {
    CHECK(a.core(k) == b.core(k));
    auto ma = a.bucket_members(k);
    auto mb = b.bucket_members(k);
    REQUIRE(ma.size() == mb.size());
    for (std::size_t i = 0; i < ma.size(); ++i) {
      CHECK(ma[i].id == mb[i].id);
      ++seen[ma[i].id];
      CHECK(a.pick_bucket(ma[i].v) == k);
    }
  }
  CHECK(seen.size() == space.size());
  CHECK(std::all_of(seen.begin(), seen.end(), [](auto& kv) { return kv.second == 1; }));

  // Cores are distinct members of the space.
  std::set<std::vector<float>> cores;
  for (std::size_t k = 0; k < a.bucket_count(); ++k) cores.insert(a.core(k));
  CHECK(cores.size() == 25);
  for (const auto& c : cores) {
    CHECK(std::any_of(space.members().begin(), space.members().end(),
                      [&](auto& kv) { return std::get<std::vector<float>>(kv.second) == c; }));
  }

  o.seed = 43;
  auto c = VectorIndex::build(space, o);
  bool differs = false;
  for (std::size_t k = 0; k < c.bucket_count(); ++k) differs = differs || c.core(k) != a.core(k);
  CHECK(differs);

  SemanticSpace empty("vec", 1, SemanticKind::Vector, 6);
  CHECK(code_of([&] { VectorIndex::build(empty); }) == ErrorCode::EmptySpace);
  SemanticSpace nums("n", 1, SemanticKind::Number);
  nums.add(1, 1.0);
  CHECK(code_of([&] { VectorIndex::build(nums); }) == ErrorCode::KindMismatch);
}

TEST_CASE("brute_knn agrees with an independent selection") {
  std::mt19937_64 rng(17);
  auto space = random_space(rng, 300, 4);
  // Duplicate vectors exercise the id tie-break.
  for (ItemId id = 5000; id < 5010; ++id) space.add(id, std::get<std::vector<float>>(space.at(1)));
  for (int t = 0; t < 50; ++t) {
    auto q = t % 5 == 0 ? std::get<std::vector<float>>(space.at(1)) : rand_vec(rng, 4);
    for (std::size_t k : {1, 7, 50, 400}) {
      auto got = brute_knn(space, q, k);
      auto want = selection_knn(space, q, k);
      REQUIRE(got.size() == want.size());
      CHECK(ids_of(got) == ids_of(want));
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].distance == doctest::Approx(want[i].distance));
    }
  }
  SemanticSpace single("vec", 1, SemanticKind::Vector, 2);
  single.add(9, std::vector<float>{1, 1});
  auto r = brute_knn(single, std::vector<float>{0, 0}, 3);
  REQUIRE(r.size() == 1);
  CHECK(r[0].id == 9);
  CHECK(code_of([&] { brute_knn(single, std::vector<float>{0}, 1); }) == ErrorCode::DimMismatch);
  CHECK(code_of([&] { brute_knn(single, std::vector<float>{0, 0}, 0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("full-probe knn is exact") {
  std::mt19937_64 rng(23);
  auto space = random_space(rng, 3000, 8);
  BuildOptions o;
  o.bucket_count = 30;
  o.seed = 1;
  auto idx = VectorIndex::build(space, o);
  for (int t = 0; t < 100; ++t) {
    auto q = rand_vec(rng, 8);
    for (std::size_t k : {1, 10, 100, 500}) CHECK(idx.knn(q, k, idx.bucket_count()) == brute_knn(space, q, k));
  }
  auto all = idx.knn(rand_vec(rng, 8), 10000, 1000);
  CHECK(all.size() == space.size());
  CHECK(std::is_sorted(all.begin(), all.end(), [](auto& a, auto& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  }));
}

TEST_CASE("dynamic inserts keep full-probe knn exact") {
  std::mt19937_64 rng(29);
  auto space = random_space(rng, 200, 8);
  BuildOptions o;
  o.bucket_count = 10;
  auto idx = VectorIndex::build(space, o);
  for (ItemId id = 100000; id < 110000; ++id) dynamic_insert(space, idx, id, rand_vec(rng, 8));
  CHECK(idx.size() == space.size());
  for (int t = 0; t < 100; ++t) {
    auto q = rand_vec(rng, 8);
    CHECK(idx.knn(space, q, 10, idx.bucket_count()) == brute_knn(space, q, 10));
  }
  auto v = rand_vec(rng, 8);
  dynamic_insert(space, idx, 9, v);
  auto r = idx.knn(v, 1, idx.bucket_count());
  CHECK(r[0].id == 9);
  CHECK(r[0].distance == 0.0);
  CHECK(code_of([&] { dynamic_insert(space, idx, 9, v); }) == ErrorCode::DuplicateId);
  CHECK(code_of([&] { dynamic_insert(space, idx, 8, {1, 2}); }) == ErrorCode::DimMismatch);

  VectorIndex one(2, {{0, 0}}, 1);
  one.insert(1, {1, 1});
  CHECK(one.bucket_members(0).size() == 1);
  one.insert(2, {2, 2});
  CHECK(one.bucket_members(0).size() == 2);
}

TEST_CASE("concurrent inserts and queries") {
  std::mt19937_64 rng(31);
  auto space = random_space(rng, 500, 4);
  BuildOptions o;
  o.bucket_count = 8;
  auto idx = VectorIndex::build(space, o);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&idx, t] {
      std::mt19937_64 r(t);
      for (int i = 0; i < 500; ++i) {
        idx.insert(1000000 + t * 1000 + i, rand_vec(r, 4));
        idx.knn(rand_vec(r, 4), 5, 2);
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(idx.size() == 2500);
}

TEST_CASE("serial guard") {
  std::mt19937_64 rng(37);
  auto space = random_space(rng, 50, 3);
  auto idx = VectorIndex::build(space);
  CHECK(idx.bucket_count() == 1);
  auto q = rand_vec(rng, 3);
  CHECK(idx.knn(space, q, 5, 1) == brute_knn(space, q, 5));
  SemanticSpace bumped("vec", 2, SemanticKind::Vector, 3);
  bumped.add(1, q);
  CHECK(code_of([&] { idx.knn(bumped, q, 1, 1); }) == ErrorCode::StaleIndex);
}

TEST_CASE("recall grows with nprobe on clustered data") {
  testing::ClusteredData data(20, 2000, 16, 10.0f, 5);
  BuildOptions o;
  o.bucket_count = 20;
  o.seed = 3;
  auto idx = VectorIndex::build(data.space, o);
  std::mt19937_64 rng(77);
  std::vector<std::vector<float>> queries;
  for (int i = 0; i < 100; ++i) queries.push_back(data.query(rng));
  double prev = 0.0;
  for (std::size_t np : {1, 2, 4, 20}) {
    double sum = 0;
    for (const auto& q : queries) sum += recall(idx.knn(q, 10, np), brute_knn(data.space, q, 10));
    double avg = sum / static_cast<double>(queries.size());
    CHECK(avg >= prev);
    prev = avg;
  }
  CHECK(prev == 1.0);
}

TEST_CASE("index file round-trip") {
  std::mt19937_64 rng(41);
  auto space = random_space(rng, 400, 5);
  BuildOptions o;
  o.bucket_count = 7;
  auto idx = VectorIndex::build(space, o);
  auto path = std::filesystem::temp_directory_path() / ("bg_pivf_" + std::to_string(::getpid()));
  idx.save(path);
  std::string head(4, '\0');
  {
    std::ifstream in(path, std::ios::binary);
    in.read(head.data(), 4);
  }
  CHECK(head == "PIVF");
  auto back = VectorIndex::load(path, 1);
  CHECK(back.bucket_count() == 7);
  CHECK(back.size() == 400);
  for (std::size_t b = 0; b < 7; ++b) CHECK(back.core(b) == idx.core(b));
  for (int t = 0; t < 20; ++t) {
    auto q = rand_vec(rng, 5);
    CHECK(back.knn(q, 10, 2) == idx.knn(q, 10, 2));
  }
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  CHECK(code_of([&] { VectorIndex::load(path, 1); }) == ErrorCode::CorruptFile);
  std::filesystem::remove(path);
}

TEST_CASE("numeric range and text lookup") {
  SemanticSpace nums("jersey", 1, SemanticKind::Number);
  for (int i = 1; i <= 100; ++i) nums.add(static_cast<ItemId>(i), static_cast<double>(i));
  CHECK(numeric_range(nums, 10, 20).size() == 11);
  CHECK(numeric_range(nums, 20, 10).empty());

  SemanticSpace text("caption", 1, SemanticKind::Text);
  text.add(1, std::string("a cat"));
  text.add(2, std::string("dog"));
  text.add(3, std::string("Cat, sleeping!"));
  CHECK(text_lookup(text, "cat") == std::vector<ItemId>{1, 3});
  CHECK(text_lookup(text, "CAT") == std::vector<ItemId>{1, 3});
  CHECK(text_lookup(text, "bird").empty());

  SemanticSpace cats("animal", 1, SemanticKind::Categorical);
  cats.add(4, Categorical{"cat"});
  cats.add(5, Categorical{"dog"});
  CHECK(text_lookup(cats, "dog") == std::vector<ItemId>{5});

  CHECK(code_of([&] { numeric_range(text, 0, 1); }) == ErrorCode::KindMismatch);
  CHECK(code_of([&] { text_lookup(nums, "x"); }) == ErrorCode::KindMismatch);

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int t = 0; t < 50; ++t) {
    SemanticSpace s("n", 1, SemanticKind::Number);
    for (ItemId i = 0; i < 300; ++i) s.add(i, std::round(u(rng)));
    auto idx = NumericIndex::build(s);
    double lo = std::round(u(rng)), hi = lo + std::round(std::abs(u(rng)));
    std::vector<ItemId> want;
    for (const auto& [id, v] : s.members()) {
      if (std::get<double>(v) >= lo && std::get<double>(v) <= hi) want.push_back(id);
    }
    CHECK(idx.range(lo, hi) == want);
  }
}
