#pragma once

#include <random>
#include <vector>

#include "blobgraph/index/semantic_space.hpp"

namespace blobgraph::testing {

// Isotropic unit-variance Gaussian clusters whose centres are drawn from
// N(0, spread^2) per coordinate. Item i belongs to cluster i % clusters.
struct ClusteredData {
  std::vector<std::vector<float>> centres;
  SemanticSpace space;

  ClusteredData(std::size_t clusters, std::size_t n, std::uint32_t dim, float spread, std::uint64_t seed)
      : space("vec", 1, SemanticKind::Vector, dim) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> n01;
    centres.assign(clusters, std::vector<float>(dim));
    for (auto& c : centres)
      for (auto& x : c) x = n01(rng) * spread;
    for (std::size_t i = 0; i < n; ++i) space.add(i, sample(rng, i % clusters));
  }

  std::vector<float> sample(std::mt19937_64& rng, std::size_t cluster) const {
    std::normal_distribution<float> n01;
    std::vector<float> v(centres[cluster]);
    for (auto& x : v) x += n01(rng);
    return v;
  }

  // A fresh draw from a uniformly chosen cluster.
  std::vector<float> query(std::mt19937_64& rng) const {
    return sample(rng, std::uniform_int_distribution<std::size_t>(0, centres.size() - 1)(rng));
  }
};

}  // namespace blobgraph::testing
