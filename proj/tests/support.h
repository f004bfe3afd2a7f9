#pragma once
// Shared fixtures and oracles for the test binaries.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "polorient/classifier.h"
#include "polorient/graph.h"
#include "polorient/rng.h"

namespace testsupport {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("polorient-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string node_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "n%05zu", i);
  return buf;
}

struct PlantedGraph {
  polorient::InteractionGraph graph;
  std::vector<std::size_t> block;  // per node index
};

// Stochastic block model with equal blocks. Node names sort in index order.
inline PlantedGraph planted_partition(std::size_t blocks, std::size_t block_size, double p_in,
                                      double p_out, std::uint64_t seed) {
  const std::size_t n = blocks * block_size;
  polorient::Rng rng(seed);
  std::vector<std::string> nodes;
  std::vector<std::size_t> block;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back(node_name(i));
    block.push_back(i / block_size);
  }
  std::vector<polorient::Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (rng.bernoulli(block[u] == block[v] ? p_in : p_out)) edges.push_back({u, v, 1.0});
    }
  }
  return {polorient::InteractionGraph(nodes, edges), block};
}

// Sparse planted graph for large n: each node draws ~deg_in intra-block and
// ~deg_out cross-block partners.
inline PlantedGraph sparse_planted(std::size_t blocks, std::size_t block_size, std::size_t deg_in,
                                   std::size_t deg_out, std::uint64_t seed) {
  const std::size_t n = blocks * block_size;
  polorient::Rng rng(seed);
  std::vector<std::string> nodes;
  std::vector<std::size_t> block;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back(node_name(i));
    block.push_back(i / block_size);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t k = 0; k < deg_in; ++k) {
      std::size_t v = block[u] * block_size + rng.uniform_index(block_size);
      if (v != u) pairs.emplace_back(std::min(u, v), std::max(u, v));
    }
    for (std::size_t k = 0; k < deg_out; ++k) {
      std::size_t v = rng.uniform_index(n);
      if (v != u) pairs.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<polorient::Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v, 1.0});
  return {polorient::InteractionGraph(nodes, edges), block};
}

// Fraction of nodes whose community maps to their block under the best
// one-to-one community/block matching (exact, DP over block subsets).
inline double best_match_agreement(const std::vector<std::size_t>& community,
                                   const std::vector<std::size_t>& block) {
  const std::size_t nc = *std::max_element(community.begin(), community.end()) + 1;
  const std::size_t nb = *std::max_element(block.begin(), block.end()) + 1;
  std::vector<std::vector<std::size_t>> overlap(nc, std::vector<std::size_t>(nb, 0));
  for (std::size_t i = 0; i < community.size(); ++i) ++overlap[community[i]][block[i]];
  const std::size_t masks = std::size_t{1} << nb;
  std::vector<long> best(masks, -1);
  best[0] = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<long> next = best;
    for (std::size_t m = 0; m < masks; ++m) {
      if (best[m] < 0) continue;
      for (std::size_t b = 0; b < nb; ++b) {
        if (m & (std::size_t{1} << b)) continue;
        const auto mm = m | (std::size_t{1} << b);
        next[mm] = std::max(next[mm], best[m] + static_cast<long>(overlap[c][b]));
      }
    }
    best = std::move(next);
  }
  return static_cast<double>(*std::max_element(best.begin(), best.end())) /
         static_cast<double>(community.size());
}

inline double normal(polorient::Rng& rng) {
  // Box-Muller; avoids std::normal_distribution's library-specific output.
  double u1 = rng.uniform01();
  while (u1 <= 0.0) u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

struct Blobs {
  polorient::FeatureRows rows;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> means;
};

// Isotropic unit-variance Gaussian blobs with means `separation` apart on
// distinct axes.
inline Blobs gaussian_blobs(std::size_t per_class, std::size_t dims, double separation, std::uint64_t seed) {
  const std::vector<std::string> names = {"AAP", "BJP", "CONG"};
  polorient::Rng rng(seed);
  Blobs out;
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::vector<double> mean(dims, 0.0);
    mean[c % dims] = separation;
    out.means.push_back(mean);
  }
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      std::vector<double> row(dims);
      for (std::size_t d = 0; d < dims; ++d) row[d] = out.means[c][d] + normal(rng);
      out.rows.push_back(std::move(row));
      out.labels.push_back(names[c]);
    }
  }
  return out;
}

// Training accuracy of assigning each row to the nearest true class mean.
inline double nearest_centroid_accuracy(const Blobs& blobs) {
  const std::vector<std::string> names = {"AAP", "BJP", "CONG"};
  std::size_t correct = 0;
  for (std::size_t i = 0; i < blobs.rows.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < blobs.means.size(); ++c) {
      double d = 0.0;
      for (std::size_t k = 0; k < blobs.rows[i].size(); ++k) {
        d += (blobs.rows[i][k] - blobs.means[c][k]) * (blobs.rows[i][k] - blobs.means[c][k]);
      }
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    correct += names[arg] == blobs.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(blobs.rows.size());
}

}  // namespace testsupport
