#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polorient/classifier.h"
#include "polorient/corpus.h"
#include "polorient/labels.h"

namespace polorient {

struct Neighbor {
  std::size_t node;
  double weight;
};

struct Edge {
  std::size_t u;  // u < v
  std::size_t v;
  double weight;
};

// Undirected simple graph over lowercase screen names. Nodes are sorted, so
// node index order is lexicographic name order.
class InteractionGraph {
 public:
  InteractionGraph() = default;
  // Throws DataError on self-loops, duplicate edges, unsorted or duplicate
  // nodes, or nonpositive weights.
  InteractionGraph(std::vector<std::string> nodes, std::vector<Edge> edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::vector<Neighbor>>& adjacency() const { return adjacency_; }
  double degree(std::size_t node) const { return degree_[node]; }
  double total_weight() const { return total_weight_; }  // m for unweighted graphs
  std::optional<std::size_t> index_of(const std::string& name) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> degree_;
  double total_weight_ = 0.0;
};

enum class EdgeWeighting {
  kUnweighted,        // one unit edge however often a pair interacts
  kInteractionCount,  // weight = number of retweet/mention events
};

// An edge joins a tweet's author with its retweet target and with every
// mentioned account. Repeats collapse into one edge; self-pairs are skipped.
InteractionGraph build_interaction_graph(const std::vector<Tweet>& tweets,
                                         EdgeWeighting weighting = EdgeWeighting::kUnweighted);

// Newman modularity sum_c [ e_c/m - resolution * (d_c/2m)^2 ].
// Throws DataError when the assignment size mismatches or the graph has no edges.
double modularity(const InteractionGraph& graph, const std::vector<std::size_t>& assignment,
                  double resolution = 1.0);

struct Partition {
  std::vector<std::string> nodes;
  std::vector<std::size_t> community;  // per node, dense ids
  std::size_t community_count = 0;
  double modularity_q = 0.0;

  std::vector<std::size_t> community_sizes() const;
  std::map<std::string, std::size_t> as_map() const;
};

// Builds a Partition with dense ids renumbered by decreasing community size
// (ties by smallest member index) and its modularity.
Partition make_partition(const InteractionGraph& graph, const std::vector<std::size_t>& assignment);

struct LouvainOptions {
  std::uint64_t rng_seed = 0;
  double resolution = 1.0;
};

// Multi-level modularity maximization: local moving of single nodes to the
// best neighboring community, then community aggregation, repeated until no
// move improves modularity. A final node-level pass on the input graph
// leaves the result locally optimal under single-node moves. Node visit
// order is a seeded shuffle fixed per level.
Partition louvain(const InteractionGraph& graph, const LouvainOptions& options = {});

struct CommunityLabeling {
  std::vector<std::optional<Label>> labels;  // per community; empty = UNLABELED
  double min_size_fraction = 0.0;
};

// Plurality party of the known members of each community whose size is at
// least min_size_fraction of all nodes. Ties, unknown-only and undersized
// communities stay unlabeled.
CommunityLabeling label_communities(const Partition& partition,
                                    const std::map<std::string, Label>& known,
                                    double min_size_fraction = 0.0005);

struct CommunityEval {
  EvalReport report;
  std::size_t truth_users = 0;
  std::size_t absent_users = 0;     // not in the graph
  std::size_t unlabeled_users = 0;  // in an unlabeled community
  std::size_t evaluated_users = 0;
  double coverage = 0.0;  // evaluated / truth
};

CommunityEval community_classify(const Partition& partition, const CommunityLabeling& labeling,
                                 const std::map<std::string, Label>& truth);

// "nodeA nodeB" per line, lexicographic within and across lines.
std::string edge_list_text(const InteractionGraph& graph);
// Header "modularity <Q, 6 decimals>", then "node community_id" per node.
std::string partition_text(const Partition& partition);

}  // namespace polorient
