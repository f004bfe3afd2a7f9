#include "polorient/graph.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "polorient/errors.h"
#include "polorient/rng.h"

namespace polorient {
namespace {

// Strictly-better threshold for modularity gains, in units of edge weight.
constexpr double kGainEpsilon = 1e-12;

// Working graph for one Louvain level. Self-loop weight counts twice toward
// the node degree, as in an adjacency matrix with A_ii = 2 * loop.
struct LevelGraph {
  std::vector<std::vector<Neighbor>> adjacency;  // no self entries
  std::vector<double> self_loop;
  std::vector<double> degree;
  double two_m = 0.0;

  std::size_t size() const { return adjacency.size(); }
};

LevelGraph from_interaction_graph(const InteractionGraph& g) {
  LevelGraph level;
  level.adjacency = g.adjacency();
  level.self_loop.assign(g.node_count(), 0.0);
  level.degree.resize(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) level.degree[i] = g.degree(i);
  level.two_m = 2.0 * g.total_weight();
  return level;
}

class LocalMover {
 public:
  LocalMover(const LevelGraph& graph, std::vector<std::size_t> community, double resolution)
      : graph_(graph),
        community_(std::move(community)),
        resolution_(resolution),
        total_(graph.size(), 0.0),
        members_(graph.size(), 0),
        link_weight_(graph.size(), 0.0),
        is_touched_(graph.size(), 0) {
    for (std::size_t i = 0; i < graph.size(); ++i) {
      total_[community_[i]] += graph.degree[i];
      ++members_[community_[i]];
    }
    for (std::size_t c = graph.size(); c-- > 0;) {
      if (members_[c] == 0) empty_.push_back(c);
    }
  }

  // Sweeps `order` until a full pass makes no move. Returns the move count.
  std::size_t run(const std::vector<std::size_t>& order) {
    std::size_t total_moves = 0;
    for (;;) {
      std::size_t moves = 0;
      for (auto node : order) moves += move_node(node);
      total_moves += moves;
      if (moves == 0) break;
    }
    return total_moves;
  }

  const std::vector<std::size_t>& community() const { return community_; }

 private:
  bool move_node(std::size_t node) {
    const std::size_t current = community_[node];
    const double k = graph_.degree[node];

    touched_.clear();
    touched_.push_back(current);
    is_touched_[current] = 1;
    for (const auto& nb : graph_.adjacency[node]) {
      const auto c = community_[nb.node];
      if (!is_touched_[c]) {
        is_touched_[c] = 1;
        touched_.push_back(c);
      }
      link_weight_[c] += nb.weight;
    }

    remove(node, current);
    auto gain = [&](std::size_t c) {
      return link_weight_[c] - resolution_ * total_[c] * k / graph_.two_m;
    };
    std::size_t best = current;
    double best_gain = gain(current);
    for (auto c : touched_) {
      if (c == current) continue;
      const double g = gain(c);
      if (g > best_gain + kGainEpsilon) {
        best = c;
        best_gain = g;
      }
    }
    // An isolated node gains exactly 0.
    if (best_gain < -kGainEpsilon && members_[current] > 0) {
      best = take_empty();
    }
    insert(node, best);

    for (auto c : touched_) {
      link_weight_[c] = 0.0;
      is_touched_[c] = 0;
    }
    return best != current;
  }

  // Entries in empty_ may have been refilled since they were pushed.
  std::size_t take_empty() {
    while (members_[empty_.back()] != 0) empty_.pop_back();
    const auto c = empty_.back();
    empty_.pop_back();
    return c;
  }

  void remove(std::size_t node, std::size_t c) {
    total_[c] -= graph_.degree[node];
    if (--members_[c] == 0) {
      total_[c] = 0.0;
      empty_.push_back(c);
    }
  }

  void insert(std::size_t node, std::size_t c) {
    ++members_[c];
    total_[c] += graph_.degree[node];
    community_[node] = c;
  }

  const LevelGraph& graph_;
  std::vector<std::size_t> community_;
  double resolution_;
  std::vector<double> total_;
  std::vector<std::size_t> members_;
  std::vector<double> link_weight_;
  std::vector<char> is_touched_;
  std::vector<std::size_t> touched_;
  std::vector<std::size_t> empty_;
};

// Renumbers community ids to 0..C-1 in order of first appearance.
std::size_t compact(std::vector<std::size_t>& community) {
  std::unordered_map<std::size_t, std::size_t> remap;
  for (auto& c : community) {
    auto [it, inserted] = remap.emplace(c, remap.size());
    c = it->second;
  }
  return remap.size();
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::size_t>& community,
                     std::size_t n_communities) {
  LevelGraph out;
  out.adjacency.resize(n_communities);
  out.self_loop.assign(n_communities, 0.0);
  out.degree.assign(n_communities, 0.0);
  out.two_m = g.two_m;
  std::vector<std::map<std::size_t, double>> links(n_communities);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ci = community[i];
    out.degree[ci] += g.degree[i];
    out.self_loop[ci] += g.self_loop[i];
    for (const auto& nb : g.adjacency[i]) {
      const auto cj = community[nb.node];
      if (ci == cj) {
        // Each internal edge is seen from both ends.
        out.self_loop[ci] += nb.weight / 2.0;
      } else {
        links[ci][cj] += nb.weight;
      }
    }
  }
  for (std::size_t c = 0; c < n_communities; ++c) {
    for (const auto& [d, w] : links[c]) out.adjacency[c].push_back({d, w});
  }
  return out;
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed, std::uint64_t level) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, level));
  rng.shuffle(order);
  return order;
}

std::string format_fixed6(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace

InteractionGraph::InteractionGraph(std::vector<std::string> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i - 1] < nodes_[i])) throw DataError("graph nodes must be sorted and unique");
  }
  for (auto& edge : edges_) {
    if (edge.u > edge.v) std::swap(edge.u, edge.v);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
  adjacency_.resize(nodes_.size());
  degree_.assign(nodes_.size(), 0.0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    if (edge.v >= nodes_.size()) throw DataError("edge endpoint out of range");
    if (edge.u == edge.v) throw DataError("self-loop on " + nodes_[edge.u]);
    if (!(edge.weight > 0.0)) throw DataError("edge weight must be positive");
    if (e > 0 && edges_[e - 1].u == edge.u && edges_[e - 1].v == edge.v) {
      throw DataError("parallel edge " + nodes_[edge.u] + " " + nodes_[edge.v]);
    }
    adjacency_[edge.u].push_back({edge.v, edge.weight});
    adjacency_[edge.v].push_back({edge.u, edge.weight});
    degree_[edge.u] += edge.weight;
    degree_[edge.v] += edge.weight;
    total_weight_ += edge.weight;
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

std::optional<std::size_t> InteractionGraph::index_of(const std::string& name) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), name);
  if (it == nodes_.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

InteractionGraph build_interaction_graph(const std::vector<Tweet>& tweets, EdgeWeighting weighting) {
  std::map<std::pair<std::string, std::string>, double> pairs;
  auto add = [&](const std::string& a, const std::string& b) {
    if (a == b) return;
    auto key = a < b ? std::pair{a, b} : std::pair{b, a};
    pairs[key] += 1.0;
  };
  for (const auto& t : tweets) {
    if (t.retweet_of) add(t.author_screen_name, *t.retweet_of);
    for (const auto& m : t.mentions) add(t.author_screen_name, m);
  }
  std::set<std::string> names;
  for (const auto& [key, w] : pairs) {
    names.insert(key.first);
    names.insert(key.second);
  }
  std::vector<std::string> nodes(names.begin(), names.end());
  auto index = [&](const std::string& s) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), s) - nodes.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [key, w] : pairs) {
    edges.push_back({index(key.first), index(key.second),
                     weighting == EdgeWeighting::kUnweighted ? 1.0 : w});
  }
  return InteractionGraph(std::move(nodes), std::move(edges));
}

double modularity(const InteractionGraph& graph, const std::vector<std::size_t>& assignment,
                  double resolution) {
  if (assignment.size() != graph.node_count()) {
    throw DataError("assignment covers " + std::to_string(assignment.size()) + " of " +
                    std::to_string(graph.node_count()) + " nodes");
  }
  if (graph.edge_count() == 0) throw DataError("modularity is undefined on a graph without edges");
  const double m = graph.total_weight();
  std::map<std::size_t, double> internal;
  std::map<std::size_t, double> degree_sum;
  for (const auto& e : graph.edges()) {
    if (assignment[e.u] == assignment[e.v]) internal[assignment[e.u]] += e.weight;
  }
  for (std::size_t i = 0; i < graph.node_count(); ++i) degree_sum[assignment[i]] += graph.degree(i);
  double q = 0.0;
  for (const auto& [c, d] : degree_sum) {
    const double frac = d / (2.0 * m);
    auto it = internal.find(c);
    q += (it == internal.end() ? 0.0 : it->second / m) - resolution * frac * frac;
  }
  return q;
}

std::vector<std::size_t> Partition::community_sizes() const {
  std::vector<std::size_t> sizes(community_count, 0);
  for (auto c : community) ++sizes[c];
  return sizes;
}

std::map<std::string, std::size_t> Partition::as_map() const {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) out.emplace(nodes[i], community[i]);
  return out;
}

Partition make_partition(const InteractionGraph& graph, const std::vector<std::size_t>& assignment) {
  if (assignment.size() != graph.node_count()) throw DataError("assignment does not cover the graph");
  // Order communities by (size desc, first member asc).
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> stats;  // id -> (size, first)
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    auto [it, inserted] = stats.emplace(assignment[i], std::pair{0, i});
    ++it->second.first;
  }
  std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> ranked(stats.begin(), stats.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) return a.second.first > b.second.first;
    return a.second.second < b.second.second;
  });
  std::map<std::size_t, std::size_t> dense;
  for (std::size_t r = 0; r < ranked.size(); ++r) dense[ranked[r].first] = r;

  Partition p;
  p.nodes = graph.nodes();
  p.community.reserve(assignment.size());
  for (auto c : assignment) p.community.push_back(dense[c]);
  p.community_count = ranked.size();
  p.modularity_q = modularity(graph, p.community);
  return p;
}

Partition louvain(const InteractionGraph& graph, const LouvainOptions& options) {
  if (graph.edge_count() == 0) throw DataError("louvain needs a graph with at least one edge");
  if (!(options.resolution > 0.0)) throw ConfigError("resolution must be positive");

  LevelGraph level = from_interaction_graph(graph);
  // membership[i] = community of original node i at the current level.
  std::vector<std::size_t> membership(graph.node_count());
  std::iota(membership.begin(), membership.end(), 0);

  for (std::uint64_t depth = 0;; ++depth) {
    std::vector<std::size_t> singletons(level.size());
    std::iota(singletons.begin(), singletons.end(), 0);
    LocalMover mover(level, std::move(singletons), options.resolution);
    const auto moves = mover.run(shuffled_order(level.size(), options.rng_seed, depth));
    if (moves == 0) break;
    auto community = mover.community();
    const auto n_communities = compact(community);
    for (auto& m : membership) m = community[m];
    if (n_communities == level.size()) break;
    level = aggregate(level, community, n_communities);
  }

  // Node-level polish on the input graph.
  const LevelGraph base = from_interaction_graph(graph);
  LocalMover polish(base, membership, options.resolution);
  polish.run(shuffled_order(base.size(), options.rng_seed, 0xfeedULL));
  return make_partition(graph, polish.community());
}

CommunityLabeling label_communities(const Partition& partition,
                                    const std::map<std::string, Label>& known,
                                    double min_size_fraction) {
  if (!(min_size_fraction >= 0.0 && min_size_fraction <= 1.0)) {
    throw ConfigError("min_size_fraction must lie in [0, 1]");
  }
  const auto sizes = partition.community_sizes();
  const auto n = static_cast<double>(partition.nodes.size());
  std::vector<std::map<Label, std::size_t>> votes(partition.community_count);
  std::size_t known_in_graph = 0;
  std::size_t known_in_eligible = 0;
  for (std::size_t i = 0; i < partition.nodes.size(); ++i) {
    auto it = known.find(partition.nodes[i]);
    if (it == known.end() || !is_party(it->second)) continue;
    ++known_in_graph;
    const auto c = partition.community[i];
    if (static_cast<double>(sizes[c]) >= min_size_fraction * n) ++known_in_eligible;
    ++votes[c][it->second];
  }
  if (known_in_graph == 0) throw DataError("no known-party accounts appear in the graph");
  if (known_in_eligible == 0) {
    throw DataError("no known-party account lies in a community above the size threshold");
  }

  CommunityLabeling out;
  out.min_size_fraction = min_size_fraction;
  out.labels.resize(partition.community_count);
  for (std::size_t c = 0; c < partition.community_count; ++c) {
    if (static_cast<double>(sizes[c]) < min_size_fraction * n) continue;
    std::optional<Label> best;
    std::size_t best_votes = 0;
    bool tie = false;
    for (const auto& [party, count] : votes[c]) {
      if (count > best_votes) {
        best = party;
        best_votes = count;
        tie = false;
      } else if (count == best_votes) {
        tie = true;
      }
    }
    if (!tie) out.labels[c] = best;
  }
  return out;
}

CommunityEval community_classify(const Partition& partition, const CommunityLabeling& labeling,
                                 const std::map<std::string, Label>& truth) {
  if (labeling.labels.size() != partition.community_count) {
    throw DataError("labeling does not match the partition");
  }
  const auto index = partition.as_map();
  CommunityEval out;
  std::vector<std::pair<Label, Label>> pairs;  // (true, predicted)
  for (const auto& [user, party] : truth) {
    if (!is_party(party)) continue;
    ++out.truth_users;
    auto it = index.find(user);
    if (it == index.end()) {
      ++out.absent_users;
      continue;
    }
    const auto& predicted = labeling.labels[it->second];
    if (!predicted) {
      ++out.unlabeled_users;
      continue;
    }
    pairs.emplace_back(party, *predicted);
  }
  if (pairs.empty()) throw DataError("no ground-truth user falls in a labeled community");
  out.evaluated_users = pairs.size();
  out.coverage = static_cast<double>(out.evaluated_users) / static_cast<double>(out.truth_users);

  // Every party is reported, absent ones with zero rows.
  const std::vector<Label> classes(kParties.begin(), kParties.end());
  std::vector<std::string> names;
  for (auto l : classes) names.emplace_back(to_string(l));
  ConfusionMatrix confusion(classes.size(), std::vector<std::int64_t>(classes.size(), 0));
  auto pos = [&](Label l) {
    return static_cast<std::size_t>(std::find(classes.begin(), classes.end(), l) - classes.begin());
  };
  for (const auto& [t, p] : pairs) ++confusion[pos(t)][pos(p)];
  out.report = eval_metrics(confusion, names);
  out.report.protocol = "community labeling";
  return out;
}

std::string edge_list_text(const InteractionGraph& graph) {
  std::string out;
  for (const auto& e : graph.edges()) {
    out += graph.nodes()[e.u];
    out += ' ';
    out += graph.nodes()[e.v];
    out += '\n';
  }
  return out;
}

std::string partition_text(const Partition& partition) {
  std::string out = "modularity " + format_fixed6(partition.modularity_q) + "\n";
  for (std::size_t i = 0; i < partition.nodes.size(); ++i) {
    out += partition.nodes[i];
    out += ' ';
    out += std::to_string(partition.community[i]);
    out += '\n';
  }
  return out;
}

}  // namespace polorient
