#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "gla/errors.hpp"
#include "gla/matrix.hpp"

namespace gla {

constexpr int kNoise = -1;

struct ClusterResult {
  std::vector<int> labels;  ///< cluster id per point, or kNoise
  int num_clusters = 0;
  std::size_t min_cluster_size = 0;
};

/// Distance to the k_core-th nearest neighbor of each point, self excluded.
inline std::vector<double> core_distances(const std::vector<Point2> &points,
                                          std::size_t k_core) {
  const std::size_t n = points.size();
  if (k_core < 1) throw ConfigError("neighbor count must be positive");
  if (n <= k_core) throw ConfigError("need more points than neighbors");
  std::vector<double> core(n);
  std::vector<double> dists;
  for (std::size_t i = 0; i < n; ++i) {
    dists.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dists.push_back(std::hypot(points[i][0] - points[j][0],
                                 points[i][1] - points[j][1]));
    }
    std::nth_element(dists.begin(), dists.begin() + (k_core - 1), dists.end());
    core[i] = dists[k_core - 1];
  }
  return core;
}

namespace detail {

struct MstEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 0.0;
};

inline double point_distance(const Point2 &p, const Point2 &q) {
  return std::hypot(p[0] - q[0], p[1] - q[1]);
}

/// Prim's MST over the implicit complete mutual-reachability graph
/// mr(a, b) = max(d(a, b), core[a], core[b]). O(K^2) time, O(K) memory.
inline std::vector<MstEdge> mst_edges(const std::vector<Point2> &points,
                                      const std::vector<double> &core) {
  const std::size_t n = points.size();
  std::vector<char> in_tree(n, 0);
  std::vector<double> best_w(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> best_from(n, 0);

  std::vector<MstEdge> edges;
  edges.reserve(n - 1);
  std::size_t last = 0;
  in_tree[0] = 1;
  for (std::size_t added = 1; added < n; ++added) {
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double mr = std::max({point_distance(points[last], points[j]),
                                  core[last], core[j]});
      if (mr < best_w[j]) {
        best_w[j] = mr;
        best_from[j] = last;
      }
    }
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_tree[j] && (next == n || best_w[j] < best_w[next])) next = j;
    }
    edges.push_back({best_from[next], next, best_w[next]});
    in_tree[next] = 1;
    last = next;
  }
  return edges;
}

/// Binary single-linkage merge tree. Nodes 0..n-1 are the points; node n+i is
/// the i-th merge. Built from MST edges sorted ascending with deterministic
/// tie-breaking.
struct MergeNode {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

inline std::vector<MergeNode> single_linkage(std::vector<MstEdge> edges,
                                             std::size_t n) {
  for (auto &e : edges)
    if (e.a > e.b) std::swap(e.a, e.b);
  std::sort(edges.begin(), edges.end(), [](const MstEdge &x, const MstEdge &y) {
    if (x.weight != y.weight) return x.weight < y.weight;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  std::vector<std::size_t> uf_parent(n);
  std::vector<std::size_t> comp_node(n);
  for (std::size_t i = 0; i < n; ++i) {
    uf_parent[i] = i;
    comp_node[i] = i;
  }
  auto find = [&](std::size_t x) {
    while (uf_parent[x] != x) {
      uf_parent[x] = uf_parent[uf_parent[x]];
      x = uf_parent[x];
    }
    return x;
  };

  std::vector<MergeNode> nodes(edges.size());
  auto node_size = [&](std::size_t id) {
    return id < n ? std::size_t{1} : nodes[id - n].size;
  };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::size_t ra = find(edges[i].a);
    const std::size_t rb = find(edges[i].b);
    nodes[i].left = comp_node[ra];
    nodes[i].right = comp_node[rb];
    nodes[i].distance = edges[i].weight;
    nodes[i].size = node_size(nodes[i].left) + node_size(nodes[i].right);
    uf_parent[ra] = rb;
    comp_node[rb] = n + i;
  }
  return nodes;
}

inline double lambda_of(double distance) {
  return distance > 0.0 ? 1.0 / distance : std::numeric_limits<double>::max();
}

/// Condensed cluster tree: descending the dendrogram, a split where both
/// sides hold at least min_cluster_size points divides the cluster in two;
/// smaller sides merely fall out of it as point departures; a split where
/// both sides are too small dissolves it.
struct CondensedTree {
  struct Cluster {
    int parent = -1;
    double lambda_birth = 0.0;
    double lambda_death = 0.0;
    double stability = 0.0;
    std::size_t birth_size = 0;
    std::vector<int> children;
  };
  std::vector<Cluster> clusters;       ///< [0] is the root
  std::vector<int> point_cluster;      ///< cluster each point departed from
  std::vector<double> point_lambda;    ///< lambda at departure
};

inline CondensedTree condense(const std::vector<MergeNode> &nodes,
                              std::size_t n, std::size_t min_cluster_size) {
  CondensedTree tree;
  tree.point_cluster.assign(n, 0);
  tree.point_lambda.assign(n, 0.0);
  tree.clusters.push_back({-1, 0.0, 0.0, 0.0, n, {}});

  auto node_size = [&](std::size_t id) {
    return id < n ? std::size_t{1} : nodes[id - n].size;
  };
  auto depart_subtree = [&](std::size_t id, int cluster, double lambda) {
    std::vector<std::size_t> stack{id};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      if (v < n) {
        tree.point_cluster[v] = cluster;
        tree.point_lambda[v] = lambda;
        tree.clusters[cluster].stability +=
            lambda - tree.clusters[cluster].lambda_birth;
      } else {
        stack.push_back(nodes[v - n].left);
        stack.push_back(nodes[v - n].right);
      }
    }
  };

  // Merges at exactly the same distance happen simultaneously (common here:
  // mutual reachability copies core distances into many pairs), so nested
  // equal-distance merges are flattened into one multiway split. This keeps
  // the hierarchy independent of edge-sort tie order.
  auto tied_parts = [&](std::size_t top) {
    std::vector<std::size_t> parts;
    std::vector<std::size_t> expand{top};
    const double d = nodes[top - n].distance;
    while (!expand.empty()) {
      const std::size_t v = expand.back();
      expand.pop_back();
      if (v >= n && nodes[v - n].distance == d) {
        expand.push_back(nodes[v - n].left);
        expand.push_back(nodes[v - n].right);
      } else {
        parts.push_back(v);
      }
    }
    return parts;
  };

  struct Item {
    std::size_t node;
    int cluster;
  };
  std::vector<Item> stack{{n + nodes.size() - 1, 0}};
  while (!stack.empty()) {
    auto [v, c] = stack.back();
    stack.pop_back();
    while (true) {
      const double lambda = lambda_of(nodes[v - n].distance);
      std::vector<std::size_t> big;
      std::size_t passed = 0;
      for (const std::size_t part : tied_parts(v)) {
        if (node_size(part) >= min_cluster_size) {
          big.push_back(part);
          passed += node_size(part);
        } else {
          depart_subtree(part, c, lambda);
        }
      }
      if (big.size() >= 2) {
        tree.clusters[c].lambda_death = lambda;
        tree.clusters[c].stability +=
            (lambda - tree.clusters[c].lambda_birth) *
            static_cast<double>(passed);
        for (const std::size_t part : big) {
          const int child = static_cast<int>(tree.clusters.size());
          tree.clusters.push_back({c, lambda, 0.0, 0.0, node_size(part), {}});
          tree.clusters[c].children.push_back(child);
          stack.push_back({part, child});
        }
        break;
      }
      if (big.size() == 1) {
        v = big.front();
        continue;
      }
      tree.clusters[c].lambda_death = lambda;
      break;
    }
  }
  return tree;
}

/// Excess-of-mass cluster extraction. The root competes only when it is the
/// whole tree (no split ever produced two viable children); in that case the
/// single cluster keeps every point.
inline std::vector<char> select_excess_of_mass(const CondensedTree &tree) {
  const std::size_t m = tree.clusters.size();
  std::vector<char> selected(m, 0);
  if (m == 1) {
    selected[0] = 1;
    return selected;
  }
  std::vector<double> subtree_stability(m, 0.0);
  for (std::size_t c = m; c-- > 0;) {
    const auto &cl = tree.clusters[c];
    if (cl.children.empty()) {
      subtree_stability[c] = cl.stability;
      selected[c] = 1;
      continue;
    }
    double child_sum = 0.0;
    for (const int ch : cl.children) child_sum += subtree_stability[ch];
    if (c != 0 && cl.stability >= child_sum) {
      selected[c] = 1;
      subtree_stability[c] = cl.stability;
    } else {
      selected[c] = 0;
      subtree_stability[c] = child_sum;
    }
  }
  // Keep only the highest selected cluster on each root-to-leaf path.
  std::vector<char> blocked(m, 0);
  for (std::size_t c = 1; c < m; ++c) {
    const int parent = tree.clusters[c].parent;
    blocked[c] = blocked[parent] | selected[parent];
    if (blocked[c]) selected[c] = 0;
  }
  return selected;
}

inline ClusterResult label_points(const CondensedTree &tree,
                                  const std::vector<char> &selected,
                                  std::size_t n,
                                  std::size_t min_cluster_size) {
  ClusterResult result;
  result.min_cluster_size = min_cluster_size;
  result.labels.assign(n, kNoise);

  std::vector<int> dense_id(tree.clusters.size(), kNoise);
  int next = 0;
  for (std::size_t c = 0; c < tree.clusters.size(); ++c)
    if (selected[c]) dense_id[c] = next++;
  result.num_clusters = next;

  for (std::size_t p = 0; p < n; ++p) {
    int c = tree.point_cluster[p];
    while (c >= 0 && !selected[c]) c = tree.clusters[c].parent;
    if (c >= 0) result.labels[p] = dense_id[c];
  }
  return result;
}

}  // namespace detail

/// HDBSCAN on 2D points: mutual-reachability MST, single-linkage dendrogram,
/// condensed tree, excess-of-mass extraction. Points in no selected cluster
/// are labeled kNoise. min_samples (the core-distance neighbor count)
/// defaults to min_cluster_size, capped at K-1.
inline ClusterResult hdbscan(const std::vector<Point2> &points,
                             std::size_t min_cluster_size,
                             std::size_t min_samples = 0) {
  const std::size_t n = points.size();
  if (n < 2) throw ConfigError("need at least two points");
  if (min_cluster_size < 2) throw ConfigError("min cluster size must be >= 2");

  if (n < min_cluster_size) {  // no cluster can form
    ClusterResult result;
    result.min_cluster_size = min_cluster_size;
    result.labels.assign(n, kNoise);
    return result;
  }

  std::size_t k_core = min_samples == 0 ? min_cluster_size : min_samples;
  k_core = std::min(k_core, n - 1);
  const std::vector<double> core = core_distances(points, k_core);
  const auto mst = detail::mst_edges(points, core);
  const auto dendrogram = detail::single_linkage(mst, n);
  const auto tree = detail::condense(dendrogram, n, min_cluster_size);
  const auto selected = detail::select_excess_of_mass(tree);
  return detail::label_points(tree, selected, n, min_cluster_size);
}

/// Window ids of noise-labeled points, ascending. These are the anomalies.
inline std::vector<int> outliers(const ClusterResult &result) {
  std::vector<int> ids;
  for (std::size_t i = 0; i < result.labels.size(); ++i)
    if (result.labels[i] == kNoise) ids.push_back(static_cast<int>(i));
  return ids;
}

}  // namespace gla
