#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcu/combinatorics.hpp"

namespace rcu {

inline constexpr int kMaxRows = 4;
inline constexpr int kMaxCols = 4;

using EdgeMask = std::uint16_t;

struct SizeLimitError : std::length_error {
  using std::length_error::length_error;
};

// Bipartite graph on r row nodes and c column nodes; edge (i,j) is bit i*c+j.
// Labels, if present, say which global rows/columns the nodes stand for.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(int rows, int cols, EdgeMask edges = 0);
  // Labels are strictly increasing global indices; edge bits stay local (a*cols + b).
  static BipartiteGraph with_labels(std::vector<int> row_labels, std::vector<int> col_labels, EdgeMask edges);

  static BipartiteGraph complete(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  EdgeMask edges() const { return edges_; }
  int node_count() const { return rows_ + cols_; }
  int edge_count() const;
  bool has_edge(int i, int j) const { return (edges_ >> (i * cols_ + j)) & 1u; }

  bool labeled() const { return labeled_; }
  // Global index of local row i (i itself when unlabeled).
  int row_label(int i) const { return labeled_ ? row_labels_[i] : i; }
  int col_label(int j) const { return labeled_ ? col_labels_[j] : j; }
  const std::vector<int>& row_labels() const { return row_labels_; }
  const std::vector<int>& col_labels() const { return col_labels_; }

  // Phi G: edge (rp[i], cp[j]) iff G has edge (i, j). Labels are dropped.
  BipartiteGraph permuted(const SmallPerm& rp, const SmallPerm& cp) const;
  BipartiteGraph unlabeled() const { return BipartiteGraph(rows_, cols_, edges_); }

  std::string edges_hex() const;
  std::string describe() const;

  friend bool operator==(const BipartiteGraph& a, const BipartiteGraph& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.edges_ == b.edges_ &&
           a.labeled_ == b.labeled_ && a.row_labels_ == b.row_labels_ && a.col_labels_ == b.col_labels_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  EdgeMask edges_ = 0;
  bool labeled_ = false;
  std::vector<int> row_labels_;
  std::vector<int> col_labels_;
};

EdgeMask full_mask(int rows, int cols);
EdgeMask permute_mask(EdgeMask m, int rows, int cols, const SmallPerm& rp, const SmallPerm& cp);

BipartiteGraph canonical_form(const BipartiteGraph& g);
std::uint64_t automorphism_count(const BipartiteGraph& g);
bool is_connected(const BipartiteGraph& g);

struct GraphClass {
  BipartiteGraph representative;
  std::uint64_t aut_count = 1;
  bool connected = true;
  int class_id = 0;
};

// Classes of graphs with exactly r row and c column nodes, sorted by (edge count, mask).
std::vector<GraphClass> enumerate_gamma(int r, int c);

// Every F contained in g (node subsets, edges restricted to kept nodes), labeled by g's labels.
std::vector<BipartiteGraph> labeled_subgraphs(const BipartiteGraph& g);

// Subgraph of a (P,Q) node frame given by masks: a labeled graph without the
// size bookkeeping. Edge bits are indexed i*Q+j in the frame.
struct LatentSet {
  std::uint8_t rows = 0;
  std::uint8_t cols = 0;
  EdgeMask edges = 0;
  friend bool operator==(const LatentSet&, const LatentSet&) = default;
};

LatentSet to_latent_set(const BipartiteGraph& labeled, int frame_cols);
BipartiteGraph to_graph(const LatentSet& s, int frame_cols);
bool subset_of(const LatentSet& a, const LatentSet& b);
// All sub-latent-sets of s (the labeled subgraphs of the graph s describes).
std::vector<LatentSet> latent_subsets(const LatentSet& s, int frame_rows, int frame_cols);

class Catalog {
 public:
  Catalog(int max_rows = kMaxRows, int max_cols = kMaxCols);

  int max_rows() const { return max_rows_; }
  int max_cols() const { return max_cols_; }
  const std::vector<GraphClass>& classes(int r, int c) const;
  // All classes with (0,0) < (r,c) <= (p,q).
  std::vector<GraphClass> gamma_minus(int p, int q) const;
  const GraphClass& classify(const BipartiteGraph& g) const;
  std::vector<GraphClass> all() const;

 private:
  int max_rows_, max_cols_;
  std::vector<std::vector<GraphClass>> classes_;          // indexed r*(max_cols+1)+c
  std::vector<std::vector<std::uint16_t>> lookup_;        // mask -> position in classes_
};

struct PairCoincidence {
  std::uint64_t brute_force = 0;
  std::uint64_t closed_form = 0;
};

// Counts (i1,j1,i2,j2,Phi1,Phi2) with Phi1 G1 = Phi2 G2 by enumeration. aut_override
// replaces |Aut(G)| in the closed form when nonzero (negative-control hook).
PairCoincidence pair_coincidence_count(int m, int n, int p, int q, const GraphClass& g,
                                       std::uint64_t aut_override = 0);

}  // namespace rcu
