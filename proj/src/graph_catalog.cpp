#include "rcu/graph_catalog.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rcu {

namespace {

void check_size(int rows, int cols) {
  if (rows < 0 || cols < 0 || rows > kMaxRows || cols > kMaxCols)
    throw SizeLimitError("bipartite graph size " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " outside the 4x4 limit");
}

bool strictly_increasing(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1]) return false;
  return true;
}

}  // namespace

EdgeMask full_mask(int rows, int cols) {
  int bits = rows * cols;
  return bits >= 16 ? EdgeMask(0xffff) : static_cast<EdgeMask>((1u << bits) - 1u);
}

BipartiteGraph::BipartiteGraph(int rows, int cols, EdgeMask edges) : rows_(rows), cols_(cols), edges_(edges) {
  check_size(rows, cols);
  if (edges & ~full_mask(rows, cols)) throw std::invalid_argument("edge bit outside the r x c grid");
}

BipartiteGraph BipartiteGraph::with_labels(std::vector<int> row_labels, std::vector<int> col_labels, EdgeMask edges) {
  BipartiteGraph g(static_cast<int>(row_labels.size()), static_cast<int>(col_labels.size()), edges);
  if (!strictly_increasing(row_labels) || !strictly_increasing(col_labels))
    throw std::invalid_argument("node labels must be strictly increasing");
  for (int l : row_labels)
    if (l < 0) throw std::invalid_argument("negative row label");
  for (int l : col_labels)
    if (l < 0) throw std::invalid_argument("negative column label");
  g.labeled_ = true;
  g.row_labels_ = std::move(row_labels);
  g.col_labels_ = std::move(col_labels);
  return g;
}

BipartiteGraph BipartiteGraph::complete(int rows, int cols) {
  check_size(rows, cols);
  return BipartiteGraph(rows, cols, full_mask(rows, cols));
}

int BipartiteGraph::edge_count() const { return std::popcount(static_cast<unsigned>(edges_)); }

EdgeMask permute_mask(EdgeMask m, int rows, int cols, const SmallPerm& rp, const SmallPerm& cp) {
  EdgeMask out = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if ((m >> (i * cols + j)) & 1u) out |= static_cast<EdgeMask>(1u << (rp[i] * cols + cp[j]));
  return out;
}

BipartiteGraph BipartiteGraph::permuted(const SmallPerm& rp, const SmallPerm& cp) const {
  return BipartiteGraph(rows_, cols_, permute_mask(edges_, rows_, cols_, rp, cp));
}

std::string BipartiteGraph::edges_hex() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%x", static_cast<unsigned>(edges_));
  return buf;
}

std::string BipartiteGraph::describe() const {
  std::ostringstream os;
  // 1-based labels, as in the notation (i, j)
  os << "rows{";
  for (int i = 0; i < rows_; ++i) os << (i ? "," : "") << row_label(i) + 1;
  os << "} cols{";
  for (int j = 0; j < cols_; ++j) os << (j ? "," : "") << col_label(j) + 1;
  os << "} edges{";
  bool first = true;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (has_edge(i, j)) {
        os << (first ? "" : ",") << "(" << row_label(i) + 1 << "," << col_label(j) + 1 << ")";
        first = false;
      }
  os << "}";
  return os.str();
}

BipartiteGraph canonical_form(const BipartiteGraph& g) {
  const int r = g.rows(), c = g.cols();
  EdgeMask best = g.edges();
  auto rps = permutations(r), cps = permutations(c);
  for (const auto& rp : rps)
    for (const auto& cp : cps) best = std::min(best, permute_mask(g.edges(), r, c, rp, cp));
  return BipartiteGraph(r, c, best);
}

std::uint64_t automorphism_count(const BipartiteGraph& g) {
  const int r = g.rows(), c = g.cols();
  std::uint64_t count = 0;
  auto rps = permutations(r), cps = permutations(c);
  for (const auto& rp : rps)
    for (const auto& cp : cps)
      if (permute_mask(g.edges(), r, c, rp, cp) == g.edges()) ++count;
  return count;
}

bool is_connected(const BipartiteGraph& g) {
  const int r = g.rows(), c = g.cols();
  const int nodes = r + c;
  if (nodes <= 1) return true;
  // nodes 0..r-1 are rows, r..r+c-1 columns
  unsigned seen = 1u, frontier = 1u;
  while (frontier) {
    unsigned next = 0;
    for (int v = 0; v < nodes; ++v) {
      if (!((frontier >> v) & 1u)) continue;
      if (v < r) {
        for (int j = 0; j < c; ++j)
          if (g.has_edge(v, j)) next |= 1u << (r + j);
      } else {
        for (int i = 0; i < r; ++i)
          if (g.has_edge(i, v - r)) next |= 1u << i;
      }
    }
    frontier = next & ~seen;
    seen |= next;
  }
  return seen == (1u << nodes) - 1u;
}

std::vector<GraphClass> enumerate_gamma(int r, int c) {
  check_size(r, c);
  const int bits = r * c;
  const std::uint32_t total = 1u << bits;
  std::vector<char> visited(total, 0);
  auto rps = permutations(r), cps = permutations(c);
  std::vector<GraphClass> out;
  // Scanning masks upward, the first unvisited mask of an orbit is its minimum.
  for (std::uint32_t m = 0; m < total; ++m) {
    if (visited[m]) continue;
    std::uint64_t stabilizer = 0;
    for (const auto& rp : rps)
      for (const auto& cp : cps) {
        EdgeMask pm = permute_mask(static_cast<EdgeMask>(m), r, c, rp, cp);
        visited[pm] = 1;
        if (pm == m) ++stabilizer;
      }
    GraphClass gc;
    gc.representative = BipartiteGraph(r, c, static_cast<EdgeMask>(m));
    gc.aut_count = stabilizer;
    gc.connected = is_connected(gc.representative);
    out.push_back(gc);
  }
  std::stable_sort(out.begin(), out.end(), [](const GraphClass& a, const GraphClass& b) {
    int ea = a.representative.edge_count(), eb = b.representative.edge_count();
    if (ea != eb) return ea < eb;
    return a.representative.edges() < b.representative.edges();
  });
  for (std::size_t k = 0; k < out.size(); ++k) out[k].class_id = static_cast<int>(k);
  return out;
}

std::vector<BipartiteGraph> labeled_subgraphs(const BipartiteGraph& g) {
  const int r = g.rows(), c = g.cols();
  std::vector<BipartiteGraph> out;
  for (unsigned rs = 0; rs < (1u << r); ++rs)
    for (unsigned cs = 0; cs < (1u << c); ++cs) {
      std::vector<int> rl, cl, rloc, cloc;
      for (int i = 0; i < r; ++i)
        if ((rs >> i) & 1u) {
          rl.push_back(g.row_label(i));
          rloc.push_back(i);
        }
      for (int j = 0; j < c; ++j)
        if ((cs >> j) & 1u) {
          cl.push_back(g.col_label(j));
          cloc.push_back(j);
        }
      const int rr = static_cast<int>(rloc.size()), cc = static_cast<int>(cloc.size());
      // edges of g that survive on the kept nodes, in the subgraph's own layout
      EdgeMask avail = 0;
      for (int a = 0; a < rr; ++a)
        for (int b = 0; b < cc; ++b)
          if (g.has_edge(rloc[a], cloc[b])) avail |= static_cast<EdgeMask>(1u << (a * cc + b));
      // enumerate submasks of avail, including 0
      EdgeMask sub = avail;
      while (true) {
        out.push_back(BipartiteGraph::with_labels(rl, cl, sub));
        if (sub == 0) break;
        sub = static_cast<EdgeMask>((sub - 1) & avail);
      }
    }
  return out;
}

LatentSet to_latent_set(const BipartiteGraph& g, int frame_cols) {
  LatentSet s;
  for (int i = 0; i < g.rows(); ++i) s.rows |= static_cast<std::uint8_t>(1u << g.row_label(i));
  for (int j = 0; j < g.cols(); ++j) s.cols |= static_cast<std::uint8_t>(1u << g.col_label(j));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      if (g.has_edge(i, j)) s.edges |= static_cast<EdgeMask>(1u << (g.row_label(i) * frame_cols + g.col_label(j)));
  return s;
}

BipartiteGraph to_graph(const LatentSet& s, int frame_cols) {
  std::vector<int> rl, cl;
  for (int i = 0; i < 8; ++i)
    if ((s.rows >> i) & 1u) rl.push_back(i);
  for (int j = 0; j < 8; ++j)
    if ((s.cols >> j) & 1u) cl.push_back(j);
  EdgeMask e = 0;
  const int cc = static_cast<int>(cl.size());
  for (std::size_t a = 0; a < rl.size(); ++a)
    for (std::size_t b = 0; b < cl.size(); ++b)
      if ((s.edges >> (rl[a] * frame_cols + cl[b])) & 1u) e |= static_cast<EdgeMask>(1u << (a * cc + b));
  return BipartiteGraph::with_labels(rl, cl, e);
}

bool subset_of(const LatentSet& a, const LatentSet& b) {
  return (a.rows & ~b.rows) == 0 && (a.cols & ~b.cols) == 0 && (a.edges & ~b.edges) == 0;
}

std::vector<LatentSet> latent_subsets(const LatentSet& s, int frame_rows, int frame_cols) {
  std::vector<LatentSet> out;
  std::uint8_t rs = s.rows;
  while (true) {
    std::uint8_t cs = s.cols;
    while (true) {
      EdgeMask avail = 0;
      for (int i = 0; i < frame_rows; ++i)
        for (int j = 0; j < frame_cols; ++j)
          if (((rs >> i) & 1u) && ((cs >> j) & 1u)) avail |= static_cast<EdgeMask>(1u << (i * frame_cols + j));
      avail &= s.edges;
      EdgeMask sub = avail;
      while (true) {
        out.push_back({rs, cs, sub});
        if (sub == 0) break;
        sub = static_cast<EdgeMask>((sub - 1) & avail);
      }
      if (cs == 0) break;
      cs = static_cast<std::uint8_t>((cs - 1) & s.cols);
    }
    if (rs == 0) break;
    rs = static_cast<std::uint8_t>((rs - 1) & s.rows);
  }
  return out;
}

Catalog::Catalog(int max_rows, int max_cols) : max_rows_(max_rows), max_cols_(max_cols) {
  check_size(max_rows, max_cols);
  classes_.resize((max_rows + 1) * (max_cols + 1));
  lookup_.resize(classes_.size());
  int next_id = 0;
  for (int r = 0; r <= max_rows; ++r)
    for (int c = 0; c <= max_cols; ++c) {
      auto& cls = classes_[r * (max_cols + 1) + c];
      cls = enumerate_gamma(r, c);
      auto& table = lookup_[r * (max_cols + 1) + c];
      table.assign(std::size_t(1) << (r * c), 0);
      auto rps = permutations(r), cps = permutations(c);
      for (std::size_t k = 0; k < cls.size(); ++k) {
        cls[k].class_id = next_id++;
        EdgeMask rep = cls[k].representative.edges();
        for (const auto& rp : rps)
          for (const auto& cp : cps) table[permute_mask(rep, r, c, rp, cp)] = static_cast<std::uint16_t>(k);
      }
    }
}

const std::vector<GraphClass>& Catalog::classes(int r, int c) const {
  if (r < 0 || c < 0 || r > max_rows_ || c > max_cols_) throw SizeLimitError("catalog does not cover this size");
  return classes_[r * (max_cols_ + 1) + c];
}

std::vector<GraphClass> Catalog::gamma_minus(int p, int q) const {
  std::vector<GraphClass> out;
  for (int r = 0; r <= p; ++r)
    for (int c = 0; c <= q; ++c) {
      if (r == 0 && c == 0) continue;
      const auto& cls = classes(r, c);
      out.insert(out.end(), cls.begin(), cls.end());
    }
  return out;
}

const GraphClass& Catalog::classify(const BipartiteGraph& g) const {
  const auto& cls = classes(g.rows(), g.cols());
  return cls[lookup_[g.rows() * (max_cols_ + 1) + g.cols()][g.edges()]];
}

std::vector<GraphClass> Catalog::all() const {
  std::vector<GraphClass> out;
  for (const auto& v : classes_) out.insert(out.end(), v.begin(), v.end());
  return out;
}

namespace {

// Labeled graph with global node indices: rows/cols as masks over [m], [n].
struct GlobalGraph {
  std::uint32_t rows = 0, cols = 0;
  std::uint64_t edges = 0;
  bool operator==(const GlobalGraph&) const = default;
};

}  // namespace

PairCoincidence pair_coincidence_count(int m, int n, int p, int q, const GraphClass& gc, std::uint64_t aut_override) {
  const BipartiteGraph& g = gc.representative;
  const int r = g.rows(), c = g.cols();
  if (m > 6 || n > 6) throw std::invalid_argument("pair_coincidence_count: m, n must be at most 6");
  if (p > m || q > n || p < 0 || q < 0) throw std::invalid_argument("pair_coincidence_count: need p <= m, q <= n");
  if (r > p || c > q) throw std::invalid_argument("pair_coincidence_count: graph does not fit in K_{p,q}");
  if (p > kMaxRows || q > kMaxCols) throw SizeLimitError("pair_coincidence_count: p, q beyond limits");

  const double work = std::pow(double(binomial(m, p)) * double(binomial(n, q)) * double(factorial(p)) * double(factorial(q)), 2.0);
  if (work > 2e9) throw std::length_error("pair_coincidence_count: combinatorial budget exceeded");

  auto ibs = combinations(m, p), jbs = combinations(n, q);
  auto prs = permutations(p), pcs = permutations(q);
  auto grs = permutations(r), gcs = permutations(c);
  auto rpos = combinations(p, r), cpos = combinations(q, c);

  // Both families place a copy of G inside K_{ib,jb}; the second one varies the
  // placement and the relabeling of G with the index pair.
  auto family = [&](int k) {
    std::vector<GlobalGraph> out;
    std::size_t pair_index = 0;
    for (const auto& ib : ibs)
      for (const auto& jb : jbs) {
        std::size_t sel = k == 1 ? 0 : pair_index * 7 + 3;
        const auto& rp_local = rpos[sel % rpos.size()];
        const auto& cp_local = cpos[(sel / rpos.size()) % cpos.size()];
        const auto& gr = grs[(sel * 5) % grs.size()];
        const auto& gcp = gcs[(sel * 3 + 1) % gcs.size()];
        // local copy: G row a sits at frame row rp_local[gr[a]] of K_{p,q}
        for (const auto& phr : prs)
          for (const auto& phc : pcs) {
            GlobalGraph gg;
            for (int a = 0; a < r; ++a) gg.rows |= 1u << ib[phr[rp_local[gr[a]]]];
            for (int b = 0; b < c; ++b) gg.cols |= 1u << jb[phc[cp_local[gcp[b]]]];
            for (int a = 0; a < r; ++a)
              for (int b = 0; b < c; ++b)
                if (g.has_edge(a, b)) {
                  int gi = ib[phr[rp_local[gr[a]]]], gj = jb[phc[cp_local[gcp[b]]]];
                  gg.edges |= std::uint64_t(1) << (gi * n + gj);
                }
            out.push_back(gg);
          }
        ++pair_index;
      }
    return out;
  };

  auto f1 = family(1), f2 = family(2);
  PairCoincidence res;
  for (const auto& a : f1)
    for (const auto& b : f2)
      if (a == b) ++res.brute_force;

  const std::uint64_t aut = aut_override ? aut_override : gc.aut_count;
  const std::uint64_t rows_part = factorial(m) * factorial(m - r) / (factorial(m - p) * factorial(m - p));
  const std::uint64_t cols_part = factorial(n) * factorial(n - c) / (factorial(n - q) * factorial(n - q));
  res.closed_form = rows_part * cols_part * aut;
  return res;
}

}  // namespace rcu
