#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "rcu/graph_catalog.hpp"
#include "rcu/rng.hpp"

using namespace rcu;

TEST_CASE("canonical form of small graphs") {
  const BipartiteGraph k11(1, 1, 0x1);
  CHECK(canonical_form(k11) == k11);
  // only edge (1,2) goes to only edge (1,1)
  CHECK(canonical_form(BipartiteGraph(1, 2, 0x2)) == BipartiteGraph(1, 2, 0x1));
  CHECK(canonical_form(BipartiteGraph(1, 2, 0x1)) == BipartiteGraph(1, 2, 0x1));
}

TEST_CASE("canonical form is invariant under random relabelings") {
  KeyedStream rng(derive(7, 1));
  for (int t = 0; t < 300; ++t) {
    const int r = 1 + static_cast<int>(rng.uniform() * 4), c = 1 + static_cast<int>(rng.uniform() * 4);
    const EdgeMask m = static_cast<EdgeMask>(rng.bits() & full_mask(r, c));
    const BipartiteGraph g(r, c, m);
    auto rps = permutations(r), cps = permutations(c);
    const auto& rp = rps[rng.bits() % rps.size()];
    const auto& cp = cps[rng.bits() % cps.size()];
    CHECK(canonical_form(g.permuted(rp, cp)) == canonical_form(g));
  }
}

TEST_CASE("automorphism counts") {
  CHECK(automorphism_count(BipartiteGraph::complete(1, 1)) == 1);
  CHECK(automorphism_count(BipartiteGraph::complete(1, 2)) == 2);
  CHECK(automorphism_count(BipartiteGraph::complete(2, 2)) == 4);
  CHECK(automorphism_count(BipartiteGraph(2, 2, 0)) == 4);
  CHECK(automorphism_count(BipartiteGraph::complete(3, 4)) == 6 * 24);
  // perfect matching on 2x2: swap both sides together
  CHECK(automorphism_count(BipartiteGraph(2, 2, 0x9)) == 2);
}

TEST_CASE("connectivity") {
  CHECK(is_connected(BipartiteGraph::complete(1, 2)));
  CHECK_FALSE(is_connected(BipartiteGraph(1, 1, 0)));
  CHECK_FALSE(is_connected(BipartiteGraph(2, 2, 0x9)));
  CHECK(is_connected(BipartiteGraph(2, 2, 0xb)));
  CHECK(is_connected(BipartiteGraph(0, 0)));
  CHECK(is_connected(BipartiteGraph(1, 0)));
  CHECK_FALSE(is_connected(BipartiteGraph(2, 0)));
}

TEST_CASE("enumerate_gamma counts") {
  CHECK(enumerate_gamma(2, 0).size() + enumerate_gamma(0, 2).size() + enumerate_gamma(1, 1).size() == 4);
  CHECK(enumerate_gamma(2, 1).size() + enumerate_gamma(1, 2).size() == 6);
  CHECK(enumerate_gamma(1, 1).size() == 2);
  CHECK(enumerate_gamma(0, 0).size() == 1);
  // known counts of bipartite graphs with labeled sides up to side-preserving relabeling
  CHECK(enumerate_gamma(2, 2).size() == 7);
  CHECK(enumerate_gamma(3, 3).size() == 36);
  CHECK(enumerate_gamma(4, 4).size() == 317);
}

TEST_CASE("orbit sizes add up to all labeled graphs") {
  for (int r = 0; r <= kMaxRows; ++r)
    for (int c = 0; c <= kMaxCols; ++c) {
      std::uint64_t total = 0;
      std::set<EdgeMask> reps;
      for (const auto& g : enumerate_gamma(r, c)) {
        total += factorial(r) * factorial(c) / g.aut_count;
        CHECK(canonical_form(g.representative) == g.representative);
        reps.insert(g.representative.edges());
      }
      CHECK(reps.size() == enumerate_gamma(r, c).size());
      CHECK(total == (std::uint64_t{1} << (r * c)));
    }
}

TEST_CASE("classes come sorted by edge count then mask") {
  const auto v = enumerate_gamma(2, 2);
  for (std::size_t i = 1; i < v.size(); ++i) {
    const auto& a = v[i - 1].representative;
    const auto& b = v[i].representative;
    CHECK((a.edge_count() < b.edge_count() || (a.edge_count() == b.edge_count() && a.edges() < b.edges())));
  }
}

TEST_CASE("size limits") {
  CHECK_THROWS_AS(enumerate_gamma(5, 1), SizeLimitError);
  CHECK_THROWS_AS(BipartiteGraph(1, 5), SizeLimitError);
  CHECK_THROWS(BipartiteGraph(1, 1, 0x2));  // edge outside the frame
}

TEST_CASE("labeled subgraphs") {
  CHECK(labeled_subgraphs(BipartiteGraph(0, 0)).size() == 1);
  CHECK(labeled_subgraphs(BipartiteGraph::complete(1, 1)).size() == 5);
  CHECK(labeled_subgraphs(BipartiteGraph::complete(2, 2)).size() == 47);
  // sum over row/col subsets of 2^{r'c'}
  // 8 + 2*27 + 125
  CHECK(labeled_subgraphs(BipartiteGraph::complete(2, 3)).size() == 187);
  const auto subs = labeled_subgraphs(BipartiteGraph::with_labels({2, 5}, {1, 3}, 0xf));
  for (const auto& s : subs) {
    for (int i = 0; i < s.rows(); ++i) CHECK((s.row_label(i) == 2 || s.row_label(i) == 5));
    for (int j = 0; j < s.cols(); ++j) CHECK((s.col_label(j) == 1 || s.col_label(j) == 3));
  }
  std::set<std::string> seen;
  for (const auto& s : subs) seen.insert(s.describe());
  CHECK(seen.size() == subs.size());
}

TEST_CASE("labeled graphs validate labels") {
  CHECK_THROWS(BipartiteGraph::with_labels({1, 1}, {0}, 0));
  CHECK_THROWS(BipartiteGraph::with_labels({-1}, {0}, 0));
  const BipartiteGraph g = BipartiteGraph::with_labels({3}, {0, 7}, 0x2);
  CHECK(g.row_label(0) == 3);
  CHECK(g.col_label(1) == 7);
  CHECK(g.unlabeled() == BipartiteGraph(1, 2, 0x2));
}

TEST_CASE("latent sets round trip through graphs") {
  const LatentSet s{0x3, 0x2, 0x2 | 0x8};  // rows {0,1}, col {1}, edges (0,1),(1,1) in a 2-wide frame
  const BipartiteGraph g = to_graph(s, 2);
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 1);
  CHECK(g.edge_count() == 2);
  CHECK(to_latent_set(g, 2) == s);
  CHECK(latent_subsets(LatentSet{1, 1, 1}, 1, 1).size() == 5);
  CHECK(subset_of(LatentSet{1, 0, 0}, s));
  CHECK_FALSE(subset_of(LatentSet{0, 1, 0}, s));
}

TEST_CASE("catalog lookups") {
  const Catalog cat(2, 2);
  CHECK(cat.all().size() == 20);
  const auto& k12 = cat.classify(BipartiteGraph(1, 2, 0x3));
  CHECK(k12.aut_count == 2);
  CHECK(k12.connected);
  CHECK(cat.classify(BipartiteGraph(2, 1, 0x2)).representative == BipartiteGraph(2, 1, 0x1));
  CHECK(cat.gamma_minus(1, 2).size() == 8);  // no empty class
  int last = -1;
  for (const auto& c : cat.all()) {
    CHECK(c.class_id == last + 1);
    last = c.class_id;
  }
}

TEST_CASE("pair coincidence identity") {
  const auto k11 = enumerate_gamma(1, 1)[1];
  const auto r = pair_coincidence_count(2, 2, 1, 1, k11);
  CHECK(r.brute_force == 4);
  CHECK(r.closed_form == 4);

  GraphClass k12;
  for (const auto& g : enumerate_gamma(1, 2))
    if (g.representative.edges() == 0x3) k12 = g;
  const auto s = pair_coincidence_count(3, 3, 2, 2, k12);
  CHECK(s.brute_force == s.closed_form);
  CHECK(s.closed_form == 12 * 6 * 2);

  for (int m = 1; m <= 4; ++m)
    for (int n = 1; n <= 4; ++n)
      for (int p = 0; p <= std::min(2, m); ++p)
        for (int q = 0; q <= std::min(2, n); ++q)
          for (int r = 0; r <= p; ++r)
            for (int c = 0; c <= q; ++c)
              for (const auto& g : enumerate_gamma(r, c)) {
                const auto x = pair_coincidence_count(m, n, p, q, g);
                CHECK(x.brute_force == x.closed_form);
              }

  // wrong |Aut| breaks the identity
  const auto bad = pair_coincidence_count(3, 3, 2, 2, k12, 3);
  CHECK(bad.brute_force != bad.closed_form);
}
