#include "trag/dense/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

#include "trag/dense/embedding.hpp"
#include "trag/errors.hpp"
#include "trag/util/rng.hpp"

namespace trag::dense {

namespace {

std::span<const double> row(std::span<const double> data, std::size_t dim, std::uint32_t i) {
  return data.subspan(static_cast<std::size_t>(i) * dim, dim);
}

// Four independent partial sums so the loop vectorizes. Rounding differs from
// dot(); the graph only uses it for ordering, callers rescore with dot().
double sim(std::span<const double> a, std::span<const double> b) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t n = a.size(), n4 = n & ~std::size_t{3};
  const double* x = a.data();
  const double* y = b.data();
  for (std::size_t i = 0; i < n4; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (std::size_t i = n4; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

// Strict "a ranks before b": higher similarity first, then lower id.
struct Better {
  bool operator()(const Neighbor& a, const Neighbor& b) const {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  }
};
// Heap orderings. `top()` of BestFirst is the best; `top()` of WorstFirst is the worst.
struct BestFirst {
  bool operator()(const Neighbor& a, const Neighbor& b) const { return Better{}(b, a); }
};
using WorstFirst = Better;

}  // namespace

HnswGraph HnswGraph::build(std::span<const double> data, std::size_t dim, HnswParams params) {
  if (params.M < 2) throw std::invalid_argument("HNSW M must be at least 2");
  if (dim == 0 || data.size() % dim != 0) throw std::invalid_argument("HNSW data is not a whole number of rows");
  HnswGraph g(params);
  const auto n = data.size() / dim;
  g.levels_.reserve(n);
  g.links_.reserve(n);
  std::mt19937_64 gen(params.seed);
  const double ml = 1.0 / std::log(static_cast<double>(params.M));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 1.0 - util::unit_double(gen);  // (0, 1]
    const int level = static_cast<int>(std::floor(-std::log(u) * ml));
    g.insert(data, dim, static_cast<std::uint32_t>(i), level);
  }
  return g;
}

void HnswGraph::insert(std::span<const double> data, std::size_t dim, std::uint32_t node, int level) {
  levels_.push_back(level);
  links_.emplace_back(static_cast<std::size_t>(level) + 1);
  if (max_level_ < 0) {
    entry_ = node;
    max_level_ = level;
    return;
  }
  const auto q = row(data, dim, node);
  std::vector<Neighbor> ep{{sim(q, row(data, dim, entry_)), entry_}};
  for (int lc = max_level_; lc > level; --lc) ep = search_layer(data, dim, q, std::move(ep), 1, lc);

  for (int lc = std::min(level, max_level_); lc >= 0; --lc) {
    auto found = search_layer(data, dim, q, ep, params_.ef_construction, lc);
    auto chosen = select_neighbors(data, dim, found, max_degree(lc));
    links_[node][static_cast<std::size_t>(lc)] = chosen;
    const std::size_t cap = max_degree(lc);
    for (const auto nb : chosen) {
      auto& adj = links_[nb][static_cast<std::size_t>(lc)];
      adj.push_back(node);
      if (adj.size() > cap) {
        const auto base = row(data, dim, nb);
        std::vector<Neighbor> cand;
        cand.reserve(adj.size());
        for (const auto a : adj) cand.emplace_back(sim(base, row(data, dim, a)), a);
        adj = select_neighbors(data, dim, std::move(cand), cap);
      }
    }
    ep = std::move(found);
  }
  if (level > max_level_) {
    entry_ = node;
    max_level_ = level;
  }
}

std::vector<Neighbor> HnswGraph::search_layer(std::span<const double> data, std::size_t dim,
                                              std::span<const double> query, std::vector<Neighbor> entry,
                                              std::size_t ef, int level) const {
  std::vector<bool> visited(levels_.size(), false);
  std::priority_queue<Neighbor, std::vector<Neighbor>, BestFirst> candidates;
  std::priority_queue<Neighbor, std::vector<Neighbor>, WorstFirst> results;
  for (const auto& e : entry) {
    if (visited[e.second]) continue;
    visited[e.second] = true;
    candidates.push(e);
    results.push(e);
    if (results.size() > ef) results.pop();
  }
  while (!candidates.empty()) {
    const auto cur = candidates.top();
    if (results.size() >= ef && Better{}(results.top(), cur)) break;
    candidates.pop();
    for (const auto nb : links_[cur.second][static_cast<std::size_t>(level)]) {
      if (visited[nb]) continue;
      visited[nb] = true;
      const Neighbor cand{sim(query, row(data, dim, nb)), nb};
      if (results.size() < ef || Better{}(cand, results.top())) {
        candidates.push(cand);
        results.push(cand);
        if (results.size() > ef) results.pop();
      }
    }
  }
  std::vector<Neighbor> out;
  out.reserve(results.size());
  while (!results.empty()) {
    out.push_back(results.top());
    results.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Diversity heuristic: keep a candidate only if it is closer to the base
// point than to every neighbor already kept; pruned candidates back-fill.
std::vector<std::uint32_t> HnswGraph::select_neighbors(std::span<const double> data, std::size_t dim,
                                                       std::vector<Neighbor> candidates, std::size_t m) const {
  std::sort(candidates.begin(), candidates.end(), Better{});
  std::vector<std::uint32_t> kept;
  std::vector<std::uint32_t> pruned;
  kept.reserve(m);
  for (const auto& [sim_to_base, id] : candidates) {
    if (kept.size() >= m) break;
    const auto v = row(data, dim, id);
    bool diverse = true;
    for (const auto k : kept) {
      if (sim(v, row(data, dim, k)) > sim_to_base) {
        diverse = false;
        break;
      }
    }
    (diverse ? kept : pruned).push_back(id);
  }
  // Fill the remaining slots with the best pruned candidates.
  for (std::size_t i = 0; i < pruned.size() && kept.size() < m; ++i) kept.push_back(pruned[i]);
  return kept;
}

std::vector<Neighbor> HnswGraph::search(std::span<const double> data, std::size_t dim,
                                        std::span<const double> query, std::size_t k, std::size_t ef) const {
  if (levels_.empty() || k == 0) return {};
  std::vector<Neighbor> ep{{sim(query, row(data, dim, entry_)), entry_}};
  for (int lc = max_level_; lc > 0; --lc) ep = search_layer(data, dim, query, std::move(ep), 1, lc);
  auto found = search_layer(data, dim, query, std::move(ep), std::max(ef, k), 0);
  if (found.size() > k) found.resize(k);
  return found;
}

void HnswGraph::write(util::BinaryWriter& w) const {
  w.u64(params_.M);
  w.u64(params_.layer0_degree());
  w.u64(params_.ef_construction);
  w.u64(params_.ef_search);
  w.u64(params_.seed);
  w.u64(levels_.size());
  w.u32(static_cast<std::uint32_t>(max_level_));
  w.u32(entry_);
  for (std::size_t node = 0; node < levels_.size(); ++node) {
    w.u32(static_cast<std::uint32_t>(levels_[node]));
    for (const auto& adj : links_[node]) {
      w.u32(static_cast<std::uint32_t>(adj.size()));
      for (const auto nb : adj) w.u32(nb);
    }
  }
}

HnswGraph HnswGraph::read(util::BinaryReader& r, std::size_t expected_nodes) {
  HnswParams p;
  p.M = r.u64();
  p.M0 = r.u64();
  p.ef_construction = r.u64();
  p.ef_search = r.u64();
  p.seed = r.u64();
  HnswGraph g(p);
  const auto n = r.u64();
  if (n != expected_nodes) throw FormatError("graph node count does not match stored vectors");
  g.max_level_ = static_cast<int>(r.u32());
  g.entry_ = r.u32();
  if (n > 0 && g.entry_ >= n) throw FormatError("graph entry point out of range");
  g.levels_.reserve(n);
  g.links_.reserve(n);
  for (std::uint64_t node = 0; node < n; ++node) {
    const auto level = r.u32();
    if (static_cast<int>(level) > g.max_level_) throw FormatError("node level above graph max level");
    g.levels_.push_back(static_cast<int>(level));
    auto& layers = g.links_.emplace_back(level + 1);
    for (auto& adj : layers) {
      adj.resize(r.u32());
      for (auto& nb : adj) {
        nb = r.u32();
        if (nb >= n) throw FormatError("graph edge out of range");
      }
    }
  }
  return g;
}

}  // namespace trag::dense
