#include "oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unistd.h>

#include "trag/eval/normalize.hpp"

namespace oracle {

namespace {

std::u32string utf8_to_u32(const std::string& s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const unsigned char c = s[i];
    int n = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : (c >> 3) == 30 ? 4 : 0;
    char32_t cp = n == 1 ? c : n == 2 ? (c & 0x1F) : n == 3 ? (c & 0x0F) : (c & 0x07);
    bool ok = n > 0 && i + n <= s.size();
    for (int k = 1; ok && k < n; ++k) {
      const unsigned char cc = s[i + k];
      ok = (cc & 0xC0) == 0x80;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (ok) {
      out += cp;
      i += n;
    } else {
      out += char32_t{0xFFFD};
      i += 1;
    }
  }
  return out;
}

std::string u32_to_utf8(const std::u32string& s) {
  std::string out;
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out += char(cp);
    } else if (cp < 0x800) {
      out += char(0xC0 | (cp >> 6));
      out += char(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += char(0xE0 | (cp >> 12));
      out += char(0x80 | ((cp >> 6) & 0x3F));
      out += char(0x80 | (cp & 0x3F));
    } else {
      out += char(0xF0 | (cp >> 18));
      out += char(0x80 | ((cp >> 12) & 0x3F));
      out += char(0x80 | ((cp >> 6) & 0x3F));
      out += char(0x80 | (cp & 0x3F));
    }
  }
  return out;
}

// Python str.isspace() code points.
bool py_space(char32_t c) {
  static const std::set<char32_t> spaces = {0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x1C, 0x1D, 0x1E, 0x1F, 0x20, 0x85,
                                            0xA0, 0x1680, 0x2000, 0x2001, 0x2002, 0x2003, 0x2004, 0x2005, 0x2006,
                                            0x2007, 0x2008, 0x2009, 0x200A, 0x2028, 0x2029, 0x202F, 0x205F, 0x3000};
  return spaces.count(c) > 0;
}

std::vector<std::string> words(const std::string& normalized) {
  std::istringstream in(normalized);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

std::string normalize(const std::string& s) {
  // Steps in the reference order: lower, strip punctuation, drop articles, fix whitespace.
  std::u32string t = utf8_to_u32(s);
  for (auto& c : t) c = trag::eval::to_lower(c);
  std::u32string no_punct;
  for (auto c : t) {
    if (!trag::eval::is_unicode_punctuation(c)) no_punct += c;
  }
  std::vector<std::u32string> tokens{{}};
  for (auto c : no_punct) {
    if (py_space(c)) {
      tokens.emplace_back();
    } else {
      tokens.back() += c;
    }
  }
  std::string out;
  for (const auto& tok : tokens) {
    if (tok.empty() || tok == U"a" || tok == U"an" || tok == U"the") continue;
    if (!out.empty()) out += ' ';
    out += u32_to_utf8(tok);
  }
  return out;
}

double f1(const std::string& pred, const std::string& gold) {
  auto p = words(normalize(pred));
  auto g = words(normalize(gold));
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  std::multiset<std::string> gm(g.begin(), g.end());
  std::size_t common = 0;
  for (const auto& w : p) {
    auto it = gm.find(w);
    if (it != gm.end()) {
      gm.erase(it);
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = double(common) / double(p.size());
  const double recall = double(common) / double(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

double em(const std::string& pred, const std::vector<std::string>& golds) {
  for (const auto& g : golds) {
    if (normalize(pred) == normalize(g)) return 1.0;
  }
  return 0.0;
}

RankValues rank_values(const std::vector<std::string>& ranking, const std::vector<std::string>& gold,
                       const std::vector<std::size_t>& ks) {
  const std::set<std::string> rel(gold.begin(), gold.end());
  auto is_rel = [&](std::size_t i) { return rel.count(ranking[i]) > 0; };
  RankValues v;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (is_rel(i)) {
      v.rr = 1.0 / double(i + 1);
      break;
    }
  }
  v.hit1 = !ranking.empty() && is_rel(0) ? 1.0 : 0.0;
  double ap = 0.0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (!is_rel(i)) continue;
    ++found;
    ap += double(found) / double(i + 1);
  }
  v.ap = ap / double(rel.size());
  for (auto k : ks) {
    std::size_t in_top = 0;
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
      if (!is_rel(i)) continue;
      ++in_top;
      dcg += 1.0 / std::log2(double(i + 1) + 1.0);
    }
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, rel.size()); ++i) idcg += 1.0 / std::log2(double(i + 1) + 1.0);
    v.recall[k] = double(in_top) / double(rel.size());
    v.precision[k] = double(in_top) / double(k);
    v.ndcg[k] = dcg / idcg;
  }
  return v;
}

std::vector<TableScore> bm25_search(std::span<const trag::corpus::Segment> segments, const std::string& query,
                                    trag::bm25::Params params) {
  const double n = double(segments.size());
  std::vector<std::vector<std::string>> docs;
  double total_len = 0;
  for (const auto& s : segments) {
    docs.push_back(trag::bm25::analyze(s.text));
    total_len += double(docs.back().size());
  }
  const double avg = total_len / n;
  std::set<std::string> qterms;
  for (auto& t : trag::bm25::analyze(query)) qterms.insert(t);

  std::map<std::string, double> best;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    double score = 0.0;
    for (const auto& term : qterms) {
      double df = 0;
      for (const auto& doc : docs) df += std::count(doc.begin(), doc.end(), term) > 0 ? 1 : 0;
      const double tf = double(std::count(docs[d].begin(), docs[d].end(), term));
      if (tf == 0) continue;
      const double w = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double norm = 1.0 - params.b + params.b * double(docs[d].size()) / avg;
      score += w * (tf * (params.k1 + 1.0) / (tf + params.k1 * norm));
    }
    if (score <= 0) continue;
    auto& slot = best[segments[d].table_id];
    slot = std::max(slot, score);
  }
  std::vector<TableScore> out;
  for (auto& [id, s] : best) out.push_back({id, s});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  return out;
}

std::vector<Sequence> enumerate_sequences(const std::string& question,
                                          std::span<const trag::rag::RetrievedCandidate> candidates,
                                          const trag::rag::Generator& generator, std::size_t max_len) {
  const auto& vocab = generator.vocab();
  std::vector<std::string> prompts;
  for (const auto& c : candidates) prompts.push_back(trag::rag::assemble_prompt(question, c.context));
  std::vector<Sequence> out;
  std::vector<trag::rag::TokenId> prefix;
  std::vector<double> joint;
  for (const auto& c : candidates) joint.push_back(c.prior);

  std::function<void(const std::vector<double>&)> walk = [&](const std::vector<double>& j) {
    std::vector<std::vector<double>> dists;
    for (const auto& p : prompts) dists.push_back(generator.next_token_dist(p, prefix));
    for (trag::rag::TokenId t = 0; t < vocab.size(); ++t) {
      std::vector<double> next(j.size());
      double sum = 0.0;
      for (std::size_t z = 0; z < j.size(); ++z) {
        next[z] = j[z] * dists[z][t];
        sum += next[z];
      }
      if (!(sum > 0.0)) continue;
      prefix.push_back(t);
      if (t == vocab.eos() || prefix.size() == max_len) {
        out.push_back({prefix, std::log(sum)});
      } else {
        walk(next);
      }
      prefix.pop_back();
    }
  };
  walk(joint);
  std::sort(out.begin(), out.end(), [&](const Sequence& a, const Sequence& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return std::lexicographical_compare(a.tokens.begin(), a.tokens.end(), b.tokens.begin(), b.tokens.end(),
                                        [&](auto x, auto y) { return vocab.token(x) < vocab.token(y); });
  });
  return out;
}

std::vector<std::pair<std::uint32_t, double>> knn_scan(std::span<const std::vector<double>> vectors,
                                                       std::span<const double> query, std::size_t k) {
  std::vector<std::pair<std::uint32_t, double>> all;
  for (std::uint32_t i = 0; i < vectors.size(); ++i) {
    double s = 0.0;
    for (std::size_t d = 0; d < query.size(); ++d) s += vectors[i][d] * query[d];
    all.emplace_back(i, s);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace oracle

namespace testdata {

std::string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  const auto len = std::uniform_int_distribution<std::size_t>(min_len, max_len)(rng);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += alphabet[rng() % alphabet.size()];
  return w;
}

trag::corpus::TableDoc random_table(std::mt19937_64& rng, const std::string& id, std::size_t max_rows,
                                    std::size_t max_cols, std::size_t max_words_per_cell) {
  trag::corpus::TableDoc t;
  t.id = id;
  if (rng() % 4 != 0) t.title = random_word(rng) + " " + random_word(rng);
  const auto cols = std::uniform_int_distribution<std::size_t>(1, max_cols)(rng);
  const auto rows = std::uniform_int_distribution<std::size_t>(0, max_rows)(rng);
  for (std::size_t c = 0; c < cols; ++c) t.header.push_back(random_word(rng));
  auto cell = [&] {
    const auto n = std::uniform_int_distribution<std::size_t>(0, max_words_per_cell)(rng);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + random_word(rng);
    return s;
  };
  for (std::size_t r = 0; r < rows; ++r) {
    trag::corpus::Row row;
    for (std::size_t c = 0; c < cols; ++c) row.push_back(cell());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  for (auto& x : v) {
    x = n(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto p = std::filesystem::temp_directory_path() /
                 ("trag-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  path_ = p.string();
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

}  // namespace testdata
