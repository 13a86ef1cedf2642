#include "ideanet/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ideanet/transport.hpp"

namespace ideanet {

namespace {

double euclidean(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double d = x[k] - y[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// In-vocabulary support with normalized frequencies; OOV tokens collected.
struct Distribution {
  std::vector<std::string> support;
  std::vector<double> weights;
};

Distribution make_distribution(const std::vector<std::string>& tokens,
                               const EmbeddingTable& table,
                               std::vector<std::string>& oov) {
  std::map<std::string, int> counts;
  int total = 0;
  for (const auto& tok : tokens) {
    if (!table.contains(tok)) {
      oov.push_back(tok);
      continue;
    }
    ++counts[tok];
    ++total;
  }
  Distribution d;
  for (const auto& [tok, c] : counts) {
    d.support.push_back(tok);
    d.weights.push_back(double(c) / total);
  }
  return d;
}

}  // namespace

UndefinedDistance::UndefinedDistance(std::vector<std::string> oov_tokens)
    : DomainError("no in-vocabulary tokens on one side of WMD"),
      oov(std::move(oov_tokens)) {}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open embeddings file: " + path.string());
  EmbeddingTable table;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    std::vector<double> vec;
    double v;
    while (ss >> v) vec.push_back(v);
    if (first) {
      first = false;
      // Optional "count dim" header: token parses as an integer and the
      // line has exactly one numeric field.
      if (vec.size() == 1 &&
          token.find_first_not_of("0123456789") == std::string::npos)
        continue;
    }
    if (vec.empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": no vector components");
    if (table.dim == 0) table.dim = int(vec.size());
    if (int(vec.size()) != table.dim)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": dimension mismatch (" + std::to_string(vec.size()) +
                       " vs " + std::to_string(table.dim) + ")");
    if (!table.vectors.emplace(token, std::move(vec)).second)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": duplicate token " + token);
  }
  if (table.vectors.empty()) throw ParseError(path.string() + ": no vectors");
  return table;
}

std::vector<std::string> preprocess(const std::string& text,
                                    const std::set<std::string>& stopwords) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !stopwords.count(cur)) tokens.push_back(cur);
    cur.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c))
      cur += char(std::tolower(c));
    else
      flush();
  }
  flush();
  return tokens;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open stopword file: " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

const std::set<std::string>& builtin_stopwords() {
  static const std::set<std::string> words = {
      "a",       "about",  "above",   "after",  "again",   "against", "all",
      "am",      "an",     "and",     "any",    "are",     "as",      "at",
      "be",      "because","been",    "before", "being",   "below",   "between",
      "both",    "but",    "by",      "can",    "cannot",  "could",   "did",
      "do",      "does",   "doing",   "down",   "during",  "each",    "few",
      "for",     "from",   "further", "had",    "has",     "have",    "having",
      "he",      "her",    "here",    "hers",   "herself", "him",     "himself",
      "his",     "how",    "i",       "if",     "in",      "into",    "is",
      "it",      "its",    "itself",  "just",   "me",      "more",    "most",
      "my",      "myself", "no",      "nor",    "not",     "now",     "of",
      "off",     "on",     "once",    "only",   "or",      "other",   "our",
      "ours",    "ourselves", "out",  "over",   "own",     "same",    "she",
      "should",  "so",     "some",    "such",   "than",    "that",    "the",
      "their",   "theirs", "them",    "themselves", "then", "there",  "these",
      "they",    "this",   "those",   "through","to",      "too",     "under",
      "until",   "up",     "very",    "was",    "we",      "were",    "what",
      "when",    "where",  "which",   "while",  "who",     "whom",    "why",
      "will",    "with",   "would",   "you",    "your",    "yours",   "yourself",
      "yourselves"};
  return words;
}

double wmd(const std::vector<std::string>& a, const std::vector<std::string>& b,
           const EmbeddingTable& table) {
  std::vector<std::string> oov;
  Distribution da = make_distribution(a, table, oov);
  Distribution db = make_distribution(b, table, oov);
  if (da.support.empty() || db.support.empty()) throw UndefinedDistance(oov);

  std::vector<std::vector<double>> cost(da.support.size(),
                                        std::vector<double>(db.support.size()));
  for (std::size_t i = 0; i < da.support.size(); ++i) {
    const auto& vi = table.vectors.at(da.support[i]);
    for (std::size_t j = 0; j < db.support.size(); ++j)
      cost[i][j] = euclidean(vi, table.vectors.at(db.support[j]));
  }
  return solve_transport(da.weights, db.weights, cost);
}

double wmd_lower_bound(const std::vector<std::string>& a,
                       const std::vector<std::string>& b,
                       const EmbeddingTable& table) {
  std::vector<std::string> oov;
  Distribution da = make_distribution(a, table, oov);
  Distribution db = make_distribution(b, table, oov);
  if (da.support.empty() || db.support.empty()) throw UndefinedDistance(oov);
  // max over both directions of each token's mass times its nearest
  // counterpart distance.
  auto one_side = [&](const Distribution& from, const Distribution& to) {
    double total = 0.0;
    for (std::size_t i = 0; i < from.support.size(); ++i) {
      const auto& vi = table.vectors.at(from.support[i]);
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& tok : to.support)
        nearest = std::min(nearest, euclidean(vi, table.vectors.at(tok)));
      total += from.weights[i] * nearest;
    }
    return total;
  };
  return std::max(one_side(da, db), one_side(db, da));
}

std::vector<PairDissimilarity> pairwise_dissimilarity(
    const std::map<std::string, std::vector<std::string>>& docs,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const EmbeddingTable& table) {
  std::vector<PairDissimilarity> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    PairDissimilarity r;
    r.a = a;
    r.b = b;
    auto ia = docs.find(a);
    auto ib = docs.find(b);
    if (ia == docs.end() || ib == docs.end()) {
      r.note = "missing document";
      out.push_back(std::move(r));
      continue;
    }
    try {
      r.value = wmd(ia->second, ib->second, table);
      r.ok = true;
    } catch (const UndefinedDistance& e) {
      std::string note = "undefined:";
      for (const auto& tok : e.oov) note += " " + tok;
      r.note = note;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ideanet
