#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ideanet/errors.hpp"

namespace ideanet {

/// token -> embedding vector, all of the same dimensionality.
struct EmbeddingTable {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  /// Text format: optional "count dim" first line, then "token v1 ... vd".
  static EmbeddingTable load(const std::filesystem::path& path);
  bool contains(const std::string& token) const { return vectors.count(token) > 0; }
};

/// Both sides of a WMD query lost all tokens to the vocabulary filter.
struct UndefinedDistance : DomainError {
  std::vector<std::string> oov;
  explicit UndefinedDistance(std::vector<std::string> oov_tokens);
};

/// Lowercase, strip punctuation, drop stopwords; token order preserved.
std::vector<std::string> preprocess(const std::string& text,
                                    const std::set<std::string>& stopwords);

std::set<std::string> load_stopwords(const std::filesystem::path& path);
const std::set<std::string>& builtin_stopwords();

/// Exact Word Mover's Distance: normalized token-frequency mass, Euclidean
/// ground cost, solved as a balanced transportation problem.
/// Out-of-vocabulary tokens are dropped; throws UndefinedDistance if either
/// side becomes empty.
double wmd(const std::vector<std::string>& a, const std::vector<std::string>& b,
           const EmbeddingTable& table);

/// Per-token nearest-neighbor relaxation; a lower bound on wmd().
double wmd_lower_bound(const std::vector<std::string>& a,
                       const std::vector<std::string>& b,
                       const EmbeddingTable& table);

struct PairDissimilarity {
  std::string a, b;
  double value = 0.0;
  bool ok = false;
  std::string note;  // error marker for undefined pairs
};

std::vector<PairDissimilarity> pairwise_dissimilarity(
    const std::map<std::string, std::vector<std::string>>& docs,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const EmbeddingTable& table);

}  // namespace ideanet
