#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ideanet {

/// Concept taxonomy: a DAG of "is a" edges (child -> parent).
/// Immutable after construction; all queries are pure reads.
class Taxonomy {
 public:
  /// Parse a TSV edge list ("child<TAB>parent" per line, '#' comments).
  static Taxonomy load(const std::filesystem::path& path);
  static Taxonomy from_edges(
      const std::vector<std::pair<std::string, std::string>>& child_parent);

  /// Total concept count w.
  std::size_t size() const { return labels_.size(); }
  bool contains(const std::string& label) const;
  const std::vector<std::string>& labels() const { return labels_; }

  /// h(c): number of distinct strict descendants of c.
  int hyponym_count(const std::string& label) const;

  /// I(c) = 1 - log(h(c)+1)/log(w), in [0,1]. Requires w >= 2.
  double information_content(const std::string& label) const;

  /// Information content of the most specific common abstraction.
  /// Every concept subsumes itself; 0 if the concepts share no ancestor.
  double msca_similarity(const std::string& a, const std::string& b) const;

  /// sim(a,b) = 1 - (I(a)+I(b)-2*msca)/2, in [0,1].
  double concept_similarity(const std::string& a, const std::string& b) const;

  // Index-based variants for hot loops.
  int index_of(const std::string& label) const;  // throws LookupError
  double information_content(int node) const;
  double msca_similarity(int a, int b) const;
  double concept_similarity(int a, int b) const;

 private:
  Taxonomy() = default;
  void finalize();  // cycle check, hyponym counts, ancestor closure

  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<int> hyponyms_;
  std::vector<std::vector<int>> ancestors_;  // sorted, includes the node itself
};

}  // namespace ideanet
