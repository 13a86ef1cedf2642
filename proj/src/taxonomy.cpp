#include "ideanet/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "ideanet/errors.hpp"

namespace ideanet {

namespace {

int intern(std::vector<std::string>& labels,
           std::unordered_map<std::string, int>& index,
           const std::string& label) {
  auto it = index.find(label);
  if (it != index.end()) return it->second;
  int id = static_cast<int>(labels.size());
  labels.push_back(label);
  index.emplace(label, id);
  return id;
}

}  // namespace

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open taxonomy file: " + path.string());
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected \"child<TAB>parent\"");
    if (line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": extra field on line");
    edges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  if (edges.empty()) throw ParseError("empty taxonomy: " + path.string());
  return from_edges(edges);
}

Taxonomy Taxonomy::from_edges(
    const std::vector<std::pair<std::string, std::string>>& child_parent) {
  if (child_parent.empty()) throw ParseError("empty taxonomy");
  Taxonomy t;
  for (const auto& [child, parent] : child_parent) {
    int c = intern(t.labels_, t.index_, child);
    int p = intern(t.labels_, t.index_, parent);
    t.parents_.resize(t.labels_.size());
    if (c == p)
      throw DomainError("taxonomy cycle: " + child + " -> " + parent);
    auto& ps = t.parents_[c];
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
  }
  t.parents_.resize(t.labels_.size());
  t.finalize();
  return t;
}

void Taxonomy::finalize() {
  const int n = static_cast<int>(labels_.size());
  children_.assign(n, {});
  for (int c = 0; c < n; ++c)
    for (int p : parents_[c]) children_[p].push_back(c);

  // Cycle check: DFS coloring over child -> parent edges.
  std::vector<int> color(n, 0);  // 0 white, 1 gray, 2 black
  std::function<void(int)> visit = [&](int u) {
    color[u] = 1;
    for (int p : parents_[u]) {
      if (color[p] == 1)
        throw DomainError("taxonomy cycle: " + labels_[u] + " -> " +
                          labels_[p]);
      if (color[p] == 0) visit(p);
    }
    color[u] = 2;
  };
  for (int u = 0; u < n; ++u)
    if (color[u] == 0) visit(u);

  // h(c): distinct strict descendants via reverse reachability.
  hyponyms_.assign(n, 0);
  std::vector<char> seen(n, 0);
  for (int root = 0; root < n; ++root) {
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<int> stack = {root};
    seen[root] = 1;
    int count = 0;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int c : children_[u])
        if (!seen[c]) {
          seen[c] = 1;
          ++count;
          stack.push_back(c);
        }
    }
    hyponyms_[root] = count;
  }

  // Ancestor closure (node included) for MSCA queries.
  ancestors_.assign(n, {});
  for (int node = 0; node < n; ++node) {
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<int> stack = {node};
    seen[node] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      ancestors_[node].push_back(u);
      for (int p : parents_[u])
        if (!seen[p]) {
          seen[p] = 1;
          stack.push_back(p);
        }
    }
    std::sort(ancestors_[node].begin(), ancestors_[node].end());
  }
}

bool Taxonomy::contains(const std::string& label) const {
  return index_.count(label) > 0;
}

int Taxonomy::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw LookupError("unknown concept: " + label);
  return it->second;
}

int Taxonomy::hyponym_count(const std::string& label) const {
  return hyponyms_[index_of(label)];
}

double Taxonomy::information_content(int node) const {
  const auto w = labels_.size();
  if (w < 2) throw DomainError("information content requires w >= 2");
  return 1.0 - std::log(hyponyms_[node] + 1.0) / std::log(double(w));
}

double Taxonomy::information_content(const std::string& label) const {
  return information_content(index_of(label));
}

double Taxonomy::msca_similarity(const std::string& a,
                                 const std::string& b) const {
  return msca_similarity(index_of(a), index_of(b));
}

double Taxonomy::msca_similarity(int a, int b) const {
  const auto& anc_a = ancestors_[a];
  const auto& anc_b = ancestors_[b];
  double best = 0.0;
  // Merge-intersect two sorted ancestor lists.
  std::size_t i = 0, j = 0;
  while (i < anc_a.size() && j < anc_b.size()) {
    if (anc_a[i] < anc_b[j])
      ++i;
    else if (anc_b[j] < anc_a[i])
      ++j;
    else {
      best = std::max(best, information_content(anc_a[i]));
      ++i;
      ++j;
    }
  }
  return best;
}

double Taxonomy::concept_similarity(int a, int b) const {
  double ia = information_content(a);
  double ib = information_content(b);
  double msca = msca_similarity(a, b);
  return 1.0 - (ia + ib - 2.0 * msca) / 2.0;
}

double Taxonomy::concept_similarity(const std::string& a,
                                    const std::string& b) const {
  return concept_similarity(index_of(a), index_of(b));
}

}  // namespace ideanet
