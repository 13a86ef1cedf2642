#include "ideanet/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "ideanet/csv.hpp"
#include "ideanet/errors.hpp"

namespace ideanet {

namespace {

std::vector<int> resolve(const ConceptBag& bag, const Taxonomy& t) {
  std::vector<int> nodes;
  nodes.reserve(bag.concepts.size());
  std::vector<std::string> missing;
  for (const auto& label : bag.concepts) {
    if (!t.contains(label)) {
      missing.push_back(label);
      continue;
    }
    nodes.push_back(t.index_of(label));
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "unresolved concepts:";
    for (const auto& m : missing) msg << " " << m;
    throw LookupError(msg.str());
  }
  return nodes;
}

std::string group_key(const IdeaRecord& r) {
  return r.condition + "/" + r.trial;
}

}  // namespace

double multi_information(const ConceptBag& bag, const Taxonomy& t) {
  const auto nodes = resolve(bag, t);
  const std::size_t n = nodes.size();
  if (n <= 1) return 0.0;

  // Prim over the complete graph, maximizing edge weight. The graph is
  // complete so the result is a single spanning tree.
  std::vector<char> in_tree(n, 0);
  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  in_tree[0] = 1;
  for (std::size_t j = 1; j < n; ++j)
    best[j] = t.concept_similarity(nodes[0], nodes[j]);
  double total = 0.0;
  for (std::size_t added = 1; added < n; ++added) {
    std::size_t pick = 0;
    double pick_w = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (!in_tree[j] && best[j] > pick_w) {
        pick = j;
        pick_w = best[j];
      }
    in_tree[pick] = 1;
    total += pick_w;
    for (std::size_t j = 0; j < n; ++j)
      if (!in_tree[j])
        best[j] = std::max(best[j], t.concept_similarity(nodes[pick], nodes[j]));
  }
  return total;
}

double creativity_quotient(const ConceptBag& bag, const Taxonomy& t) {
  return double(bag.size()) - multi_information(bag, t);
}

QResult accumulate_q(const std::vector<IdeaRecord>& records, const Taxonomy& t,
                     bool pool_duplicates) {
  QResult result;
  std::map<std::pair<std::string, int>, ConceptBag> individual;
  std::map<std::pair<std::string, int>, ConceptBag> group;
  for (const auto& r : records) {
    if (r.concepts.empty()) {
      result.skipped.push_back(r.idea_id);
      continue;
    }
    auto& ib = individual[{r.participant, r.round}];
    ib.concepts.insert(ib.concepts.end(), r.concepts.begin(), r.concepts.end());
    auto& gb = group[{group_key(r), r.round}];
    gb.concepts.insert(gb.concepts.end(), r.concepts.begin(), r.concepts.end());
  }
  for (const auto& [key, bag] : individual) {
    double q = creativity_quotient(bag, t);
    result.per_round[key] = q;
    result.totals[key.first] += q;
  }
  for (auto& [key, bag] : group) {
    ConceptBag pooled = bag;
    if (!pool_duplicates) {
      std::sort(pooled.concepts.begin(), pooled.concepts.end());
      pooled.concepts.erase(
          std::unique(pooled.concepts.begin(), pooled.concepts.end()),
          pooled.concepts.end());
    }
    double q = creativity_quotient(pooled, t);
    result.group_per_round[key] = q;
    result.group_totals[key.first] += q;
  }
  return result;
}

NonredundantCounts nonredundant_counts(const std::vector<IdeaRecord>& pool,
                                       int threshold) {
  if (threshold < 1) throw DomainError("threshold must be >= 1");
  std::map<std::string, std::set<std::string>> submitters;  // bin -> participants
  std::map<std::string, std::set<std::string>> bins_of;     // participant -> bins
  for (const auto& r : pool) {
    submitters[r.bin_id].insert(r.participant);
    bins_of[r.participant].insert(r.bin_id);
  }
  NonredundantCounts out;
  std::set<std::string> nonredundant;
  for (const auto& [bin, who] : submitters)
    if (static_cast<int>(who.size()) <= threshold) nonredundant.insert(bin);
  out.group_count = static_cast<int>(nonredundant.size());
  for (const auto& [participant, bins] : bins_of) {
    int count = 0;
    for (const auto& bin : bins)
      if (nonredundant.count(bin)) ++count;
    out.per_participant[participant] = count;
  }
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return double(inter) / double(a.size() + b.size() - inter);
}

NoveltyResult average_novelty(
    const std::vector<RatingRecord>& ratings,
    const std::map<std::string, std::vector<std::string>>& ideas_by_participant) {
  NoveltyResult out;
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& r : ratings) {
    if (r.rating < 1 || r.rating > 5)
      throw DomainError("rating out of 1..5 range for idea " + r.idea_id);
    auto& s = sums[r.idea_id];
    s.first += r.rating;
    s.second += 1;
  }
  for (const auto& [idea, s] : sums) out.per_idea[idea] = s.first / s.second;

  double participant_sum = 0.0;
  int participant_count = 0;
  for (const auto& [participant, ideas] : ideas_by_participant) {
    double sum = 0.0;
    int n = 0;
    for (const auto& idea : ideas) {
      auto it = out.per_idea.find(idea);
      if (it == out.per_idea.end()) {
        out.unrated.push_back(idea);
        continue;
      }
      sum += it->second;
      ++n;
    }
    if (n > 0) {
      out.per_participant[participant] = sum / n;
      participant_sum += sum / n;
      ++participant_count;
    }
  }
  if (participant_count > 0) out.group_mean = participant_sum / participant_count;
  return out;
}

std::vector<IdeaRecord> load_ideas_csv(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (rows.empty()) throw ParseError(path.string() + ": empty ideas file");
  const std::vector<std::string> expect = {"trial",       "condition", "round",
                                           "turn",        "participant",
                                           "idea_id",     "bin_id",    "concepts",
                                           "text"};
  if (rows[0] != expect)
    throw ParseError(path.string() + ": unexpected ideas header");
  std::vector<IdeaRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != expect.size())
      throw ParseError(path.string() + ": row " + std::to_string(i + 1) +
                       ": wrong field count");
    IdeaRecord r;
    r.trial = row[0];
    r.condition = row[1];
    try {
      r.round = std::stoi(row[2]);
      r.turn = std::stoi(row[3]);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": row " + std::to_string(i + 1) +
                       ": non-integer round/turn");
    }
    r.participant = row[4];
    r.idea_id = row[5];
    r.bin_id = row[6];
    if (!row[7].empty())
      for (auto& c : split(row[7], '|'))
        if (!c.empty()) r.concepts.push_back(c);
    r.text = row[8];
    if (r.bin_id.empty())
      throw ParseError(path.string() + ": row " + std::to_string(i + 1) +
                       ": empty bin_id");
    if (r.round < 1)
      throw ParseError(path.string() + ": row " + std::to_string(i + 1) +
                       ": round must be >= 1");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RatingRecord> load_ratings_csv(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (rows.empty()) throw ParseError(path.string() + ": empty ratings file");
  const std::vector<std::string> expect = {"rater", "idea_id", "rating"};
  if (rows[0] != expect)
    throw ParseError(path.string() + ": unexpected ratings header");
  std::vector<RatingRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 3)
      throw ParseError(path.string() + ": row " + std::to_string(i + 1) +
                       ": wrong field count");
    RatingRecord r;
    r.rater = row[0];
    r.idea_id = row[1];
    try {
      r.rating = std::stoi(row[2]);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": row " + std::to_string(i + 1) +
                       ": non-integer rating");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ideanet
