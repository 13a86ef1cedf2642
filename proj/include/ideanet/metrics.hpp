#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ideanet/taxonomy.hpp"

namespace ideanet {

struct IdeaRecord {
  std::string trial;
  std::string condition;  // dynamic | static | solo | alter
  int round = 1;
  int turn = 0;  // 0 = untimed
  std::string participant;
  std::string idea_id;
  std::string bin_id;
  std::vector<std::string> concepts;
  std::string text;
};

/// Multiset of concept instances; N is the multiset cardinality.
struct ConceptBag {
  std::vector<std::string> concepts;
  std::size_t size() const { return concepts.size(); }
};

/// Maximum-spanning-tree weight of the complete similarity graph over the
/// bag's N concept instances. 0 when N <= 1.
double multi_information(const ConceptBag& bag, const Taxonomy& t);

/// Q = N - I_m.
double creativity_quotient(const ConceptBag& bag, const Taxonomy& t);

struct QResult {
  std::map<std::pair<std::string, int>, double> per_round;        // (participant, round)
  std::map<std::string, double> totals;                           // participant -> Q_i
  std::map<std::pair<std::string, int>, double> group_per_round;  // (group, round)
  std::map<std::string, double> group_totals;                     // group -> Q_g
  std::vector<std::string> skipped;  // idea ids with empty concept lists
};

/// Groups are keyed "condition/trial". Group rounds pool every member's
/// concept instances (duplicates kept) unless pool_duplicates is false,
/// in which case the pooled bag is deduplicated first.
QResult accumulate_q(const std::vector<IdeaRecord>& records, const Taxonomy& t,
                     bool pool_duplicates = true);

struct NonredundantCounts {
  std::map<std::string, int> per_participant;
  int group_count = 0;
};

/// An idea (bin_id) is non-redundant iff at most `threshold` distinct
/// participants in the pool submitted it.
NonredundantCounts nonredundant_counts(const std::vector<IdeaRecord>& pool,
                                       int threshold);

/// |A∩B| / |A∪B|; 1 when both sets are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct RatingRecord {
  std::string rater;
  std::string idea_id;
  int rating = 0;  // 1..5
};

struct NoveltyResult {
  std::map<std::string, double> per_idea;         // r_j
  std::map<std::string, double> per_participant;  // r̄_i
  double group_mean = 0.0;
  std::vector<std::string> unrated;  // referenced ideas with no ratings
};

NoveltyResult average_novelty(
    const std::vector<RatingRecord>& ratings,
    const std::map<std::string, std::vector<std::string>>& ideas_by_participant);

// Ideas CSV: trial,condition,round,turn,participant,idea_id,bin_id,concepts,text
// (concepts is |-separated). Ratings CSV: rater,idea_id,rating.
std::vector<IdeaRecord> load_ideas_csv(const std::filesystem::path& path);
std::vector<RatingRecord> load_ratings_csv(const std::filesystem::path& path);

}  // namespace ideanet
