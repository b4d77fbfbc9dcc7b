#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "revex/featurize.hpp"
#include "revex/hierarchy.hpp"

namespace revex {

class LdaModel;
class TermStatistics;

inline constexpr const char* kFallbackLabel = "general";

/// Sign of the average sentiment; zero counts as positive.
int valence(double avg_sentiment);

/// Per attribute: sum of the present scores over `members`.
std::vector<double> attribute_contributions(const FeatureMatrix& vectors,
                                            std::span<const std::size_t> members);

struct LabelCandidate {
    std::string name;
    double strength = 0.0;  // > 0, larger is better
};

/// Attributes ordered by valence·contribution, descending, ties in schema
/// order. Only attributes pushing in the direction of the valence qualify.
std::vector<LabelCandidate> rank_attributes(std::span<const double> contributions, int valence,
                                            const std::vector<std::string>& attributes);

/// Label of a single cluster: its best candidate, or "general" when none.
std::string label_cluster(std::span<const double> contributions, double avg_sentiment,
                          const std::vector<std::string>& attributes);

struct SiblingLabelInput {
    std::vector<LabelCandidate> candidates;  // best first
    int valence = 1;
};

/// Labels a sibling group. When siblings of equal valence want the same
/// label, the one with the larger contribution keeps it and the other falls
/// back to its next candidate. Applied greedily in descending order of each
/// sibling's top contribution; a sibling that runs out of candidates is
/// labelled "general".
std::vector<std::string> label_siblings(const std::vector<SiblingLabelInput>& siblings);

/// Label candidates for topic-mode clusters: terms of the dominant topic
/// ranked by topic probability × idf.
std::vector<LabelCandidate> topic_label_candidates(const LdaModel& model, const TermStatistics& stats,
                                                   std::span<const double> centroid,
                                                   std::size_t limit = 10);

/// Fills `label` on every non-root node of the tree, group by group.
/// Extraction mode ranks schema attributes; topic mode needs `model`.
void assign_labels(ClusterTree& tree, const FeatureMatrix& vectors,
                   const std::vector<std::string>& attributes, const LdaModel* model,
                   const TermStatistics& stats);

}  // namespace revex
