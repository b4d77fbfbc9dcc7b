#include "revex/labeling.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "revex/lda.hpp"
#include "revex/summarize.hpp"

namespace revex {

int valence(double avg_sentiment) { return avg_sentiment < 0.0 ? -1 : 1; }

std::vector<double> attribute_contributions(const FeatureMatrix& vectors,
                                            std::span<const std::size_t> members) {
    std::vector<double> out(vectors.dims(), 0.0);
    for (std::size_t m : members) {
        for (std::size_t a = 0; a < vectors.dims(); ++a) {
            if (auto v = vectors.get(m, a)) out[a] += *v;
        }
    }
    return out;
}

std::vector<LabelCandidate> rank_attributes(std::span<const double> contributions, int v,
                                            const std::vector<std::string>& attributes) {
    std::vector<std::size_t> order(contributions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return v * contributions[a] > v * contributions[b];
    });
    std::vector<LabelCandidate> out;
    for (std::size_t a : order) {
        const double strength = v * contributions[a];
        if (!(strength > 0.0)) break;
        out.push_back({attributes[a], strength});
    }
    return out;
}

std::string label_cluster(std::span<const double> contributions, double avg_sentiment,
                          const std::vector<std::string>& attributes) {
    const auto ranked = rank_attributes(contributions, valence(avg_sentiment), attributes);
    return ranked.empty() ? kFallbackLabel : ranked.front().name;
}

std::vector<std::string> label_siblings(const std::vector<SiblingLabelInput>& siblings) {
    std::vector<std::size_t> order(siblings.size());
    std::iota(order.begin(), order.end(), 0);
    auto top = [&](std::size_t i) {
        return siblings[i].candidates.empty() ? 0.0 : siblings[i].candidates.front().strength;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return top(a) > top(b); });

    std::vector<std::string> labels(siblings.size(), kFallbackLabel);
    std::set<std::pair<int, std::string>> taken;  // (valence, label)
    for (std::size_t i : order) {
        for (const auto& c : siblings[i].candidates) {
            if (!taken.contains({siblings[i].valence, c.name})) {
                labels[i] = c.name;
                taken.insert({siblings[i].valence, c.name});
                break;
            }
        }
    }
    return labels;
}

std::vector<LabelCandidate> topic_label_candidates(const LdaModel& model, const TermStatistics& stats,
                                                   std::span<const double> centroid, std::size_t limit) {
    if (model.n_topics() == 0 || centroid.empty()) return {};
    const auto dominant = static_cast<std::size_t>(
        std::max_element(centroid.begin(), centroid.end()) - centroid.begin());
    const auto phi = model.topic(dominant);
    std::vector<LabelCandidate> out;
    for (std::size_t w = 0; w < phi.size(); ++w) {
        const auto& term = model.vocabulary()[w];
        const auto id = stats.term_id(term, 1);
        const double idf = id ? stats.idf(*id, 1) : 1.0;
        out.push_back({term, phi[w] * idf});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.strength != b.strength) return a.strength > b.strength;
        return a.name < b.name;
    });
    if (out.size() > limit) out.resize(limit);
    return out;
}

namespace {

void label_group(ClusterNode& parent, const FeatureMatrix& vectors, const std::vector<std::string>& attributes,
                 const LdaModel* model, const TermStatistics& stats) {
    if (parent.children.empty()) return;
    std::vector<SiblingLabelInput> inputs;
    for (const auto& child : parent.children) {
        SiblingLabelInput in;
        in.valence = valence(child.avg_sentiment);
        if (vectors.mode() == FeatureMode::Topic && model) {
            in.candidates = topic_label_candidates(*model, stats, child.centroid);
        } else {
            in.candidates = rank_attributes(attribute_contributions(vectors, child.members), in.valence, attributes);
        }
        inputs.push_back(std::move(in));
    }
    const auto labels = label_siblings(inputs);
    for (std::size_t i = 0; i < parent.children.size(); ++i) {
        parent.children[i].label = labels[i];
        label_group(parent.children[i], vectors, attributes, model, stats);
    }
}

}  // namespace

void assign_labels(ClusterTree& tree, const FeatureMatrix& vectors, const std::vector<std::string>& attributes,
                   const LdaModel* model, const TermStatistics& stats) {
    ClusterNode& root = tree.root();
    if (vectors.mode() == FeatureMode::Topic && model) {
        const auto c = topic_label_candidates(*model, stats, root.centroid, 1);
        root.label = c.empty() ? kFallbackLabel : c.front().name;
    } else {
        root.label = label_cluster(attribute_contributions(vectors, root.members), root.avg_sentiment, attributes);
    }
    label_group(root, vectors, attributes, model, stats);
}

}  // namespace revex
