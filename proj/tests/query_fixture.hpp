#pragma once

// Random review fixture and a naive evaluator for command chains, used by the
// query unit tests and the acceptance runner.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "revex/corpus.hpp"
#include "revex/featurize.hpp"
#include "revex/rng.hpp"

namespace revex::testing {

struct QueryFixture {
    std::vector<std::string> attributes = {"cleanliness", "staff", "food", "location"};
    std::vector<std::string> texts;
    std::vector<std::map<std::string, double>> scores;  // absent key means not mentioned
    std::vector<double> sentiments;

    Corpus corpus;
    FeatureMatrix vectors;
};

inline QueryFixture make_query_fixture(std::size_t n, std::uint64_t seed) {
    static const std::vector<std::string> words = {"Clean", "room", "dirty", "carpet", "Staff", "friendly",
                                                   "rude", "food", "tasty", "cold", "great", "location",
                                                   "near", "beach", "the", "was", "very", "Breakfast"};
    Rng rng(seed);
    QueryFixture f;
    std::vector<Review> reviews;
    f.vectors = FeatureMatrix(FeatureMode::Extraction, n, f.attributes.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::string t;
        const auto len = 1 + rng.index(12);
        for (std::size_t w = 0; w < len; ++w) t += (w ? " " : "") + words[rng.index(words.size())];
        f.texts.push_back(t);
        std::map<std::string, double> s;
        for (std::size_t a = 0; a < f.attributes.size(); ++a) {
            if (rng.uniform() < 0.6) {
                // quarter steps so ties and equality filters happen often
                const double v = static_cast<double>(static_cast<int>(rng.index(9)) - 4) * 0.25;
                s[f.attributes[a]] = v;
                f.vectors.set(i, a, v);
            }
        }
        f.scores.push_back(s);
        f.sentiments.push_back(static_cast<double>(static_cast<int>(rng.index(21)) - 10) * 0.1);
        Review r;
        r.id = "q" + std::to_string(i);
        r.entity_id = "e1";
        r.text = t;
        reviews.push_back(r);
    }
    f.corpus = Corpus(std::move(reviews), {});
    return f;
}

struct ChainStep {
    enum class Kind { Sort, Filter, Literal, Regex, Color, Reset };
    Kind kind = Kind::Sort;
    std::string attribute;
    bool ascending = false;
    std::string op;
    double value = 0.0;
    std::string pattern;
    bool icase = false;
    std::string text;  // command source
};

inline ChainStep random_step(Rng& rng, const std::vector<std::string>& attributes) {
    static const std::vector<std::string> ops = {"<", "<=", ">", ">=", "==", "!="};
    static const std::vector<std::string> literals = {"clean", "CARPET", "staff", "great location", "the",
                                                      "zzz"};
    static const std::vector<std::string> regexes = {"clean", "Clean", "^the", "room|beach", "st[a-z]+",
                                                     "y$"};
    std::vector<std::string> names = attributes;
    names.push_back("sentiment");
    names.push_back("length");
    ChainStep s;
    const double pick = rng.uniform();
    if (pick < 0.3) {
        s.kind = ChainStep::Kind::Sort;
        s.attribute = names[rng.index(names.size())];
        const auto d = rng.index(3);
        s.ascending = d == 1;
        s.text = "tSort(" + s.attribute + (d == 0 ? ")" : d == 1 ? ", asc)" : ", desc)");
    } else if (pick < 0.6) {
        s.kind = ChainStep::Kind::Filter;
        s.attribute = names[rng.index(names.size())];
        s.op = ops[rng.index(ops.size())];
        s.value = s.attribute == "length" ? static_cast<double>(rng.index(80))
                                          : static_cast<double>(static_cast<int>(rng.index(9)) - 4) * 0.25;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", s.value);
        s.text = "tFilter(" + s.attribute + ", " + s.op + " " + buf + ")";
    } else if (pick < 0.75) {
        s.kind = ChainStep::Kind::Literal;
        s.pattern = literals[rng.index(literals.size())];
        s.text = "tGrep(\"" + s.pattern + "\")";
    } else if (pick < 0.9) {
        s.kind = ChainStep::Kind::Regex;
        s.pattern = regexes[rng.index(regexes.size())];
        s.icase = rng.uniform() < 0.5;
        s.text = "tGrep(/" + s.pattern + "/" + (s.icase ? "i" : "") + ")";
    } else if (pick < 0.95) {
        s.kind = ChainStep::Kind::Color;
        s.attribute = names[rng.index(names.size())];
        s.text = "tColor(" + s.attribute + ")";
    } else {
        s.kind = ChainStep::Kind::Reset;
        s.text = "tReset()";
    }
    return s;
}

/// Evaluates the chain from scratch with plain loops.
inline std::vector<std::size_t> naive_evaluate(const QueryFixture& f, const std::vector<ChainStep>& chain,
                                               const std::vector<std::size_t>& scope) {
    auto value = [&](std::size_t r, const std::string& a) -> std::optional<double> {
        if (a == "sentiment") return f.sentiments[r];
        if (a == "length") return static_cast<double>(f.texts[r].size());  // fixture text is ASCII
        auto it = f.scores[r].find(a);
        if (it == f.scores[r].end()) return std::nullopt;
        return it->second;
    };
    auto lower = [](std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    std::vector<std::size_t> ids = scope;
    for (const auto& s : chain) {
        std::vector<std::size_t> next;
        switch (s.kind) {
            case ChainStep::Kind::Sort: {
                std::vector<std::size_t> with, without;
                for (auto r : ids) (value(r, s.attribute) ? with : without).push_back(r);
                // insertion sort keeps equal keys in their current order
                for (std::size_t i = 1; i < with.size(); ++i) {
                    for (std::size_t j = i; j > 0; --j) {
                        const double a = *value(with[j - 1], s.attribute);
                        const double b = *value(with[j], s.attribute);
                        if (s.ascending ? b < a : b > a) {
                            std::swap(with[j - 1], with[j]);
                        } else {
                            break;
                        }
                    }
                }
                next = with;
                next.insert(next.end(), without.begin(), without.end());
                break;
            }
            case ChainStep::Kind::Filter:
                for (auto r : ids) {
                    const auto v = value(r, s.attribute);
                    if (!v) continue;
                    const bool keep = s.op == "<"    ? *v < s.value
                                      : s.op == "<=" ? *v <= s.value
                                      : s.op == ">"  ? *v > s.value
                                      : s.op == ">=" ? *v >= s.value
                                      : s.op == "==" ? *v == s.value
                                                     : *v != s.value;
                    if (keep) next.push_back(r);
                }
                break;
            case ChainStep::Kind::Literal:
                for (auto r : ids) {
                    if (lower(f.texts[r]).find(lower(s.pattern)) != std::string::npos) next.push_back(r);
                }
                break;
            case ChainStep::Kind::Regex: {
                const std::regex re(s.pattern, s.icase ? std::regex::ECMAScript | std::regex::icase
                                                       : std::regex::ECMAScript);
                for (auto r : ids) {
                    if (std::regex_search(f.texts[r], re)) next.push_back(r);
                }
                break;
            }
            case ChainStep::Kind::Color:
                next = ids;
                break;
            case ChainStep::Kind::Reset:
                next = scope;
                break;
        }
        ids = std::move(next);
    }
    return ids;
}

}  // namespace revex::testing
