#include <algorithm>

#include "revex/query.hpp"
#include "revex/text.hpp"

namespace revex::query {

ReviewStore::ReviewStore(const Corpus& corpus, const FeatureMatrix& vectors, std::span<const double> sentiments)
    : corpus_(&corpus), vectors_(&vectors), sentiments_(sentiments) {
    lengths_.reserve(corpus.size());
    for (const auto& r : corpus.reviews()) lengths_.push_back(static_cast<double>(text::char_count(r.text)));
}

std::optional<double> ReviewStore::value(std::size_t review, const AttributeRef& attribute) const {
    switch (attribute.kind) {
        case AttributeRef::Kind::Sentiment: return sentiments_[review];
        case AttributeRef::Kind::Length: return lengths_[review];
        case AttributeRef::Kind::Schema: return vectors_->get(review, attribute.index);
    }
    return std::nullopt;
}

Session start_session(std::vector<std::size_t> initial) {
    Session s;
    s.working_set = initial;
    s.initial = std::move(initial);
    return s;
}

namespace {

bool holds(Comparator c, double lhs, double rhs) {
    switch (c) {
        case Comparator::Less: return lhs < rhs;
        case Comparator::LessEqual: return lhs <= rhs;
        case Comparator::Greater: return lhs > rhs;
        case Comparator::GreaterEqual: return lhs >= rhs;
        case Comparator::Equal: return lhs == rhs;
        case Comparator::NotEqual: return lhs != rhs;
    }
    return false;
}

void run_op(std::vector<std::size_t>& ids, const CommandOp& op, const ReviewStore& store) {
    if (const auto* s = std::get_if<Sort>(&op)) {
        std::vector<std::pair<std::optional<double>, std::size_t>> keyed;
        keyed.reserve(ids.size());
        for (std::size_t id : ids) keyed.emplace_back(store.value(id, s->attribute), id);
        const bool asc = s->direction == Direction::Asc;
        std::stable_sort(keyed.begin(), keyed.end(), [asc](const auto& a, const auto& b) {
            if (!a.first || !b.first) return a.first.has_value() && !b.first.has_value();
            return asc ? *a.first < *b.first : *a.first > *b.first;
        });
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = keyed[i].second;
    } else if (const auto* f = std::get_if<Filter>(&op)) {
        std::erase_if(ids, [&](std::size_t id) {
            const auto v = store.value(id, f->attribute);
            return !v || !holds(f->comparator, *v, f->value);
        });
    } else if (const auto* g = std::get_if<Grep>(&op)) {
        std::erase_if(ids, [&](std::size_t id) { return !g->matches(store.text(id)); });
    }
}

}  // namespace

void apply_in_place(Session& session, const Command& command, const ReviewStore& store) {
    if (std::holds_alternative<Reset>(command.op)) {
        session.working_set = session.initial;
        session.history.clear();
        session.color.reset();
        return;
    }
    if (const auto* c = std::get_if<Color>(&command.op)) {
        session.color = c->attribute;
    } else {
        run_op(session.working_set, command.op, store);
    }
    session.history.push_back(command);
}

Session apply(Session session, const Command& command, const ReviewStore& store) {
    apply_in_place(session, command, store);
    return session;
}

std::vector<std::size_t> evaluate_remote(std::span<const Command> history, std::span<const std::size_t> scope,
                                         const ReviewStore& store) {
    std::vector<std::size_t> ids(scope.begin(), scope.end());
    for (const auto& cmd : history) {
        if (std::holds_alternative<Reset>(cmd.op)) {
            ids.assign(scope.begin(), scope.end());
        } else {
            run_op(ids, cmd.op, store);
        }
    }
    return ids;
}

std::vector<std::size_t> evaluate_remote(const std::vector<std::string>& history,
                                         std::span<const std::size_t> scope,
                                         const std::vector<std::string>& attributes, const ReviewStore& store) {
    std::vector<Command> parsed;
    parsed.reserve(history.size());
    for (std::size_t i = 0; i < history.size(); ++i) {
        try {
            parsed.push_back(parse(history[i], attributes));
        } catch (const ParseError& e) {
            throw ParseError("history[" + std::to_string(i) + "]: " + e.detail(), e.position());
        }
    }
    return evaluate_remote(parsed, scope, store);
}

}  // namespace revex::query
