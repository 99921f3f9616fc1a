#include "funnelbot/aggregate.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include "funnelbot/util.hpp"

namespace funnelbot {

bool detect_bot(const std::string& author_login, AuthorKind author_kind,
                const RepoConfig& config) {
    if (author_kind == AuthorKind::bot) return true;
    if (author_login.size() >= 5 &&
        author_login.compare(author_login.size() - 5, 5, "[bot]") == 0) {
        return true;
    }
    return find_policy(author_login, config) != nullptr;
}

namespace {

std::string intro_for(const RepoConfig& config) {
    return config.intro_template.value_or(kDefaultIntroTemplate);
}

// Sort key shared by the batch and incremental paths. Lexicographic on
// category rank, then case-folded login, then raw login as the final
// tie-break so the order is total.
std::tuple<std::size_t, std::string, const std::string&> group_key(
    const BotGroup& group, const RepoConfig& config) {
    return {category_rank(group.category, config), ascii_lower(group.bot_login),
            group.bot_login};
}

void validate_comment_event(const TimelineEvent& event) {
    if (is_comment_kind(event.kind) && !event.comment.has_value()) {
        throw TimelineOrderError("event seq " + std::to_string(event.seq) +
                                 ": comment kind without a comment");
    }
}

std::int64_t event_timestamp(const TimelineEvent& event) {
    const CommentSnapshot& c = *event.comment;
    return event.kind == EventKind::comment_edited ? c.edited_at.value_or(c.created_at)
                                                   : c.created_at;
}

void remember_delivery(AggregatedDocument& doc, const std::string& delivery_id) {
    doc.recent_delivery_ids.push_back(delivery_id);
    while (doc.recent_delivery_ids.size() > kDeliveryWindow) {
        doc.recent_delivery_ids.pop_front();
    }
}

bool delivery_seen(const AggregatedDocument& doc, const std::string& delivery_id) {
    return std::find(doc.recent_delivery_ids.begin(), doc.recent_delivery_ids.end(),
                     delivery_id) != doc.recent_delivery_ids.end();
}

void note_filtered(AggregatedDocument& doc, const std::string& login) {
    for (const auto& existing : doc.filtered_bots) {
        if (iequals(existing, login)) return;
    }
    doc.filtered_bots.push_back(login);
}

}  // namespace

AggregatedDocument empty_document(const RepoConfig& config) {
    AggregatedDocument doc;
    doc.intro = intro_for(config);
    return doc;
}

std::int64_t folded_message_count(const AggregatedDocument& doc) {
    std::int64_t total = 0;
    for (const auto& group : doc.groups) total += group.update_count;
    return total;
}

AggregatedDocument build_document(const std::vector<TimelineEvent>& events,
                                  const RepoConfig& config) {
    AggregatedDocument doc = empty_document(config);

    // Accumulate per-bot state in one pass; ordering is resolved at the end.
    std::unordered_map<std::string, std::size_t> index;  // lower(login) -> groups slot
    std::optional<std::int64_t> prev_seq;

    for (const TimelineEvent& event : events) {
        if (prev_seq && event.seq <= *prev_seq) {
            throw TimelineOrderError("event list not sorted by seq (seq " +
                                     std::to_string(event.seq) + " after " +
                                     std::to_string(*prev_seq) + ")");
        }
        prev_seq = event.seq;

        if (!is_comment_kind(event.kind)) continue;
        validate_comment_event(event);
        if (delivery_seen(doc, event.delivery_id)) continue;

        const CommentSnapshot& comment = *event.comment;
        if (!detect_bot(comment.author_login, comment.author_kind, config)) continue;

        if (!is_allowed(comment.author_login, config)) {
            note_filtered(doc, comment.author_login);
            continue;
        }

        const std::string key = ascii_lower(comment.author_login);
        auto found = index.find(key);
        if (found == index.end()) {
            BotGroup group;
            group.bot_login = comment.author_login;
            group.category = category_of(comment.author_login, config);
            group.latest_body = comment.body;
            group.update_count = 1;
            group.latest_at = event_timestamp(event);
            index.emplace(key, doc.groups.size());
            doc.groups.push_back(std::move(group));
        } else {
            BotGroup& group = doc.groups[found->second];
            group.latest_body = comment.body;
            group.update_count += 1;
            group.latest_at = event_timestamp(event);
        }
        doc.suppressed_bot_comment_count += 1;
        doc.last_applied_seq = event.seq;
        remember_delivery(doc, event.delivery_id);
    }

    std::sort(doc.groups.begin(), doc.groups.end(),
              [&config](const BotGroup& a, const BotGroup& b) {
                  return group_key(a, config) < group_key(b, config);
              });
    return doc;
}

AggregatedDocument apply_event(AggregatedDocument doc, const TimelineEvent& event,
                               const RepoConfig& config) {
    if (!is_comment_kind(event.kind)) return doc;
    validate_comment_event(event);
    if (delivery_seen(doc, event.delivery_id)) return doc;

    const CommentSnapshot& comment = *event.comment;
    if (!detect_bot(comment.author_login, comment.author_kind, config)) return doc;

    if (!is_allowed(comment.author_login, config)) {
        note_filtered(doc, comment.author_login);
        return doc;
    }

    if (doc.last_applied_seq && event.seq <= *doc.last_applied_seq) {
        throw OutOfOrderError("out-of-order event: seq " + std::to_string(event.seq) +
                              " already folded (last applied " +
                              std::to_string(*doc.last_applied_seq) + ")");
    }

    doc.intro = intro_for(config);

    auto slot = doc.groups.end();
    for (auto it = doc.groups.begin(); it != doc.groups.end(); ++it) {
        if (iequals(it->bot_login, comment.author_login)) {
            slot = it;
            break;
        }
    }

    if (slot == doc.groups.end()) {
        BotGroup group;
        group.bot_login = comment.author_login;
        group.category = category_of(comment.author_login, config);
        group.latest_body = comment.body;
        group.update_count = 1;
        group.latest_at = event_timestamp(event);
        auto pos = std::lower_bound(doc.groups.begin(), doc.groups.end(), group,
                                    [&config](const BotGroup& a, const BotGroup& b) {
                                        return group_key(a, config) < group_key(b, config);
                                    });
        doc.groups.insert(pos, std::move(group));
    } else {
        slot->latest_body = comment.body;
        slot->update_count += 1;
        slot->latest_at = event_timestamp(event);
    }

    doc.suppressed_bot_comment_count += 1;
    doc.last_applied_seq = event.seq;
    remember_delivery(doc, event.delivery_id);
    return doc;
}

}  // namespace funnelbot
