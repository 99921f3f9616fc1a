#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace funnelbot {

enum class EventKind { pr_opened, comment_created, comment_edited };
enum class AuthorKind { human, bot };

const char* to_string(EventKind kind);
const char* to_string(AuthorKind kind);
std::optional<EventKind> event_kind_from_string(const std::string& s);
std::optional<AuthorKind> author_kind_from_string(const std::string& s);

inline bool is_comment_kind(EventKind kind) {
    return kind == EventKind::comment_created || kind == EventKind::comment_edited;
}

// One comment as it exists on the forge at a point in time. Timestamps are
// UTC epoch seconds; edited_at is set only once the comment has been edited.
struct CommentSnapshot {
    std::int64_t comment_id = 0;
    std::string author_login;
    AuthorKind author_kind = AuthorKind::human;
    std::string body;
    std::int64_t created_at = 0;
    std::optional<std::int64_t> edited_at;

    bool operator==(const CommentSnapshot&) const = default;
};

// One occurrence on a pull request, the unit the aggregator folds over.
// `seq` is a per-pull-request ordinal, strictly increasing within a timeline;
// `delivery_id` is the forge's unique delivery token for the webhook event.
// Comment kinds carry the comment's state as of this event.
struct TimelineEvent {
    std::int64_t seq = 0;
    std::string delivery_id;
    EventKind kind = EventKind::pr_opened;
    std::optional<CommentSnapshot> comment;

    bool operator==(const TimelineEvent&) const = default;
};

}  // namespace funnelbot
