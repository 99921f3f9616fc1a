#include "funnelbot/timeline.hpp"

namespace funnelbot {

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::pr_opened: return "pr_opened";
        case EventKind::comment_created: return "comment_created";
        case EventKind::comment_edited: return "comment_edited";
    }
    return "unknown";
}

const char* to_string(AuthorKind kind) {
    return kind == AuthorKind::bot ? "bot" : "human";
}

std::optional<EventKind> event_kind_from_string(const std::string& s) {
    if (s == "pr_opened") return EventKind::pr_opened;
    if (s == "comment_created") return EventKind::comment_created;
    if (s == "comment_edited") return EventKind::comment_edited;
    return std::nullopt;
}

std::optional<AuthorKind> author_kind_from_string(const std::string& s) {
    if (s == "human") return AuthorKind::human;
    if (s == "bot") return AuthorKind::bot;
    return std::nullopt;
}

}  // namespace funnelbot
