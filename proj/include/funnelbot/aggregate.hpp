#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "funnelbot/config.hpp"
#include "funnelbot/timeline.hpp"

namespace funnelbot {

// How many delivery ids the document remembers for duplicate detection.
inline constexpr std::size_t kDeliveryWindow = 256;

// Default intro, used when the repository config does not set one.
// {bots} and {messages} expand to the group count and the folded message
// count when the document is rendered.
inline constexpr const char* kDefaultIntroTemplate =
    "Bot activity on this pull request is funneled into this comment: "
    "{bots} bot(s), {messages} message(s) so far. "
    "Expand a section below to read a bot's latest report.";

// The latest state of one bot's feed: only its most recent message is kept,
// plus a count of how many messages were folded away.
struct BotGroup {
    std::string bot_login;
    std::string category;
    std::string latest_body;
    std::int64_t update_count = 0;
    std::int64_t latest_at = 0;

    bool operator==(const BotGroup&) const = default;
};

// The logical content of the single managed comment. Groups are kept ordered
// by (category rank, login) at all times. last_applied_seq and
// recent_delivery_ids track the allowed-bot comment events folded so far;
// they make event application idempotent and order-checked.
struct AggregatedDocument {
    std::string intro;
    std::vector<BotGroup> groups;
    std::int64_t suppressed_bot_comment_count = 0;
    std::vector<std::string> filtered_bots;
    std::optional<std::int64_t> last_applied_seq;
    std::deque<std::string> recent_delivery_ids;

    bool operator==(const AggregatedDocument&) const = default;
};

class TimelineOrderError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Raised when apply_event sees a seq at or below the last folded one.
class OutOfOrderError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A login counts as a bot when the payload flags it as one, when it carries
// the conventional "[bot]" suffix, or when the repository lists it.
bool detect_bot(const std::string& author_login, AuthorKind author_kind,
                const RepoConfig& config);

AggregatedDocument empty_document(const RepoConfig& config);

// Batch form: folds a whole timeline (sorted by seq) into a document.
// Throws TimelineOrderError when the list is not strictly seq-ascending.
AggregatedDocument build_document(const std::vector<TimelineEvent>& events,
                                  const RepoConfig& config);

// Incremental form; equivalent to build_document over the extended timeline.
// Re-applying a delivery_id the document has already seen is a no-op.
// Throws OutOfOrderError on a stale seq.
AggregatedDocument apply_event(AggregatedDocument doc, const TimelineEvent& event,
                               const RepoConfig& config);

// Total number of messages folded into groups (== suppressed count).
std::int64_t folded_message_count(const AggregatedDocument& doc);

}  // namespace funnelbot
