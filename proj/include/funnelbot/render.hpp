#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "funnelbot/aggregate.hpp"
#include "funnelbot/timeline.hpp"

namespace funnelbot {

// First line of every comment the mediator owns. Exact bytes; invisible in
// rendered markdown, greppable, versioned.
inline constexpr const char* kManagedMarker = "<!-- funnelbot:v1 -->";

// Second line carries the serialized document so the service can pick up
// exactly where it left off from the forge alone.
inline constexpr const char* kStatePrefix = "<!-- funnelbot-state:v1 ";
inline constexpr const char* kStateSuffix = " -->";

struct RenderLimits {
    std::size_t max_chars = 65000;

    bool operator==(const RenderLimits&) const = default;
};

// Markdown body of the managed comment: marker line, hidden state line,
// intro naming the bot/message counts, then one collapsed details block per
// group. Output never exceeds limits.max_chars; when the groups do not fit,
// whole blocks are dropped from the tail and a truncation notice is added.
std::string render_document(const AggregatedDocument& doc,
                            const RenderLimits& limits = {});

// Inverse of the state line: recovers the document from a managed comment
// body. Absent when the body is not marker-led or the state line is missing
// or corrupt (the caller then falls back to rebuilding from the comment list).
std::optional<AggregatedDocument> parse_managed_document(const std::string& body);

bool is_managed_body(const std::string& body);

struct ManagedCommentLookup {
    std::optional<std::int64_t> comment_id;   // earliest marker-bearing comment
    std::vector<std::int64_t> duplicates;     // later marker-bearing comments
};

// Earliest-created comment whose first line equals the marker. Later marked
// comments are reported as duplicates for cleanup.
ManagedCommentLookup find_managed_comment(const std::vector<CommentSnapshot>& comments);

nlohmann::json document_to_json(const AggregatedDocument& doc);
AggregatedDocument document_from_json(const nlohmann::json& j);  // throws on malformed

}  // namespace funnelbot
