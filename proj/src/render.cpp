#include "funnelbot/render.hpp"

#include <algorithm>
#include <tuple>

#include "funnelbot/util.hpp"

namespace funnelbot {

namespace {

std::string expand_intro(const AggregatedDocument& doc) {
    if (doc.groups.empty()) return "No bot activity yet.";
    std::string intro = replace_all(doc.intro, "{bots}", std::to_string(doc.groups.size()));
    intro = replace_all(intro, "{messages}", std::to_string(folded_message_count(doc)));
    return intro;
}

// A bot body that happens to contain the marker would make the output claim
// two owners; neuter such occurrences in the rendered copy. The exact body
// stays intact in the state line.
std::string defang_marker(const std::string& body) {
    return replace_all(body, kManagedMarker, "<!-- funnelbot:v1 (escaped) -->");
}

std::string render_group(const BotGroup& group) {
    std::string block;
    block += "<details>\n<summary>";
    block += group.category;
    block += " — ";
    block += group.bot_login;
    block += " (";
    block += std::to_string(group.update_count);
    block += " update(s))</summary>\n\n";
    block += defang_marker(group.latest_body);
    block += "\n\n</details>\n";
    return block;
}

std::string truncation_notice(std::size_t omitted, std::size_t total) {
    return "\n_Truncated: " + std::to_string(total - omitted) + " of " +
           std::to_string(total) + " bot section(s) shown (size limit)._\n";
}

std::string state_line(const AggregatedDocument& doc) {
    return std::string(kStatePrefix) + base64_encode(document_to_json(doc).dump()) +
           kStateSuffix;
}

std::string first_line(const std::string& body) {
    std::size_t end = body.find('\n');
    std::string line = end == std::string::npos ? body : body.substr(0, end);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

std::string render_document(const AggregatedDocument& doc, const RenderLimits& limits) {
    const std::string intro = expand_intro(doc);

    std::string head = kManagedMarker;
    head += '\n';
    head += state_line(doc);
    head += "\n\n";
    head += intro;
    head += '\n';

    std::vector<std::string> blocks;
    blocks.reserve(doc.groups.size());
    for (const auto& group : doc.groups) blocks.push_back("\n" + render_group(group));

    std::size_t total = head.size();
    for (const auto& block : blocks) total += block.size();
    if (total <= limits.max_chars) {
        std::string out = head;
        for (const auto& block : blocks) out += block;
        return out;
    }

    // Drop whole blocks from the tail until head + kept blocks + notice fit.
    for (std::size_t keep = blocks.size(); keep > 0;) {
        --keep;
        std::string out = head;
        for (std::size_t i = 0; i < keep; ++i) out += blocks[i];
        out += truncation_notice(blocks.size() - keep, blocks.size());
        if (out.size() <= limits.max_chars) return out;
    }

    // Even the head alone is over budget. Retry without the state line (the
    // service will rebuild from the comment list instead), then hard-cut.
    std::string bare = kManagedMarker;
    bare += "\n\n";
    bare += intro;
    bare += '\n';
    bare += truncation_notice(doc.groups.size(), doc.groups.size());
    if (bare.size() <= limits.max_chars) return bare;
    return utf8_truncate(bare, limits.max_chars);
}

nlohmann::json document_to_json(const AggregatedDocument& doc) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& group : doc.groups) {
        groups.push_back({
            {"bot_login", group.bot_login},
            {"category", group.category},
            {"latest_body", group.latest_body},
            {"update_count", group.update_count},
            {"latest_at", group.latest_at},
        });
    }
    nlohmann::json j{
        {"intro", doc.intro},
        {"groups", std::move(groups)},
        {"suppressed", doc.suppressed_bot_comment_count},
        {"filtered", doc.filtered_bots},
        {"deliveries", nlohmann::json::array()},
    };
    if (doc.last_applied_seq) j["last_seq"] = *doc.last_applied_seq;
    else j["last_seq"] = nullptr;
    for (const auto& id : doc.recent_delivery_ids) j["deliveries"].push_back(id);
    return j;
}

AggregatedDocument document_from_json(const nlohmann::json& j) {
    AggregatedDocument doc;
    doc.intro = j.at("intro").get<std::string>();
    for (const auto& g : j.at("groups")) {
        BotGroup group;
        group.bot_login = g.at("bot_login").get<std::string>();
        group.category = g.at("category").get<std::string>();
        group.latest_body = g.at("latest_body").get<std::string>();
        group.update_count = g.at("update_count").get<std::int64_t>();
        group.latest_at = g.at("latest_at").get<std::int64_t>();
        doc.groups.push_back(std::move(group));
    }
    doc.suppressed_bot_comment_count = j.at("suppressed").get<std::int64_t>();
    for (const auto& f : j.at("filtered")) doc.filtered_bots.push_back(f.get<std::string>());
    if (!j.at("last_seq").is_null()) doc.last_applied_seq = j.at("last_seq").get<std::int64_t>();
    for (const auto& d : j.at("deliveries")) {
        doc.recent_delivery_ids.push_back(d.get<std::string>());
    }
    return doc;
}

bool is_managed_body(const std::string& body) {
    return first_line(body) == kManagedMarker;
}

std::optional<AggregatedDocument> parse_managed_document(const std::string& body) {
    if (!is_managed_body(body)) return std::nullopt;
    std::size_t line_start = body.find('\n');
    if (line_start == std::string::npos) return std::nullopt;
    ++line_start;
    std::size_t line_end = body.find('\n', line_start);
    std::string line = body.substr(
        line_start, line_end == std::string::npos ? std::string::npos : line_end - line_start);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::string prefix = kStatePrefix;
    const std::string suffix = kStateSuffix;
    if (line.size() <= prefix.size() + suffix.size()) return std::nullopt;
    if (line.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    if (line.compare(line.size() - suffix.size(), suffix.size(), suffix) != 0) return std::nullopt;

    auto decoded = base64_decode(
        line.substr(prefix.size(), line.size() - prefix.size() - suffix.size()));
    if (!decoded) return std::nullopt;
    try {
        return document_from_json(nlohmann::json::parse(*decoded));
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

ManagedCommentLookup find_managed_comment(const std::vector<CommentSnapshot>& comments) {
    ManagedCommentLookup lookup;
    const CommentSnapshot* earliest = nullptr;
    for (const auto& comment : comments) {
        if (!is_managed_body(comment.body)) continue;
        if (earliest == nullptr ||
            std::tie(comment.created_at, comment.comment_id) <
                std::tie(earliest->created_at, earliest->comment_id)) {
            earliest = &comment;
        }
    }
    if (earliest == nullptr) return lookup;
    lookup.comment_id = earliest->comment_id;
    for (const auto& comment : comments) {
        if (comment.comment_id != earliest->comment_id && is_managed_body(comment.body)) {
            lookup.duplicates.push_back(comment.comment_id);
        }
    }
    return lookup;
}

}  // namespace funnelbot
