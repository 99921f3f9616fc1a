#include "funnelbot/webhook_codec.hpp"

#include <json.hpp>

#include "funnelbot/signature.hpp"
#include "funnelbot/util.hpp"

namespace funnelbot {

namespace {

using nlohmann::json;

const json& require(const json& payload, const char* pointer_text) {
    const json::json_pointer pointer(pointer_text);
    if (!payload.contains(pointer)) {
        // "/comment/body" -> "comment.body missing"
        std::string dotted(pointer_text + 1);
        for (char& c : dotted) {
            if (c == '/') c = '.';
        }
        throw DecodeError(dotted + " missing");
    }
    return payload.at(pointer);
}

std::string require_string(const json& payload, const char* pointer_text) {
    const json& node = require(payload, pointer_text);
    if (!node.is_string()) throw DecodeError(std::string(pointer_text + 1) + " must be a string");
    return node.get<std::string>();
}

CommentSnapshot decode_comment(const json& payload, bool edited) {
    CommentSnapshot snapshot;
    snapshot.comment_id = require(payload, "/comment/id").get<std::int64_t>();
    snapshot.author_login = require_string(payload, "/comment/user/login");
    const std::string type = require_string(payload, "/comment/user/type");
    snapshot.author_kind = iequals(type, "Bot") ? AuthorKind::bot : AuthorKind::human;
    snapshot.body = require_string(payload, "/comment/body");
    snapshot.created_at = parse_rfc3339(require_string(payload, "/comment/created_at"));
    if (edited) {
        snapshot.edited_at = parse_rfc3339(require_string(payload, "/comment/updated_at"));
    }
    return snapshot;
}

}  // namespace

std::variant<InboundEvent, Ignored> decode_event(const ForgeEventEnvelope& envelope) {
    json payload;
    try {
        payload = json::parse(envelope.raw_body);
    } catch (const json::parse_error& e) {
        throw DecodeError(std::string("payload is not valid JSON: ") + e.what());
    }

    try {
        if (envelope.event_name == "pull_request") {
            const std::string action = require_string(payload, "/action");
            if (action != "opened") return Ignored{"pull_request action " + action};
            InboundEvent inbound;
            inbound.repo = require_string(payload, "/repository/full_name");
            inbound.pr_number = require(payload, "/number").get<std::int64_t>();
            inbound.event.delivery_id = envelope.delivery_id;
            inbound.event.kind = EventKind::pr_opened;
            return inbound;
        }

        if (envelope.event_name == "issue_comment") {
            const std::string action = require_string(payload, "/action");
            if (action != "created" && action != "edited") {
                return Ignored{"issue_comment action " + action};
            }
            // Plain issue comments (no pull_request key) are out of scope.
            if (!payload.contains(json::json_pointer("/issue/pull_request"))) {
                return Ignored{"comment on a non-PR issue"};
            }
            InboundEvent inbound;
            inbound.repo = require_string(payload, "/repository/full_name");
            inbound.pr_number = require(payload, "/issue/number").get<std::int64_t>();
            inbound.event.delivery_id = envelope.delivery_id;
            const bool edited = action == "edited";
            inbound.event.kind = edited ? EventKind::comment_edited : EventKind::comment_created;
            inbound.event.comment = decode_comment(payload, edited);
            return inbound;
        }
    } catch (const json::exception& e) {
        throw DecodeError(std::string("malformed payload: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DecodeError(e.what());
    }

    return Ignored{"event " + envelope.event_name};
}

ForgeEventEnvelope encode_event(const std::string& repo, std::int64_t pr_number,
                                const TimelineEvent& event, std::string_view secret) {
    json payload;
    ForgeEventEnvelope envelope;
    envelope.delivery_id = event.delivery_id;

    if (event.kind == EventKind::pr_opened) {
        envelope.event_name = "pull_request";
        payload = {
            {"action", "opened"},
            {"number", pr_number},
            {"pull_request", {{"number", pr_number}}},
            {"repository", {{"full_name", repo}}},
        };
    } else {
        envelope.event_name = "issue_comment";
        const CommentSnapshot& comment = event.comment.value();
        json comment_json = {
            {"id", comment.comment_id},
            {"body", comment.body},
            {"created_at", format_rfc3339(comment.created_at)},
            {"user",
             {{"login", comment.author_login},
              {"type", comment.author_kind == AuthorKind::bot ? "Bot" : "User"}}},
        };
        if (event.kind == EventKind::comment_edited) {
            comment_json["updated_at"] =
                format_rfc3339(comment.edited_at.value_or(comment.created_at));
        }
        payload = {
            {"action", event.kind == EventKind::comment_edited ? "edited" : "created"},
            {"issue",
             {{"number", pr_number}, {"pull_request", {{"url", "pulls/" + std::to_string(pr_number)}}}}},
            {"comment", std::move(comment_json)},
            {"repository", {{"full_name", repo}}},
        };
    }

    envelope.raw_body = payload.dump();
    if (!secret.empty()) envelope.signature_header = signature_for(secret, envelope.raw_body);
    return envelope;
}

}  // namespace funnelbot
