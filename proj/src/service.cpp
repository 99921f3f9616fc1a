#include "funnelbot/service.hpp"

#include <httplib.h>

#include <algorithm>

#include "funnelbot/render.hpp"
#include "funnelbot/signature.hpp"
#include "funnelbot/util.hpp"
#include "funnelbot/version.hpp"
#include "funnelbot/webhook_codec.hpp"

namespace funnelbot {

const char* to_string(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::rejected: return "rejected";
        case OutcomeKind::skipped: return "skipped";
        case OutcomeKind::skipped_duplicate: return "skipped_duplicate";
        case OutcomeKind::upserted: return "upserted";
        case OutcomeKind::failed: return "failed";
    }
    return "unknown";
}

MediatorService::MediatorService(ForgeActions& forge, ServiceOptions options)
    : forge_(forge), options_(std::move(options)) {}

MetricsSnapshot MediatorService::metrics() const {
    MetricsSnapshot snapshot;
    snapshot.events_in = events_in_.load();
    snapshot.events_ignored = events_ignored_.load();
    snapshot.comments_suppressed = comments_suppressed_.load();
    snapshot.upserts = upserts_.load();
    return snapshot;
}

bool MediatorService::dedup_seen_or_remember(const std::string& delivery_id) {
    std::lock_guard<std::mutex> lock(dedup_mutex_);
    auto found = dedup_index_.find(delivery_id);
    if (found != dedup_index_.end()) return true;
    dedup_order_.push_back(delivery_id);
    dedup_index_.emplace(delivery_id, std::prev(dedup_order_.end()));
    while (dedup_order_.size() > options_.dedup_capacity) {
        dedup_index_.erase(dedup_order_.front());
        dedup_order_.pop_front();
    }
    return false;
}

std::shared_ptr<MediatorService::Lane> MediatorService::lane_for(const std::string& key) {
    std::lock_guard<std::mutex> lock(lanes_mutex_);
    auto& lane = lanes_[key];
    if (!lane) lane = std::make_shared<Lane>();
    return lane;
}

RepoConfig MediatorService::load_config(const std::string& repo) {
    {
        std::lock_guard<std::mutex> lock(config_mutex_);
        auto found = config_cache_.find(repo);
        if (found != config_cache_.end() &&
            std::chrono::steady_clock::now() - found->second.fetched_at < options_.config_ttl) {
            if (!found->second.valid) throw ConfigValidationError({found->second.error});
            return found->second.config;
        }
    }

    // Absent file means defaults; a broken file must fail the pipeline, not
    // fall back to defaults, or we would suppress comments without a policy.
    auto contents = forge_.read_repo_file(repo, kConfigPath);
    CachedConfig cached;
    cached.fetched_at = std::chrono::steady_clock::now();
    try {
        cached.config = parse_config(contents.value_or("")).config;
    } catch (const ConfigError& e) {
        cached.valid = false;
        cached.error = e.what();
    }
    {
        std::lock_guard<std::mutex> lock(config_mutex_);
        config_cache_[repo] = cached;
    }
    if (!cached.valid) throw ConfigValidationError({cached.error});
    return cached.config;
}

AggregatedDocument MediatorService::reconstruct_document(
    const std::vector<CommentSnapshot>& comments, const RepoConfig& config) {
    std::vector<TimelineEvent> events;
    events.reserve(comments.size());
    std::int64_t seq = 0;
    for (const auto& comment : comments) {
        if (is_managed_body(comment.body)) continue;
        TimelineEvent event;
        event.seq = ++seq;
        event.delivery_id = "bootstrap-" + std::to_string(comment.comment_id);
        event.kind = EventKind::comment_created;
        event.comment = comment;
        events.push_back(std::move(event));
    }
    return build_document(events, config);
}

Outcome MediatorService::handle_envelope(const ForgeEventEnvelope& envelope) {
    if (!verify_signature(options_.secret, envelope)) {
        return {OutcomeKind::rejected, std::nullopt, "signature verification failed"};
    }
    events_in_.fetch_add(1);

    if (dedup_seen_or_remember(envelope.delivery_id)) {
        events_ignored_.fetch_add(1);
        return {OutcomeKind::skipped_duplicate, std::nullopt,
                "delivery " + envelope.delivery_id + " already handled"};
    }

    try {
        return process(envelope);
    } catch (const ConfigError& e) {
        return {OutcomeKind::failed, std::nullopt, e.what()};
    } catch (const ForgeError& e) {
        return {OutcomeKind::failed, std::nullopt,
                std::string(to_string(e.kind())) + ": " + e.what()};
    } catch (const DecodeError& e) {
        return {OutcomeKind::failed, std::nullopt, std::string("decode error: ") + e.what()};
    }
}

Outcome MediatorService::process(const ForgeEventEnvelope& envelope) {
    auto decoded = decode_event(envelope);
    if (std::holds_alternative<Ignored>(decoded)) {
        events_ignored_.fetch_add(1);
        return {OutcomeKind::skipped, std::nullopt, std::get<Ignored>(decoded).reason};
    }

    InboundEvent inbound = std::move(std::get<InboundEvent>(decoded));
    const std::string lane_key = inbound.repo + "#" + std::to_string(inbound.pr_number);
    auto lane = lane_for(lane_key);
    std::lock_guard<std::mutex> serialize(lane->mutex);

    const RepoConfig config = load_config(inbound.repo);

    if (config.mode == MediationMode::passthrough) {
        events_ignored_.fetch_add(1);
        return {OutcomeKind::skipped, std::nullopt, "passthrough mode"};
    }

    if (inbound.event.kind == EventKind::pr_opened) {
        // Nothing to mirror yet; the managed comment appears with the first
        // allowed bot message.
        events_ignored_.fetch_add(1);
        return {OutcomeKind::skipped, std::nullopt, "pull request opened"};
    }

    const CommentSnapshot& comment = inbound.event.comment.value();

    if (iequals(comment.author_login, options_.bot_login) || is_managed_body(comment.body)) {
        events_ignored_.fetch_add(1);
        return {OutcomeKind::skipped, std::nullopt, "own comment"};
    }

    if (!detect_bot(comment.author_login, comment.author_kind, config)) {
        events_ignored_.fetch_add(1);
        return {OutcomeKind::skipped, std::nullopt, "human comment"};
    }

    const bool allowed = is_allowed(comment.author_login, config);

    const auto comments = forge_.list_pr_comments(inbound.repo, inbound.pr_number);
    const ManagedCommentLookup lookup = find_managed_comment(comments);
    for (std::int64_t duplicate : lookup.duplicates) {
        forge_.minimize_comment(inbound.repo, duplicate);
        comments_suppressed_.fetch_add(1);
    }

    std::optional<AggregatedDocument> doc;
    if (lookup.comment_id) {
        for (const auto& existing : comments) {
            if (existing.comment_id == *lookup.comment_id) {
                doc = parse_managed_document(existing.body);
                break;
            }
        }
    }
    if (!doc) {
        // No managed comment yet, or one without a readable state line
        // (edited by hand, older version): rebuild from the comment list.
        // The triggering comment is about to be folded as the live event, so
        // a creation must not also enter through the bootstrap.
        std::vector<CommentSnapshot> bootstrap = comments;
        if (inbound.event.kind == EventKind::comment_created) {
            std::erase_if(bootstrap, [&comment](const CommentSnapshot& c) {
                return c.comment_id == comment.comment_id;
            });
        }
        doc = reconstruct_document(bootstrap, config);
    }

    if (!allowed && !lookup.comment_id) {
        // Filtered bots never cause the managed comment to appear; the login
        // is recovered from the untouched original on first contact.
        events_ignored_.fetch_add(1);
        return {OutcomeKind::skipped, std::nullopt,
                "bot " + comment.author_login + " filtered by policy"};
    }

    inbound.event.seq = doc->last_applied_seq.value_or(0) + 1;
    AggregatedDocument updated = apply_event(*doc, inbound.event, config);
    if (updated == *doc && lookup.comment_id) {
        events_ignored_.fetch_add(1);
        const bool folded_before =
            std::find(doc->recent_delivery_ids.begin(), doc->recent_delivery_ids.end(),
                      inbound.event.delivery_id) != doc->recent_delivery_ids.end();
        return {folded_before ? OutcomeKind::skipped_duplicate : OutcomeKind::skipped,
                lookup.comment_id, "managed comment already up to date"};
    }

    const std::string rendered = render_document(updated, RenderLimits{config.max_chars});

    // Upsert before suppressing: if the minimize fails the information is
    // duplicated on the pull request, never lost.
    std::int64_t managed_id;
    if (lookup.comment_id) {
        managed_id = *lookup.comment_id;
        forge_.update_comment(inbound.repo, managed_id, rendered);
    } else {
        managed_id = forge_.create_comment(inbound.repo, inbound.pr_number, rendered);
    }
    upserts_.fetch_add(1);

    if (allowed && config.suppression != SuppressionMode::none) {
        if (config.suppression == SuppressionMode::minimize) {
            forge_.minimize_comment(inbound.repo, comment.comment_id);
        } else {
            forge_.delete_comment(inbound.repo, comment.comment_id);
        }
        comments_suppressed_.fetch_add(1);
    }

    return {OutcomeKind::upserted, managed_id, ""};
}

void attach_routes(httplib::Server& server, MediatorService& service) {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(std::string("funnelbot ") + kVersion + "\n", "text/plain");
    });

    server.Get("/metrics", [&service](const httplib::Request&, httplib::Response& res) {
        const MetricsSnapshot m = service.metrics();
        std::string body;
        body += "events_in " + std::to_string(m.events_in) + "\n";
        body += "events_ignored " + std::to_string(m.events_ignored) + "\n";
        body += "comments_suppressed " + std::to_string(m.comments_suppressed) + "\n";
        body += "upserts " + std::to_string(m.upserts) + "\n";
        res.set_content(body, "text/plain");
    });

    server.Post("/webhook", [&service](const httplib::Request& req, httplib::Response& res) {
        ForgeEventEnvelope envelope;
        envelope.delivery_id = req.get_header_value(kDeliveryHeader);
        envelope.event_name = req.get_header_value(kEventHeader);
        if (req.has_header(kSignatureHeader)) {
            envelope.signature_header = req.get_header_value(kSignatureHeader);
        }
        envelope.raw_body = req.body;

        const Outcome outcome = service.handle_envelope(envelope);
        nlohmann::json reply{{"outcome", to_string(outcome.kind)}};
        if (!outcome.detail.empty()) reply["detail"] = outcome.detail;
        if (outcome.comment_id) reply["comment_id"] = *outcome.comment_id;

        switch (outcome.kind) {
            case OutcomeKind::rejected: res.status = 401; break;
            case OutcomeKind::failed: res.status = 500; break;
            default: res.status = 202; break;
        }
        res.set_content(reply.dump(), "application/json");
    });
}

}  // namespace funnelbot
