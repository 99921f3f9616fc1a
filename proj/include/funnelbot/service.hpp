#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "funnelbot/aggregate.hpp"
#include "funnelbot/config.hpp"
#include "funnelbot/forge.hpp"

namespace httplib {
class Server;
}

namespace funnelbot {

struct ServiceOptions {
    std::string secret;
    std::string bot_login = "funnelbot[bot]";
    std::chrono::seconds config_ttl{60};
    std::size_t dedup_capacity = 10000;
};

enum class OutcomeKind { rejected, skipped, skipped_duplicate, upserted, failed };

const char* to_string(OutcomeKind kind);

struct Outcome {
    OutcomeKind kind = OutcomeKind::skipped;
    std::optional<std::int64_t> comment_id;  // set for upserted
    std::string detail;
};

struct MetricsSnapshot {
    std::uint64_t events_in = 0;
    std::uint64_t events_ignored = 0;
    std::uint64_t comments_suppressed = 0;
    std::uint64_t upserts = 0;
};

// Webhook pipeline. The managed comment on the forge carries the document
// state, so the service keeps no per-pull-request documents: everything here
// (lanes, dedup cache, config cache, counters) is disposable. Losing it and
// re-handling the next event produces the same forge state.
class MediatorService {
  public:
    MediatorService(ForgeActions& forge, ServiceOptions options);

    // verify -> dedup -> decode -> classify -> load config -> fold -> upsert
    // -> suppress original. Safe to call concurrently; events for one pull
    // request are serialized, distinct pull requests proceed in parallel.
    Outcome handle_envelope(const ForgeEventEnvelope& envelope);

    // First-contact bootstrap: the document implied by an existing comment
    // list (creation order as seq). Managed comments are excluded; minimized
    // comments still count, they remain the source of truth.
    static AggregatedDocument reconstruct_document(const std::vector<CommentSnapshot>& comments,
                                                   const RepoConfig& config);

    MetricsSnapshot metrics() const;
    const ServiceOptions& options() const { return options_; }

  private:
    struct Lane {
        std::mutex mutex;
    };

    Outcome process(const ForgeEventEnvelope& envelope);
    RepoConfig load_config(const std::string& repo);
    bool dedup_seen_or_remember(const std::string& delivery_id);
    std::shared_ptr<Lane> lane_for(const std::string& key);

    ForgeActions& forge_;
    ServiceOptions options_;

    std::mutex lanes_mutex_;
    std::map<std::string, std::shared_ptr<Lane>> lanes_;

    std::mutex dedup_mutex_;
    std::list<std::string> dedup_order_;  // LRU, oldest first
    std::unordered_map<std::string, std::list<std::string>::iterator> dedup_index_;

    struct CachedConfig {
        RepoConfig config;
        std::chrono::steady_clock::time_point fetched_at;
        bool valid = true;
        std::string error;
    };
    std::mutex config_mutex_;
    std::unordered_map<std::string, CachedConfig> config_cache_;

    std::atomic<std::uint64_t> events_in_{0};
    std::atomic<std::uint64_t> events_ignored_{0};
    std::atomic<std::uint64_t> comments_suppressed_{0};
    std::atomic<std::uint64_t> upserts_{0};
};

// Registers POST /webhook, GET /healthz and GET /metrics on the server.
void attach_routes(httplib::Server& server, MediatorService& service);

}  // namespace funnelbot
