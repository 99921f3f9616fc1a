#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "funnelbot/forge.hpp"

namespace funnelbot {

// One comment as the fake stores it; `minimized` is forge-side presentation
// state, not part of the snapshot domain type.
struct StoredComment {
    std::int64_t pr_number = 0;
    CommentSnapshot snapshot;
    bool minimized = false;

    bool operator==(const StoredComment&) const = default;
};

// Deterministic in-memory forge. Ids increase strictly in creation order, a
// logical clock stamps every mutation, and every call (reads included) lands
// in the log so tests can assert exactly what the service touched.
//
// seed_* calls model what repository actors (bots, humans) do on the forge;
// the ForgeActions overrides are what the mediator itself is allowed to do.
class FakeForge : public ForgeActions {
  public:
    explicit FakeForge(std::string self_login = "funnelbot[bot]");

    // ForgeActions
    std::vector<CommentSnapshot> list_pr_comments(const std::string& repo,
                                                  std::int64_t pr_number) override;
    std::int64_t create_comment(const std::string& repo, std::int64_t pr_number,
                                const std::string& body) override;
    void update_comment(const std::string& repo, std::int64_t comment_id,
                        const std::string& body) override;
    void minimize_comment(const std::string& repo, std::int64_t comment_id) override;
    void delete_comment(const std::string& repo, std::int64_t comment_id) override;
    std::optional<std::string> read_repo_file(const std::string& repo,
                                              const std::string& path) override;

    // Fixture side.
    std::int64_t seed_comment(const std::string& repo, std::int64_t pr_number,
                              const std::string& author_login, AuthorKind author_kind,
                              const std::string& body,
                              std::optional<std::int64_t> comment_id = std::nullopt,
                              std::optional<std::int64_t> created_at = std::nullopt);
    void seed_comment_edit(const std::string& repo, std::int64_t comment_id,
                           const std::string& body,
                           std::optional<std::int64_t> edited_at = std::nullopt);
    void seed_file(const std::string& repo, const std::string& path,
                   const std::string& contents);

    // Inspection.
    std::vector<StoredComment> stored_comments(const std::string& repo,
                                               std::int64_t pr_number) const;
    bool is_minimized(const std::string& repo, std::int64_t comment_id) const;
    std::vector<nlohmann::json> log() const;
    nlohmann::json state_json() const;
    const std::string& self_login() const { return self_login_; }

    // Names of ops the mediator may issue that mutate the store.
    static bool is_service_mutation(const nlohmann::json& entry);

    // Builds a fresh fake by re-running a log; used to check that the log
    // fully determines the final store.
    static std::unique_ptr<FakeForge> replayed_from(
        const std::vector<nlohmann::json>& log,
        const std::string& self_login = "funnelbot[bot]");

  private:
    struct Record {
        std::string repo;
        StoredComment comment;
        bool deleted = false;
    };

    std::int64_t bump_clock_locked(std::optional<std::int64_t> explicit_ts);
    Record& find_locked(const std::string& repo, std::int64_t comment_id,
                        const char* op);
    void log_locked(nlohmann::json entry) const;

    mutable std::mutex mutex_;
    std::string self_login_;
    std::int64_t next_id_ = 1;
    std::int64_t clock_;
    std::map<std::int64_t, Record> comments_;                      // id -> record
    std::map<std::pair<std::string, std::string>, std::string> files_;  // (repo, path)
    mutable std::vector<nlohmann::json> log_;
};

}  // namespace funnelbot
