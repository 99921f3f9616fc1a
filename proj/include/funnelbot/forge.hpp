#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "funnelbot/timeline.hpp"

namespace funnelbot {

// Listing stops here; the mediator does not page further (matches the forge
// default of issue-style PR comments, not review threads).
inline constexpr std::size_t kMaxListedComments = 250;

// Raw webhook delivery. raw_body is the exact byte sequence received; the
// signature is computed over bytes, never over re-serialized JSON.
struct ForgeEventEnvelope {
    std::string delivery_id;
    std::string event_name;
    std::optional<std::string> signature_header;
    std::string raw_body;
};

enum class ForgeErrorKind { not_found, permission_denied, rate_limited, transient, protocol };

const char* to_string(ForgeErrorKind kind);

class ForgeError : public std::runtime_error {
  public:
    ForgeError(ForgeErrorKind kind, const std::string& what,
               std::optional<std::chrono::seconds> retry_after = std::nullopt)
        : std::runtime_error(what), kind_(kind), retry_after_(retry_after) {}

    ForgeErrorKind kind() const { return kind_; }
    std::optional<std::chrono::seconds> retry_after() const { return retry_after_; }

  private:
    ForgeErrorKind kind_;
    std::optional<std::chrono::seconds> retry_after_;
};

// Capability surface the mediator needs from the forge. Implemented by the
// live adapter and by the in-memory fake used in tests and replay.
class ForgeActions {
  public:
    virtual ~ForgeActions() = default;

    // Comments in creation order, minimized ones included, deleted ones not.
    virtual std::vector<CommentSnapshot> list_pr_comments(const std::string& repo,
                                                          std::int64_t pr_number) = 0;
    virtual std::int64_t create_comment(const std::string& repo, std::int64_t pr_number,
                                        const std::string& body) = 0;
    virtual void update_comment(const std::string& repo, std::int64_t comment_id,
                                const std::string& body) = 0;
    virtual void minimize_comment(const std::string& repo, std::int64_t comment_id) = 0;
    virtual void delete_comment(const std::string& repo, std::int64_t comment_id) = 0;
    virtual std::optional<std::string> read_repo_file(const std::string& repo,
                                                      const std::string& path) = 0;
};

}  // namespace funnelbot
