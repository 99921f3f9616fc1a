#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include "funnelbot/forge.hpp"

namespace httplib {
class Client;
}

namespace funnelbot {

struct GithubForgeOptions {
    std::string base_url = "https://api.github.com";
    std::string token;
    // Transient failures (5xx, dropped connections) are retried this many
    // times with 1s/2s/4s backoff. Injectable sleeper keeps tests fast.
    int max_retries = 3;
    std::function<void(std::chrono::seconds)> sleeper;
};

// Live adapter over the forge REST API (v3 semantics). Comment minimize has
// no REST endpoint, so it resolves the comment's node id and goes through
// the GraphQL minimizeComment mutation.
class GithubForge : public ForgeActions {
  public:
    explicit GithubForge(GithubForgeOptions options);
    ~GithubForge() override;

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

  private:
    struct Response {
        int status = 0;
        std::string body;
        std::string retry_after;
    };

    Response request(const char* method, const std::string& path, const std::string& body);
    Response request_with_retry(const char* method, const std::string& path,
                                const std::string& body);
    [[noreturn]] void raise(const char* op, const Response& response);

    GithubForgeOptions options_;
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace funnelbot
