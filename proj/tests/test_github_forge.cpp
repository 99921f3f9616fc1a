#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <json.hpp>
#include <thread>

#include "funnelbot/github_forge.hpp"

using namespace funnelbot;
using nlohmann::json;

namespace {

// Local stand-in for the forge REST API, bound to an ephemeral port.
struct StubForge {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    StubForge() = default;

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~StubForge() {
        server.stop();
        if (thread.joinable()) thread.join();
    }

    GithubForge client(std::vector<std::chrono::seconds>* sleeps = nullptr) {
        GithubForgeOptions options;
        options.base_url = "http://127.0.0.1:" + std::to_string(port);
        options.token = "test-token";
        options.sleeper = [sleeps](std::chrono::seconds d) {
            if (sleeps != nullptr) sleeps->push_back(d);
        };
        return GithubForge(std::move(options));
    }
};

json comment_json(int id, const char* login, const char* type, const char* body) {
    return json{{"id", id},
                {"node_id", "IC_node" + std::to_string(id)},
                {"body", body},
                {"created_at", "2021-03-02T10:00:00Z"},
                {"updated_at", "2021-03-02T10:00:00Z"},
                {"user", {{"login", login}, {"type", type}}}};
}

}  // namespace

TEST_CASE("list_pr_comments follows pagination") {
    StubForge stub;
    stub.server.Get("/repos/acme/widgets/issues/796/comments",
                    [](const httplib::Request& req, httplib::Response& res) {
                        const int page = std::stoi(req.get_param_value("page"));
                        json body = json::array();
                        if (page == 1) {
                            for (int i = 0; i < 100; ++i) {
                                body.push_back(comment_json(i + 1, "codecov[bot]", "Bot", "r"));
                            }
                        } else if (page == 2) {
                            body.push_back(comment_json(101, "octocat", "User", "hi"));
                        }
                        res.set_content(body.dump(), "application/json");
                    });
    stub.start();
    auto forge = stub.client();
    const auto comments = forge.list_pr_comments("acme/widgets", 796);
    REQUIRE(comments.size() == 101);
    CHECK(comments.front().author_kind == AuthorKind::bot);
    CHECK(comments.back().author_login == "octocat");
    CHECK(comments.back().author_kind == AuthorKind::human);
}

TEST_CASE("create_comment posts and returns the id") {
    StubForge stub;
    std::string seen_auth;
    stub.server.Post("/repos/acme/widgets/issues/796/comments",
                     [&seen_auth](const httplib::Request& req, httplib::Response& res) {
                         seen_auth = req.get_header_value("Authorization");
                         const auto body = json::parse(req.body);
                         REQUIRE(body.at("body") == "aggregated");
                         res.status = 201;
                         res.set_content(json{{"id", 555}}.dump(), "application/json");
                     });
    stub.start();
    auto forge = stub.client();
    CHECK(forge.create_comment("acme/widgets", 796, "aggregated") == 555);
    CHECK(seen_auth == "Bearer test-token");
}

TEST_CASE("transient failures are retried with backoff") {
    StubForge stub;
    std::atomic<int> calls{0};
    stub.server.Patch("/repos/acme/widgets/issues/comments/9",
                      [&calls](const httplib::Request&, httplib::Response& res) {
                          const int n = ++calls;
                          if (n <= 2) {
                              res.status = 502;
                              return;
                          }
                          res.status = 200;
                          res.set_content("{}", "application/json");
                      });
    stub.start();
    std::vector<std::chrono::seconds> sleeps;
    auto forge = stub.client(&sleeps);
    forge.update_comment("acme/widgets", 9, "v2");
    CHECK(calls == 3);
    REQUIRE(sleeps.size() == 2);
    CHECK(sleeps[0] == std::chrono::seconds(1));
    CHECK(sleeps[1] == std::chrono::seconds(2));
}

TEST_CASE("persistent failure surfaces as transient error after retries") {
    StubForge stub;
    std::atomic<int> calls{0};
    stub.server.Delete("/repos/acme/widgets/issues/comments/9",
                       [&calls](const httplib::Request&, httplib::Response& res) {
                           ++calls;
                           res.status = 500;
                       });
    stub.start();
    std::vector<std::chrono::seconds> sleeps;
    auto forge = stub.client(&sleeps);
    try {
        forge.delete_comment("acme/widgets", 9);
        FAIL("expected ForgeError");
    } catch (const ForgeError& e) {
        CHECK(e.kind() == ForgeErrorKind::transient);
    }
    CHECK(calls == 4);  // initial attempt + 3 retries
    CHECK(sleeps == std::vector<std::chrono::seconds>{std::chrono::seconds(1),
                                                      std::chrono::seconds(2),
                                                      std::chrono::seconds(4)});
}

TEST_CASE("rate limiting carries retry-after") {
    StubForge stub;
    stub.server.Get("/repos/acme/widgets/issues/796/comments",
                    [](const httplib::Request&, httplib::Response& res) {
                        res.status = 429;
                        res.set_header("Retry-After", "30");
                    });
    stub.start();
    auto forge = stub.client();
    try {
        forge.list_pr_comments("acme/widgets", 796);
        FAIL("expected ForgeError");
    } catch (const ForgeError& e) {
        CHECK(e.kind() == ForgeErrorKind::rate_limited);
        CHECK(e.retry_after() == std::chrono::seconds(30));
    }
}

TEST_CASE("not found and permission errors are distinct") {
    StubForge stub;
    stub.server.Get("/repos/acme/widgets/issues/comments/1",
                    [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    stub.server.Patch("/repos/acme/widgets/issues/comments/2",
                      [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    stub.start();
    auto forge = stub.client();
    try {
        forge.minimize_comment("acme/widgets", 1);
        FAIL("expected ForgeError");
    } catch (const ForgeError& e) {
        CHECK(e.kind() == ForgeErrorKind::not_found);
    }
    try {
        forge.update_comment("acme/widgets", 2, "x");
        FAIL("expected ForgeError");
    } catch (const ForgeError& e) {
        CHECK(e.kind() == ForgeErrorKind::permission_denied);
    }
}

TEST_CASE("minimize resolves the node id and calls graphql") {
    StubForge stub;
    std::string graphql_body;
    stub.server.Get("/repos/acme/widgets/issues/comments/77",
                    [](const httplib::Request&, httplib::Response& res) {
                        res.set_content(comment_json(77, "codecov[bot]", "Bot", "r").dump(),
                                        "application/json");
                    });
    stub.server.Post("/graphql", [&graphql_body](const httplib::Request& req,
                                                 httplib::Response& res) {
        graphql_body = req.body;
        res.set_content(
            json{{"data", {{"minimizeComment", {{"minimizedComment", {{"isMinimized", true}}}}}}}}
                .dump(),
            "application/json");
    });
    stub.start();
    auto forge = stub.client();
    forge.minimize_comment("acme/widgets", 77);
    const auto parsed = json::parse(graphql_body);
    CHECK(parsed.at("variables").at("id") == "IC_node77");
    CHECK(parsed.at("query").get<std::string>().find("minimizeComment") != std::string::npos);
}

TEST_CASE("read_repo_file decodes base64 contents") {
    StubForge stub;
    stub.server.Get("/repos/acme/widgets/contents/.github/funnelbot.yml",
                    [](const httplib::Request&, httplib::Response& res) {
                        // "version: 1\n" in the contents-API envelope
                        res.set_content(json{{"encoding", "base64"},
                                             {"content", "dmVyc2lvbjogMQo=\n"}}
                                            .dump(),
                                        "application/json");
                    });
    stub.start();
    auto forge = stub.client();
    CHECK(forge.read_repo_file("acme/widgets", ".github/funnelbot.yml") == "version: 1\n");
    CHECK_FALSE(forge.read_repo_file("acme/widgets", "missing.yml").has_value());
}
