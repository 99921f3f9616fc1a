#include <httplib.h>

#include "funnelbot/github_forge.hpp"

#include <json.hpp>
#include <thread>

#include "funnelbot/util.hpp"
#include "funnelbot/version.hpp"

namespace funnelbot {

namespace {

using nlohmann::json;

CommentSnapshot snapshot_from_json(const json& c) {
    CommentSnapshot snapshot;
    snapshot.comment_id = c.at("id").get<std::int64_t>();
    snapshot.author_login = c.at("user").at("login").get<std::string>();
    snapshot.author_kind =
        iequals(c.at("user").value("type", "User"), "Bot") ? AuthorKind::bot : AuthorKind::human;
    snapshot.body = c.value("body", "");
    snapshot.created_at = parse_rfc3339(c.at("created_at").get<std::string>());
    if (c.contains("updated_at") && !c.at("updated_at").is_null()) {
        const std::int64_t updated = parse_rfc3339(c.at("updated_at").get<std::string>());
        if (updated != snapshot.created_at) snapshot.edited_at = updated;
    }
    return snapshot;
}

}  // namespace

GithubForge::GithubForge(GithubForgeOptions options) : options_(std::move(options)) {
    if (!options_.sleeper) {
        options_.sleeper = [](std::chrono::seconds d) { std::this_thread::sleep_for(d); };
    }
    client_ = std::make_unique<httplib::Client>(options_.base_url);
    client_->set_connection_timeout(10);
    client_->set_read_timeout(30);
    client_->set_default_headers({
        {"Authorization", "Bearer " + options_.token},
        {"Accept", "application/vnd.github+json"},
        {"User-Agent", std::string("funnelbot/") + kVersion},
    });
}

GithubForge::~GithubForge() = default;

GithubForge::Response GithubForge::request(const char* method, const std::string& path,
                                           const std::string& body) {
    httplib::Result result;
    const std::string m(method);
    if (m == "GET") result = client_->Get(path);
    else if (m == "POST") result = client_->Post(path, body, "application/json");
    else if (m == "PATCH") result = client_->Patch(path, body, "application/json");
    else if (m == "DELETE") result = client_->Delete(path);

    Response response;
    if (!result) {
        response.status = 0;  // transport failure, treated as transient
        response.body = httplib::to_string(result.error());
        return response;
    }
    response.status = result->status;
    response.body = result->body;
    response.retry_after = result->get_header_value("Retry-After");
    return response;
}

GithubForge::Response GithubForge::request_with_retry(const char* method,
                                                      const std::string& path,
                                                      const std::string& body) {
    Response response = request(method, path, body);
    std::chrono::seconds backoff{1};
    for (int attempt = 0; attempt < options_.max_retries; ++attempt) {
        const bool transient = response.status == 0 || response.status >= 500;
        if (!transient) return response;
        options_.sleeper(backoff);
        backoff *= 2;
        response = request(method, path, body);
    }
    return response;
}

void GithubForge::raise(const char* op, const Response& response) {
    const std::string what = std::string(op) + " failed with status " +
                             std::to_string(response.status) + ": " +
                             response.body.substr(0, 200);
    if (response.status == 404) throw ForgeError(ForgeErrorKind::not_found, what);
    if (response.status == 429 ||
        (response.status == 403 && !response.retry_after.empty())) {
        std::chrono::seconds retry_after{60};
        try {
            retry_after = std::chrono::seconds(std::stol(response.retry_after));
        } catch (const std::exception&) {
        }
        throw ForgeError(ForgeErrorKind::rate_limited, what, retry_after);
    }
    if (response.status == 401 || response.status == 403) {
        throw ForgeError(ForgeErrorKind::permission_denied, what);
    }
    if (response.status == 0 || response.status >= 500) {
        throw ForgeError(ForgeErrorKind::transient, what);
    }
    throw ForgeError(ForgeErrorKind::protocol, what);
}

std::vector<CommentSnapshot> GithubForge::list_pr_comments(const std::string& repo,
                                                           std::int64_t pr_number) {
    std::vector<CommentSnapshot> out;
    for (int page = 1; out.size() < kMaxListedComments; ++page) {
        const std::string path = "/repos/" + repo + "/issues/" + std::to_string(pr_number) +
                                 "/comments?per_page=100&page=" + std::to_string(page);
        Response response = request_with_retry("GET", path, "");
        if (response.status != 200) raise("list_pr_comments", response);
        json comments;
        try {
            comments = json::parse(response.body);
        } catch (const json::parse_error& e) {
            throw ForgeError(ForgeErrorKind::protocol,
                             std::string("list_pr_comments: bad JSON: ") + e.what());
        }
        if (!comments.is_array()) {
            throw ForgeError(ForgeErrorKind::protocol, "list_pr_comments: expected an array");
        }
        for (const auto& c : comments) {
            out.push_back(snapshot_from_json(c));
            if (out.size() >= kMaxListedComments) break;
        }
        if (comments.size() < 100) break;
    }
    return out;
}

std::int64_t GithubForge::create_comment(const std::string& repo, std::int64_t pr_number,
                                         const std::string& body) {
    const std::string path =
        "/repos/" + repo + "/issues/" + std::to_string(pr_number) + "/comments";
    Response response = request_with_retry("POST", path, json{{"body", body}}.dump());
    if (response.status != 201) raise("create_comment", response);
    try {
        return json::parse(response.body).at("id").get<std::int64_t>();
    } catch (const json::exception& e) {
        throw ForgeError(ForgeErrorKind::protocol,
                         std::string("create_comment: bad JSON: ") + e.what());
    }
}

void GithubForge::update_comment(const std::string& repo, std::int64_t comment_id,
                                 const std::string& body) {
    const std::string path = "/repos/" + repo + "/issues/comments/" + std::to_string(comment_id);
    Response response = request_with_retry("PATCH", path, json{{"body", body}}.dump());
    if (response.status != 200) raise("update_comment", response);
}

void GithubForge::minimize_comment(const std::string& repo, std::int64_t comment_id) {
    // Resolve the GraphQL node id first; minimize is GraphQL-only.
    const std::string path = "/repos/" + repo + "/issues/comments/" + std::to_string(comment_id);
    Response response = request_with_retry("GET", path, "");
    if (response.status != 200) raise("minimize_comment", response);
    std::string node_id;
    try {
        node_id = json::parse(response.body).at("node_id").get<std::string>();
    } catch (const json::exception& e) {
        throw ForgeError(ForgeErrorKind::protocol,
                         std::string("minimize_comment: bad JSON: ") + e.what());
    }

    const json query{
        {"query",
         "mutation($id: ID!) { minimizeComment(input: {subjectId: $id, classifier: OUTDATED}) "
         "{ minimizedComment { isMinimized } } }"},
        {"variables", {{"id", node_id}}},
    };
    Response gql = request_with_retry("POST", "/graphql", query.dump());
    if (gql.status != 200) raise("minimize_comment", gql);
    try {
        const json parsed = json::parse(gql.body);
        if (parsed.contains("errors") && !parsed.at("errors").empty()) {
            throw ForgeError(ForgeErrorKind::protocol,
                             "minimize_comment: " + parsed.at("errors").dump());
        }
    } catch (const json::parse_error& e) {
        throw ForgeError(ForgeErrorKind::protocol,
                         std::string("minimize_comment: bad JSON: ") + e.what());
    }
}

void GithubForge::delete_comment(const std::string& repo, std::int64_t comment_id) {
    const std::string path = "/repos/" + repo + "/issues/comments/" + std::to_string(comment_id);
    Response response = request_with_retry("DELETE", path, "");
    if (response.status != 204) raise("delete_comment", response);
}

std::optional<std::string> GithubForge::read_repo_file(const std::string& repo,
                                                       const std::string& path) {
    const std::string url = "/repos/" + repo + "/contents/" + path;
    Response response = request_with_retry("GET", url, "");
    if (response.status == 404) return std::nullopt;
    if (response.status != 200) raise("read_repo_file", response);
    try {
        const json parsed = json::parse(response.body);
        if (parsed.value("encoding", "") == "base64") {
            std::string raw = parsed.at("content").get<std::string>();
            raw = replace_all(std::move(raw), "\n", "");
            auto decoded = base64_decode(raw);
            if (!decoded) {
                throw ForgeError(ForgeErrorKind::protocol, "read_repo_file: bad base64 content");
            }
            return *decoded;
        }
        return parsed.at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ForgeError(ForgeErrorKind::protocol,
                         std::string("read_repo_file: bad JSON: ") + e.what());
    }
}

}  // namespace funnelbot
