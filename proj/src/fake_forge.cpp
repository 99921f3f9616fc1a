#include "funnelbot/fake_forge.hpp"

#include <algorithm>

namespace funnelbot {

namespace {

// Arbitrary but fixed origin so runs are reproducible byte-for-byte.
constexpr std::int64_t kClockOrigin = 1700000000;

}  // namespace

FakeForge::FakeForge(std::string self_login)
    : self_login_(std::move(self_login)), clock_(kClockOrigin) {}

std::int64_t FakeForge::bump_clock_locked(std::optional<std::int64_t> explicit_ts) {
    if (explicit_ts) {
        clock_ = std::max(clock_, *explicit_ts);
        return *explicit_ts;
    }
    return ++clock_;
}

void FakeForge::log_locked(nlohmann::json entry) const {
    log_.push_back(std::move(entry));
}

FakeForge::Record& FakeForge::find_locked(const std::string& repo, std::int64_t comment_id,
                                          const char* op) {
    auto it = comments_.find(comment_id);
    if (it == comments_.end() || it->second.deleted || it->second.repo != repo) {
        throw ForgeError(ForgeErrorKind::not_found,
                         std::string(op) + ": comment " + std::to_string(comment_id) +
                             " not found in " + repo);
    }
    return it->second;
}

std::vector<CommentSnapshot> FakeForge::list_pr_comments(const std::string& repo,
                                                         std::int64_t pr_number) {
    std::lock_guard<std::mutex> lock(mutex_);
    log_locked({{"op", "list_pr_comments"}, {"repo", repo}, {"pr", pr_number}});
    std::vector<CommentSnapshot> out;
    for (const auto& [id, record] : comments_) {
        if (record.deleted || record.repo != repo || record.comment.pr_number != pr_number) {
            continue;
        }
        out.push_back(record.comment.snapshot);
        if (out.size() >= kMaxListedComments) break;
    }
    return out;  // map iteration is id order == creation order
}

std::int64_t FakeForge::create_comment(const std::string& repo, std::int64_t pr_number,
                                       const std::string& body) {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::int64_t id = next_id_++;
    Record record;
    record.repo = repo;
    record.comment.pr_number = pr_number;
    record.comment.snapshot.comment_id = id;
    record.comment.snapshot.author_login = self_login_;
    record.comment.snapshot.author_kind = AuthorKind::bot;
    record.comment.snapshot.body = body;
    record.comment.snapshot.created_at = bump_clock_locked(std::nullopt);
    comments_.emplace(id, std::move(record));
    log_locked({{"op", "create_comment"}, {"repo", repo}, {"pr", pr_number}, {"body", body},
                {"id", id}});
    return id;
}

void FakeForge::update_comment(const std::string& repo, std::int64_t comment_id,
                               const std::string& body) {
    std::lock_guard<std::mutex> lock(mutex_);
    Record& record = find_locked(repo, comment_id, "update_comment");
    record.comment.snapshot.body = body;
    record.comment.snapshot.edited_at = bump_clock_locked(std::nullopt);
    log_locked({{"op", "update_comment"}, {"repo", repo}, {"id", comment_id}, {"body", body}});
}

void FakeForge::minimize_comment(const std::string& repo, std::int64_t comment_id) {
    std::lock_guard<std::mutex> lock(mutex_);
    Record& record = find_locked(repo, comment_id, "minimize_comment");
    record.comment.minimized = true;
    bump_clock_locked(std::nullopt);
    log_locked({{"op", "minimize_comment"}, {"repo", repo}, {"id", comment_id}});
}

void FakeForge::delete_comment(const std::string& repo, std::int64_t comment_id) {
    std::lock_guard<std::mutex> lock(mutex_);
    Record& record = find_locked(repo, comment_id, "delete_comment");
    record.deleted = true;
    bump_clock_locked(std::nullopt);
    log_locked({{"op", "delete_comment"}, {"repo", repo}, {"id", comment_id}});
}

std::optional<std::string> FakeForge::read_repo_file(const std::string& repo,
                                                     const std::string& path) {
    std::lock_guard<std::mutex> lock(mutex_);
    log_locked({{"op", "read_repo_file"}, {"repo", repo}, {"path", path}});
    auto it = files_.find({repo, path});
    if (it == files_.end()) return std::nullopt;
    return it->second;
}

std::int64_t FakeForge::seed_comment(const std::string& repo, std::int64_t pr_number,
                                     const std::string& author_login, AuthorKind author_kind,
                                     const std::string& body,
                                     std::optional<std::int64_t> comment_id,
                                     std::optional<std::int64_t> created_at) {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::int64_t id = comment_id.value_or(next_id_);
    if (comments_.count(id) > 0) {
        throw ForgeError(ForgeErrorKind::protocol,
                         "seed_comment: id " + std::to_string(id) + " already exists");
    }
    next_id_ = std::max(next_id_, id + 1);
    Record record;
    record.repo = repo;
    record.comment.pr_number = pr_number;
    record.comment.snapshot.comment_id = id;
    record.comment.snapshot.author_login = author_login;
    record.comment.snapshot.author_kind = author_kind;
    record.comment.snapshot.body = body;
    record.comment.snapshot.created_at = bump_clock_locked(created_at);
    comments_.emplace(id, std::move(record));
    nlohmann::json entry{{"op", "seed_comment"}, {"repo", repo}, {"pr", pr_number},
                         {"login", author_login}, {"kind", to_string(author_kind)},
                         {"body", body}, {"id", id}};
    if (created_at) entry["created_at"] = *created_at;
    log_locked(std::move(entry));
    return id;
}

void FakeForge::seed_comment_edit(const std::string& repo, std::int64_t comment_id,
                                  const std::string& body,
                                  std::optional<std::int64_t> edited_at) {
    std::lock_guard<std::mutex> lock(mutex_);
    Record& record = find_locked(repo, comment_id, "seed_comment_edit");
    record.comment.snapshot.body = body;
    record.comment.snapshot.edited_at = bump_clock_locked(edited_at);
    nlohmann::json entry{{"op", "seed_comment_edit"}, {"repo", repo}, {"id", comment_id},
                         {"body", body}};
    if (edited_at) entry["edited_at"] = *edited_at;
    log_locked(std::move(entry));
}

void FakeForge::seed_file(const std::string& repo, const std::string& path,
                          const std::string& contents) {
    std::lock_guard<std::mutex> lock(mutex_);
    files_[{repo, path}] = contents;
    log_locked({{"op", "seed_file"}, {"repo", repo}, {"path", path}, {"contents", contents}});
}

std::vector<StoredComment> FakeForge::stored_comments(const std::string& repo,
                                                      std::int64_t pr_number) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<StoredComment> out;
    for (const auto& [id, record] : comments_) {
        if (record.deleted || record.repo != repo || record.comment.pr_number != pr_number) {
            continue;
        }
        out.push_back(record.comment);
    }
    return out;
}

bool FakeForge::is_minimized(const std::string& repo, std::int64_t comment_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = comments_.find(comment_id);
    return it != comments_.end() && !it->second.deleted && it->second.repo == repo &&
           it->second.comment.minimized;
}

std::vector<nlohmann::json> FakeForge::log() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return log_;
}

nlohmann::json FakeForge::state_json() const {
    std::lock_guard<std::mutex> lock(mutex_);
    nlohmann::json comments = nlohmann::json::array();
    for (const auto& [id, record] : comments_) {
        if (record.deleted) continue;
        nlohmann::json c{{"id", id},
                         {"repo", record.repo},
                         {"pr", record.comment.pr_number},
                         {"login", record.comment.snapshot.author_login},
                         {"kind", to_string(record.comment.snapshot.author_kind)},
                         {"body", record.comment.snapshot.body},
                         {"created_at", record.comment.snapshot.created_at},
                         {"minimized", record.comment.minimized}};
        if (record.comment.snapshot.edited_at) c["edited_at"] = *record.comment.snapshot.edited_at;
        comments.push_back(std::move(c));
    }
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [key, contents] : files_) {
        files.push_back({{"repo", key.first}, {"path", key.second}, {"contents", contents}});
    }
    return {{"comments", std::move(comments)}, {"files", std::move(files)}};
}

bool FakeForge::is_service_mutation(const nlohmann::json& entry) {
    const std::string op = entry.at("op").get<std::string>();
    return op == "create_comment" || op == "update_comment" || op == "minimize_comment" ||
           op == "delete_comment";
}

std::unique_ptr<FakeForge> FakeForge::replayed_from(const std::vector<nlohmann::json>& log,
                                                    const std::string& self_login) {
    auto fresh = std::make_unique<FakeForge>(self_login);
    for (const auto& entry : log) {
        const std::string op = entry.at("op").get<std::string>();
        if (op == "list_pr_comments") {
            fresh->list_pr_comments(entry.at("repo"), entry.at("pr"));
        } else if (op == "read_repo_file") {
            fresh->read_repo_file(entry.at("repo"), entry.at("path"));
        } else if (op == "create_comment") {
            fresh->create_comment(entry.at("repo"), entry.at("pr"), entry.at("body"));
        } else if (op == "update_comment") {
            fresh->update_comment(entry.at("repo"), entry.at("id"), entry.at("body"));
        } else if (op == "minimize_comment") {
            fresh->minimize_comment(entry.at("repo"), entry.at("id"));
        } else if (op == "delete_comment") {
            fresh->delete_comment(entry.at("repo"), entry.at("id"));
        } else if (op == "seed_comment") {
            std::optional<std::int64_t> created_at;
            if (entry.contains("created_at")) created_at = entry.at("created_at").get<std::int64_t>();
            fresh->seed_comment(entry.at("repo"), entry.at("pr"), entry.at("login"),
                                *author_kind_from_string(entry.at("kind")), entry.at("body"),
                                entry.at("id").get<std::int64_t>(), created_at);
        } else if (op == "seed_comment_edit") {
            std::optional<std::int64_t> edited_at;
            if (entry.contains("edited_at")) edited_at = entry.at("edited_at").get<std::int64_t>();
            fresh->seed_comment_edit(entry.at("repo"), entry.at("id"), entry.at("body"), edited_at);
        } else if (op == "seed_file") {
            fresh->seed_file(entry.at("repo"), entry.at("path"), entry.at("contents"));
        }
    }
    return fresh;
}

}  // namespace funnelbot
