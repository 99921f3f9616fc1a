#pragma once

// Shared fixtures for the unit and acceptance suites: a randomized timeline
// generator over the scenario bot roster, a webhook-level replay driver that
// can drop all service state mid-run, and small structural helpers for
// asserting on rendered markdown.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "funnelbot/aggregate.hpp"
#include "funnelbot/config.hpp"
#include "funnelbot/fake_forge.hpp"
#include "funnelbot/render.hpp"
#include "funnelbot/replay.hpp"
#include "funnelbot/service.hpp"
#include "funnelbot/webhook_codec.hpp"

namespace funnelbot::test {

inline const std::vector<std::string>& bot_roster() {
    static const std::vector<std::string> roster = {
        "codesandbox[bot]",   "compressed-size-action[bot]", "codecov[bot]",
        "request-info[bot]",  "todo[bot]",                   "spamlord[bot]",
    };
    return roster;
}

inline const std::vector<std::string>& human_roster() {
    static const std::vector<std::string> roster = {"octocat", "maintainer-jane",
                                                    "new-contributor"};
    return roster;
}

// Five allowed bots with categories, one denied. Matches the replay fixtures.
inline RepoConfig scenario_config() {
    RepoConfig config;
    config.category_order = {"critical", "deploy", "coverage", "size", "info", "tasks"};
    config.bots = {
        {"codesandbox[bot]", true, "deploy"},
        {"codecov[bot]", true, "coverage"},
        {"compressed-size-action[bot]", true, "size"},
        {"request-info[bot]", true, "info"},
        {"todo[bot]", true, "tasks"},
        {"spamlord[bot]", false, std::nullopt},
    };
    return config;
}

struct TimelineGenOptions {
    int max_events = 50;
    bool with_edits = true;
    bool with_humans = true;
    bool with_denied_bot = true;
};

inline std::string random_body(std::mt19937& rng) {
    static const std::vector<std::string> words = {
        "coverage", "increased", "by", "0.4%", "deploy", "preview", "ready",
        "size",     "change",    "+12 B", "see", "report", "TODO", "found",
        "please",   "provide",   "details", "build", "passed", "lines", "missed",
    };
    std::uniform_int_distribution<int> len(1, 14);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> newline(0, 6);
    std::string body;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
        if (!body.empty()) body += newline(rng) == 0 ? "\n" : " ";
        body += words[pick(rng)];
    }
    return body;
}

// A valid random timeline: strictly increasing seq, unique delivery ids and
// comment ids, edits target earlier comments by the same author, and at
// least one allowed-bot comment is always present.
inline TimelineFile random_timeline(std::mt19937& rng, const TimelineGenOptions& options = {}) {
    TimelineFile timeline;
    timeline.pull_request = {796, "randomized pull request", "new-contributor"};

    std::uniform_int_distribution<int> event_count(1, options.max_events);
    std::uniform_int_distribution<int> kind_die(0, 99);
    const int n = event_count(rng);

    std::int64_t now = 1614680000;
    std::int64_t next_comment_id = 5000;
    // (comment_id, roster index, created_at) of bot comments eligible for edits
    std::vector<std::tuple<std::int64_t, std::size_t, std::int64_t>> editable;
    bool has_allowed_bot_comment = false;

    auto push_bot_comment = [&](std::size_t bot_index) {
        TimelineEvent event;
        event.seq = static_cast<std::int64_t>(timeline.events.size()) + 1;
        event.delivery_id = "gen-d" + std::to_string(event.seq);
        event.kind = EventKind::comment_created;
        CommentSnapshot c;
        c.comment_id = next_comment_id++;
        c.author_login = bot_roster()[bot_index];
        c.author_kind = AuthorKind::bot;
        c.body = random_body(rng);
        c.created_at = now += 60;
        event.comment = c;
        editable.emplace_back(c.comment_id, bot_index, c.created_at);
        if (bot_index != 5) has_allowed_bot_comment = true;
        timeline.events.push_back(std::move(event));
    };

    for (int i = 0; i < n; ++i) {
        TimelineEvent event;
        event.seq = static_cast<std::int64_t>(timeline.events.size()) + 1;
        event.delivery_id = "gen-d" + std::to_string(event.seq);
        const int die = kind_die(rng);

        if (i == 0 && die < 60) {
            event.kind = EventKind::pr_opened;
            timeline.events.push_back(std::move(event));
            continue;
        }

        if (options.with_edits && !editable.empty() && die < 20) {
            std::uniform_int_distribution<std::size_t> pick(0, editable.size() - 1);
            auto [comment_id, bot_index, created_at] = editable[pick(rng)];
            event.kind = EventKind::comment_edited;
            CommentSnapshot c;
            c.comment_id = comment_id;
            c.author_login = bot_roster()[bot_index];
            c.author_kind = AuthorKind::bot;
            c.body = random_body(rng);
            c.created_at = created_at;
            c.edited_at = now += 60;
            event.comment = c;
            timeline.events.push_back(std::move(event));
            continue;
        }

        if (options.with_humans && die < 40) {
            std::uniform_int_distribution<std::size_t> pick(0, human_roster().size() - 1);
            event.kind = EventKind::comment_created;
            CommentSnapshot c;
            c.comment_id = next_comment_id++;
            c.author_login = human_roster()[pick(rng)];
            c.author_kind = AuthorKind::human;
            c.body = random_body(rng);
            c.created_at = now += 60;
            event.comment = c;
            timeline.events.push_back(std::move(event));
            continue;
        }

        const std::size_t max_bot = options.with_denied_bot ? 5 : 4;
        std::uniform_int_distribution<std::size_t> pick(0, max_bot);
        push_bot_comment(pick(rng));
    }

    if (!has_allowed_bot_comment) push_bot_comment(0);
    return timeline;
}

// Feeds a timeline through the webhook pipeline against a fake forge,
// exactly like production replay, but with a hook that throws away the whole
// MediatorService (lanes, dedup cache, config cache) before event index
// `recreate_service_at`. Returns the forge for inspection.
struct ServiceReplayRun {
    std::unique_ptr<FakeForge> forge;
    std::string repo = "replay/workspace";
    std::int64_t pr = 0;

    std::string managed_body() const {
        for (const auto& stored : forge->stored_comments(repo, pr)) {
            if (is_managed_body(stored.snapshot.body)) return stored.snapshot.body;
        }
        return "";
    }
};

inline ServiceReplayRun run_through_service(const TimelineFile& timeline,
                                            const RepoConfig& config,
                                            int recreate_service_at = -1) {
    static constexpr const char* kSecret = "replay-secret";
    ServiceReplayRun run;
    run.forge = std::make_unique<FakeForge>();
    run.pr = timeline.pull_request.number;
    run.forge->seed_file(run.repo, kConfigPath, canonical_yaml(config));

    auto service = std::make_unique<MediatorService>(*run.forge, ServiceOptions{.secret = kSecret});
    int index = 0;
    for (const TimelineEvent& event : timeline.events) {
        if (index == recreate_service_at) {
            service = std::make_unique<MediatorService>(*run.forge,
                                                        ServiceOptions{.secret = kSecret});
        }
        ++index;
        if (is_comment_kind(event.kind)) {
            const CommentSnapshot& c = *event.comment;
            if (event.kind == EventKind::comment_created) {
                run.forge->seed_comment(run.repo, run.pr, c.author_login, c.author_kind, c.body,
                                        c.comment_id, c.created_at);
            } else {
                run.forge->seed_comment_edit(run.repo, c.comment_id, c.body,
                                             c.edited_at.value_or(c.created_at));
            }
        }
        service->handle_envelope(encode_event(run.repo, run.pr, event, kSecret));
    }
    return run;
}

inline int count_collapsible_blocks(const std::string& body) {
    int count = 0;
    std::size_t pos = 0;
    const std::string needle = "\n<details>\n<summary>";
    while ((pos = body.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

inline int count_marker_occurrences(const std::string& body) {
    int count = 0;
    std::size_t pos = 0;
    while ((pos = body.find(kManagedMarker, pos)) != std::string::npos) {
        ++count;
        pos += std::string(kManagedMarker).size();
    }
    return count;
}

}  // namespace funnelbot::test
