#include "funnelbot/replay.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "funnelbot/aggregate.hpp"
#include "funnelbot/fake_forge.hpp"
#include "funnelbot/render.hpp"
#include "funnelbot/service.hpp"
#include "funnelbot/util.hpp"
#include "funnelbot/webhook_codec.hpp"

namespace funnelbot {

namespace {

using nlohmann::json;

[[noreturn]] void violation(std::int64_t seq, const std::string& what) {
    throw TimelineError("event seq " + std::to_string(seq) + ": " + what);
}

CommentSnapshot parse_comment(std::int64_t seq, const json& c) {
    CommentSnapshot snapshot;
    if (!c.contains("comment_id")) violation(seq, "comment.comment_id missing");
    snapshot.comment_id = c.at("comment_id").get<std::int64_t>();
    if (!c.contains("author_login") || c.at("author_login").get<std::string>().empty()) {
        violation(seq, "comment.author_login missing or empty");
    }
    snapshot.author_login = c.at("author_login").get<std::string>();
    auto kind = author_kind_from_string(c.value("author_kind", ""));
    if (!kind) violation(seq, "comment.author_kind must be \"human\" or \"bot\"");
    snapshot.author_kind = *kind;
    if (!c.contains("body")) violation(seq, "comment.body missing");
    snapshot.body = c.at("body").get<std::string>();
    try {
        snapshot.created_at = parse_rfc3339(c.at("created_at").get<std::string>());
        if (c.contains("edited_at") && !c.at("edited_at").is_null()) {
            snapshot.edited_at = parse_rfc3339(c.at("edited_at").get<std::string>());
        }
    } catch (const std::invalid_argument& e) {
        violation(seq, e.what());
    } catch (const json::exception&) {
        violation(seq, "comment.created_at missing");
    }
    if (snapshot.edited_at && *snapshot.edited_at < snapshot.created_at) {
        violation(seq, "edited_at precedes created_at");
    }
    return snapshot;
}

}  // namespace

TimelineFile parse_timeline(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw TimelineError(std::string("timeline is not valid JSON: ") + e.what());
    }

    TimelineFile timeline;
    if (root.value("schema", 0) != 1) {
        throw TimelineError("timeline schema must be 1");
    }
    if (!root.contains("pull_request")) throw TimelineError("pull_request missing");
    const json& pr = root.at("pull_request");
    try {
        timeline.pull_request.number = pr.at("number").get<std::int64_t>();
        timeline.pull_request.title = pr.at("title").get<std::string>();
        timeline.pull_request.author = pr.at("author").get<std::string>();
    } catch (const json::exception& e) {
        throw TimelineError(std::string("pull_request malformed: ") + e.what());
    }

    if (!root.contains("events") || !root.at("events").is_array()) {
        throw TimelineError("events must be an array");
    }

    std::set<std::string> delivery_ids;
    std::optional<std::int64_t> prev_seq;
    for (const json& e : root.at("events")) {
        TimelineEvent event;
        if (!e.contains("seq")) throw TimelineError("event without seq");
        event.seq = e.at("seq").get<std::int64_t>();
        if (prev_seq && event.seq <= *prev_seq) {
            violation(event.seq, "seq not strictly increasing");
        }
        prev_seq = event.seq;

        event.delivery_id = e.value("delivery_id", "");
        if (event.delivery_id.empty()) violation(event.seq, "delivery_id missing or empty");
        if (!delivery_ids.insert(event.delivery_id).second) {
            violation(event.seq, "duplicate delivery_id \"" + event.delivery_id + "\"");
        }

        auto kind = event_kind_from_string(e.value("kind", ""));
        if (!kind) violation(event.seq, "unknown kind \"" + e.value("kind", "") + "\"");
        event.kind = *kind;

        if (is_comment_kind(event.kind)) {
            if (!e.contains("comment")) violation(event.seq, "comment missing");
            event.comment = parse_comment(event.seq, e.at("comment"));
            if (event.kind == EventKind::comment_created && event.comment->body.empty()) {
                violation(event.seq, "empty body on comment_created");
            }
        } else if (e.contains("comment")) {
            violation(event.seq, "pr_opened event must not carry a comment");
        }
        timeline.events.push_back(std::move(event));
    }
    return timeline;
}

TimelineFile load_timeline_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TimelineError("cannot open timeline file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_timeline(buffer.str());
}

nlohmann::json timeline_to_json(const TimelineFile& timeline) {
    json events = json::array();
    for (const auto& event : timeline.events) {
        json e{{"seq", event.seq},
               {"delivery_id", event.delivery_id},
               {"kind", to_string(event.kind)}};
        if (event.comment) {
            json c{{"comment_id", event.comment->comment_id},
                   {"author_login", event.comment->author_login},
                   {"author_kind", to_string(event.comment->author_kind)},
                   {"body", event.comment->body},
                   {"created_at", format_rfc3339(event.comment->created_at)}};
            if (event.comment->edited_at) c["edited_at"] = format_rfc3339(*event.comment->edited_at);
            e["comment"] = std::move(c);
        }
        events.push_back(std::move(e));
    }
    return json{{"schema", timeline.schema},
                {"pull_request",
                 {{"number", timeline.pull_request.number},
                  {"title", timeline.pull_request.title},
                  {"author", timeline.pull_request.author}}},
                {"events", std::move(events)}};
}

nlohmann::json report_to_json(const ReplayReport& report) {
    return json{{"bot_comments_in", report.bot_comments_in},
                {"human_comments_in", report.human_comments_in},
                {"visible_bot_comments_out", report.visible_bot_comments_out},
                {"groups", report.groups},
                {"reduction_ratio", report.reduction_ratio},
                {"rendered", report.rendered}};
}

std::string report_to_text(const ReplayReport& report) {
    std::ostringstream out;
    out << "bot comments in:          " << report.bot_comments_in << "\n";
    out << "human comments in:        " << report.human_comments_in << "\n";
    out << "visible bot comments out: " << report.visible_bot_comments_out << "\n";
    out << "groups:                   " << report.groups << "\n";
    out << "reduction:                " << report.reduction_ratio << "\n";
    if (!report.rendered.empty()) {
        out << "\n--- managed comment ---\n" << report.rendered;
        if (report.rendered.back() != '\n') out << "\n";
    }
    return out.str();
}

ReplayReport replay(const TimelineFile& timeline, const RepoConfig& config) {
    static constexpr const char* kSecret = "replay-secret";
    const std::string repo = "replay/workspace";
    const std::int64_t pr = timeline.pull_request.number;

    FakeForge forge;
    forge.seed_file(repo, kConfigPath, canonical_yaml(config));
    MediatorService service(forge, ServiceOptions{.secret = kSecret});

    ReplayReport report;
    for (const TimelineEvent& event : timeline.events) {
        if (is_comment_kind(event.kind)) {
            const CommentSnapshot& c = *event.comment;
            if (event.kind == EventKind::comment_created) {
                forge.seed_comment(repo, pr, c.author_login, c.author_kind, c.body,
                                   c.comment_id, c.created_at);
                if (detect_bot(c.author_login, c.author_kind, config)) {
                    report.bot_comments_in += 1;
                } else {
                    report.human_comments_in += 1;
                }
            } else {
                forge.seed_comment_edit(repo, c.comment_id, c.body,
                                        c.edited_at.value_or(c.created_at));
            }
        }
        service.handle_envelope(encode_event(repo, pr, event, kSecret));
    }

    for (const StoredComment& stored : forge.stored_comments(repo, pr)) {
        const CommentSnapshot& c = stored.snapshot;
        if (stored.minimized) continue;
        if (!detect_bot(c.author_login, c.author_kind, config) &&
            !iequals(c.author_login, forge.self_login())) {
            continue;
        }
        report.visible_bot_comments_out += 1;
        if (is_managed_body(c.body)) {
            report.rendered = c.body;
            if (auto doc = parse_managed_document(c.body)) {
                report.groups = static_cast<std::int64_t>(doc->groups.size());
            }
        }
    }

    report.reduction_ratio = std::to_string(report.bot_comments_in) + ":" +
                             std::to_string(report.visible_bot_comments_out);
    return report;
}

int replay_cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Replay a recorded pull-request timeline through the mediator pipeline"};
    std::string timeline_path;
    std::string config_path;
    std::string mode;
    std::string out_path;
    std::string report_format = "text";
    app.add_option("--timeline", timeline_path, "Timeline JSON file")->required();
    app.add_option("--config", config_path, "Repository config YAML file");
    app.add_option("--mode", mode, "Override mediation mode")
        ->check(CLI::IsMember({"aggregate", "passthrough"}));
    app.add_option("--out", out_path, "Write the rendered managed comment here");
    app.add_option("--report", report_format, "Report format")
        ->check(CLI::IsMember({"json", "text"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        const TimelineFile timeline = load_timeline_file(timeline_path);

        RepoConfig config;
        if (!config_path.empty()) {
            std::ifstream in(config_path, std::ios::binary);
            if (!in) throw TimelineError("cannot open config file: " + config_path);
            std::ostringstream buffer;
            buffer << in.rdbuf();
            config = parse_config(buffer.str()).config;
        }
        if (mode == "aggregate") config.mode = MediationMode::aggregate;
        else if (mode == "passthrough") config.mode = MediationMode::passthrough;

        const ReplayReport report = replay(timeline, config);

        if (!out_path.empty()) {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) throw TimelineError("cannot write output file: " + out_path);
            file << report.rendered;
        }

        if (report_format == "json") out << report_to_json(report).dump(2) << "\n";
        else out << report_to_text(report);
        return 0;
    } catch (const TimelineError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace funnelbot
