#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "funnelbot/config.hpp"
#include "funnelbot/timeline.hpp"

namespace funnelbot {

struct PullRequestInfo {
    std::int64_t number = 0;
    std::string title;
    std::string author;

    bool operator==(const PullRequestInfo&) const = default;
};

// On-disk recording of a pull request's event stream ("schema": 1).
struct TimelineFile {
    int schema = 1;
    PullRequestInfo pull_request;
    std::vector<TimelineEvent> events;

    bool operator==(const TimelineFile&) const = default;
};

// Schema violations name the offending event seq.
class TimelineError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

TimelineFile parse_timeline(const std::string& json_text);
TimelineFile load_timeline_file(const std::filesystem::path& path);
nlohmann::json timeline_to_json(const TimelineFile& timeline);

struct ReplayReport {
    std::int64_t bot_comments_in = 0;
    std::int64_t human_comments_in = 0;
    std::int64_t visible_bot_comments_out = 0;
    std::int64_t groups = 0;
    std::string reduction_ratio;  // "<bot_comments_in>:<visible_bot_comments_out>"
    std::string rendered;         // final managed comment body, empty if none

    bool operator==(const ReplayReport&) const = default;
};

nlohmann::json report_to_json(const ReplayReport& report);
std::string report_to_text(const ReplayReport& report);

// Runs every event through the full webhook pipeline against a fresh fake
// forge: each comment event is first materialized on the fake (as the bot or
// human would have done), then delivered as a signed envelope. Deterministic.
ReplayReport replay(const TimelineFile& timeline, const RepoConfig& config);

// --timeline <path> [--config <path>] [--mode aggregate|passthrough]
// [--out <path>] [--report json|text]; exit 0 on success, 2 on input error.
int replay_cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace funnelbot
