#include <doctest.h>

#include <random>

#include "funnelbot/render.hpp"
#include "helpers.hpp"

using namespace funnelbot;
using namespace funnelbot::test;

namespace {

AggregatedDocument doc_with_groups(int n, std::size_t body_size = 24) {
    AggregatedDocument doc;
    doc.intro = kDefaultIntroTemplate;
    for (int i = 0; i < n; ++i) {
        BotGroup group;
        group.bot_login = "bot-" + std::to_string(i) + "[bot]";
        group.category = "cat" + std::to_string(i);
        group.latest_body = std::string(body_size, 'x');
        group.update_count = i + 1;
        group.latest_at = 1614680000 + i;
        doc.groups.push_back(std::move(group));
        doc.suppressed_bot_comment_count += i + 1;
    }
    return doc;
}

}  // namespace

TEST_CASE("render_document structure") {
    SUBCASE("zero groups") {
        const std::string out = render_document(doc_with_groups(0));
        CHECK(out.rfind(kManagedMarker, 0) == 0);  // marker on line 1
        CHECK(out.find("No bot activity yet.") != std::string::npos);
        CHECK(count_collapsible_blocks(out) == 0);
    }

    SUBCASE("five groups render five collapsed blocks in order") {
        const std::string out = render_document(doc_with_groups(5));
        CHECK(count_collapsible_blocks(out) == 5);
        CHECK(out.find("<details open") == std::string::npos);  // collapsed by default
        std::size_t last = 0;
        for (int i = 0; i < 5; ++i) {
            const std::string summary = "<summary>cat" + std::to_string(i) + " — bot-" +
                                        std::to_string(i) + "[bot] (" + std::to_string(i + 1) +
                                        " update(s))</summary>";
            const std::size_t pos = out.find(summary);
            REQUIRE(pos != std::string::npos);
            CHECK(pos > last);
            last = pos;
        }
    }

    SUBCASE("intro names the counts") {
        const std::string out = render_document(doc_with_groups(3));
        CHECK(out.find("3 bot(s)") != std::string::npos);
        CHECK(out.find("6 message(s)") != std::string::npos);  // 1+2+3
    }

    SUBCASE("exactly one marker occurrence") {
        CHECK(count_marker_occurrences(render_document(doc_with_groups(4))) == 1);
    }

    SUBCASE("marker inside a bot body is escaped") {
        AggregatedDocument doc = doc_with_groups(1);
        doc.groups[0].latest_body = std::string("sneaky\n") + kManagedMarker + "\nrest";
        const std::string out = render_document(doc);
        CHECK(count_marker_occurrences(out) == 1);
        // the exact body survives in the state line
        auto parsed = parse_managed_document(out);
        REQUIRE(parsed.has_value());
        CHECK(parsed->groups[0].latest_body == doc.groups[0].latest_body);
    }
}

TEST_CASE("render_document truncation") {
    SUBCASE("oversized bodies are cut to the limit") {
        AggregatedDocument doc = doc_with_groups(6, 4000);
        RenderLimits limits{500};
        const std::string out = render_document(doc, limits);
        CHECK(out.size() <= 500);
        CHECK(out.rfind(kManagedMarker, 0) == 0);
        CHECK(out.find("Truncated:") != std::string::npos);
    }

    SUBCASE("truncation drops groups from the tail") {
        AggregatedDocument doc = doc_with_groups(5, 120);
        // generous enough for the head + a few blocks, not all five
        const std::string full = render_document(doc);
        RenderLimits limits{full.size() - 1};
        const std::string out = render_document(doc, limits);
        CHECK(out.size() <= limits.max_chars);
        const int kept = count_collapsible_blocks(out);
        CHECK(kept < 5);
        CHECK(kept >= 1);
        // the earliest-ranked groups survive
        CHECK(out.find("bot-0[bot]") != std::string::npos);
        CHECK(out.find("Truncated:") != std::string::npos);
    }

    SUBCASE("default limit keeps everything for ordinary documents") {
        const std::string out = render_document(doc_with_groups(6));
        CHECK(count_collapsible_blocks(out) == 6);
        CHECK(out.find("Truncated:") == std::string::npos);
    }
}

TEST_CASE("render determinism") {
    const AggregatedDocument doc = doc_with_groups(4, 64);
    CHECK(render_document(doc) == render_document(doc));
}

TEST_CASE("state line round-trips the document") {
    std::mt19937 rng(797);
    const RepoConfig config = scenario_config();
    for (int i = 0; i < 200; ++i) {
        const TimelineFile timeline = random_timeline(rng);
        const AggregatedDocument doc = build_document(timeline.events, config);
        auto parsed = parse_managed_document(render_document(doc));
        CAPTURE(i);
        REQUIRE(parsed.has_value());
        REQUIRE(*parsed == doc);
    }
}

TEST_CASE("parse_managed_document rejects foreign bodies") {
    CHECK_FALSE(parse_managed_document("just a comment").has_value());
    CHECK_FALSE(parse_managed_document(std::string(kManagedMarker) + "\nno state here")
                    .has_value());
    CHECK_FALSE(parse_managed_document(std::string(kManagedMarker) +
                                       "\n<!-- funnelbot-state:v1 !!!not-base64!!! -->")
                    .has_value());
}

TEST_CASE("find_managed_comment") {
    auto marked = [](std::int64_t id, std::int64_t at) {
        return CommentSnapshot{id, "funnelbot[bot]", AuthorKind::bot,
                               std::string(kManagedMarker) + "\nbody", at, std::nullopt};
    };
    auto human = [](std::int64_t id, std::int64_t at) {
        return CommentSnapshot{id, "octocat", AuthorKind::human, "hello", at, std::nullopt};
    };

    SUBCASE("empty list") {
        auto lookup = find_managed_comment({});
        CHECK_FALSE(lookup.comment_id.has_value());
        CHECK(lookup.duplicates.empty());
    }
    SUBCASE("single marked comment") {
        auto lookup = find_managed_comment({human(1, 100), marked(7, 200)});
        CHECK(lookup.comment_id == 7);
        CHECK(lookup.duplicates.empty());
    }
    SUBCASE("earliest wins, later ones are flagged") {
        auto lookup = find_managed_comment({marked(3, 100), marked(9, 200)});
        CHECK(lookup.comment_id == 3);
        CHECK(lookup.duplicates == std::vector<std::int64_t>{9});
    }
    SUBCASE("marker must be the whole first line") {
        CommentSnapshot not_marked{4, "octocat", AuthorKind::human,
                                   std::string("prefix ") + kManagedMarker, 100, std::nullopt};
        auto lookup = find_managed_comment({not_marked});
        CHECK_FALSE(lookup.comment_id.has_value());
    }
}
