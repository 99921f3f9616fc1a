#include <doctest.h>

#include <thread>

#include "funnelbot/fake_forge.hpp"

using namespace funnelbot;

TEST_CASE("fake forge store round-trip") {
    FakeForge forge;
    const auto id = forge.create_comment("acme/widgets", 7, "hello");
    const auto listed = forge.list_pr_comments("acme/widgets", 7);
    REQUIRE(listed.size() == 1);
    CHECK(listed[0].comment_id == id);
    CHECK(listed[0].body == "hello");
    CHECK(listed[0].author_login == "funnelbot[bot]");
    CHECK(listed[0].author_kind == AuthorKind::bot);
}

TEST_CASE("comment ids increase strictly in creation order") {
    FakeForge forge;
    const auto a = forge.create_comment("r/r", 1, "a");
    const auto b = forge.seed_comment("r/r", 1, "todo[bot]", AuthorKind::bot, "b");
    const auto c = forge.create_comment("r/r", 2, "c");
    CHECK(a < b);
    CHECK(b < c);
}

TEST_CASE("minimize flags the comment but keeps it listed") {
    FakeForge forge;
    const auto id = forge.seed_comment("r/r", 1, "codecov[bot]", AuthorKind::bot, "report");
    forge.minimize_comment("r/r", id);
    CHECK(forge.is_minimized("r/r", id));
    const auto listed = forge.list_pr_comments("r/r", 1);
    REQUIRE(listed.size() == 1);  // still listed
    const auto stored = forge.stored_comments("r/r", 1);
    REQUIRE(stored.size() == 1);
    CHECK(stored[0].minimized);
}

TEST_CASE("delete removes the comment from listings") {
    FakeForge forge;
    const auto id = forge.seed_comment("r/r", 1, "todo[bot]", AuthorKind::bot, "x");
    forge.delete_comment("r/r", id);
    CHECK(forge.list_pr_comments("r/r", 1).empty());
    CHECK_THROWS_AS(forge.update_comment("r/r", id, "y"), ForgeError);
}

TEST_CASE("update sets body and edited_at") {
    FakeForge forge;
    const auto id = forge.create_comment("r/r", 1, "v1");
    forge.update_comment("r/r", id, "v2");
    const auto listed = forge.list_pr_comments("r/r", 1);
    REQUIRE(listed.size() == 1);
    CHECK(listed[0].body == "v2");
    REQUIRE(listed[0].edited_at.has_value());
    CHECK(*listed[0].edited_at > listed[0].created_at);
}

TEST_CASE("reads on a fresh repo") {
    FakeForge forge;
    CHECK(forge.list_pr_comments("ghost/ghost", 1).empty());
    CHECK_FALSE(forge.read_repo_file("ghost/ghost", ".github/funnelbot.yml").has_value());
}

TEST_CASE("files round-trip") {
    FakeForge forge;
    forge.seed_file("r/r", ".github/funnelbot.yml", "version: 1\n");
    CHECK(forge.read_repo_file("r/r", ".github/funnelbot.yml") == "version: 1\n");
}

TEST_CASE("unknown comment ids raise not_found") {
    FakeForge forge;
    try {
        forge.minimize_comment("r/r", 404);
        FAIL("expected ForgeError");
    } catch (const ForgeError& e) {
        CHECK(e.kind() == ForgeErrorKind::not_found);
    }
}

TEST_CASE("log replays to the same final store") {
    FakeForge forge;
    forge.seed_file("r/r", ".github/funnelbot.yml", "version: 1\n");
    const auto seeded =
        forge.seed_comment("r/r", 1, "codecov[bot]", AuthorKind::bot, "report", 9001, 1614680000);
    const auto managed = forge.create_comment("r/r", 1, "aggregate v1");
    forge.update_comment("r/r", managed, "aggregate v2");
    forge.minimize_comment("r/r", seeded);
    forge.seed_comment_edit("r/r", seeded, "report (edited)");
    forge.list_pr_comments("r/r", 1);

    const auto replayed = FakeForge::replayed_from(forge.log());
    CHECK(replayed->state_json() == forge.state_json());
}

TEST_CASE("log distinguishes service mutations from fixture seeding and reads") {
    FakeForge forge;
    forge.seed_comment("r/r", 1, "todo[bot]", AuthorKind::bot, "x");
    forge.list_pr_comments("r/r", 1);
    forge.read_repo_file("r/r", "f");
    for (const auto& entry : forge.log()) CHECK_FALSE(FakeForge::is_service_mutation(entry));

    forge.create_comment("r/r", 1, "y");
    bool found = false;
    for (const auto& entry : forge.log()) found = found || FakeForge::is_service_mutation(entry);
    CHECK(found);
}

TEST_CASE("fake is safe under concurrent use") {
    FakeForge forge;
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&forge, t] {
            for (int i = 0; i < 50; ++i) {
                forge.create_comment("r/r", t, "c" + std::to_string(i));
                forge.list_pr_comments("r/r", t);
            }
        });
    }
    for (auto& thread : threads) thread.join();
    int total = 0;
    for (int t = 0; t < 4; ++t) total += static_cast<int>(forge.stored_comments("r/r", t).size());
    CHECK(total == 200);
}
