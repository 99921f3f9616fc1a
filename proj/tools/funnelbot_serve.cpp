// Webhook service entry point. Configuration comes from the environment:
//   FUNNELBOT_SECRET     webhook HMAC secret (required)
//   FUNNELBOT_TOKEN      forge API token (required)
//   FUNNELBOT_FORGE_URL  forge API base URL (default https://api.github.com)
//   FUNNELBOT_BIND       listen address as host:port (default 0.0.0.0:8080)
// Exit codes: 0 clean shutdown, 1 startup failure.

#include <httplib.h>

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "funnelbot/github_forge.hpp"
#include "funnelbot/service.hpp"
#include "funnelbot/version.hpp"

namespace {

httplib::Server* g_server = nullptr;

void handle_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value != nullptr ? value : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"funnelbot webhook service"};
    std::string bind = env_or("FUNNELBOT_BIND", "0.0.0.0:8080");
    app.add_option("--bind", bind, "Listen address host:port (overrides FUNNELBOT_BIND)");
    CLI11_PARSE(app, argc, argv);

    const std::string secret = env_or("FUNNELBOT_SECRET", "");
    const std::string token = env_or("FUNNELBOT_TOKEN", "");
    const std::string forge_url = env_or("FUNNELBOT_FORGE_URL", "https://api.github.com");

    if (secret.empty()) {
        std::cerr << "FUNNELBOT_SECRET is not set\n";
        return 1;
    }
    if (token.empty()) {
        std::cerr << "FUNNELBOT_TOKEN is not set\n";
        return 1;
    }

    const std::size_t colon = bind.rfind(':');
    if (colon == std::string::npos) {
        std::cerr << "FUNNELBOT_BIND must be host:port, got \"" << bind << "\"\n";
        return 1;
    }
    const std::string host = bind.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(bind.substr(colon + 1));
    } catch (const std::exception&) {
        std::cerr << "invalid port in \"" << bind << "\"\n";
        return 1;
    }

    funnelbot::GithubForge forge({.base_url = forge_url, .token = token});
    funnelbot::MediatorService service(forge, {.secret = secret});

    httplib::Server server;
    funnelbot::attach_routes(server, service);

    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    std::cout << "funnelbot " << funnelbot::kVersion << " listening on " << host << ":" << port
              << "\n";
    // listen() returns false on bind failure and true after stop(); the
    // worker pool joins before it returns, so in-flight lanes drain here.
    if (!server.listen(host, port)) {
        std::cerr << "failed to bind " << host << ":" << port << "\n";
        return 1;
    }
    return 0;
}
