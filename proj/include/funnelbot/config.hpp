#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace funnelbot {

// Repository file holding the mediation policy, read from the default branch.
inline constexpr const char* kConfigPath = ".github/funnelbot.yml";

enum class MediationMode { aggregate, passthrough };
enum class SuppressionMode { minimize, hard_delete, none };

const char* to_string(MediationMode mode);
const char* to_string(SuppressionMode mode);

struct BotPolicy {
    std::string login;
    bool allowed = true;
    std::optional<std::string> category;

    bool operator==(const BotPolicy&) const = default;
};

// Per-repository mediation policy. Logins are matched case-insensitively
// (forge logins are case-preserving but unique case-insensitively).
struct RepoConfig {
    int version = 1;
    MediationMode mode = MediationMode::aggregate;
    SuppressionMode suppression = SuppressionMode::minimize;
    std::vector<BotPolicy> bots;
    std::vector<std::string> category_order;
    std::string default_category = "other";
    std::optional<std::string> intro_template;
    std::size_t max_chars = 65000;

    bool operator==(const RepoConfig&) const = default;
};

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed YAML. `line` is 1-based, 0 when the parser gave no position.
class ConfigSyntaxError : public ConfigError {
  public:
    ConfigSyntaxError(const std::string& what, int line)
        : ConfigError(what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

// Well-formed YAML with bad values. Carries every violation, not just the
// first, so a repository owner can fix the file in one pass.
class ConfigValidationError : public ConfigError {
  public:
    explicit ConfigValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

  private:
    std::vector<std::string> violations_;
};

struct ConfigParseResult {
    RepoConfig config;
    std::vector<std::string> warnings;  // unknown keys, ignored values
};

// Empty or missing text yields the default config. Unknown keys warn.
// Throws ConfigSyntaxError / ConfigValidationError.
ConfigParseResult parse_config(const std::string& text);

// Deterministic canonical form; parse_config(canonical_yaml(c)).config == c.
std::string canonical_yaml(const RepoConfig& config);

const BotPolicy* find_policy(const std::string& login, const RepoConfig& config);

// Unlisted bots default to allowed.
bool is_allowed(const std::string& login, const RepoConfig& config);

// The policy's category if set, otherwise the config default.
std::string category_of(const std::string& login, const RepoConfig& config);

// Position in category_order; labels not listed rank after every listed one.
std::size_t category_rank(const std::string& category, const RepoConfig& config);

}  // namespace funnelbot
