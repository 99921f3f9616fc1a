#include "funnelbot/config.hpp"

#include <yaml-cpp/yaml.h>

#include <set>
#include <sstream>

#include "funnelbot/util.hpp"

namespace funnelbot {

const char* to_string(MediationMode mode) {
    return mode == MediationMode::passthrough ? "passthrough" : "aggregate";
}

const char* to_string(SuppressionMode mode) {
    switch (mode) {
        case SuppressionMode::minimize: return "minimize";
        case SuppressionMode::hard_delete: return "delete";
        case SuppressionMode::none: return "none";
    }
    return "minimize";
}

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
    std::string out = "invalid funnelbot config:";
    for (const auto& v : violations) {
        out += "\n  - ";
        out += v;
    }
    return out;
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> violations)
    : ConfigError(join_violations(violations)), violations_(std::move(violations)) {}

namespace {

bool known_key(const std::string& key) {
    static const std::set<std::string> keys = {
        "version", "mode", "suppression", "bots", "category_order",
        "default_category", "intro_template", "max_chars",
    };
    return keys.count(key) > 0;
}

// yaml-cpp happily coerces maps/lists to strings via operator>>, so gate the
// scalar reads explicitly to produce actionable messages.
std::optional<std::string> scalar(const YAML::Node& node) {
    if (!node || !node.IsScalar()) return std::nullopt;
    return node.as<std::string>();
}

}  // namespace

ConfigParseResult parse_config(const std::string& text) {
    ConfigParseResult result;
    RepoConfig& config = result.config;

    // Whitespace-only files count as absent: the defaults apply.
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return result;

    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigSyntaxError("config parse error at line " + std::to_string(e.mark.line + 1) +
                                    ": " + e.msg,
                                e.mark.line + 1);
    } catch (const YAML::Exception& e) {
        throw ConfigSyntaxError(std::string("config parse error: ") + e.what(), 0);
    }

    if (root.IsNull()) return result;
    if (!root.IsMap()) throw ConfigSyntaxError("config root must be a mapping", 1);

    std::vector<std::string> violations;

    for (const auto& entry : root) {
        const std::string key = entry.first.as<std::string>("");
        if (!known_key(key)) {
            result.warnings.push_back("unknown key \"" + key + "\" ignored");
        }
    }

    if (root["version"]) {
        int version = 0;
        try {
            version = root["version"].as<int>();
        } catch (const YAML::Exception&) {
            violations.push_back("version: not an integer");
            version = -1;
        }
        if (version != -1) {
            config.version = version;
            if (version != 1) {
                violations.push_back("unsupported version " + std::to_string(version) +
                                     " (only version 1 is supported)");
            }
        }
    }

    if (root["mode"]) {
        auto value = scalar(root["mode"]);
        if (value == "aggregate") config.mode = MediationMode::aggregate;
        else if (value == "passthrough") config.mode = MediationMode::passthrough;
        else violations.push_back("mode: expected \"aggregate\" or \"passthrough\"");
    }

    if (root["suppression"]) {
        auto value = scalar(root["suppression"]);
        if (value == "minimize") config.suppression = SuppressionMode::minimize;
        else if (value == "delete") config.suppression = SuppressionMode::hard_delete;
        else if (value == "none") config.suppression = SuppressionMode::none;
        else violations.push_back("suppression: expected \"minimize\", \"delete\" or \"none\"");
    }

    if (root["default_category"]) {
        auto value = scalar(root["default_category"]);
        if (value && !value->empty()) config.default_category = *value;
        else violations.push_back("default_category: must be a non-empty label");
    }

    if (root["intro_template"]) {
        auto value = scalar(root["intro_template"]);
        if (value) config.intro_template = *value;
        else violations.push_back("intro_template: must be a string");
    }

    if (root["max_chars"]) {
        long long value = 0;
        bool ok = true;
        try {
            value = root["max_chars"].as<long long>();
        } catch (const YAML::Exception&) {
            ok = false;
        }
        if (!ok || value <= 0) violations.push_back("max_chars: must be a positive integer");
        else config.max_chars = static_cast<std::size_t>(value);
    }

    if (root["category_order"]) {
        const auto& node = root["category_order"];
        if (!node.IsSequence()) {
            violations.push_back("category_order: must be a list of labels");
        } else {
            std::set<std::string> seen;
            for (const auto& item : node) {
                auto label = scalar(item);
                if (!label || label->empty()) {
                    violations.push_back("category_order: entries must be non-empty labels");
                    continue;
                }
                if (!seen.insert(*label).second) {
                    violations.push_back("category_order: duplicate label \"" + *label + "\"");
                    continue;
                }
                config.category_order.push_back(*label);
            }
        }
    }

    if (root["bots"]) {
        const auto& node = root["bots"];
        if (!node.IsSequence()) {
            violations.push_back("bots: must be a list of policies");
        } else {
            std::set<std::string> seen;
            for (const auto& item : node) {
                BotPolicy policy;
                if (item.IsScalar()) {
                    // Shorthand: a bare login means "allowed, default category".
                    policy.login = item.as<std::string>();
                } else if (item.IsMap()) {
                    auto login = scalar(item["login"]);
                    if (!login) {
                        violations.push_back("bots: policy missing \"login\"");
                        continue;
                    }
                    policy.login = *login;
                    if (item["allowed"]) {
                        try {
                            policy.allowed = item["allowed"].as<bool>();
                        } catch (const YAML::Exception&) {
                            violations.push_back("bots: \"" + policy.login +
                                                 "\": allowed must be true or false");
                        }
                    }
                    if (item["category"]) {
                        auto category = scalar(item["category"]);
                        if (category && !category->empty()) policy.category = *category;
                        else violations.push_back("bots: \"" + policy.login +
                                                  "\": category must be a non-empty label");
                    }
                } else {
                    violations.push_back("bots: entries must be logins or policy maps");
                    continue;
                }
                if (policy.login.empty()) {
                    violations.push_back("bots: login must be non-empty");
                    continue;
                }
                if (!seen.insert(ascii_lower(policy.login)).second) {
                    violations.push_back("bots: duplicate policy for \"" + policy.login + "\"");
                    continue;
                }
                config.bots.push_back(std::move(policy));
            }
        }
    }

    if (!violations.empty()) throw ConfigValidationError(std::move(violations));
    return result;
}

namespace {

// Quote only when YAML would otherwise reinterpret the scalar.
std::string yaml_quote(const std::string& s) {
    bool needs_quote = s.empty();
    for (char c : s) {
        if (c == ':' || c == '#' || c == '"' || c == '\'' || c == '\n' || c == '{' ||
            c == '}' || c == '[' || c == ']' || c == '&' || c == '*' || c == '%') {
            needs_quote = true;
            break;
        }
    }
    if (!needs_quote && (s.front() == ' ' || s.back() == ' ' || s.front() == '-')) needs_quote = true;
    if (!needs_quote) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '\\' || c == '"') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string canonical_yaml(const RepoConfig& config) {
    std::ostringstream out;
    out << "version: " << config.version << "\n";
    out << "mode: " << to_string(config.mode) << "\n";
    out << "suppression: " << to_string(config.suppression) << "\n";
    out << "default_category: " << yaml_quote(config.default_category) << "\n";
    out << "max_chars: " << config.max_chars << "\n";
    if (config.intro_template) {
        out << "intro_template: " << yaml_quote(*config.intro_template) << "\n";
    }
    if (!config.category_order.empty()) {
        out << "category_order:\n";
        for (const auto& label : config.category_order) {
            out << "  - " << yaml_quote(label) << "\n";
        }
    }
    if (!config.bots.empty()) {
        out << "bots:\n";
        for (const auto& policy : config.bots) {
            out << "  - login: " << yaml_quote(policy.login) << "\n";
            out << "    allowed: " << (policy.allowed ? "true" : "false") << "\n";
            if (policy.category) {
                out << "    category: " << yaml_quote(*policy.category) << "\n";
            }
        }
    }
    return out.str();
}

const BotPolicy* find_policy(const std::string& login, const RepoConfig& config) {
    for (const auto& policy : config.bots) {
        if (iequals(policy.login, login)) return &policy;
    }
    return nullptr;
}

bool is_allowed(const std::string& login, const RepoConfig& config) {
    const BotPolicy* policy = find_policy(login, config);
    return policy == nullptr || policy->allowed;
}

std::string category_of(const std::string& login, const RepoConfig& config) {
    const BotPolicy* policy = find_policy(login, config);
    if (policy && policy->category) return *policy->category;
    return config.default_category;
}

std::size_t category_rank(const std::string& category, const RepoConfig& config) {
    for (std::size_t i = 0; i < config.category_order.size(); ++i) {
        if (config.category_order[i] == category) return i;
    }
    return config.category_order.size();
}

}  // namespace funnelbot
