#include "funnelbot/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace funnelbot {

const char* to_string(PValueMethod method) {
    return method == PValueMethod::exact ? "exact" : "normal_approximation";
}

const char* to_string(EffectMagnitude magnitude) {
    switch (magnitude) {
        case EffectMagnitude::negligible: return "negligible";
        case EffectMagnitude::small: return "small";
        case EffectMagnitude::medium: return "medium";
        case EffectMagnitude::large: return "large";
    }
    return "unknown";
}

namespace {

void require_non_empty(const LikertSample& sample) {
    if (sample.values.empty()) {
        throw std::invalid_argument("sample \"" + sample.label + "\" is empty");
    }
}

// Twice U of `a`, exact in integers: each a>b pair adds 2, each tie adds 1.
std::int64_t twice_u(const std::vector<int>& a, const std::vector<int>& b) {
    std::int64_t result = 0;
    for (int x : a) {
        for (int y : b) {
            if (x > y) result += 2;
            else if (x == y) result += 1;
        }
    }
    return result;
}

// Exact null distribution of 2U over all C(N, n1) label assignments of the
// pooled multiset, tie-aware. Processes distinct pooled values in ascending
// order; choosing k of the c copies at one value for group a contributes
// 2*k*(b's below) + k*(c-k) half-units. Way counts fit comfortably in
// uint64 for N <= 12 (C(12,6) = 924).
std::vector<std::uint64_t> exact_null_distribution(const std::vector<int>& pooled_sorted,
                                                   std::size_t n1) {
    // (value, count) runs
    std::vector<std::pair<int, std::int64_t>> runs;
    for (int v : pooled_sorted) {
        if (!runs.empty() && runs.back().first == v) runs.back().second += 1;
        else runs.emplace_back(v, 1);
    }

    const std::size_t n = pooled_sorted.size();
    const std::size_t n2 = n - n1;
    const std::size_t max_twice_u = 2 * n1 * n2;

    // binomial table up to n
    std::vector<std::vector<std::uint64_t>> choose(n + 1, std::vector<std::uint64_t>(n + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) {
        choose[i][0] = 1;
        for (std::size_t k = 1; k <= i; ++k) {
            choose[i][k] = choose[i - 1][k - 1] + (k <= i - 1 ? choose[i - 1][k] : 0);
        }
    }

    // dp[a_used][twice_u] = number of assignments
    std::vector<std::vector<std::uint64_t>> dp(
        n1 + 1, std::vector<std::uint64_t>(max_twice_u + 1, 0));
    dp[0][0] = 1;

    std::int64_t total_below = 0;
    for (const auto& [value, count] : runs) {
        const std::size_t c = static_cast<std::size_t>(count);
        std::vector<std::vector<std::uint64_t>> next(
            n1 + 1, std::vector<std::uint64_t>(max_twice_u + 1, 0));
        for (std::size_t a_used = 0; a_used <= n1; ++a_used) {
            for (std::size_t u2 = 0; u2 <= max_twice_u; ++u2) {
                const std::uint64_t ways = dp[a_used][u2];
                if (ways == 0) continue;
                const std::int64_t b_below = total_below - static_cast<std::int64_t>(a_used);
                for (std::size_t k = 0; k <= c && a_used + k <= n1; ++k) {
                    const std::int64_t contribution =
                        2 * static_cast<std::int64_t>(k) * b_below +
                        static_cast<std::int64_t>(k) * static_cast<std::int64_t>(c - k);
                    const std::size_t target = u2 + static_cast<std::size_t>(contribution);
                    next[a_used + k][target] += ways * choose[c][k];
                }
            }
        }
        dp = std::move(next);
        total_below += count;
    }
    return dp[n1];
}

double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace

MannWhitneyResult mann_whitney(const LikertSample& a, const LikertSample& b) {
    require_non_empty(a);
    require_non_empty(b);

    const std::size_t n1 = a.values.size();
    const std::size_t n2 = b.values.size();
    const std::int64_t mn = static_cast<std::int64_t>(n1) * static_cast<std::int64_t>(n2);
    const std::int64_t u2_observed = twice_u(a.values, b.values);

    MannWhitneyResult result;
    result.u_statistic = static_cast<double>(u2_observed) / 2.0;

    if (n1 + n2 <= kExactEnumerationLimit) {
        result.method = PValueMethod::exact;
        std::vector<int> pooled(a.values);
        pooled.insert(pooled.end(), b.values.begin(), b.values.end());
        std::sort(pooled.begin(), pooled.end());
        const auto distribution = exact_null_distribution(pooled, n1);

        // Two-sided: mass at least as far from the mean (mn/2, i.e. mn in
        // half-units) as the observation. Exact integer comparison.
        const std::int64_t observed_dev = std::llabs(u2_observed - mn);
        std::uint64_t hits = 0;
        std::uint64_t total = 0;
        for (std::size_t u2 = 0; u2 < distribution.size(); ++u2) {
            total += distribution[u2];
            if (std::llabs(static_cast<std::int64_t>(u2) - mn) >= observed_dev) {
                hits += distribution[u2];
            }
        }
        result.p_value = static_cast<double>(hits) / static_cast<double>(total);
        return result;
    }

    result.method = PValueMethod::normal_approximation;
    const double n = static_cast<double>(n1 + n2);

    // tie correction: sum t^3 - t over pooled value multiplicities
    std::map<int, std::int64_t> multiplicity;
    for (int v : a.values) multiplicity[v] += 1;
    for (int v : b.values) multiplicity[v] += 1;
    double tie_sum = 0.0;
    for (const auto& [value, t] : multiplicity) {
        tie_sum += static_cast<double>(t) * t * t - static_cast<double>(t);
    }

    const double mu = static_cast<double>(mn) / 2.0;
    const double variance =
        (static_cast<double>(mn) / 12.0) * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (variance <= 0.0) {
        result.p_value = 1.0;  // every pooled value tied
        return result;
    }

    double deviation = std::abs(result.u_statistic - mu) - 0.5;  // continuity correction
    if (deviation < 0.0) deviation = 0.0;
    const double z = deviation / std::sqrt(variance);
    result.p_value = std::min(1.0, 2.0 * normal_sf(z));
    return result;
}

double cliffs_delta(const LikertSample& a, const LikertSample& b) {
    require_non_empty(a);
    require_non_empty(b);
    std::int64_t greater = 0;
    std::int64_t less = 0;
    for (int x : a.values) {
        for (int y : b.values) {
            if (x > y) ++greater;
            else if (x < y) ++less;
        }
    }
    const double mn =
        static_cast<double>(a.values.size()) * static_cast<double>(b.values.size());
    return static_cast<double>(greater - less) / mn;
}

EffectMagnitude magnitude_of(double delta) {
    const double magnitude = std::abs(delta);
    if (!(magnitude <= 1.0)) {
        throw std::invalid_argument("delta out of range [-1, 1]: " + std::to_string(delta));
    }
    if (magnitude < 0.147) return EffectMagnitude::negligible;
    if (magnitude < 0.33) return EffectMagnitude::small;
    if (magnitude < 0.474) return EffectMagnitude::medium;
    return EffectMagnitude::large;
}

StatResult analyze(const LikertSample& a, const LikertSample& b) {
    const MannWhitneyResult mw = mann_whitney(a, b);
    StatResult result;
    result.u_statistic = mw.u_statistic;
    result.p_value = mw.p_value;
    result.method = mw.method;
    result.delta = cliffs_delta(a, b);
    result.magnitude = magnitude_of(result.delta);
    return result;
}

std::pair<LikertSample, LikertSample> load_samples_csv(std::istream& in) {
    LikertSample first, second;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("line " + std::to_string(line_number) +
                                        ": expected \"group,value\"");
        }
        const std::string group = line.substr(0, comma);
        const std::string value_text = line.substr(comma + 1);
        if (line_number == 1 && group == "group" && value_text == "value") continue;

        int value = 0;
        try {
            std::size_t consumed = 0;
            value = std::stoi(value_text, &consumed);
            if (consumed != value_text.size()) throw std::invalid_argument(value_text);
        } catch (const std::exception&) {
            throw std::invalid_argument("line " + std::to_string(line_number) +
                                        ": value \"" + value_text + "\" is not an integer");
        }
        if (value < 1 || value > 5) {
            throw std::invalid_argument("line " + std::to_string(line_number) +
                                        ": value " + std::to_string(value) +
                                        " outside the Likert range [1,5]");
        }

        LikertSample* target = nullptr;
        if (first.label.empty() || first.label == group) {
            first.label = group;
            target = &first;
        } else if (second.label.empty() || second.label == group) {
            second.label = group;
            target = &second;
        } else {
            throw std::invalid_argument("line " + std::to_string(line_number) +
                                        ": more than two groups (saw \"" + first.label +
                                        "\", \"" + second.label + "\", \"" + group + "\")");
        }
        target->values.push_back(value);
    }
    if (first.values.empty() || second.values.empty()) {
        throw std::invalid_argument("need non-empty samples for exactly two groups");
    }
    return {first, second};
}

nlohmann::json stat_result_to_json(const StatResult& result) {
    return nlohmann::json{{"u_statistic", result.u_statistic},
                          {"p_value", result.p_value},
                          {"method", to_string(result.method)},
                          {"delta", result.delta},
                          {"magnitude", to_string(result.magnitude)}};
}

int stats_cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mann-Whitney-Wilcoxon test and Cliff's delta over two Likert samples"};
    std::string csv_path;
    app.add_option("csv", csv_path, "CSV file with columns group,value")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        err << "error: cannot open " << csv_path << "\n";
        return 2;
    }
    try {
        const auto [a, b] = load_samples_csv(in);
        out << stat_result_to_json(analyze(a, b)).dump(2) << "\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace funnelbot
