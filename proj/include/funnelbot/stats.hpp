#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace funnelbot {

// Ordinal survey responses for one group, coded 1 (strongly disagree) to
// 5 (strongly agree). The coding range is enforced at the ingestion boundary
// (CSV loader); the test statistics below work on any integer ordinals.
struct LikertSample {
    std::string label;
    std::vector<int> values;

    bool operator==(const LikertSample&) const = default;
};

enum class PValueMethod { exact, normal_approximation };
enum class EffectMagnitude { negligible, small, medium, large };

const char* to_string(PValueMethod method);
const char* to_string(EffectMagnitude magnitude);

// Combined sample size up to which the exact permutation distribution is
// enumerated; larger inputs use the tie-corrected normal approximation.
inline constexpr std::size_t kExactEnumerationLimit = 12;

struct MannWhitneyResult {
    double u_statistic = 0.0;  // U of the first sample, ties counted 1/2
    double p_value = 1.0;      // two-sided
    PValueMethod method = PValueMethod::exact;
};

struct StatResult {
    double u_statistic = 0.0;
    double p_value = 1.0;
    PValueMethod method = PValueMethod::exact;
    double delta = 0.0;
    EffectMagnitude magnitude = EffectMagnitude::negligible;
};

// Two-sided Mann-Whitney-Wilcoxon test of distribution equality.
//
// U is computed by pair counting with ties contributing 1/2, so
// U_a + U_b = |a|*|b| always. For |a|+|b| <= kExactEnumerationLimit the
// p-value is exact: the tie-aware permutation distribution of U over all
// C(N, |a|) label assignments is enumerated (via a counting recurrence over
// the pooled value multiset, all integer arithmetic in half-units of U), and
// p = P(|U' - mn/2| >= |U - mn/2|). Beyond the limit the normal
// approximation applies, with tie-corrected variance and a continuity
// correction of 1/2.
MannWhitneyResult mann_whitney(const LikertSample& a, const LikertSample& b);

// Cliff's delta in [-1, 1]: (#{x>y} - #{x<y}) / (|a|*|b|) over all pairs.
double cliffs_delta(const LikertSample& a, const LikertSample& b);

// Romano et al. thresholds on |delta|, strict at each boundary:
// < 0.147 negligible, < 0.33 small, < 0.474 medium, otherwise large.
EffectMagnitude magnitude_of(double delta);

// mann_whitney + cliffs_delta + magnitude_of in one record.
StatResult analyze(const LikertSample& a, const LikertSample& b);

// CSV with columns group,value (header optional), exactly two group labels,
// values in [1,5]. Samples are returned in order of first appearance.
std::pair<LikertSample, LikertSample> load_samples_csv(std::istream& in);

nlohmann::json stat_result_to_json(const StatResult& result);

// <csv-path>; prints the StatResult as JSON. Exit 0 on success, 2 on input
// error.
int stats_cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace funnelbot
