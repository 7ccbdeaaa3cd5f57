#ifndef MMO_ANALYSIS_HPP
#define MMO_ANALYSIS_HPP

#include "mmo/error.hpp"
#include "mmo/io.hpp"
#include "mmo/trace.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace mmo {

// Terminal results of one treatment; smaller is better.
struct SampleGroup {
    std::string label;
    std::vector<double> values;
};

inline auto mean(std::span<double const> v) -> double
{
    if (v.empty()) {
        throw Error(ErrorKind::EmptyGroup, "mean of an empty sample");
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline auto standard_error(std::span<double const> v) -> double
{
    if (v.size() < 2) {
        return 0.0;
    }
    double const m = mean(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

// ---------------------------------------------------------------------------
// Effect size and rank tests
// ---------------------------------------------------------------------------

// Vargha-Delaney A12: probability that a value of A beats (is smaller than) a
// value of B, ties counting half.
inline auto a12(std::span<double const> a, std::span<double const> b) -> double
{
    if (a.empty() || b.empty()) {
        throw Error(ErrorKind::EmptyGroup, "A12 needs two nonempty groups");
    }
    double wins = 0.0;
    double ties = 0.0;
    for (double x : a) {
        for (double y : b) {
            if (x < y) {
                wins += 1.0;
            } else if (x == y) {
                ties += 1.0;
            }
        }
    }
    return (wins + 0.5 * ties) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

namespace detail {

    struct Ranking {
        std::vector<double> ranks;  // midranks, 1-based
        double tie_term = 0.0;      // sum over tie groups of t^3 - t
    };

    inline auto midranks(std::span<double const> values) -> Ranking
    {
        auto const n = values.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        Ranking r{std::vector<double>(n), 0.0};
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
                ++j;
            }
            double const rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) {
                r.ranks[order[k]] = rank;
            }
            auto const t = static_cast<double>(j - i + 1);
            r.tie_term += t * t * t - t;
            i = j + 1;
        }
        return r;
    }

    // Two-sided p from a continuity-corrected normal approximation.
    inline auto two_sided_p(double statistic, double mean, double variance) -> double
    {
        if (!(variance > 0.0)) {
            return 1.0;
        }
        double const z = std::max(0.0, std::abs(statistic - mean) - 0.5) / std::sqrt(variance);
        return std::min(1.0, std::erfc(z / std::numbers::sqrt2));
    }

} // namespace detail

// Unpaired Wilcoxon rank-sum (Mann-Whitney) test, normal approximation with
// tie and continuity corrections.
inline auto wilcoxon_rank_sum(std::span<double const> a, std::span<double const> b) -> double
{
    if (a.size() < 2 || b.size() < 2) {
        throw Error(ErrorKind::EmptyGroup, "rank-sum test needs at least two values per group");
    }
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto const ranking = detail::midranks(pooled);
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        w += ranking.ranks[i];
    }
    auto const n1 = static_cast<double>(a.size());
    auto const n2 = static_cast<double>(b.size());
    auto const n = n1 + n2;
    double const mu = n1 * (n + 1.0) / 2.0;
    double const var = n1 * n2 / 12.0 * ((n + 1.0) - ranking.tie_term / (n * (n - 1.0)));
    return detail::two_sided_p(w, mu, var);
}

// Paired Wilcoxon signed-rank test; zero differences are dropped first.
inline auto wilcoxon_signed_rank(std::span<double const> a, std::span<double const> b) -> double
{
    if (a.size() != b.size()) {
        throw Error(ErrorKind::Comparison, "signed-rank test needs paired samples of equal length");
    }
    if (a.size() < 2) {
        throw Error(ErrorKind::EmptyGroup, "signed-rank test needs at least two pairs");
    }
    std::vector<double> magnitude;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double const d = a[i] - b[i];
        if (d != 0.0) {
            magnitude.push_back(std::abs(d));
            positive.push_back(d > 0.0);
        }
    }
    if (magnitude.empty()) {
        return 1.0;
    }
    auto const ranking = detail::midranks(magnitude);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < magnitude.size(); ++i) {
        if (positive[i]) {
            w_plus += ranking.ranks[i];
        }
    }
    auto const n = static_cast<double>(magnitude.size());
    double const mu = n * (n + 1.0) / 4.0;
    double const var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - ranking.tie_term / 48.0;
    return detail::two_sided_p(w_plus, mu, var);
}

// ---------------------------------------------------------------------------
// Scott-Knott clustering
// ---------------------------------------------------------------------------

struct ScottKnottResult {
    std::vector<std::vector<std::size_t>> clusters; // group indices, best (lowest mean) cluster first
    std::vector<std::size_t> rank;                  // 1-based cluster rank per input group
};

namespace detail {

    struct SkContext {
        std::vector<double> means;      // per group, in sorted order
        double mean_variance = 0.0;     // variance of a group mean
        double error_df = 0.0;
        double alpha = 0.05;
    };

    inline void sk_split(SkContext const& ctx, std::size_t lo, std::size_t hi,
                         std::vector<std::pair<std::size_t, std::size_t>>& out)
    {
        auto const k = hi - lo;
        if (k < 2) {
            out.emplace_back(lo, hi);
            return;
        }
        double const grand = std::accumulate(ctx.means.begin() + static_cast<std::ptrdiff_t>(lo),
                                             ctx.means.begin() + static_cast<std::ptrdiff_t>(hi), 0.0)
            / static_cast<double>(k);
        double best_b0 = -1.0;
        std::size_t best_cut = lo + 1;
        double left = 0.0;
        double const total = grand * static_cast<double>(k);
        for (std::size_t cut = lo + 1; cut < hi; ++cut) {
            left += ctx.means[cut - 1];
            auto const k1 = static_cast<double>(cut - lo);
            auto const k2 = static_cast<double>(hi - cut);
            double const m1 = left / k1;
            double const m2 = (total - left) / k2;
            double const b0 = k1 * (m1 - grand) * (m1 - grand) + k2 * (m2 - grand) * (m2 - grand);
            if (b0 > best_b0) {
                best_b0 = b0;
                best_cut = cut;
            }
        }
        double spread = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            spread += (ctx.means[i] - grand) * (ctx.means[i] - grand);
        }
        double const sigma2 = (spread + ctx.error_df * ctx.mean_variance) / (static_cast<double>(k) + ctx.error_df);
        if (!(sigma2 > 0.0) || !(best_b0 > 0.0)) {
            out.emplace_back(lo, hi);
            return;
        }
        double const pi = std::numbers::pi;
        double const lambda = pi / (2.0 * (pi - 2.0)) * best_b0 / sigma2;
        boost::math::chi_squared_distribution<double> chi2(static_cast<double>(k) / (pi - 2.0));
        double const critical = boost::math::quantile(chi2, 1.0 - ctx.alpha);
        if (lambda > critical) {
            sk_split(ctx, lo, best_cut, out);
            sk_split(ctx, best_cut, hi, out);
        } else {
            out.emplace_back(lo, hi);
        }
    }

} // namespace detail

// Classic Scott-Knott: recursive bipartition of mean-ordered groups at the
// cut maximizing the between-cluster sum of squares, accepted when the lambda
// statistic exceeds the chi-square critical value with k/(pi-2) degrees of
// freedom. The within-group error is pooled over all groups.
inline auto scott_knott(std::span<SampleGroup const> groups, double alpha = 0.05) -> ScottKnottResult
{
    if (groups.empty()) {
        throw Error(ErrorKind::EmptyGroup, "Scott-Knott needs at least one group");
    }
    std::vector<double> means(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        means[i] = mean(groups[i].values);
    }
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Sorting by (mean, label, values) keeps the outcome independent of input order.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (means[a] != means[b]) {
            return means[a] < means[b];
        }
        if (groups[a].label != groups[b].label) {
            return groups[a].label < groups[b].label;
        }
        return groups[a].values < groups[b].values;
    });

    detail::SkContext ctx;
    ctx.alpha = alpha;
    double ss_within = 0.0;
    double df = 0.0;
    double inv_n = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        auto const& v = groups[i].values;
        for (double x : v) {
            ss_within += (x - means[i]) * (x - means[i]);
        }
        df += static_cast<double>(v.size()) - 1.0;
        inv_n += 1.0 / static_cast<double>(v.size());
    }
    double const harmonic_n = static_cast<double>(groups.size()) / inv_n;
    ctx.error_df = df;
    ctx.mean_variance = df > 0.0 ? ss_within / df / harmonic_n : 0.0;
    for (auto i : order) {
        ctx.means.push_back(means[i]);
    }

    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    detail::sk_split(ctx, 0, groups.size(), ranges);
    std::sort(ranges.begin(), ranges.end());

    ScottKnottResult result;
    result.rank.resize(groups.size());
    for (std::size_t c = 0; c < ranges.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t p = ranges[c].first; p < ranges[c].second; ++p) {
            members.push_back(order[p]);
            result.rank[order[p]] = c + 1;
        }
        std::sort(members.begin(), members.end());
        result.clusters.push_back(std::move(members));
    }
    return result;
}

// Best Scott-Knott rank first, then the lowest mean within that cluster
// (first in input order on an exact tie).
inline auto select_best_index(std::span<SampleGroup const> groups) -> std::size_t
{
    auto const sk = scott_knott(groups);
    auto const& top = sk.clusters.front();
    std::size_t best = top.front();
    for (auto i : top) {
        if (mean(groups[i].values) < mean(groups[best].values)) {
            best = i;
        }
    }
    return best;
}

inline auto select_best(std::span<SampleGroup const> groups) -> std::string
{
    return groups[select_best_index(groups)].label;
}

// ---------------------------------------------------------------------------
// Resource metrics
// ---------------------------------------------------------------------------

namespace detail {

    inline auto axis_length(std::span<RunTrace const> a, std::span<RunTrace const> b) -> std::uint64_t
    {
        std::uint64_t n = 0;
        for (auto const& t : a) {
            n = std::max(n, t.measurements());
        }
        for (auto const& t : b) {
            n = std::max(n, t.measurements());
        }
        return n;
    }

} // namespace detail

// Mean best-so-far over runs after `count` measurements.
inline auto mean_best_at(std::span<RunTrace const> traces, std::uint64_t count) -> double
{
    double sum = 0.0;
    for (auto const& t : traces) {
        sum += t.best_at(count);
    }
    return sum / static_cast<double>(traces.size());
}

inline auto mean_trajectory(std::span<RunTrace const> traces, std::uint64_t length) -> std::vector<double>
{
    std::vector<double> out(length);
    for (std::uint64_t c = 1; c <= length; ++c) {
        out[c - 1] = mean_best_at(traces, c);
    }
    return out;
}

struct Speedup {
    double target = 0.0;          // T: baseline's best mean result
    std::uint64_t baseline = 0;   // b
    std::optional<std::uint64_t> candidate; // m; unset when T is never reached
    [[nodiscard]] auto reached() const noexcept -> bool { return candidate.has_value(); }
    [[nodiscard]] auto value() const -> double
    {
        return candidate ? static_cast<double>(baseline) / static_cast<double>(*candidate)
                         : std::numeric_limits<double>::quiet_NaN();
    }
};

inline auto speedup_ratio(std::uint64_t baseline, std::uint64_t candidate) -> double
{
    return static_cast<double>(baseline) / static_cast<double>(candidate);
}

// s = b / m over mean best-so-far trajectories: T is the baseline's best mean,
// b the first count where the baseline reaches T, m the first count where the
// candidate's mean is at or below T.
inline auto speedup(std::span<RunTrace const> baseline, std::span<RunTrace const> candidate) -> Speedup
{
    if (baseline.empty() || candidate.empty()) {
        throw Error(ErrorKind::EmptyGroup, "speedup needs traces on both sides");
    }
    auto const length = detail::axis_length(baseline, candidate);
    auto const base = mean_trajectory(baseline, length);
    auto const cand = mean_trajectory(candidate, length);
    Speedup s;
    s.target = *std::min_element(base.begin(), base.end());
    for (std::uint64_t c = 0; c < length; ++c) {
        if (base[c] <= s.target) {
            s.baseline = c + 1;
            break;
        }
    }
    for (std::uint64_t c = 0; c < length; ++c) {
        if (cand[c] <= s.target) {
            s.candidate = c + 1;
            break;
        }
    }
    return s;
}

// Fraction of the last 10% of a budget's measurements at which the best
// configuration changed.
inline auto late_change_fraction(RunTrace const& trace, std::uint64_t budget) -> double
{
    auto const start = budget - budget / 10; // window is (start, budget]
    auto const width = budget - start;
    if (width == 0) {
        return 0.0;
    }
    std::uint64_t changes = 0;
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
        auto const& p = trace.points[i];
        if (p.measurements <= start || p.measurements > budget) {
            continue;
        }
        bool const improved = i == 0 || p.best_target < trace.points[i - 1].best_target;
        if (improved) {
            ++changes;
        }
    }
    return static_cast<double>(changes) / static_cast<double>(width);
}

struct BudgetTrial {
    std::uint64_t budget = 0;
    std::vector<std::vector<RunTrace>> per_optimizer; // repeats per optimizer
};

inline auto mean_late_change(std::vector<RunTrace> const& runs, std::uint64_t budget) -> double
{
    if (runs.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (auto const& r : runs) {
        sum += late_change_fraction(r, budget);
    }
    return sum / static_cast<double>(runs.size());
}

// Smallest grid budget at which every optimizer changes its best
// configuration in under 10% of the final 10% of measurements; the grid
// maximum otherwise.
inline auto calibrate_budget(std::span<BudgetTrial const> grid, double threshold = 0.1) -> std::uint64_t
{
    if (grid.empty()) {
        throw Error(ErrorKind::Configuration, "budget grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i].budget <= grid[i - 1].budget) {
            throw Error(ErrorKind::Configuration, "budget grid must be strictly ascending");
        }
    }
    for (auto const& trial : grid) {
        bool const converged = std::all_of(trial.per_optimizer.begin(), trial.per_optimizer.end(),
                                           [&](auto const& runs) { return mean_late_change(runs, trial.budget) < threshold; });
        if (converged) {
            return trial.budget;
        }
    }
    return grid.back().budget;
}

// Smallest budget proportion whose best weight (by select_best) matches the
// full-budget choice. Keys are proportions; 1.0 must be present.
inline auto min_weight_budget_proportion(std::map<double, std::vector<SampleGroup>> const& sweep) -> double
{
    auto const full = sweep.find(1.0);
    if (full == sweep.end()) {
        throw Error(ErrorKind::Configuration, "weight sweep lacks the full-budget proportion 1.0");
    }
    auto const target = select_best(full->second);
    for (auto const& [proportion, groups] : sweep) {
        if (select_best(groups) == target) {
            return proportion;
        }
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// Pairwise verdicts
// ---------------------------------------------------------------------------

enum class Outcome { Win, Lose, Tie };

inline auto to_string(Outcome o) -> char const*
{
    switch (o) {
    case Outcome::Win: return "win";
    case Outcome::Lose: return "lose";
    case Outcome::Tie: return "tie";
    }
    return "tie";
}

struct ComparisonVerdict {
    double a12 = 0.5;
    double p = 1.0;
    Outcome outcome = Outcome::Tie;
    bool significant = false;
};

inline auto is_significant(double a12_value, double p) -> bool
{
    return (a12_value >= 0.56 || a12_value <= 0.44) && p < 0.05;
}

// Candidate against baseline, smaller is better. A12 reads as "candidate wins".
inline auto compare_groups(std::span<double const> candidate, std::span<double const> baseline, bool paired)
    -> ComparisonVerdict
{
    ComparisonVerdict v;
    v.a12 = a12(candidate, baseline);
    v.p = paired ? wilcoxon_signed_rank(candidate, baseline) : wilcoxon_rank_sum(candidate, baseline);
    double const mc = mean(candidate);
    double const mb = mean(baseline);
    if (mc == mb || v.a12 == 0.5) {
        v.outcome = Outcome::Tie;
    } else {
        v.outcome = mc < mb ? Outcome::Win : Outcome::Lose;
    }
    v.significant = is_significant(v.a12, v.p);
    return v;
}

struct ComparisonRow {
    std::string case_id;
    std::string candidate;
    std::string baseline;
    double mean = 0.0;   // candidate mean
    double stderr_ = 0.0; // candidate standard error
    ComparisonVerdict verdict;
};

struct Tabulation {
    std::size_t win = 0;
    std::size_t lose = 0;
    std::size_t tie = 0;
    std::size_t significant_win = 0;
    std::size_t significant_lose = 0;

    [[nodiscard]] auto total() const noexcept -> std::size_t { return win + lose + tie; }
    [[nodiscard]] auto percent(std::size_t n) const -> double
    {
        return total() == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(total());
    }
};

inline auto tabulate(std::span<ComparisonVerdict const> verdicts) -> Tabulation
{
    Tabulation t;
    for (auto const& v : verdicts) {
        switch (v.outcome) {
        case Outcome::Win:
            ++t.win;
            t.significant_win += v.significant ? 1 : 0;
            break;
        case Outcome::Lose:
            ++t.lose;
            t.significant_lose += v.significant ? 1 : 0;
            break;
        case Outcome::Tie: ++t.tie; break;
        }
    }
    return t;
}

inline auto tabulate(std::span<ComparisonRow const> rows) -> Tabulation
{
    std::vector<ComparisonVerdict> verdicts;
    verdicts.reserve(rows.size());
    for (auto const& r : rows) {
        verdicts.push_back(r.verdict);
    }
    return tabulate(verdicts);
}

inline constexpr char const* comparison_columns = "case,candidate,baseline,mean,stderr,a12,p,outcome,significant";

inline void write_comparison_csv(std::span<ComparisonRow const> rows, std::ostream& out)
{
    out << comparison_columns << '\n';
    for (auto const& r : rows) {
        out << r.case_id << ',' << r.candidate << ',' << r.baseline << ',' << io::format_double(r.mean) << ','
            << io::format_double(r.stderr_) << ',' << io::format_double(r.verdict.a12) << ','
            << io::format_double(r.verdict.p) << ',' << to_string(r.verdict.outcome) << ','
            << (r.verdict.significant ? "true" : "false") << '\n';
    }
}

inline auto comparison_json(std::span<ComparisonRow const> rows) -> nlohmann::ordered_json
{
    auto arr = nlohmann::ordered_json::array();
    for (auto const& r : rows) {
        arr.push_back({{"case", r.case_id},
                       {"candidate", r.candidate},
                       {"baseline", r.baseline},
                       {"mean", r.mean},
                       {"stderr", r.stderr_},
                       {"a12", r.verdict.a12},
                       {"p", r.verdict.p},
                       {"outcome", to_string(r.verdict.outcome)},
                       {"significant", r.verdict.significant}});
    }
    auto const t = tabulate(rows);
    return {{"rows", arr},
            {"summary",
             {{"win", t.win},
              {"lose", t.lose},
              {"tie", t.tie},
              {"win_percent", t.percent(t.win)},
              {"lose_percent", t.percent(t.lose)},
              {"tie_percent", t.percent(t.tie)},
              {"significant_win", t.significant_win},
              {"significant_lose", t.significant_lose}}}};
}

} // namespace mmo

#endif
