// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <mmo/analysis.hpp>
#include <mmo/core_model.hpp>
#include <mmo/experiment.hpp>
#include <mmo/measurement.hpp>
#include <mmo/search.hpp>
#include <mmo/surrogate.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

using namespace mmo;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
using Fronts = std::vector<std::vector<std::size_t>>;

struct Verdict {
    bool pass = false;
    std::string detail;
};

auto seconds_since(Clock::time_point start) -> double
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

auto fmt(double v, int precision = 3) -> std::string
{
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(precision);
    out << v;
    return out.str();
}

auto jobs() -> std::size_t { return std::max(1U, std::thread::hardware_concurrency()); }

auto fixture(std::string const& name) -> std::string { return (fs::path(MMO_FIXTURES) / name).string(); }

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

auto brute_force_fronts(std::vector<std::vector<double>> const& objs) -> Fronts
{
    Fronts fronts;
    std::vector<bool> removed(objs.size(), false);
    std::size_t left = objs.size();
    while (left > 0) {
        std::vector<std::size_t> front;
        for (std::size_t i = 0; i < objs.size(); ++i) {
            if (removed[i]) {
                continue;
            }
            bool dominated = false;
            for (std::size_t j = 0; j < objs.size() && !dominated; ++j) {
                dominated = !removed[j] && j != i && dominates(objs[j], objs[i]);
            }
            if (!dominated) {
                front.push_back(i);
            }
        }
        for (auto i : front) {
            removed[i] = true;
        }
        left -= front.size();
        fronts.push_back(std::move(front));
    }
    return fronts;
}

auto sorted(Fronts f) -> Fronts
{
    for (auto& front : f) {
        std::sort(front.begin(), front.end());
    }
    return f;
}

auto objectives_under(std::vector<RawObjectives> const& raws, OptimizationModel const& model,
                      NormalizationBounds const& bounds) -> std::vector<std::vector<double>>
{
    std::vector<std::vector<double>> out;
    EvaluationContext const ctx{model, bounds};
    for (auto const& r : raws) {
        out.push_back(objective_vector(evaluate(Configuration{{0}}, r, ctx)));
    }
    return out;
}

auto global_bounds(Range t, Range a) -> NormalizationBounds { return {NormalizationMode::GlobalSoFar, true, t, a}; }

auto ranks_of(std::vector<double> const& v) -> std::vector<double>
{
    std::vector<double> r;
    for (double x : v) {
        double less = 0;
        double equal = 0;
        for (double y : v) {
            less += y < x ? 1 : 0;
            equal += y == x ? 1 : 0;
        }
        r.push_back(1.0 + less + (equal - 1.0) / 2.0);
    }
    return r;
}

// Two-sided exact permutation p of the rank sum of `a`.
auto exact_rank_sum_p(std::vector<double> const& a, std::vector<double> const& b) -> double
{
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto const r = ranks_of(pooled);
    auto const n = pooled.size();
    double observed = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        observed += r[i];
    }
    double const mu = static_cast<double>(a.size()) * (static_cast<double>(n) + 1) / 2;
    double extreme = 0;
    double count = 0;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != a.size()) {
            continue;
        }
        double w = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w += (mask >> i) & 1U ? r[i] : 0.0;
        }
        extreme += std::abs(w - mu) >= std::abs(observed - mu) - 1e-9 ? 1 : 0;
        count += 1;
    }
    return extreme / count;
}

// Two-sided exact sign-flip p of W+ over the nonzero differences.
auto exact_signed_rank_p(std::vector<double> const& a, std::vector<double> const& b) -> double
{
    std::vector<double> mag;
    std::vector<bool> pos;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
            mag.push_back(std::abs(a[i] - b[i]));
            pos.push_back(a[i] > b[i]);
        }
    }
    if (mag.empty()) {
        return 1.0;
    }
    auto const r = ranks_of(mag);
    auto const n = mag.size();
    double observed = 0;
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        observed += pos[i] ? r[i] : 0.0;
        total += r[i];
    }
    double const mu = total / 2;
    double extreme = 0;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w += (mask >> i) & 1U ? r[i] : 0.0;
        }
        extreme += std::abs(w - mu) >= std::abs(observed - mu) - 1e-9 ? 1 : 0;
    }
    return extreme / std::ldexp(1.0, static_cast<int>(n));
}

auto trace_of(std::vector<double> const& best_so_far) -> RunTrace
{
    RunTrace t;
    for (std::size_t i = 0; i < best_so_far.size(); ++i) {
        t.record(i + 1, Configuration{{0}}, {best_so_far[i], 0.0});
    }
    return t;
}

// Records every configuration index handed to the underlying source.
template <MeasurementSource Source>
class RecordingSource {
public:
    explicit RecordingSource(Source const& inner) : inner_(&inner) {}
    [[nodiscard]] auto space() const -> ConfigSpace const& { return inner_->space(); }
    [[nodiscard]] auto evaluate(Configuration const& c) const -> RawObjectives
    {
        seen.push_back(inner_->space().index_of(c));
        return inner_->evaluate(c);
    }
    mutable std::vector<std::uint64_t> seen;

private:
    Source const* inner_;
};

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

std::vector<double> const sweep_weights_list{0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 10.0};

auto criterion1() -> Verdict
{
    auto const start = Clock::now();
    Rng rng(1001);
    std::size_t violations = 0;
    for (int set = 0; set < 1000; ++set) {
        auto const n = 2 + rng.index(99);
        std::vector<RawObjectives> raws(n);
        for (auto& r : raws) {
            r = {std::floor(rng.uniform(1, 2000)) / 4.0, rng.uniform(0, 500)};
        }
        auto const mode = set % 2 == 0 ? NormalizationMode::GlobalSoFar : NormalizationMode::CurrentPopulation;
        auto bounds = reset_population_bounds(raws);
        if (mode == NormalizationMode::GlobalSoFar) {
            bounds = global_bounds({bounds.target.lower - rng.uniform(0, 50), bounds.target.upper + rng.uniform(0, 50)},
                                   {bounds.auxiliary.lower - rng.uniform(0, 20), bounds.auxiliary.upper + rng.uniform(0, 20)});
        }
        auto const model = OptimizationModel::mmo(mode, sweep_weights_list[rng.index(sweep_weights_list.size())]);
        auto const objs = objectives_under(raws, model, bounds);
        EvaluationContext const ctx{model, bounds};
        std::vector<double> ft_norm;
        for (auto const& r : raws) {
            ft_norm.push_back(evaluate(Configuration{{0}}, r, ctx).normalized.target);
        }
        auto const lo = *std::min_element(ft_norm.begin(), ft_norm.end());
        if (std::count(ft_norm.begin(), ft_norm.end(), lo) != 1) {
            --set; // the invariant concerns a strictly minimal member
            continue;
        }
        auto const best = static_cast<std::size_t>(std::min_element(ft_norm.begin(), ft_norm.end()) - ft_norm.begin());
        for (std::size_t j = 0; j < n; ++j) {
            violations += j != best && dominates(objs[j], objs[best]) ? 1 : 0;
        }
    }
    double const t = seconds_since(start);
    return {violations == 0 && t < 5.0, "1000 sets, " + std::to_string(violations) + " violations, " + fmt(t) + " s"};
}

auto criterion2() -> Verdict
{
    Rng rng(2002);
    std::size_t v2 = 0;
    std::size_t v6 = 0;
    std::size_t v7 = 0;
    auto pair_bounds = [&](RawObjectives const& x, RawObjectives const& y, NormalizationMode mode) {
        std::vector<RawObjectives> const pair{x, y};
        auto b = reset_population_bounds(pair);
        if (mode == NormalizationMode::GlobalSoFar) {
            b = global_bounds({b.target.lower - rng.uniform(0, 1), b.target.upper + rng.uniform(0, 1)},
                              {b.auxiliary.lower - rng.uniform(0, 1), b.auxiliary.upper + rng.uniform(0, 1)});
        }
        return b;
    };
    auto run = [&](auto&& make_pair, auto&& check) {
        int done = 0;
        while (done < 10'000) {
            auto const mode = rng.coin() ? NormalizationMode::GlobalSoFar : NormalizationMode::CurrentPopulation;
            auto const model = OptimizationModel::mmo(mode, rng.uniform(0.01, 10));
            auto const [x, y] = make_pair();
            EvaluationContext const ctx{model, pair_bounds(x, y, mode)};
            auto const ex = evaluate(Configuration{{0}}, x, ctx);
            auto const ey = evaluate(Configuration{{0}}, y, ctx);
            if (!check(ex, ey, model)) {
                continue; // precondition not met after normalization
            }
            ++done;
        }
    };
    // A worse target never dominates a better one.
    run([&] { return std::pair{RawObjectives{rng.uniform(), rng.uniform()}, RawObjectives{rng.uniform(), rng.uniform()}}; },
        [&](EvaluatedConfig const& a, EvaluatedConfig const& b, OptimizationModel const& m) {
            if (a.normalized.target == b.normalized.target) {
                return false;
            }
            auto const& better = a.normalized.target < b.normalized.target ? a : b;
            auto const& worse = a.normalized.target < b.normalized.target ? b : a;
            v2 += compare_under_model(worse, better, m) == Comparison::ADominates ? 1 : 0;
            return true;
        });
    // Equal target, unequal auxiliary is mutually nondominated.
    run([&] {
            double const t = rng.uniform();
            return std::pair{RawObjectives{t, rng.uniform()}, RawObjectives{t, rng.uniform()}};
        },
        [&](EvaluatedConfig const& a, EvaluatedConfig const& b, OptimizationModel const& m) {
            if (a.normalized.auxiliary == b.normalized.auxiliary) {
                return false;
            }
            v6 += compare_under_model(a, b, m) != Comparison::Nondominated ? 1 : 0;
            return true;
        });
    // Equal auxiliary, unequal target is ordered by the target.
    run([&] {
            double const a = rng.uniform();
            return std::pair{RawObjectives{rng.uniform(), a}, RawObjectives{rng.uniform(), a}};
        },
        [&](EvaluatedConfig const& a, EvaluatedConfig const& b, OptimizationModel const& m) {
            if (a.normalized.target == b.normalized.target) {
                return false;
            }
            auto const expected = a.normalized.target < b.normalized.target ? Comparison::ADominates : Comparison::BDominates;
            v7 += compare_under_model(a, b, m) != expected ? 1 : 0;
            return true;
        });
    return {v2 + v6 + v7 == 0, "3 x 10000 trials, violations " + std::to_string(v2) + "/" + std::to_string(v6) + "/" +
                                   std::to_string(v7)};
}

auto criterion3() -> Verdict
{
    Rng rng(3003);
    std::size_t mismatches = 0;
    for (int p = 0; p < 200; ++p) {
        auto const n = 1 + rng.index(200);
        std::vector<std::vector<double>> objs(n);
        for (auto& o : objs) {
            o = p % 2 == 0 ? std::vector<double>{std::floor(rng.uniform(0, 12)), std::floor(rng.uniform(0, 12))}
                           : std::vector<double>{rng.uniform(), rng.uniform()};
        }
        mismatches += sorted(nondominated_sort(objs)) != brute_force_fronts(objs) ? 1 : 0;
    }
    return {mismatches == 0, "200 populations, " + std::to_string(mismatches) + " mismatches"};
}

template <class Run>
auto ledger_check(SyntheticLandscape const& land, Run&& run, std::string const& name, std::string& log) -> bool
{
    RecordingSource rec(land);
    auto const [trace, used, remeasure_ok] = run(rec);
    std::set<std::uint64_t> const distinct(rec.seen.begin(), rec.seen.end());
    bool const ok = used == trace.points.size() && distinct.size() == rec.seen.size() && used == rec.seen.size()
        && remeasure_ok;
    if (!ok) {
        log += " " + name + "(used " + std::to_string(used) + ", trace " + std::to_string(trace.points.size()) +
               ", calls " + std::to_string(rec.seen.size()) + ", distinct " + std::to_string(distinct.size()) + ")";
    }
    return ok;
}

auto criterion4() -> Verdict
{
    auto const land = load_landscape(fixture("suite/rugged_s1.json"));
    using Rec = RecordingSource<SyntheticLandscape>;
    std::string log;
    bool ok = true;
    GAParams const ga{50, 0.1, 0.9};
    auto oracle_run = [](auto&& algo) {
        return [algo](Rec const& rec) {
            MeasurementOracle<Rec> oracle(rec, 600);
            Rng rng(11);
            auto trace = algo(oracle, rng);
            auto const used = oracle.used();
            auto const calls = rec.seen.size();
            (void)oracle.measure(trace.best_config);
            bool const free = oracle.used() == used && rec.seen.size() == calls;
            return std::tuple{std::move(trace), used, free};
        };
    };
    ok &= ledger_check(land, oracle_run([&](auto& o, Rng& r) { return mmo_on_nsga2(o, OptimizationModel::mmo(), ga, r).trace; }),
                       "nsga2-mmo", log);
    ok &= ledger_check(land, oracle_run([&](auto& o, Rng& r) { return mmo_on_nsga2(o, OptimizationModel::pmo(), ga, r).trace; }),
                       "nsga2-pmo", log);
    ok &= ledger_check(land, oracle_run([](auto& o, Rng& r) { return random_search(o, r); }), "rs", log);
    ok &= ledger_check(land, oracle_run([](auto& o, Rng& r) { return hill_climb_restart(o, 6, r); }), "shc", log);
    ok &= ledger_check(land, oracle_run([&](auto& o, Rng& r) { return soga(o, ga, r); }), "soga", log);
    ok &= ledger_check(land, oracle_run([](auto& o, Rng& r) { return simulated_annealing(o, AnnealingSchedule{}, r); }),
                       "sa", log);
    auto surrogate_run = [](auto&& algo) {
        return [algo](Rec const& rec) {
            Rng rng(11);
            auto trace = algo(rec, rng);
            auto const used = trace.measurements();
            return std::tuple{std::move(trace), used, used == 50};
        };
    };
    ok &= ledger_check(land, surrogate_run([](Rec const& s, Rng& r) { return flash(s, FlashParams{}, r); }), "flash", log);
    ok &= ledger_check(land, surrogate_run([](Rec const& s, Rng& r) { return flash_mmo(s, FlashMmoParams{}, r); }),
                       "flash-mmo", log);
    return {ok, "8 optimizers" + (log.empty() ? std::string(", charged == distinct == traced, repeats free") : log)};
}

auto criterion5() -> Verdict
{
    auto const mmo_global = OptimizationModel::mmo(NormalizationMode::GlobalSoFar, 1.0);
    auto const mmo_pop = OptimizationModel::mmo(NormalizationMode::CurrentPopulation, 1.0);

    std::vector<double> const ft{1800, 95, 400, 1200, 700, 150, 1000, 300, 1500, 600};
    std::vector<RawObjectives> fig4;
    for (std::size_t i = 0; i < ft.size(); ++i) {
        fig4.push_back({ft[i], 10.0 * static_cast<double>(i)});
    }
    auto const g4 = nondominated_sort(objectives_under(fig4, mmo_global, global_bounds({3, 55209}, {0, 100})));
    auto const p4 = nondominated_sort(objectives_under(fig4, mmo_pop, reset_population_bounds(fig4)));
    bool const ok4 = g4.size() == 1 && g4[0].size() == fig4.size() && p4.size() >= 2;

    std::vector<RawObjectives> const fig5{{1, 100}, {2, 104}, {3, 101}, {4, 103}, {5, 102}};
    auto const g5 = nondominated_sort(objectives_under(fig5, mmo_global, global_bounds({0, 10}, {0, 1000})));
    auto const p5 = nondominated_sort(objectives_under(fig5, mmo_pop, reset_population_bounds(fig5)));
    bool const chain = g5.size() == fig5.size()
        && std::all_of(g5.begin(), g5.end(), [](auto const& f) { return f.size() == 1; });
    bool const mixed = p5.size() >= 2 && std::any_of(p5.begin(), p5.end(), [](auto const& f) { return f.size() >= 2; });
    return {ok4 && chain && mixed, "target-sliver fronts global " + std::to_string(g4.size()) + " / population " +
                                       std::to_string(p4.size()) + "; auxiliary-cluster fronts global " + std::to_string(g5.size()) +
                                       " / population " + std::to_string(p5.size())};
}

struct SuiteStats {
    double mean = 0.0;
    std::size_t hits = 0;
};

auto suite_stats(ExperimentSpec const& spec, double optimum) -> SuiteStats
{
    auto const r = run_experiment(spec, jobs());
    auto const v = terminal_targets(r);
    SuiteStats s;
    s.mean = mean(v);
    s.hits = static_cast<std::size_t>(std::count(v.begin(), v.end(), optimum));
    return s;
}

auto suite_spec(int landscape, OptimizerKind opt) -> ExperimentSpec
{
    ExperimentSpec s;
    s.source = fixture("suite/rugged_s" + std::to_string(landscape) + ".json");
    s.optimizer = opt;
    s.repeats = 50;
    s.base_seed = 1;
    s.population = 50;
    s.budget = is_surrogate(opt) ? 50 : 600;
    s.initial_samples = 30;
    return s;
}

struct SuiteResults {
    std::vector<SuiteStats> mmo;
    std::vector<SuiteStats> soga;
    std::vector<SuiteStats> pmo;
    double seconds = 0.0;
};

auto run_suite() -> SuiteResults
{
    auto const start = Clock::now();
    SuiteResults out;
    for (int l = 1; l <= 5; ++l) {
        auto const land = load_landscape(fixture("suite/rugged_s" + std::to_string(l) + ".json"));
        auto mmo = suite_spec(l, OptimizerKind::Nsga2);
        mmo.model = ModelKind::MMO;
        auto pmo = suite_spec(l, OptimizerKind::Nsga2);
        pmo.model = ModelKind::PMO;
        out.mmo.push_back(suite_stats(mmo, land.optimum_value()));
        out.pmo.push_back(suite_stats(pmo, land.optimum_value()));
        out.soga.push_back(suite_stats(suite_spec(l, OptimizerKind::Soga), land.optimum_value()));
    }
    out.seconds = seconds_since(start);
    return out;
}

auto criterion6(SuiteResults const& s) -> Verdict
{
    int mean_wins = 0;
    int hit_wins = 0;
    std::string detail;
    for (std::size_t l = 0; l < 5; ++l) {
        mean_wins += s.mmo[l].mean <= s.soga[l].mean ? 1 : 0;
        hit_wins += s.mmo[l].hits >= s.soga[l].hits ? 1 : 0;
        detail += " [" + fmt(s.mmo[l].mean, 2) + " vs " + fmt(s.soga[l].mean, 2) + ", hits " +
                  std::to_string(s.mmo[l].hits) + " vs " + std::to_string(s.soga[l].hits) + "]";
    }
    return {mean_wins >= 4 && hit_wins >= 3 && s.seconds < 600.0,
            "MMO vs SOGA mean <= on " + std::to_string(mean_wins) + "/5, hits >= on " + std::to_string(hit_wins) +
                "/5, suite " + fmt(s.seconds, 1) + " s;" + detail};
}

auto criterion7(SuiteResults const& s) -> Verdict
{
    int wins = 0;
    std::string detail;
    for (std::size_t l = 0; l < 5; ++l) {
        wins += s.mmo[l].mean <= s.pmo[l].mean ? 1 : 0;
        detail += " [" + fmt(s.mmo[l].mean, 2) + " vs " + fmt(s.pmo[l].mean, 2) + "]";
    }
    return {wins >= 4, "MMO vs PMO mean <= on " + std::to_string(wins) + "/5;" + detail};
}

auto criterion8() -> Verdict
{
    auto const start = Clock::now();
    int wins = 0;
    std::string detail;
    for (int l = 1; l <= 5; ++l) {
        auto const land = load_landscape(fixture("suite/rugged_s" + std::to_string(l) + ".json"));
        auto const fm = suite_stats(suite_spec(l, OptimizerKind::FlashMmo), land.optimum_value());
        auto const f = suite_stats(suite_spec(l, OptimizerKind::Flash), land.optimum_value());
        wins += fm.mean <= f.mean ? 1 : 0;
        detail += " [" + fmt(fm.mean, 2) + " vs " + fmt(f.mean, 2) + "]";
    }
    double const t = seconds_since(start);
    return {wins >= 3 && t < 300.0,
            "Flash_MMO vs Flash mean <= on " + std::to_string(wins) + "/5, " + fmt(t, 1) + " s;" + detail};
}

auto criterion9() -> Verdict
{
    std::vector<std::string> failed;
    auto check = [&](bool ok, std::string const& what) {
        if (!ok) {
            failed.push_back(what);
        }
    };
    // A12 against direct pair enumeration.
    std::vector<std::pair<std::vector<double>, std::vector<double>>> const a12_fixtures{
        {{1, 2, 3}, {4, 5, 6}}, {{1, 2}, {2, 3}}, {{4, 4}, {4, 4}}, {{5, 1, 3}, {2, 2, 9, 0}}};
    for (auto const& [a, b] : a12_fixtures) {
        double wins = 0;
        for (double x : a) {
            for (double y : b) {
                wins += x < y ? 1.0 : (x == y ? 0.5 : 0.0);
            }
        }
        check(a12(a, b) == wins / static_cast<double>(a.size() * b.size()), "a12");
    }
    check(a12(std::vector<double>{1, 2}, std::vector<double>{2, 3}) == 0.875, "a12 0.875");

    std::vector<double> const a3{1, 2, 3};
    std::vector<double> const b3{10, 11, 12};
    std::vector<double> const a5{1, 2, 3, 4, 5};
    std::vector<double> const b5{10, 11, 12, 13, 14};
    double const d3 = std::abs(wilcoxon_rank_sum(a3, b3) - exact_rank_sum_p(a3, b3));
    double const d5 = std::abs(wilcoxon_rank_sum(a5, b5) - exact_rank_sum_p(a5, b5));
    check(d3 <= 0.02, "rank-sum n=3");
    check(d5 <= 0.02, "rank-sum n=5");

    std::vector<double> x(20);
    std::vector<double> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
        x[i] = static_cast<double>(i);
        y[i] = x[i] + 5.0;
    }
    double const shift_p = wilcoxon_signed_rank(x, y);
    double const shift_exact = exact_signed_rank_p(x, y);
    check(shift_p < 0.001 && shift_exact < 0.001, "signed-rank shift");
    std::vector<double> u(10, 4.0);
    std::vector<double> w(10, 4.0);
    w[3] = 7.0;
    check(wilcoxon_signed_rank(u, w) > 0.05 && exact_signed_rank_p(u, w) > 0.05, "signed-rank single");
    check(wilcoxon_signed_rank(x, x) == 1.0, "signed-rank identical");

    std::vector<SampleGroup> const separated{{"a", {1, 1, 1}}, {"b", {9, 9, 9}}};
    std::vector<SampleGroup> const identical{{"a", {2, 3, 4}}, {"b", {2, 3, 4}}, {"c", {2, 3, 4}}};
    auto const sk2 = scott_knott(separated).clusters.size();
    auto const sk1 = scott_knott(identical).clusters.size();
    check(sk2 == 2 && sk1 == 1, "scott-knott");

    std::string detail = "rank-sum |approx-exact| " + fmt(d3, 4) + " (n=3), " + fmt(d5, 4) + " (n=5); signed-rank p " +
                         fmt(shift_p, 6) + " vs exact " + fmt(shift_exact, 6) + "; clusters " + std::to_string(sk2) +
                         "/" + std::to_string(sk1);
    for (auto const& f : failed) {
        detail += "; failed " + f;
    }
    return {failed.empty(), detail};
}

auto criterion10() -> Verdict
{
    std::vector<RunTrace> const x{trace_of({9, 7, 7, 3, 3}), trace_of({8, 8, 4, 4, 2})};
    auto const self = speedup(x, x);

    std::vector<double> base(400);
    std::vector<double> cand(200);
    for (std::size_t i = 0; i < 400; ++i) {
        base[i] = 500.0 - static_cast<double>(i + 1);
    }
    for (std::size_t i = 0; i < 200; ++i) {
        cand[i] = 300.0 - static_cast<double>(i + 1);
    }
    std::vector<RunTrace> const b{trace_of(base)};
    std::vector<RunTrace> const c{trace_of(cand)};
    auto const two = speedup(b, c);

    std::vector<RunTrace> const never{trace_of(std::vector<double>(400, 1000.0))};
    auto const none = speedup(b, never);

    bool const ok = self.reached() && self.value() == 1.0 && two.baseline == 400 && two.candidate == 200
        && two.value() == 2.0 && !none.reached();
    return {ok, "self " + fmt(self.value(), 2) + ", b=" + std::to_string(two.baseline) + " m=" +
                    std::to_string(two.candidate.value_or(0)) + " s=" + fmt(two.value(), 2) + ", unreached " +
                    (none.reached() ? "no" : "yes")};
}

auto slurp(fs::path const& p) -> std::string
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

auto criterion11() -> Verdict
{
    auto const dir = fs::temp_directory_path() / ("mmo_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<std::string> const invocations{
        "--optimizer nsga2 --model mmo --norm population --budget 300 --repeats 10 --seed 5",
        "--optimizer nsga2 --model pmo --norm global --budget 300 --repeats 10 --seed 5",
        "--optimizer soga --budget 300 --repeats 10", "--optimizer sa --budget 300 --repeats 10",
        "--optimizer flash-mmo --budget 40 --k 20 --repeats 5"};
    std::size_t identical = 0;
    bool ran = true;
    for (std::size_t i = 0; i < invocations.size(); ++i) {
        std::array<fs::path, 2> out{dir / ("a" + std::to_string(i) + ".csv"), dir / ("b" + std::to_string(i) + ".csv")};
        for (std::size_t rep = 0; rep < 2; ++rep) {
            auto const cmd = std::string(MMO_TUNE_PATH) + " run --landscape " + fixture("suite/rugged_s3.json") + " " +
                             invocations[i] + " --jobs " + std::to_string(rep == 0 ? 1 : jobs()) + " --out " +
                             out[rep].string() + " >/dev/null 2>&1";
            int const status = std::system(cmd.c_str());
            ran = ran && WIFEXITED(status) && WEXITSTATUS(status) == 0;
        }
        bool const same = !slurp(out[0]).empty() && slurp(out[0]) == slurp(out[1])
            && slurp(trace_path_for(out[0])) == slurp(trace_path_for(out[1]));
        identical += same ? 1 : 0;
    }
    fs::remove_all(dir);
    return {ran && identical == invocations.size(),
            std::to_string(identical) + "/" + std::to_string(invocations.size()) +
                " invocations byte-identical (results and traces)"};
}

} // namespace

auto main() -> int
{
    int failures = 0;
    auto report = [&](int id, std::string const& title, std::function<Verdict()> const& fn) {
        Verdict v;
        try {
            v = fn();
        } catch (std::exception const& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  " << id << ". " << title << ": " << v.detail << std::endl;
    };
    report(1, "minimal-target member never dominated", criterion1);
    report(2, "target ordering, equal-target and equal-auxiliary properties", criterion2);
    report(3, "nondominated sort matches brute force", criterion3);
    report(4, "distinct-measurement budget ledger", criterion4);
    report(5, "global vs population normalization failure modes", criterion5);
    SuiteResults suite;
    bool suite_ok = true;
    std::string suite_error;
    try {
        suite = run_suite();
    } catch (std::exception const& e) {
        suite_ok = false;
        suite_error = e.what();
    }
    auto from_suite = [&](auto fn) {
        return [&, fn]() -> Verdict {
            if (!suite_ok) {
                return {false, "error: " + suite_error};
            }
            return fn(suite);
        };
    };
    report(6, "MMO vs SOGA on the rugged suite", from_suite(criterion6));
    report(7, "MMO vs PMO on the rugged suite", from_suite(criterion7));
    report(8, "Flash_MMO vs Flash on the rugged suite", criterion8);
    report(9, "statistics kernels", criterion9);
    report(10, "speedup arithmetic", criterion10);
    report(11, "byte-identical reruns", criterion11);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
