#ifndef MMO_SEARCH_HPP
#define MMO_SEARCH_HPP

#include "mmo/core_model.hpp"
#include "mmo/error.hpp"
#include "mmo/measurement.hpp"
#include "mmo/random.hpp"
#include "mmo/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mmo {

struct GAParams {
    std::size_t population_size = 50;
    double mutation_rate = 0.1;
    double crossover_rate = 0.9;

    void validate() const
    {
        if (population_size == 0) {
            throw Error(ErrorKind::Configuration, "population size must be positive");
        }
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0) || !(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
            throw Error(ErrorKind::Configuration, "mutation and crossover rates must lie in [0, 1]");
        }
    }
};

// A measured population member.
struct Member {
    Configuration config;
    RawObjectives raw;
};

// ---------------------------------------------------------------------------
// Sorting and selection primitives
// ---------------------------------------------------------------------------

// Fast nondominated sort. Front k holds members dominated only by members of
// earlier fronts; indices within a front are ascending.
inline auto nondominated_sort(std::span<std::vector<double> const> objs) -> std::vector<std::vector<std::size_t>>
{
    auto const n = objs.size();
    if (n == 0) {
        throw Error(ErrorKind::EmptyPopulation, "cannot sort an empty population");
    }
    auto const m = objs[0].size();
    for (auto const& v : objs) {
        if (v.size() != m || m == 0) {
            throw Error(ErrorKind::Dimension, "objective vectors must have uniform nonzero length");
        }
    }
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> dominators(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(objs[i], objs[j])) {
                dominated[i].push_back(j);
                ++dominators[j];
            } else if (dominates(objs[j], objs[i])) {
                dominated[j].push_back(i);
                ++dominators[i];
            }
        }
    }
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        if (dominators[i] == 0) {
            current.push_back(i);
        }
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto i : current) {
            for (auto j : dominated[i]) {
                if (--dominators[j] == 0) {
                    next.push_back(j);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

// Crowding distance within one front. Boundary members per objective get
// +infinity; a degenerate objective range contributes nothing.
inline auto crowding_distance(std::span<std::vector<double> const> front) -> std::vector<double>
{
    auto const n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) {
        return dist;
    }
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        return dist;
    }
    auto const m = front[0].size();
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < m; ++k) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
        double const lo = front[order.front()][k];
        double const hi = front[order.back()][k];
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (hi == lo) {
            continue;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            dist[order[i]] += (front[order[i + 1]][k] - front[order[i - 1]][k]) / (hi - lo);
        }
    }
    return dist;
}

struct SelectionKey {
    std::size_t rank = 0;
    double crowding = 0.0;
    double target = 0.0; // oriented raw f_t
};

// True when `a` beats `b`: by (rank, crowding) for multi-objective models, by
// f_t for the single-objective one. Ties are not wins.
inline auto tournament_beats(SelectionKey const& a, SelectionKey const& b, OptimizationModel const& model) -> bool
{
    if (model.kind == ModelKind::SingleObjective) {
        return a.target < b.target;
    }
    if (a.rank != b.rank) {
        return a.rank < b.rank;
    }
    return a.crowding > b.crowding;
}

// Two uniform draws; the second wins only if strictly better.
inline auto binary_tournament(std::span<SelectionKey const> keys, OptimizationModel const& model, Rng& rng)
    -> std::size_t
{
    if (keys.empty()) {
        throw Error(ErrorKind::EmptyPopulation, "tournament over an empty population");
    }
    auto const first = rng.index(keys.size());
    auto const second = rng.index(keys.size());
    return tournament_beats(keys[second], keys[first], model) ? second : first;
}

inline auto uniform_crossover(ConfigSpace const& space, Configuration const& p1, Configuration const& p2, double rate,
                              Rng& rng) -> std::pair<Configuration, Configuration>
{
    if (!space.contains(p1) || !space.contains(p2)) {
        throw Error(ErrorKind::Space, "crossover parents do not belong to the space");
    }
    Configuration c1 = p1;
    Configuration c2 = p2;
    if (rng.bernoulli(rate)) {
        for (std::size_t i = 0; i < c1.size(); ++i) {
            if (rng.coin()) {
                std::swap(c1[i], c2[i]);
            }
        }
    }
    return {std::move(c1), std::move(c2)};
}

// Each option, with probability `rate`, jumps to its lowest or highest level.
inline auto boundary_mutation(ConfigSpace const& space, Configuration c, double rate, Rng& rng) -> Configuration
{
    space.validate(c);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (rng.bernoulli(rate)) {
            c[i] = rng.coin() ? static_cast<Configuration::Level>(space.level_count(i) - 1) : 0;
        }
    }
    return c;
}

// One option changed to a different level, chosen uniformly. Returns nullopt
// when every option has a single level.
inline auto random_neighbor(ConfigSpace const& space, Configuration c, Rng& rng) -> std::optional<Configuration>
{
    std::vector<std::size_t> movable;
    for (std::size_t i = 0; i < space.option_count(); ++i) {
        if (space.level_count(i) > 1) {
            movable.push_back(i);
        }
    }
    if (movable.empty()) {
        return std::nullopt;
    }
    auto const opt = movable[rng.index(movable.size())];
    auto level = static_cast<Configuration::Level>(rng.index(space.level_count(opt) - 1));
    if (level >= c[opt]) {
        ++level;
    }
    c[opt] = level;
    return c;
}

// `count` distinct configurations drawn uniformly (sparse Fisher-Yates). When
// the space is smaller than `count`, the remainder is drawn with replacement.
inline auto sample_distinct(ConfigSpace const& space, std::size_t count, Rng& rng) -> std::vector<Configuration>
{
    std::vector<Configuration> out;
    out.reserve(count);
    auto const n = space.size();
    std::unordered_map<std::uint64_t, std::uint64_t> swapped;
    auto value_at = [&](std::uint64_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    auto const distinct = static_cast<std::uint64_t>(std::min<std::uint64_t>(count, n));
    for (std::uint64_t i = 0; i < distinct; ++i) {
        auto const j = i + rng.index(n - i);
        auto const vi = value_at(i);
        auto const vj = value_at(j);
        swapped[j] = vi;
        swapped[i] = vj;
        out.push_back(space.at(vj));
    }
    while (out.size() < count) {
        out.push_back(space.random(rng));
    }
    return out;
}

// ---------------------------------------------------------------------------
// NSGA-II driven by an optimization model
// ---------------------------------------------------------------------------

struct NsgaOptions {
    // Cap on generations after initialization; unset means budget-driven only.
    std::optional<std::size_t> max_generations;
    // Stop after this many consecutive generations without a new measurement.
    std::size_t stall_generations = 200;
    // Replaces the random initial population when nonempty.
    std::vector<Configuration> initial;
};

struct NsgaResult {
    RunTrace trace;
    std::vector<Member> population; // final survivors, in selection order
    std::size_t generations = 0;
};

namespace detail {

    inline auto population_bounds(std::span<Member const> members) -> NormalizationBounds
    {
        std::vector<RawObjectives> raws;
        raws.reserve(members.size());
        for (auto const& m : members) {
            raws.push_back(m.raw);
        }
        return reset_population_bounds(raws);
    }

    inline auto global_bounds(NormalizationBounds const& existing, std::span<Member const> members)
        -> NormalizationBounds
    {
        std::vector<RawObjectives> raws;
        raws.reserve(members.size());
        for (auto const& m : members) {
            raws.push_back(m.raw);
        }
        return update_global_bounds(existing, raws);
    }

    inline auto objective_vectors(std::span<Member const> members, EvaluationContext const& ctx)
        -> std::vector<std::vector<double>>
    {
        std::vector<std::vector<double>> out;
        out.reserve(members.size());
        for (auto const& m : members) {
            out.push_back(objective_vector(evaluate(m.config, m.raw, ctx)));
        }
        return out;
    }

    struct Survivors {
        std::vector<std::size_t> indices;
        std::vector<SelectionKey> keys;
    };

    // Fills `n` slots front by front; the last front admitted is truncated by
    // descending crowding distance (stable).
    inline auto select_survivors(std::vector<std::vector<double>> const& objs, std::span<Member const> members,
                                 std::size_t n) -> Survivors
    {
        Survivors out;
        auto const fronts = nondominated_sort(objs);
        for (std::size_t r = 0; r < fronts.size() && out.indices.size() < n; ++r) {
            auto const& front = fronts[r];
            std::vector<std::vector<double>> fobjs;
            fobjs.reserve(front.size());
            for (auto i : front) {
                fobjs.push_back(objs[i]);
            }
            auto const dist = crowding_distance(fobjs);
            std::vector<std::size_t> order(front.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            if (out.indices.size() + front.size() > n) {
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
                order.resize(n - out.indices.size());
            }
            for (auto k : order) {
                out.indices.push_back(front[k]);
                out.keys.push_back({r, dist[k], members[front[k]].raw.target});
            }
        }
        return out;
    }

} // namespace detail

// NSGA-II over the comparison semantics of `model`. Order per generation:
// mate, vary, measure, update bounds, recompute objectives over parents and
// offspring, sort, keep the top n. Duplicate offspring are served from the
// cache and still join the pool.
template <MeasurementSource Source>
auto mmo_on_nsga2(MeasurementOracle<Source>& oracle, OptimizationModel const& model, GAParams const& params,
                  Rng& rng, NsgaOptions const& options = {}) -> NsgaResult
{
    params.validate();
    auto const& space = oracle.space();
    auto const n = params.population_size;
    if (oracle.budget() - oracle.used() < std::min<std::uint64_t>(n, space.size())) {
        throw Error(ErrorKind::Configuration, "budget is smaller than the population size");
    }

    NsgaResult result;
    std::vector<Member> population;
    auto initial = options.initial.empty() ? sample_distinct(space, n, rng) : options.initial;
    for (auto& c : initial) {
        auto raw = oracle.measure(c);
        if (!raw) {
            break;
        }
        population.push_back({std::move(c), *raw});
    }

    NormalizationBounds bounds = model.mode == NormalizationMode::GlobalSoFar
        ? detail::global_bounds(NormalizationBounds::uninitialized(NormalizationMode::GlobalSoFar), population)
        : detail::population_bounds(population);
    std::vector<SelectionKey> keys(population.size());
    {
        auto const surv = detail::select_survivors(detail::objective_vectors(population, {model, bounds}),
                                                   population, population.size());
        for (std::size_t k = 0; k < surv.indices.size(); ++k) {
            keys[surv.indices[k]] = surv.keys[k];
        }
    }

    std::size_t stalled = 0;
    while (!oracle.exhausted() && stalled < options.stall_generations) {
        if (options.max_generations && result.generations >= *options.max_generations) {
            break;
        }
        auto const used_before = oracle.used();
        std::vector<Member> offspring;
        bool out_of_budget = false;
        while (offspring.size() < n && !out_of_budget) {
            auto const a = binary_tournament(keys, model, rng);
            auto const b = binary_tournament(keys, model, rng);
            auto [c1, c2] = uniform_crossover(space, population[a].config, population[b].config,
                                              params.crossover_rate, rng);
            for (auto* child : {&c1, &c2}) {
                if (offspring.size() >= n) {
                    break;
                }
                auto mutated = boundary_mutation(space, std::move(*child), params.mutation_rate, rng);
                auto raw = oracle.measure(mutated);
                if (!raw) {
                    out_of_budget = true;
                    break;
                }
                offspring.push_back({std::move(mutated), *raw});
            }
        }
        if (offspring.empty()) {
            break;
        }

        std::vector<Member> pool = population;
        pool.insert(pool.end(), offspring.begin(), offspring.end());
        bounds = model.mode == NormalizationMode::GlobalSoFar ? detail::global_bounds(bounds, offspring)
                                                              : detail::population_bounds(pool);
        auto const objs = detail::objective_vectors(pool, {model, bounds});
        auto const surv = detail::select_survivors(objs, pool, n);

        std::vector<Member> next;
        next.reserve(surv.indices.size());
        for (auto i : surv.indices) {
            next.push_back(pool[i]);
        }
        population = std::move(next);
        keys = surv.keys;
        ++result.generations;
        stalled = oracle.used() == used_before ? stalled + 1 : 0;
        if (out_of_budget) {
            break;
        }
    }

    result.population = std::move(population);
    result.trace = oracle.take_trace();
    return result;
}

template <MeasurementSource Source>
auto mmo_on_nsga2(Source const& source, OptimizationModel const& model, GAParams const& params,
                  std::uint64_t budget, Rng& rng) -> RunTrace
{
    MeasurementOracle<Source> oracle(source, budget);
    return mmo_on_nsga2(oracle, model, params, rng).trace;
}

// ---------------------------------------------------------------------------
// Single-objective optimizers
// ---------------------------------------------------------------------------

namespace detail {

    // Upper bound on proposals that yield no new measurement in a row, so
    // walks terminate once every reachable configuration is cached.
    inline auto idle_limit(ConfigSpace const& space) -> std::uint64_t
    {
        return 10'000 + 10 * std::min<std::uint64_t>(space.size(), 10'000'000);
    }

} // namespace detail

// Uniform sampling without replacement until the budget or the space runs out.
template <MeasurementSource Source>
auto random_search(MeasurementOracle<Source>& oracle, Rng& rng) -> RunTrace
{
    auto const& space = oracle.space();
    auto const n = space.size();
    std::unordered_map<std::uint64_t, std::uint64_t> swapped;
    auto value_at = [&](std::uint64_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    for (std::uint64_t i = 0; i < n && !oracle.exhausted(); ++i) {
        auto const j = i + rng.index(n - i);
        auto const vi = value_at(i);
        auto const vj = value_at(j);
        swapped[j] = vi;
        swapped[i] = vj;
        if (!oracle.measure(space.at(vj))) {
            break;
        }
    }
    return oracle.take_trace();
}

template <MeasurementSource Source>
auto random_search(Source const& source, std::uint64_t budget, Rng& rng) -> RunTrace
{
    MeasurementOracle<Source> oracle(source, budget);
    return random_search(oracle, rng);
}

inline auto default_stall_limit(ConfigSpace const& space) -> std::size_t { return 2 * space.option_count(); }

// Stochastic hill climbing with restart: move to a random one-option neighbor
// on strict improvement; restart from a fresh random configuration after
// `stall_limit` consecutive non-improving neighbors.
template <MeasurementSource Source>
auto hill_climb_restart(MeasurementOracle<Source>& oracle, std::size_t stall_limit, Rng& rng) -> RunTrace
{
    auto const& space = oracle.space();
    auto const idle_cap = detail::idle_limit(space);
    Configuration current = space.random(rng);
    auto current_raw = oracle.measure(current);
    if (!current_raw) {
        return oracle.take_trace();
    }
    std::size_t stall = 0;
    std::uint64_t idle = 0;
    while (!oracle.exhausted() && idle < idle_cap) {
        auto const used_before = oracle.used();
        if (stall >= stall_limit) {
            current = space.random(rng);
            current_raw = oracle.measure(current);
            if (!current_raw) {
                break;
            }
            stall = 0;
        } else {
            auto neighbor = random_neighbor(space, current, rng);
            if (!neighbor) {
                break;
            }
            auto raw = oracle.measure(*neighbor);
            if (!raw) {
                break;
            }
            if (raw->target < current_raw->target) {
                current = std::move(*neighbor);
                current_raw = raw;
                stall = 0;
            } else {
                ++stall;
            }
        }
        idle = oracle.used() == used_before ? idle + 1 : 0;
    }
    return oracle.take_trace();
}

template <MeasurementSource Source>
auto hill_climb_restart(Source const& source, std::uint64_t budget, std::size_t stall_limit, Rng& rng) -> RunTrace
{
    MeasurementOracle<Source> oracle(source, budget);
    return hill_climb_restart(oracle, stall_limit, rng);
}

// Generational GA on f_t: binary tournament, uniform crossover, boundary
// mutation, and the single best member carried over unchanged.
template <MeasurementSource Source>
auto soga(MeasurementOracle<Source>& oracle, GAParams const& params, Rng& rng) -> RunTrace
{
    params.validate();
    auto const& space = oracle.space();
    auto const n = params.population_size;
    if (oracle.budget() - oracle.used() < std::min<std::uint64_t>(n, space.size())) {
        throw Error(ErrorKind::Configuration, "budget is smaller than the population size");
    }
    auto const model = OptimizationModel::single();
    std::vector<Member> population;
    for (auto& c : sample_distinct(space, n, rng)) {
        auto raw = oracle.measure(c);
        if (!raw) {
            break;
        }
        population.push_back({std::move(c), *raw});
    }
    std::size_t stalled = 0;
    constexpr std::size_t stall_generations = 200;
    while (!oracle.exhausted() && stalled < stall_generations) {
        auto const used_before = oracle.used();
        std::vector<SelectionKey> keys(population.size());
        std::size_t elite = 0;
        for (std::size_t i = 0; i < population.size(); ++i) {
            keys[i].target = population[i].raw.target;
            if (population[i].raw.target < population[elite].raw.target) {
                elite = i;
            }
        }
        std::vector<Member> next{population[elite]};
        bool out_of_budget = false;
        while (next.size() < n && !out_of_budget) {
            auto const a = binary_tournament(keys, model, rng);
            auto const b = binary_tournament(keys, model, rng);
            auto [c1, c2] = uniform_crossover(space, population[a].config, population[b].config,
                                              params.crossover_rate, rng);
            for (auto* child : {&c1, &c2}) {
                if (next.size() >= n) {
                    break;
                }
                auto mutated = boundary_mutation(space, std::move(*child), params.mutation_rate, rng);
                auto raw = oracle.measure(mutated);
                if (!raw) {
                    out_of_budget = true;
                    break;
                }
                next.push_back({std::move(mutated), *raw});
            }
        }
        population = std::move(next);
        stalled = oracle.used() == used_before ? stalled + 1 : 0;
        if (out_of_budget) {
            break;
        }
    }
    return oracle.take_trace();
}

template <MeasurementSource Source>
auto soga(Source const& source, GAParams const& params, std::uint64_t budget, Rng& rng) -> RunTrace
{
    MeasurementOracle<Source> oracle(source, budget);
    return soga(oracle, params, rng);
}

struct AnnealingSchedule {
    std::optional<double> initial_temperature; // unset: std-dev of the warm-up sample
    double alpha = 0.95;                       // geometric cooling per charged measurement
    std::size_t warmup = 10;

    void validate() const
    {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw Error(ErrorKind::Schedule, "cooling factor must lie in (0, 1)");
        }
        if (initial_temperature && !(*initial_temperature >= 0.0)) {
            throw Error(ErrorKind::Schedule, "initial temperature must be non-negative");
        }
    }
};

// Metropolis acceptance on a minimized objective.
inline auto sa_accept(double delta, double temperature, Rng& rng) -> bool
{
    if (delta <= 0.0) {
        return true;
    }
    if (!(temperature > 0.0)) {
        return false;
    }
    return rng.uniform() < std::exp(-delta / temperature);
}

template <MeasurementSource Source>
auto simulated_annealing(MeasurementOracle<Source>& oracle, AnnealingSchedule const& schedule, Rng& rng) -> RunTrace
{
    schedule.validate();
    auto const& space = oracle.space();
    std::vector<Member> warm;
    for (auto& c : sample_distinct(space, std::max<std::size_t>(schedule.warmup, 1), rng)) {
        auto raw = oracle.measure(c);
        if (!raw) {
            break;
        }
        warm.push_back({std::move(c), *raw});
    }
    if (warm.empty()) {
        return oracle.take_trace();
    }
    double temperature = 0.0;
    if (schedule.initial_temperature) {
        temperature = *schedule.initial_temperature;
    } else {
        double mean = 0.0;
        for (auto const& m : warm) {
            mean += m.raw.target;
        }
        mean /= static_cast<double>(warm.size());
        double var = 0.0;
        for (auto const& m : warm) {
            var += (m.raw.target - mean) * (m.raw.target - mean);
        }
        temperature = std::sqrt(var / static_cast<double>(warm.size()));
    }
    auto current = *std::min_element(warm.begin(), warm.end(), [](Member const& a, Member const& b) {
        return a.raw.target < b.raw.target;
    });

    auto const idle_cap = detail::idle_limit(space);
    std::uint64_t idle = 0;
    while (!oracle.exhausted() && idle < idle_cap) {
        auto const used_before = oracle.used();
        auto neighbor = random_neighbor(space, current.config, rng);
        if (!neighbor) {
            break;
        }
        auto raw = oracle.measure(*neighbor);
        if (!raw) {
            break;
        }
        if (sa_accept(raw->target - current.raw.target, temperature, rng)) {
            current = {std::move(*neighbor), *raw};
        }
        if (oracle.used() != used_before) {
            temperature *= schedule.alpha; // cools once per charged measurement
            idle = 0;
        } else {
            ++idle;
        }
    }
    return oracle.take_trace();
}

template <MeasurementSource Source>
auto simulated_annealing(Source const& source, std::uint64_t budget, AnnealingSchedule const& schedule, Rng& rng)
    -> RunTrace
{
    MeasurementOracle<Source> oracle(source, budget);
    return simulated_annealing(oracle, schedule, rng);
}

} // namespace mmo

#endif
