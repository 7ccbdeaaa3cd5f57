#ifndef MMO_CORE_MODEL_HPP
#define MMO_CORE_MODEL_HPP

#include "mmo/error.hpp"
#include "mmo/random.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mmo {

// ---------------------------------------------------------------------------
// Configuration space
// ---------------------------------------------------------------------------

struct OptionSpec {
    std::string name;
    std::vector<double> values; // level i has native value values[i]
};

class Configuration {
public:
    using Level = std::uint32_t;

    Configuration() = default;
    explicit Configuration(std::vector<Level> levels) : levels_(std::move(levels)) {}

    [[nodiscard]] auto size() const noexcept -> std::size_t { return levels_.size(); }
    [[nodiscard]] auto levels() const noexcept -> std::span<Level const> { return levels_; }
    [[nodiscard]] auto operator[](std::size_t i) const -> Level { return levels_[i]; }
    auto operator[](std::size_t i) -> Level& { return levels_[i]; }

    auto operator==(Configuration const&) const -> bool = default;
    auto operator<=>(Configuration const&) const = default;

private:
    std::vector<Level> levels_;
};

class ConfigSpace {
public:
    explicit ConfigSpace(std::vector<OptionSpec> options) : options_(std::move(options))
    {
        if (options_.empty()) {
            throw Error(ErrorKind::Space, "configuration space needs at least one option");
        }
        size_ = 1;
        for (auto const& opt : options_) {
            if (opt.values.empty()) {
                throw Error(ErrorKind::Space, "option '" + opt.name + "' has no levels");
            }
            auto const n = static_cast<std::uint64_t>(opt.values.size());
            if (size_ > std::numeric_limits<std::uint64_t>::max() / n) {
                throw Error(ErrorKind::Space, "configuration space size overflows 64 bits");
            }
            size_ *= n;
        }
    }

    // Options named opt1..optN whose level values are 0..L-1.
    static auto from_level_counts(std::span<std::size_t const> counts) -> ConfigSpace
    {
        std::vector<OptionSpec> options;
        options.reserve(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
            OptionSpec opt{"opt" + std::to_string(i + 1), {}};
            opt.values.resize(counts[i]);
            for (std::size_t l = 0; l < counts[i]; ++l) {
                opt.values[l] = static_cast<double>(l);
            }
            options.push_back(std::move(opt));
        }
        return ConfigSpace(std::move(options));
    }

    static auto from_level_counts(std::initializer_list<std::size_t> counts) -> ConfigSpace
    {
        std::vector<std::size_t> v(counts);
        return from_level_counts(std::span<std::size_t const>(v));
    }

    [[nodiscard]] auto option_count() const noexcept -> std::size_t { return options_.size(); }
    [[nodiscard]] auto option(std::size_t i) const -> OptionSpec const& { return options_[i]; }
    [[nodiscard]] auto options() const noexcept -> std::span<OptionSpec const> { return options_; }
    [[nodiscard]] auto level_count(std::size_t i) const -> std::size_t { return options_[i].values.size(); }
    [[nodiscard]] auto size() const noexcept -> std::uint64_t { return size_; }

    [[nodiscard]] auto contains(Configuration const& c) const noexcept -> bool
    {
        if (c.size() != options_.size()) {
            return false;
        }
        for (std::size_t i = 0; i < options_.size(); ++i) {
            if (c[i] >= options_[i].values.size()) {
                return false;
            }
        }
        return true;
    }

    void validate(Configuration const& c) const
    {
        if (!contains(c)) {
            throw Error(ErrorKind::Space, "configuration does not belong to the space");
        }
    }

    // Mixed-radix index, first option most significant.
    [[nodiscard]] auto index_of(Configuration const& c) const -> std::uint64_t
    {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < options_.size(); ++i) {
            idx = idx * options_[i].values.size() + c[i];
        }
        return idx;
    }

    [[nodiscard]] auto at(std::uint64_t index) const -> Configuration
    {
        std::vector<Configuration::Level> levels(options_.size());
        for (std::size_t i = options_.size(); i-- > 0;) {
            auto const n = options_[i].values.size();
            levels[i] = static_cast<Configuration::Level>(index % n);
            index /= n;
        }
        return Configuration(std::move(levels));
    }

    [[nodiscard]] auto random(Rng& rng) const -> Configuration
    {
        std::vector<Configuration::Level> levels(options_.size());
        for (std::size_t i = 0; i < options_.size(); ++i) {
            levels[i] = static_cast<Configuration::Level>(rng.index(options_[i].values.size()));
        }
        return Configuration(std::move(levels));
    }

    auto operator==(ConfigSpace const& other) const -> bool
    {
        if (options_.size() != other.options_.size()) {
            return false;
        }
        for (std::size_t i = 0; i < options_.size(); ++i) {
            if (options_[i].values != other.options_[i].values) {
                return false;
            }
        }
        return true;
    }

private:
    std::vector<OptionSpec> options_;
    std::uint64_t size_ = 0;
};

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

enum class ObjectiveSense { Minimize, Maximize };

inline auto orient(double value, ObjectiveSense sense) -> double
{
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::InvalidMeasurement, "measurement is not finite");
    }
    return sense == ObjectiveSense::Maximize ? -value : value;
}

// Oriented raw values: both objectives are minimized.
struct RawObjectives {
    double target = 0.0;
    double auxiliary = 0.0;

    auto operator==(RawObjectives const&) const -> bool = default;
};

struct NormalizedObjectives {
    double target = 0.0;
    double auxiliary = 0.0;

    auto operator==(NormalizedObjectives const&) const -> bool = default;
};

// (value - lower) / (upper - lower); a degenerate range maps everything to 0.
inline auto normalize(double value, double lower, double upper) -> double
{
    if (!(lower <= upper)) {
        throw Error(ErrorKind::Bounds, "lower bound exceeds upper bound");
    }
    if (upper == lower) {
        return 0.0;
    }
    return (value - lower) / (upper - lower);
}

enum class NormalizationMode { GlobalSoFar, CurrentPopulation };

inline auto to_string(NormalizationMode mode) -> char const*
{
    return mode == NormalizationMode::GlobalSoFar ? "global" : "population";
}

struct Range {
    double lower = 0.0;
    double upper = 0.0;

    auto operator==(Range const&) const -> bool = default;
};

struct NormalizationBounds {
    NormalizationMode mode = NormalizationMode::CurrentPopulation;
    bool initialized = false;
    Range target;
    Range auxiliary;

    static auto uninitialized(NormalizationMode mode) -> NormalizationBounds { return {mode, false, {}, {}}; }

    [[nodiscard]] auto apply(RawObjectives const& raw) const -> NormalizedObjectives
    {
        if (!initialized) {
            throw Error(ErrorKind::Bounds, "normalization bounds are not initialized");
        }
        return {normalize(raw.target, target.lower, target.upper),
                normalize(raw.auxiliary, auxiliary.lower, auxiliary.upper)};
    }

    auto operator==(NormalizationBounds const&) const -> bool = default;
};

inline auto reset_population_bounds(std::span<RawObjectives const> population) -> NormalizationBounds
{
    if (population.empty()) {
        throw Error(ErrorKind::EmptyPopulation, "cannot derive bounds from an empty population");
    }
    NormalizationBounds b{NormalizationMode::CurrentPopulation, true,
                          {population[0].target, population[0].target},
                          {population[0].auxiliary, population[0].auxiliary}};
    for (auto const& r : population.subspan(1)) {
        b.target.lower = std::min(b.target.lower, r.target);
        b.target.upper = std::max(b.target.upper, r.target);
        b.auxiliary.lower = std::min(b.auxiliary.lower, r.auxiliary);
        b.auxiliary.upper = std::max(b.auxiliary.upper, r.auxiliary);
    }
    return b;
}

inline auto update_global_bounds(NormalizationBounds const& existing, std::span<RawObjectives const> batch)
    -> NormalizationBounds
{
    if (existing.mode != NormalizationMode::GlobalSoFar) {
        throw Error(ErrorKind::BoundsMode, "global bounds update applied to population-mode bounds");
    }
    if (batch.empty()) {
        return existing;
    }
    auto seen = reset_population_bounds(batch);
    if (!existing.initialized) {
        seen.mode = NormalizationMode::GlobalSoFar;
        return seen;
    }
    NormalizationBounds b = existing;
    b.target.lower = std::min(b.target.lower, seen.target.lower);
    b.target.upper = std::max(b.target.upper, seen.target.upper);
    b.auxiliary.lower = std::min(b.auxiliary.lower, seen.auxiliary.lower);
    b.auxiliary.upper = std::max(b.auxiliary.upper, seen.auxiliary.upper);
    return b;
}

inline auto update_global_bounds(NormalizationBounds const& existing, RawObjectives const& value)
    -> NormalizationBounds
{
    return update_global_bounds(existing, std::span<RawObjectives const>(&value, 1));
}

// ---------------------------------------------------------------------------
// Meta-objectives and models
// ---------------------------------------------------------------------------

struct MetaObjectives {
    double g1 = 0.0;
    double g2 = 0.0;

    auto operator==(MetaObjectives const&) const -> bool = default;
};

inline auto meta_objectives(double ft_norm, double fa_norm, double weight) -> MetaObjectives
{
    if (!(weight > 0.0) || !std::isfinite(weight)) {
        throw Error(ErrorKind::InvalidWeight, "weight must be a positive finite number");
    }
    return {ft_norm + weight * fa_norm, ft_norm - weight * fa_norm};
}

enum class ModelKind { SingleObjective, PMO, MMO };

inline auto to_string(ModelKind kind) -> char const*
{
    switch (kind) {
    case ModelKind::SingleObjective: return "single";
    case ModelKind::PMO: return "pmo";
    case ModelKind::MMO: return "mmo";
    }
    return "unknown";
}

struct OptimizationModel {
    ModelKind kind = ModelKind::MMO;
    double weight = 1.0;
    NormalizationMode mode = NormalizationMode::CurrentPopulation;

    static auto single() -> OptimizationModel { return {ModelKind::SingleObjective, 1.0, NormalizationMode::CurrentPopulation}; }
    static auto pmo(NormalizationMode mode = NormalizationMode::CurrentPopulation) -> OptimizationModel
    {
        return {ModelKind::PMO, 1.0, mode};
    }
    static auto mmo(NormalizationMode mode = NormalizationMode::CurrentPopulation, double weight = 1.0)
        -> OptimizationModel
    {
        if (!(weight > 0.0) || !std::isfinite(weight)) {
            throw Error(ErrorKind::InvalidWeight, "MMO weight must be a positive finite number");
        }
        return {ModelKind::MMO, weight, mode};
    }

    // Number of objectives the search sorts on.
    [[nodiscard]] auto arity() const noexcept -> std::size_t { return kind == ModelKind::SingleObjective ? 1 : 2; }

    auto operator==(OptimizationModel const&) const -> bool = default;
};

// The model and bounds an EvaluatedConfig was computed under. Comparisons are
// only meaningful between configurations sharing one snapshot.
struct EvaluationContext {
    OptimizationModel model;
    NormalizationBounds bounds;

    auto operator==(EvaluationContext const&) const -> bool = default;
};

struct EvaluatedConfig {
    Configuration config;
    RawObjectives raw;
    NormalizedObjectives normalized;
    MetaObjectives meta;
    EvaluationContext context;
};

inline auto evaluate(Configuration config, RawObjectives const& raw, EvaluationContext const& context)
    -> EvaluatedConfig
{
    EvaluatedConfig e{std::move(config), raw, {}, {}, context};
    if (context.model.kind != ModelKind::SingleObjective) {
        e.normalized = context.bounds.apply(raw);
        if (context.model.kind == ModelKind::MMO) {
            e.meta = meta_objectives(e.normalized.target, e.normalized.auxiliary, context.model.weight);
        }
    }
    return e;
}

// The vector dominance is applied to under a model (all minimized).
// SingleObjective uses the oriented raw target, which orders identically to
// any normalized target.
inline auto objective_vector(EvaluatedConfig const& e) -> std::vector<double>
{
    switch (e.context.model.kind) {
    case ModelKind::SingleObjective: return {e.raw.target};
    case ModelKind::PMO: return {e.normalized.target, e.normalized.auxiliary};
    case ModelKind::MMO: return {e.meta.g1, e.meta.g2};
    }
    return {};
}

// Pareto dominance on minimized vectors; exact comparisons, no epsilon.
inline auto dominates(std::span<double const> a, std::span<double const> b) -> bool
{
    if (a.size() != b.size() || a.empty()) {
        throw Error(ErrorKind::Dimension, "objective vectors must have equal nonzero length");
    }
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) {
            return false;
        }
        if (a[i] < b[i]) {
            strictly = true;
        }
    }
    return strictly;
}

inline auto dominates(std::initializer_list<double> a, std::initializer_list<double> b) -> bool
{
    return dominates(std::span<double const>(a.begin(), a.size()), std::span<double const>(b.begin(), b.size()));
}

enum class Comparison { ADominates, BDominates, Nondominated, Equal };

inline auto compare_vectors(std::span<double const> a, std::span<double const> b) -> Comparison
{
    if (a.size() != b.size() || a.empty()) {
        throw Error(ErrorKind::Dimension, "objective vectors must have equal nonzero length");
    }
    if (std::equal(a.begin(), a.end(), b.begin())) {
        return Comparison::Equal;
    }
    if (dominates(a, b)) {
        return Comparison::ADominates;
    }
    if (dominates(b, a)) {
        return Comparison::BDominates;
    }
    return Comparison::Nondominated;
}

inline auto compare_under_model(EvaluatedConfig const& a, EvaluatedConfig const& b, OptimizationModel const& model)
    -> Comparison
{
    if (!(a.context == b.context) || !(a.context.model == model)) {
        throw Error(ErrorKind::ComparisonContext, "configurations were evaluated under different models or bounds");
    }
    auto const va = objective_vector(a);
    auto const vb = objective_vector(b);
    return compare_vectors(va, vb);
}

} // namespace mmo

#endif
