#ifndef MMO_TEST_SUPPORT_HPP
#define MMO_TEST_SUPPORT_HPP

#include <mmo/core_model.hpp>
#include <mmo/measurement.hpp>
#include <mmo/random.hpp>
#include <mmo/search.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace mmo::test {

// Peels nondominated layers with the quadratic definition of dominance.
inline auto brute_force_fronts(std::vector<std::vector<double>> const& objs) -> std::vector<std::vector<std::size_t>>
{
    std::vector<std::vector<std::size_t>> fronts;
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

// Objective vectors of raw members under one model and bounds snapshot.
inline auto objectives_under(std::vector<RawObjectives> const& raws, OptimizationModel const& model,
                             NormalizationBounds const& bounds) -> std::vector<std::vector<double>>
{
    std::vector<std::vector<double>> out;
    EvaluationContext const ctx{model, bounds};
    for (auto const& r : raws) {
        out.push_back(objective_vector(evaluate(Configuration{{0}}, r, ctx)));
    }
    return out;
}

inline auto global_bounds(Range target, Range auxiliary) -> NormalizationBounds
{
    return {NormalizationMode::GlobalSoFar, true, target, auxiliary};
}

// Target values decreasing along a line, so every configuration is worse
// than its lower-index neighbor on option 0.
class LinearSource {
public:
    explicit LinearSource(std::vector<std::size_t> levels) : space_(ConfigSpace::from_level_counts(levels)) {}

    [[nodiscard]] auto space() const -> ConfigSpace const& { return space_; }
    [[nodiscard]] auto evaluate(Configuration const& c) const -> RawObjectives
    {
        double t = 0.0;
        double a = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            t += static_cast<double>(c[i]);
            a += static_cast<double>((c[i] * 7 + i) % 5);
        }
        return {t, a};
    }

private:
    ConfigSpace space_;
};

// Counts every call; used to check that caching keeps repeats free.
template <MeasurementSource Source>
class CountingSource {
public:
    explicit CountingSource(Source const& inner) : inner_(&inner) {}

    [[nodiscard]] auto space() const -> ConfigSpace const& { return inner_->space(); }
    [[nodiscard]] auto evaluate(Configuration const& c) const -> RawObjectives
    {
        ++calls;
        return inner_->evaluate(c);
    }

    mutable std::uint64_t calls = 0;

private:
    Source const* inner_;
};

} // namespace mmo::test

#endif
