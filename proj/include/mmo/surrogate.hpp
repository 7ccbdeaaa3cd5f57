#ifndef MMO_SURROGATE_HPP
#define MMO_SURROGATE_HPP

#include "mmo/core_model.hpp"
#include "mmo/error.hpp"
#include "mmo/measurement.hpp"
#include "mmo/random.hpp"
#include "mmo/search.hpp"
#include "mmo/trace.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <unordered_set>
#include <vector>

namespace mmo {

// ---------------------------------------------------------------------------
// CART regression tree over option level indices
// ---------------------------------------------------------------------------

struct CartOptions {
    std::size_t min_leaf = 2; // nodes this small are not split
};

struct CartSample {
    Configuration config;
    double target = 0.0;
};

class CartTree {
public:
    struct Node {
        static constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
        std::uint32_t option = none; // none marks a leaf
        double threshold = 0.0;      // level <= threshold goes left
        std::uint32_t left = none;
        std::uint32_t right = none;
        double value = 0.0; // mean of training targets reaching the node
        std::size_t count = 0;

        [[nodiscard]] auto is_leaf() const noexcept -> bool { return option == none; }
    };

    [[nodiscard]] auto predict(Configuration const& c) const -> double
    {
        std::uint32_t at = 0;
        while (!nodes_[at].is_leaf()) {
            auto const& node = nodes_[at];
            at = static_cast<double>(c[node.option]) <= node.threshold ? node.left : node.right;
        }
        return nodes_[at].value;
    }

    [[nodiscard]] auto nodes() const noexcept -> std::span<Node const> { return nodes_; }

    [[nodiscard]] auto leaf_count() const -> std::size_t
    {
        return static_cast<std::size_t>(
            std::count_if(nodes_.begin(), nodes_.end(), [](Node const& n) { return n.is_leaf(); }));
    }

    // Greedy recursive splitting on midpoints between consecutive distinct
    // levels, minimizing the summed squared error of the two children.
    static auto fit(std::span<CartSample const> samples, CartOptions const& options = {}) -> CartTree
    {
        if (samples.empty()) {
            throw Error(ErrorKind::Training, "cannot fit a tree to an empty sample set");
        }
        auto const width = samples[0].config.size();
        for (auto const& s : samples) {
            if (s.config.size() != width) {
                throw Error(ErrorKind::Training, "training configurations differ in option count");
            }
        }
        CartTree tree;
        std::vector<std::size_t> idx(samples.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        tree.grow(samples, idx, std::max<std::size_t>(options.min_leaf, 1));
        return tree;
    }

private:
    auto grow(std::span<CartSample const> samples, std::span<std::size_t> idx, std::size_t min_leaf) -> std::uint32_t
    {
        auto const at = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        Node node;
        node.count = idx.size();

        bool constant = true;
        double sum = 0.0;
        for (auto i : idx) {
            sum += samples[i].target;
            constant = constant && samples[i].target == samples[idx[0]].target;
        }
        node.value = constant ? samples[idx[0]].target : sum / static_cast<double>(idx.size());
        if (idx.size() <= min_leaf || constant) {
            nodes_[at] = node;
            return at;
        }

        auto const width = samples[idx[0]].config.size();
        double best_sse = std::numeric_limits<double>::infinity();
        std::size_t best_option = 0;
        double best_threshold = 0.0;
        bool found = false;
        std::vector<std::size_t> order(idx.begin(), idx.end());
        for (std::size_t opt = 0; opt < width; ++opt) {
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return samples[a].config[opt] < samples[b].config[opt];
            });
            // Two-pass SSE per side keeps the comparison exact enough for ties.
            double left_sum = 0.0;
            double left_sq = 0.0;
            double total_sq = 0.0;
            for (auto i : order) {
                total_sq += samples[i].target * samples[i].target;
            }
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                double const y = samples[order[k]].target;
                left_sum += y;
                left_sq += y * y;
                auto const lo = samples[order[k]].config[opt];
                auto const hi = samples[order[k + 1]].config[opt];
                if (lo == hi) {
                    continue;
                }
                auto const nl = static_cast<double>(k + 1);
                auto const nr = static_cast<double>(order.size() - k - 1);
                double const right_sum = sum - left_sum;
                double const right_sq = total_sq - left_sq;
                double const sse = (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
                if (sse < best_sse) {
                    best_sse = sse;
                    best_option = opt;
                    best_threshold = (static_cast<double>(lo) + static_cast<double>(hi)) / 2.0;
                    found = true;
                }
            }
        }
        if (!found) {
            nodes_[at] = node;
            return at;
        }

        auto const mid = std::stable_partition(idx.begin(), idx.end(), [&](std::size_t i) {
            return static_cast<double>(samples[i].config[best_option]) <= best_threshold;
        });
        auto const split = static_cast<std::size_t>(mid - idx.begin());
        node.option = static_cast<std::uint32_t>(best_option);
        node.threshold = best_threshold;
        node.left = grow(samples, idx.subspan(0, split), min_leaf);
        node.right = grow(samples, idx.subspan(split), min_leaf);
        nodes_[at] = node;
        return at;
    }

    std::vector<Node> nodes_;
};

inline auto cart_fit(std::span<CartSample const> samples, CartOptions const& options = {}) -> CartTree
{
    return CartTree::fit(samples, options);
}

inline auto cart_predict(CartTree const& tree, Configuration const& c) -> double { return tree.predict(c); }

// One tree per objective, trained on the same measured set.
struct SurrogateBundle {
    CartTree target;
    CartTree auxiliary;

    static auto fit(std::span<Member const> measured, CartOptions const& options) -> SurrogateBundle
    {
        std::vector<CartSample> t;
        std::vector<CartSample> a;
        t.reserve(measured.size());
        a.reserve(measured.size());
        for (auto const& m : measured) {
            t.push_back({m.config, m.raw.target});
            a.push_back({m.config, m.raw.auxiliary});
        }
        return {CartTree::fit(t, options), CartTree::fit(a, options)};
    }
};

// Surrogate predictions exposed as a measurement source.
class SurrogateSource {
public:
    SurrogateSource(ConfigSpace const& space, SurrogateBundle const& bundle) : space_(&space), bundle_(&bundle) {}

    [[nodiscard]] auto space() const -> ConfigSpace const& { return *space_; }
    [[nodiscard]] auto evaluate(Configuration const& c) const -> RawObjectives
    {
        return {bundle_->target.predict(c), bundle_->auxiliary.predict(c)};
    }

private:
    ConfigSpace const* space_;
    SurrogateBundle const* bundle_;
};

// ---------------------------------------------------------------------------
// Model-based tuning loops
// ---------------------------------------------------------------------------

struct FlashParams {
    std::size_t initial_samples = 30; // k
    std::uint64_t budget = 50;
    std::size_t eval_budget = 1000; // surrogate evaluations per acquisition
    CartOptions cart{};
};

struct FlashMmoParams {
    std::size_t initial_samples = 30;
    std::uint64_t budget = 50;
    std::size_t inner_population = 50;
    std::size_t inner_generations = 20; // populations evaluated, initial one included
    CartOptions cart{};
};

namespace detail {

    // Uniform draws from the configurations the oracle has not measured.
    template <MeasurementSource Source>
    class UnmeasuredSampler {
    public:
        explicit UnmeasuredSampler(MeasurementOracle<Source> const& oracle) : oracle_(&oracle)
        {
            auto const& space = oracle.space();
            if (oracle.used() * 2 >= space.size()) {
                for (std::uint64_t i = 0; i < space.size(); ++i) {
                    if (!oracle.ledger().contains(i)) {
                        listed_.push_back(i);
                    }
                }
                use_list_ = true;
            }
        }

        [[nodiscard]] auto available() const -> std::uint64_t
        {
            return use_list_ ? listed_.size() : oracle_->space().size() - oracle_->used();
        }

        auto draw(Rng& rng) -> Configuration
        {
            auto const& space = oracle_->space();
            if (use_list_) {
                return space.at(listed_[rng.index(listed_.size())]);
            }
            while (true) {
                auto const i = rng.index(space.size());
                if (!oracle_->ledger().contains(i)) {
                    return space.at(i);
                }
            }
        }

        // Distinct draws while possible, then with replacement.
        auto draw_distinct(std::size_t count, Rng& rng) -> std::vector<Configuration>
        {
            std::vector<Configuration> out;
            std::unordered_set<std::uint64_t> taken;
            auto const& space = oracle_->space();
            auto const distinct = std::min<std::uint64_t>(count, available());
            while (out.size() < distinct) {
                auto c = draw(rng);
                if (taken.insert(space.index_of(c)).second) {
                    out.push_back(std::move(c));
                }
            }
            while (out.size() < count) {
                out.push_back(draw(rng));
            }
            return out;
        }

    private:
        MeasurementOracle<Source> const* oracle_;
        std::vector<std::uint64_t> listed_;
        bool use_list_ = false;
    };

    inline void check_flash_budget(std::size_t k, std::uint64_t budget, ConfigSpace const& space)
    {
        if (k == 0 || k > budget) {
            throw Error(ErrorKind::Configuration, "initial sample size must be positive and not exceed the budget");
        }
        if (budget > space.size()) {
            throw Error(ErrorKind::Configuration, "budget exceeds the size of the space");
        }
    }

    template <MeasurementSource Source>
    auto initial_sample(MeasurementOracle<Source>& oracle, std::size_t k, Rng& rng) -> std::vector<Member>
    {
        std::vector<Member> measured;
        for (auto& c : sample_distinct(oracle.space(), k, rng)) {
            if (auto raw = oracle.measure(c)) {
                measured.push_back({std::move(c), *raw});
            }
        }
        return measured;
    }

} // namespace detail

// Sequential CART-surrogate tuning: each step measures the best-predicted f_t
// among `eval_budget` random unmeasured candidates.
template <MeasurementSource Source>
auto flash(Source const& source, FlashParams const& params, Rng& rng) -> RunTrace
{
    auto const& space = source.space();
    detail::check_flash_budget(params.initial_samples, params.budget, space);
    MeasurementOracle<Source> oracle(source, params.budget);
    auto measured = detail::initial_sample(oracle, params.initial_samples, rng);
    while (!oracle.exhausted()) {
        std::vector<CartSample> samples;
        samples.reserve(measured.size());
        for (auto const& m : measured) {
            samples.push_back({m.config, m.raw.target});
        }
        auto const tree = CartTree::fit(samples, params.cart);
        detail::UnmeasuredSampler<Source> sampler(oracle);
        Configuration best;
        double best_pred = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < std::max<std::size_t>(params.eval_budget, 1); ++e) {
            auto c = sampler.draw(rng);
            auto const p = tree.predict(c);
            if (e == 0 || p < best_pred) {
                best_pred = p;
                best = std::move(c);
            }
        }
        auto raw = oracle.measure(best);
        if (!raw) {
            break;
        }
        measured.push_back({std::move(best), *raw});
    }
    return oracle.take_trace();
}

// Flash whose acquisition runs MMO-on-NSGA-II (population normalization,
// w = 1) over the surrogate-predicted objectives and measures the final
// population member with the best predicted f_t that is not yet measured.
template <MeasurementSource Source>
auto flash_mmo(Source const& source, FlashMmoParams const& params, Rng& rng) -> RunTrace
{
    auto const& space = source.space();
    detail::check_flash_budget(params.initial_samples, params.budget, space);
    if (params.inner_population == 0 || params.inner_generations == 0) {
        throw Error(ErrorKind::Configuration, "inner population and generations must be positive");
    }
    MeasurementOracle<Source> oracle(source, params.budget);
    auto measured = detail::initial_sample(oracle, params.initial_samples, rng);
    auto const model = OptimizationModel::mmo(NormalizationMode::CurrentPopulation, 1.0);
    GAParams ga;
    ga.population_size = params.inner_population;

    while (!oracle.exhausted()) {
        auto const bundle = SurrogateBundle::fit(measured, params.cart);
        SurrogateSource surrogate(space, bundle);
        detail::UnmeasuredSampler<Source> sampler(oracle);

        NsgaOptions inner;
        inner.max_generations = params.inner_generations - 1;
        inner.initial = sampler.draw_distinct(params.inner_population, rng);
        MeasurementOracle<SurrogateSource> predicted(surrogate, std::numeric_limits<std::uint64_t>::max(), false);
        auto const result = mmo_on_nsga2(predicted, model, ga, rng, inner);

        std::optional<Configuration> pick;
        double best_pred = std::numeric_limits<double>::infinity();
        for (auto const& m : result.population) {
            if (!oracle.is_measured(m.config) && (!pick || m.raw.target < best_pred)) {
                pick = m.config;
                best_pred = m.raw.target;
            }
        }
        if (!pick) {
            // Every survivor is already measured; fall back to the initial
            // candidates, which were drawn from unmeasured configurations.
            for (auto const& c : inner.initial) {
                auto const p = surrogate.evaluate(c).target;
                if (!pick || p < best_pred) {
                    pick = c;
                    best_pred = p;
                }
            }
        }
        auto raw = oracle.measure(*pick);
        if (!raw) {
            break;
        }
        measured.push_back({std::move(*pick), *raw});
    }
    return oracle.take_trace();
}

} // namespace mmo

#endif
