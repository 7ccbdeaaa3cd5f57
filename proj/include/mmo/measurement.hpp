#ifndef MMO_MEASUREMENT_HPP
#define MMO_MEASUREMENT_HPP

#include "mmo/core_model.hpp"
#include "mmo/error.hpp"
#include "mmo/io.hpp"
#include "mmo/random.hpp"
#include "mmo/trace.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace mmo {

// Anything that maps a configuration of its space to oriented raw objectives.
template <class S>
concept MeasurementSource = requires(S const& s, Configuration const& c) {
    { s.space() } -> std::convertible_to<ConfigSpace const&>;
    { s.evaluate(c) } -> std::same_as<RawObjectives>;
};

// ---------------------------------------------------------------------------
// Tabular datasets
// ---------------------------------------------------------------------------

struct ObjectiveColumn {
    std::string name;
    ObjectiveSense sense = ObjectiveSense::Minimize;
};

// A fully measured space. Values are stored in native units and oriented on
// the way out of evaluate().
class Dataset {
public:
    Dataset(std::string name, ConfigSpace space, ObjectiveColumn target, ObjectiveColumn auxiliary,
            std::vector<RawObjectives> native)
        : name_(std::move(name))
        , space_(std::move(space))
        , target_(std::move(target))
        , auxiliary_(std::move(auxiliary))
        , native_(std::move(native))
    {
        if (native_.size() != space_.size()) {
            throw Error(ErrorKind::Coverage, "dataset table does not cover the space");
        }
    }

    [[nodiscard]] auto name() const -> std::string const& { return name_; }
    [[nodiscard]] auto space() const -> ConfigSpace const& { return space_; }
    [[nodiscard]] auto target() const -> ObjectiveColumn const& { return target_; }
    [[nodiscard]] auto auxiliary() const -> ObjectiveColumn const& { return auxiliary_; }

    [[nodiscard]] auto native(Configuration const& c) const -> RawObjectives
    {
        if (!space_.contains(c)) {
            throw Error(ErrorKind::MissingMeasurement, "configuration absent from dataset '" + name_ + "'");
        }
        return native_[space_.index_of(c)];
    }

    [[nodiscard]] auto evaluate(Configuration const& c) const -> RawObjectives
    {
        auto const n = native(c);
        return {orient(n.target, target_.sense), orient(n.auxiliary, auxiliary_.sense)};
    }

private:
    std::string name_;
    ConfigSpace space_;
    ObjectiveColumn target_;
    ObjectiveColumn auxiliary_;
    std::vector<RawObjectives> native_;
};

namespace detail {

    struct ObjectiveHeader {
        std::string name;
        ObjectiveSense sense;
        std::size_t column;
    };

    inline auto parse_objective_header(std::string_view cell, std::size_t column) -> std::optional<ObjectiveHeader>
    {
        auto const colon = cell.rfind(':');
        if (colon == std::string_view::npos) {
            return std::nullopt;
        }
        auto const suffix = cell.substr(colon + 1);
        ObjectiveSense sense{};
        if (suffix == "min") {
            sense = ObjectiveSense::Minimize;
        } else if (suffix == "max") {
            sense = ObjectiveSense::Maximize;
        } else {
            throw Error(ErrorKind::Format, "line 1: objective column '" + std::string(cell) + "' must end in :min or :max");
        }
        return ObjectiveHeader{std::string(cell.substr(0, colon)), sense, column};
    }

    inline auto format_level_value(double v) -> std::string { return io::format_double(v); }

} // namespace detail

// Reads `opt1,...,optN,<name>:<min|max>,...` CSV. Option columns are those
// without a sense suffix; levels are the distinct values per column, sorted
// ascending. The table must cover the Cartesian product exactly once.
inline auto load_dataset(std::istream& in, std::string const& name, std::string const& target_name,
                         std::string const& auxiliary_name) -> Dataset
{
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::Format, name + ": empty file");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3); // UTF-8 BOM
    }
    auto const header = io::split(line, ',');
    std::vector<std::size_t> option_cols;
    std::vector<std::string> option_names;
    std::optional<detail::ObjectiveHeader> target;
    std::optional<detail::ObjectiveHeader> auxiliary;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (auto obj = detail::parse_objective_header(header[i], i)) {
            if (obj->name == target_name) {
                target = obj;
            } else if (obj->name == auxiliary_name) {
                auxiliary = obj;
            }
        } else {
            option_cols.push_back(i);
            option_names.emplace_back(header[i]);
        }
    }
    if (!target) {
        throw Error(ErrorKind::Format, name + ": target column '" + target_name + "' not found");
    }
    if (!auxiliary) {
        throw Error(ErrorKind::Format, name + ": auxiliary column '" + auxiliary_name + "' not found");
    }
    if (option_cols.empty()) {
        throw Error(ErrorKind::Format, name + ": no option columns");
    }

    struct Row {
        std::vector<double> options;
        RawObjectives native;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (io::trim(line).empty()) {
            continue;
        }
        auto const cells = io::split(line, ',');
        auto const where = name + ":" + std::to_string(line_no);
        if (cells.size() != header.size()) {
            throw Error(ErrorKind::Format, where + ": expected " + std::to_string(header.size()) + " cells, got "
                                               + std::to_string(cells.size()));
        }
        Row row{{}, {}, line_no};
        for (auto col : option_cols) {
            row.options.push_back(io::parse_double(cells[col], where));
        }
        row.native.target = io::parse_double(cells[target->column], where);
        row.native.auxiliary = io::parse_double(cells[auxiliary->column], where);
        if (!std::isfinite(row.native.target) || !std::isfinite(row.native.auxiliary)) {
            throw Error(ErrorKind::InvalidMeasurement, where + ": non-finite measurement");
        }
        rows.push_back(std::move(row));
    }

    std::vector<OptionSpec> options(option_cols.size());
    for (std::size_t j = 0; j < option_cols.size(); ++j) {
        options[j].name = option_names[j];
        for (auto const& r : rows) {
            options[j].values.push_back(r.options[j]);
        }
        std::sort(options[j].values.begin(), options[j].values.end());
        options[j].values.erase(std::unique(options[j].values.begin(), options[j].values.end()),
                                options[j].values.end());
    }
    if (rows.empty()) {
        throw Error(ErrorKind::Coverage, name + ": no data rows");
    }
    ConfigSpace space(std::move(options));

    std::vector<RawObjectives> table(space.size());
    std::vector<std::size_t> seen_on(space.size(), 0);
    for (auto const& r : rows) {
        std::vector<Configuration::Level> levels(r.options.size());
        for (std::size_t j = 0; j < r.options.size(); ++j) {
            auto const& vals = space.option(j).values;
            levels[j] = static_cast<Configuration::Level>(
                std::lower_bound(vals.begin(), vals.end(), r.options[j]) - vals.begin());
        }
        auto const idx = space.index_of(Configuration(std::move(levels)));
        if (seen_on[idx] != 0) {
            throw Error(ErrorKind::Duplicate, name + ":" + std::to_string(r.line) + ": duplicate configuration (first at line "
                                                  + std::to_string(seen_on[idx]) + ")");
        }
        seen_on[idx] = r.line;
        table[idx] = r.native;
    }
    if (rows.size() != space.size()) {
        throw Error(ErrorKind::Coverage, name + ": dataset covers " + std::to_string(rows.size()) + "/"
                                             + std::to_string(space.size()) + " configurations");
    }
    return Dataset(name, std::move(space), {target->name, target->sense}, {auxiliary->name, auxiliary->sense},
                   std::move(table));
}

inline auto load_dataset(std::filesystem::path const& path, std::string const& target_name,
                         std::string const& auxiliary_name) -> Dataset
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Format, "cannot open dataset '" + path.string() + "'");
    }
    return load_dataset(in, path.stem().string(), target_name, auxiliary_name);
}

inline void export_dataset(Dataset const& ds, std::ostream& out)
{
    auto const& space = ds.space();
    auto sense = [](ObjectiveSense s) { return s == ObjectiveSense::Maximize ? "max" : "min"; };
    for (auto const& opt : space.options()) {
        out << opt.name << ',';
    }
    out << ds.target().name << ':' << sense(ds.target().sense) << ',' << ds.auxiliary().name << ':'
        << sense(ds.auxiliary().sense) << '\n';
    for (std::uint64_t i = 0; i < space.size(); ++i) {
        auto const c = space.at(i);
        for (std::size_t j = 0; j < space.option_count(); ++j) {
            out << detail::format_level_value(space.option(j).values[c[j]]) << ',';
        }
        auto const n = ds.native(c);
        out << io::format_double(n.target) << ',' << io::format_double(n.auxiliary) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Synthetic landscapes
// ---------------------------------------------------------------------------

enum class CorrelationRegime { Harmonic, Conflicting, Mixed };

inline auto to_string(CorrelationRegime r) -> char const*
{
    switch (r) {
    case CorrelationRegime::Harmonic: return "harmonic";
    case CorrelationRegime::Conflicting: return "conflicting";
    case CorrelationRegime::Mixed: return "mixed";
    }
    return "mixed";
}

inline auto parse_regime(std::string_view s) -> CorrelationRegime
{
    if (s == "harmonic") {
        return CorrelationRegime::Harmonic;
    }
    if (s == "conflicting") {
        return CorrelationRegime::Conflicting;
    }
    if (s == "mixed") {
        return CorrelationRegime::Mixed;
    }
    throw Error(ErrorKind::Format, "unknown correlation regime '" + std::string(s) + "'");
}

struct LandscapeSpec {
    std::uint64_t seed = 1;
    std::vector<std::size_t> levels{55, 55};
    std::size_t bumps = 20;
    double ruggedness = 0.5;
    CorrelationRegime regime = CorrelationRegime::Mixed;

    auto operator==(LandscapeSpec const&) const -> bool = default;
};

inline constexpr std::uint64_t max_landscape_size = 1'000'000;

struct Bump {
    std::vector<double> center;
    double width = 0.0;
    double depth = 0.0;
};

// Deterministic rugged landscape. Both objectives are minimized: f_t is a sum
// of Gaussian basins plus hashed per-configuration noise, f_a mixes its own
// basins with f_t's according to the correlation regime.
class SyntheticLandscape {
public:
    explicit SyntheticLandscape(LandscapeSpec spec)
        : spec_(std::move(spec))
        , space_(make_space(spec_))
    {
        if (space_.size() > max_landscape_size) {
            throw Error(ErrorKind::Generation, "landscape space of " + std::to_string(space_.size())
                                                   + " exceeds the enumerable limit");
        }
        if (spec_.bumps == 0) {
            throw Error(ErrorKind::Generation, "landscape needs at least one bump");
        }
        if (!(spec_.ruggedness >= 0.0) || !std::isfinite(spec_.ruggedness)) {
            throw Error(ErrorKind::Generation, "ruggedness must be a non-negative finite number");
        }
        Rng rng(splitmix64(spec_.seed));
        target_bumps_ = draw_bumps(rng);
        aux_bumps_ = draw_bumps(rng);
        table_.resize(space_.size());
        for (std::uint64_t i = 0; i < space_.size(); ++i) {
            table_[i] = compute(i);
        }
        optimum_index_ = 0;
        for (std::uint64_t i = 1; i < table_.size(); ++i) {
            if (table_[i].target < table_[optimum_index_].target) {
                optimum_index_ = i;
            }
        }
        local_optima_ = count_local_optima();
    }

    [[nodiscard]] auto spec() const -> LandscapeSpec const& { return spec_; }
    [[nodiscard]] auto space() const -> ConfigSpace const& { return space_; }

    [[nodiscard]] auto evaluate(Configuration const& c) const -> RawObjectives
    {
        space_.validate(c);
        return table_[space_.index_of(c)];
    }

    [[nodiscard]] auto value_at(std::uint64_t index) const -> RawObjectives const& { return table_[index]; }
    [[nodiscard]] auto optimum() const -> Configuration { return space_.at(optimum_index_); }
    [[nodiscard]] auto optimum_value() const -> double { return table_[optimum_index_].target; }
    [[nodiscard]] auto local_optima() const -> std::uint64_t { return local_optima_; }

    // Recomputes the value function from scratch, bypassing the table.
    [[nodiscard]] auto compute(std::uint64_t index) const -> RawObjectives
    {
        auto const c = space_.at(index);
        std::vector<double> u(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            auto const n = space_.level_count(i);
            u[i] = n > 1 ? static_cast<double>(c[i]) / static_cast<double>(n - 1) : 0.0;
        }
        double const basin_t = basin_sum(target_bumps_, u);
        double const basin_a = basin_sum(aux_bumps_, u);
        double const depth_t = depth_sum(target_bumps_);
        double const depth_a = depth_sum(aux_bumps_);
        double const noise_t = to_unit(splitmix64(spec_.seed ^ splitmix64(2 * index)));
        double const noise_a = to_unit(splitmix64(spec_.seed ^ splitmix64(2 * index + 1)));

        double const t = 1.0 + (depth_t - basin_t) + spec_.ruggedness * noise_t;
        double a = 1.0 + spec_.ruggedness * noise_a;
        switch (spec_.regime) {
        case CorrelationRegime::Mixed: a += depth_a - basin_a; break;
        case CorrelationRegime::Harmonic: a += 0.5 * (depth_t - basin_t) + 0.5 * (depth_a - basin_a); break;
        case CorrelationRegime::Conflicting: a += 0.5 * basin_t + 0.5 * (depth_a - basin_a); break;
        }
        return {100.0 * t, 100.0 * a};
    }

private:
    static auto make_space(LandscapeSpec const& spec) -> ConfigSpace
    {
        if (spec.levels.empty()) {
            throw Error(ErrorKind::Generation, "landscape needs at least one option");
        }
        std::uint64_t size = 1;
        for (auto l : spec.levels) {
            if (l == 0) {
                throw Error(ErrorKind::Generation, "every option needs at least one level");
            }
            if (size > max_landscape_size) {
                break;
            }
            size *= l;
        }
        if (size > max_landscape_size) {
            throw Error(ErrorKind::Generation, "landscape space exceeds the enumerable limit");
        }
        return ConfigSpace::from_level_counts(std::span<std::size_t const>(spec.levels));
    }

    // Centers are stratified per option (one bump per 1/B slice, slices
    // shuffled independently per option) so basins rarely share an axis line;
    // widths shrink with B.
    auto draw_bumps(Rng& rng) const -> std::vector<Bump>
    {
        auto const count = spec_.bumps;
        auto const inv = 1.0 / static_cast<double>(count);
        std::vector<Bump> bumps(count);
        for (auto& b : bumps) {
            b.center.resize(spec_.levels.size());
        }
        std::vector<std::size_t> slices(count);
        for (std::size_t dim = 0; dim < spec_.levels.size(); ++dim) {
            std::iota(slices.begin(), slices.end(), std::size_t{0});
            for (std::size_t i = count; i > 1; --i) {
                std::swap(slices[i - 1], slices[rng.index(i)]);
            }
            for (std::size_t k = 0; k < count; ++k) {
                bumps[k].center[dim] = (static_cast<double>(slices[k]) + rng.uniform(0.15, 0.85)) * inv;
            }
        }
        for (auto& b : bumps) {
            b.width = 0.35 * inv * rng.uniform(0.7, 1.3);
            b.depth = rng.uniform(0.3, 1.0);
        }
        return bumps;
    }

    static auto basin_sum(std::vector<Bump> const& bumps, std::vector<double> const& u) -> double
    {
        double sum = 0.0;
        for (auto const& b : bumps) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                double const d = u[i] - b.center[i];
                d2 += d * d;
            }
            sum += b.depth * std::exp(-d2 / (2.0 * b.width * b.width));
        }
        return sum;
    }

    static auto depth_sum(std::vector<Bump> const& bumps) -> double
    {
        double sum = 0.0;
        for (auto const& b : bumps) {
            sum += b.depth;
        }
        return sum;
    }

    // A strict local optimum is strictly better than every configuration that
    // differs in exactly one option, i.e. the unique minimum of each axis line
    // through it.
    auto count_local_optima() const -> std::uint64_t
    {
        auto const n = table_.size();
        std::vector<std::uint8_t> ok(n, 1);
        std::uint64_t stride = 1;
        for (std::size_t axis = space_.option_count(); axis-- > 0;) {
            auto const levels = space_.level_count(axis);
            auto const block = stride * levels;
            for (std::uint64_t base = 0; base < n; base += block) {
                for (std::uint64_t off = 0; off < stride; ++off) {
                    auto const first = base + off;
                    std::uint64_t best = first;
                    bool unique = true;
                    for (std::uint64_t l = 1; l < levels; ++l) {
                        auto const idx = first + l * stride;
                        if (table_[idx].target < table_[best].target) {
                            best = idx;
                            unique = true;
                        } else if (table_[idx].target == table_[best].target) {
                            unique = false;
                        }
                    }
                    for (std::uint64_t l = 0; l < levels; ++l) {
                        auto const idx = first + l * stride;
                        if (idx != best || !unique) {
                            ok[idx] = 0;
                        }
                    }
                }
            }
            stride = block;
        }
        return static_cast<std::uint64_t>(std::count(ok.begin(), ok.end(), std::uint8_t{1}));
    }

    LandscapeSpec spec_;
    ConfigSpace space_;
    std::vector<Bump> target_bumps_;
    std::vector<Bump> aux_bumps_;
    std::vector<RawObjectives> table_;
    std::uint64_t optimum_index_ = 0;
    std::uint64_t local_optima_ = 0;
};

inline auto generate_landscape(LandscapeSpec const& spec) -> SyntheticLandscape { return SyntheticLandscape(spec); }

inline auto spec_to_json(LandscapeSpec const& spec) -> nlohmann::ordered_json
{
    return {{"seed", spec.seed},
            {"levels", spec.levels},
            {"bumps", spec.bumps},
            {"ruggedness", spec.ruggedness},
            {"regime", to_string(spec.regime)}};
}

inline auto spec_from_json(nlohmann::json const& j) -> LandscapeSpec
{
    try {
        LandscapeSpec spec;
        spec.seed = j.at("seed").get<std::uint64_t>();
        spec.levels = j.at("levels").get<std::vector<std::size_t>>();
        spec.bumps = j.at("bumps").get<std::size_t>();
        spec.ruggedness = j.at("ruggedness").get<double>();
        spec.regime = parse_regime(j.at("regime").get<std::string>());
        return spec;
    } catch (nlohmann::json::exception const& e) {
        throw Error(ErrorKind::Format, std::string("landscape spec: ") + e.what());
    }
}

inline auto landscape_manifest(SyntheticLandscape const& land) -> nlohmann::ordered_json
{
    auto const opt = land.optimum();
    std::vector<Configuration::Level> levels(opt.levels().begin(), opt.levels().end());
    auto const v = land.evaluate(opt);
    return {{"spec", spec_to_json(land.spec())},
            {"space_size", land.space().size()},
            {"global_optimum", {{"config", levels}, {"target", v.target}, {"auxiliary", v.auxiliary}}},
            {"local_optima", land.local_optima()}};
}

// Regenerates the landscape described by a manifest and checks the recorded
// optimum and local-optima count still match.
inline auto landscape_from_manifest(nlohmann::json const& manifest) -> SyntheticLandscape
{
    auto const& spec_json = manifest.contains("spec") ? manifest.at("spec") : manifest;
    SyntheticLandscape land(spec_from_json(spec_json));
    if (manifest.contains("global_optimum")) {
        auto const levels = manifest.at("global_optimum").at("config").get<std::vector<Configuration::Level>>();
        if (Configuration(levels) != land.optimum()) {
            throw Error(ErrorKind::Generation, "manifest global optimum does not match the regenerated landscape");
        }
    }
    if (manifest.contains("local_optima") && manifest.at("local_optima").get<std::uint64_t>() != land.local_optima()) {
        throw Error(ErrorKind::Generation, "manifest local-optima count does not match the regenerated landscape");
    }
    return land;
}

inline auto load_landscape(std::filesystem::path const& path) -> SyntheticLandscape
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Format, "cannot open landscape manifest '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (nlohmann::json::exception const& e) {
        throw Error(ErrorKind::Format, path.string() + ": " + e.what());
    }
    return landscape_from_manifest(j);
}

// ---------------------------------------------------------------------------
// Budget ledger and oracle
// ---------------------------------------------------------------------------

// Distinct-measurement accounting: a configuration is charged once, repeats
// come from the cache.
class BudgetLedger {
public:
    explicit BudgetLedger(std::uint64_t limit) : limit_(limit) {}

    [[nodiscard]] auto limit() const noexcept -> std::uint64_t { return limit_; }
    [[nodiscard]] auto count() const noexcept -> std::uint64_t { return cache_.size(); }
    [[nodiscard]] auto remaining() const noexcept -> std::uint64_t { return limit_ - count(); }
    [[nodiscard]] auto exhausted() const noexcept -> bool { return count() >= limit_; }

    [[nodiscard]] auto lookup(std::uint64_t index) const -> std::optional<RawObjectives>
    {
        if (auto it = cache_.find(index); it != cache_.end()) {
            return it->second;
        }
        return std::nullopt;
    }

    [[nodiscard]] auto contains(std::uint64_t index) const -> bool { return cache_.contains(index); }

    void charge(std::uint64_t index, RawObjectives const& value)
    {
        if (exhausted()) {
            throw Error(ErrorKind::Configuration, "ledger charged beyond its limit");
        }
        cache_.emplace(index, value);
    }

private:
    std::uint64_t limit_;
    std::unordered_map<std::uint64_t, RawObjectives> cache_;
};

// Returns the oriented measurement, or nullopt when a new measurement would
// exceed the budget.
template <MeasurementSource Source>
auto measure(BudgetLedger& ledger, Source const& source, Configuration const& c) -> std::optional<RawObjectives>
{
    auto const& space = source.space();
    if (!space.contains(c)) {
        throw Error(ErrorKind::MissingMeasurement, "configuration outside the source's space");
    }
    auto const idx = space.index_of(c);
    if (auto hit = ledger.lookup(idx)) {
        return hit;
    }
    if (ledger.exhausted()) {
        return std::nullopt;
    }
    auto const value = source.evaluate(c);
    if (!std::isfinite(value.target) || !std::isfinite(value.auxiliary)) {
        throw Error(ErrorKind::InvalidMeasurement, "source returned a non-finite measurement");
    }
    ledger.charge(idx, value);
    return value;
}

// One run's view of a source: ledger plus best-so-far trace.
template <MeasurementSource Source>
class MeasurementOracle {
public:
    MeasurementOracle(Source const& source, std::uint64_t budget, bool record_trace = true)
        : source_(&source)
        , ledger_(budget)
        , record_(record_trace)
    {
    }

    [[nodiscard]] auto space() const -> ConfigSpace const& { return source_->space(); }
    [[nodiscard]] auto source() const -> Source const& { return *source_; }
    [[nodiscard]] auto ledger() const -> BudgetLedger const& { return ledger_; }
    [[nodiscard]] auto used() const noexcept -> std::uint64_t { return ledger_.count(); }
    [[nodiscard]] auto budget() const noexcept -> std::uint64_t { return ledger_.limit(); }

    // No new measurement can be made: budget spent or every configuration seen.
    [[nodiscard]] auto exhausted() const -> bool
    {
        return ledger_.exhausted() || ledger_.count() >= space().size();
    }

    [[nodiscard]] auto is_measured(Configuration const& c) const -> bool
    {
        return ledger_.contains(space().index_of(c));
    }

    [[nodiscard]] auto cached(Configuration const& c) const -> std::optional<RawObjectives>
    {
        return ledger_.lookup(space().index_of(c));
    }

    auto measure(Configuration const& c) -> std::optional<RawObjectives>
    {
        auto const before = ledger_.count();
        auto value = mmo::measure(ledger_, *source_, c);
        if (value && record_ && ledger_.count() != before) {
            trace_.record(ledger_.count(), c, *value);
        }
        return value;
    }

    [[nodiscard]] auto trace() const -> RunTrace const& { return trace_; }
    auto take_trace() -> RunTrace { return std::move(trace_); }

private:
    Source const* source_;
    BudgetLedger ledger_;
    RunTrace trace_;
    bool record_;
};

} // namespace mmo

#endif
