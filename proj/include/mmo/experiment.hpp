#ifndef MMO_EXPERIMENT_HPP
#define MMO_EXPERIMENT_HPP

#include "mmo/analysis.hpp"
#include "mmo/core_model.hpp"
#include "mmo/error.hpp"
#include "mmo/io.hpp"
#include "mmo/measurement.hpp"
#include "mmo/random.hpp"
#include "mmo/search.hpp"
#include "mmo/surrogate.hpp"
#include "mmo/trace.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace mmo {

enum class OptimizerKind { Nsga2, RandomSearch, HillClimb, Soga, Annealing, Flash, FlashMmo };

inline auto to_string(OptimizerKind k) -> char const*
{
    switch (k) {
    case OptimizerKind::Nsga2: return "nsga2";
    case OptimizerKind::RandomSearch: return "rs";
    case OptimizerKind::HillClimb: return "shc";
    case OptimizerKind::Soga: return "soga";
    case OptimizerKind::Annealing: return "sa";
    case OptimizerKind::Flash: return "flash";
    case OptimizerKind::FlashMmo: return "flash-mmo";
    }
    return "unknown";
}

inline auto parse_optimizer(std::string_view s) -> OptimizerKind
{
    for (auto k : {OptimizerKind::Nsga2, OptimizerKind::RandomSearch, OptimizerKind::HillClimb, OptimizerKind::Soga,
                   OptimizerKind::Annealing, OptimizerKind::Flash, OptimizerKind::FlashMmo}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw Error(ErrorKind::Usage, "unknown optimizer '" + std::string(s) + "'");
}

inline auto parse_model(std::string_view s) -> ModelKind
{
    for (auto k : {ModelKind::SingleObjective, ModelKind::PMO, ModelKind::MMO}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw Error(ErrorKind::Usage, "unknown model '" + std::string(s) + "'");
}

inline auto parse_normalization(std::string_view s) -> NormalizationMode
{
    if (s == "global") {
        return NormalizationMode::GlobalSoFar;
    }
    if (s == "population") {
        return NormalizationMode::CurrentPopulation;
    }
    throw Error(ErrorKind::Usage, "unknown normalization '" + std::string(s) + "'");
}

enum class SourceKind { Landscape, Dataset };

struct ExperimentSpec {
    SourceKind source_kind = SourceKind::Landscape;
    std::string source; // manifest or dataset path
    std::string target = "target";
    std::string auxiliary = "auxiliary";
    std::optional<ModelKind> model; // unset: the optimizer's natural model
    NormalizationMode normalization = NormalizationMode::CurrentPopulation;
    double weight = 1.0;
    OptimizerKind optimizer = OptimizerKind::Nsga2;
    std::optional<std::uint64_t> budget; // unset: 600, or 50 for the surrogate loops
    std::size_t population = 50;
    double mutation_rate = 0.1;
    double crossover_rate = 0.9;
    std::size_t repeats = 50;
    std::uint64_t base_seed = 1;
    std::size_t initial_samples = 30;
    std::size_t surrogate_evaluations = 1000;
    std::size_t inner_population = 50;
    std::size_t inner_generations = 20;
    std::optional<std::size_t> stall_limit; // hill climbing restarts; unset: twice the option count
    double sa_alpha = 0.95;
    std::string label; // unset: derived from the optimizer and model
};

inline constexpr std::uint64_t default_budget = 600;
inline constexpr std::uint64_t default_surrogate_budget = 50;

inline auto is_surrogate(OptimizerKind k) -> bool { return k == OptimizerKind::Flash || k == OptimizerKind::FlashMmo; }

inline auto default_label(ExperimentSpec const& s) -> std::string
{
    std::string label = to_string(s.optimizer);
    if (s.optimizer == OptimizerKind::Nsga2 && s.model) {
        label += '-';
        label += to_string(*s.model);
        if (*s.model != ModelKind::SingleObjective) {
            label += '-';
            label += to_string(s.normalization);
        }
        if (*s.model == ModelKind::MMO) {
            label += "-w" + io::format_double(s.weight);
        }
    }
    return label;
}

// Fills defaults and rejects inconsistent specs with usage errors.
inline auto resolve(ExperimentSpec spec) -> ExperimentSpec
{
    auto usage = [](std::string const& msg) { return Error(ErrorKind::Usage, msg); };
    if (spec.source.empty()) {
        throw usage("no measurement source given");
    }
    if (spec.source_kind == SourceKind::Landscape) {
        spec.target = "target";
        spec.auxiliary = "auxiliary";
    } else if (spec.target.empty() || spec.auxiliary.empty()) {
        throw usage("dataset runs need target and auxiliary objective names");
    }
    if (!(spec.weight > 0.0) || !std::isfinite(spec.weight)) {
        throw usage("weight must be a positive finite number");
    }
    switch (spec.optimizer) {
    case OptimizerKind::Nsga2:
        if (!spec.model) {
            spec.model = ModelKind::MMO;
        }
        break;
    case OptimizerKind::FlashMmo:
        if (spec.model && *spec.model != ModelKind::MMO) {
            throw usage("flash-mmo always searches the MMO model");
        }
        spec.model = ModelKind::MMO;
        spec.normalization = NormalizationMode::CurrentPopulation;
        spec.weight = 1.0;
        break;
    default:
        if (spec.model && *spec.model != ModelKind::SingleObjective) {
            throw usage(std::string("optimizer '") + to_string(spec.optimizer) + "' is single-objective");
        }
        spec.model = ModelKind::SingleObjective;
        break;
    }
    if (*spec.model != ModelKind::MMO) {
        spec.weight = 1.0;
    }
    if (!spec.budget) {
        spec.budget = is_surrogate(spec.optimizer) ? default_surrogate_budget : default_budget;
    }
    if (*spec.budget == 0) {
        throw usage("budget must be positive");
    }
    if (spec.repeats == 0) {
        throw usage("repeats must be positive");
    }
    if (spec.population == 0 || spec.inner_population == 0 || spec.inner_generations == 0) {
        throw usage("population sizes and generation counts must be positive");
    }
    if (!(spec.mutation_rate >= 0.0 && spec.mutation_rate <= 1.0)
        || !(spec.crossover_rate >= 0.0 && spec.crossover_rate <= 1.0)) {
        throw usage("mutation and crossover rates must lie in [0, 1]");
    }
    if (!(spec.sa_alpha > 0.0 && spec.sa_alpha < 1.0)) {
        throw usage("cooling factor must lie in (0, 1)");
    }
    if (is_surrogate(spec.optimizer) && (spec.initial_samples == 0 || spec.initial_samples > *spec.budget)) {
        throw usage("initial sample size must lie in [1, budget]");
    }
    if (spec.label.empty()) {
        spec.label = default_label(spec);
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Sources
// ---------------------------------------------------------------------------

inline constexpr char const* fixture_dir_variable = "MMO_FIXTURE_DIR";

// A relative path that does not exist as given is looked up under
// $MMO_FIXTURE_DIR, first with its full relative path, then by file name.
inline auto resolve_source_path(std::string const& raw) -> std::filesystem::path
{
    std::filesystem::path p(raw);
    if (p.is_absolute() || std::filesystem::exists(p)) {
        return p;
    }
    if (char const* dir = std::getenv(fixture_dir_variable); dir != nullptr && *dir != '\0') {
        std::filesystem::path base(dir);
        if (std::filesystem::exists(base / p)) {
            return base / p;
        }
        if (std::filesystem::exists(base / p.filename())) {
            return base / p.filename();
        }
    }
    return p;
}

struct LoadedSource {
    std::variant<SyntheticLandscape, Dataset> source;
    std::string case_id;
    ObjectiveColumn target;
    ObjectiveColumn auxiliary;

    [[nodiscard]] auto space() const -> ConfigSpace const&
    {
        return std::visit([](auto const& s) -> ConfigSpace const& { return s.space(); }, source);
    }
};

inline auto load_source(ExperimentSpec const& spec) -> LoadedSource
{
    auto const path = resolve_source_path(spec.source);
    if (spec.source_kind == SourceKind::Landscape) {
        auto land = load_landscape(path);
        return {std::move(land), path.stem().string() + ":target", {"target", ObjectiveSense::Minimize},
                {"auxiliary", ObjectiveSense::Minimize}};
    }
    auto ds = load_dataset(path, spec.target, spec.auxiliary);
    auto target = ds.target();
    auto aux = ds.auxiliary();
    auto id = ds.name() + ":" + target.name;
    return {std::move(ds), std::move(id), std::move(target), std::move(aux)};
}

inline auto to_string(ObjectiveSense s) -> char const* { return s == ObjectiveSense::Maximize ? "max" : "min"; }

// Undo orientation: oriented values are minimized, native ones follow the sense.
inline auto to_native(double oriented, ObjectiveSense sense) -> double
{
    return sense == ObjectiveSense::Maximize ? -oriented : oriented;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

inline auto model_of(ExperimentSpec const& spec) -> OptimizationModel
{
    switch (*spec.model) {
    case ModelKind::SingleObjective: return OptimizationModel::single();
    case ModelKind::PMO: return OptimizationModel::pmo(spec.normalization);
    case ModelKind::MMO: return OptimizationModel::mmo(spec.normalization, spec.weight);
    }
    return OptimizationModel::single();
}

// One seeded run of a resolved spec.
template <MeasurementSource Source>
auto run_once(Source const& source, ExperimentSpec const& spec, std::uint64_t seed) -> RunTrace
{
    Rng rng(seed);
    auto const budget = *spec.budget;
    GAParams ga{spec.population, spec.mutation_rate, spec.crossover_rate};
    switch (spec.optimizer) {
    case OptimizerKind::Nsga2: return mmo_on_nsga2(source, model_of(spec), ga, budget, rng);
    case OptimizerKind::RandomSearch: return random_search(source, budget, rng);
    case OptimizerKind::HillClimb:
        return hill_climb_restart(source, budget, spec.stall_limit.value_or(default_stall_limit(source.space())), rng);
    case OptimizerKind::Soga: return soga(source, ga, budget, rng);
    case OptimizerKind::Annealing:
        return simulated_annealing(source, budget, AnnealingSchedule{std::nullopt, spec.sa_alpha, 10}, rng);
    case OptimizerKind::Flash:
        return flash(source, FlashParams{spec.initial_samples, budget, spec.surrogate_evaluations, {}}, rng);
    case OptimizerKind::FlashMmo:
        return flash_mmo(source,
                         FlashMmoParams{spec.initial_samples, budget, spec.inner_population, spec.inner_generations, {}},
                         rng);
    }
    throw Error(ErrorKind::Usage, "unknown optimizer");
}

inline auto spec_json(ExperimentSpec const& spec, LoadedSource const& src) -> nlohmann::ordered_json
{
    nlohmann::ordered_json j;
    j["label"] = spec.label;
    j["case"] = src.case_id;
    j["source_kind"] = spec.source_kind == SourceKind::Landscape ? "landscape" : "dataset";
    j["source"] = spec.source;
    j["target"] = {{"name", src.target.name}, {"sense", to_string(src.target.sense)}};
    j["auxiliary"] = {{"name", src.auxiliary.name}, {"sense", to_string(src.auxiliary.sense)}};
    j["model"] = to_string(*spec.model);
    j["normalization"] = to_string(spec.normalization);
    j["weight"] = spec.weight;
    j["optimizer"] = to_string(spec.optimizer);
    j["budget"] = *spec.budget;
    j["population"] = spec.population;
    j["mutation_rate"] = spec.mutation_rate;
    j["crossover_rate"] = spec.crossover_rate;
    j["repeats"] = spec.repeats;
    j["base_seed"] = spec.base_seed;
    j["initial_samples"] = spec.initial_samples;
    j["surrogate_evaluations"] = spec.surrogate_evaluations;
    j["inner_population"] = spec.inner_population;
    j["inner_generations"] = spec.inner_generations;
    if (spec.stall_limit) {
        j["stall_limit"] = *spec.stall_limit;
    } else {
        j["stall_limit"] = default_stall_limit(src.space());
    }
    j["sa_alpha"] = spec.sa_alpha;
    return j;
}

struct RunRecord {
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    RunTrace trace;
};

struct ExperimentResult {
    nlohmann::ordered_json header;
    ObjectiveColumn target;
    ObjectiveColumn auxiliary;
    std::vector<RunRecord> runs;
};

// Calls work(i) for i in [0, count) on up to `jobs` threads. The first
// exception thrown is rethrown after all workers stop.
template <class Work>
void parallel_for(std::size_t count, std::size_t jobs, Work&& work)
{
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            work(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            while (true) {
                auto const i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next.store(count);
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

inline auto run_experiment(ExperimentSpec const& raw_spec, LoadedSource const& src, std::size_t jobs = 1)
    -> ExperimentResult
{
    auto const spec = resolve(raw_spec);
    auto const space_size = src.space().size();
    bool const population_based = spec.optimizer == OptimizerKind::Nsga2 || spec.optimizer == OptimizerKind::Soga;
    if (population_based && *spec.budget < std::min<std::uint64_t>(spec.population, space_size)) {
        throw Error(ErrorKind::Usage, "budget is smaller than the initial population");
    }
    if (is_surrogate(spec.optimizer) && *spec.budget > space_size) {
        throw Error(ErrorKind::Usage, "surrogate budget exceeds the space size");
    }
    ExperimentResult result{spec_json(spec, src), src.target, src.auxiliary, {}};
    result.runs.resize(spec.repeats);
    parallel_for(spec.repeats, jobs, [&](std::size_t i) {
        auto const seed = spec.base_seed + i;
        auto trace = std::visit([&](auto const& s) { return run_once(s, spec, seed); }, src.source);
        result.runs[i] = RunRecord{i, seed, std::move(trace)};
    });
    return result;
}

inline auto run_experiment(ExperimentSpec const& spec, std::size_t jobs = 1) -> ExperimentResult
{
    auto const resolved = resolve(spec);
    return run_experiment(resolved, load_source(resolved), jobs);
}

// ---------------------------------------------------------------------------
// Results files
// ---------------------------------------------------------------------------

inline constexpr char const* results_columns = "run_index,seed,distinct_measurements,best_ft_raw,best_fa_raw,best_config";
inline constexpr char const* trace_columns = "run_index,measurements,best_ft_raw";

inline void write_results(ExperimentResult const& r, std::ostream& out)
{
    out << "# " << r.header.dump() << '\n' << results_columns << '\n';
    for (auto const& run : r.runs) {
        auto const& t = run.trace;
        out << run.run_index << ',' << run.seed << ',' << t.measurements() << ',';
        if (t.empty()) {
            out << ",,\n";
            continue;
        }
        out << io::format_double(to_native(t.best_raw.target, r.target.sense)) << ','
            << io::format_double(to_native(t.best_raw.auxiliary, r.auxiliary.sense)) << ','
            << io::join_levels(t.best_config) << '\n';
    }
}

inline void write_traces(ExperimentResult const& r, std::ostream& out)
{
    out << "# " << r.header.dump() << '\n' << trace_columns << '\n';
    for (auto const& run : r.runs) {
        for (auto const& p : run.trace.points) {
            out << run.run_index << ',' << p.measurements << ','
                << io::format_double(to_native(p.best_target, r.target.sense)) << '\n';
        }
    }
}

inline auto trace_path_for(std::filesystem::path const& results) -> std::filesystem::path
{
    auto p = results;
    p.replace_filename(results.stem().string() + ".trace.csv");
    return p;
}

inline void save_results(ExperimentResult const& r, std::filesystem::path const& path)
{
    auto open = [](std::filesystem::path const& p) {
        std::ofstream out(p, std::ios::binary);
        if (!out) {
            throw Error(ErrorKind::Format, "cannot write '" + p.string() + "'");
        }
        return out;
    };
    {
        auto out = open(path);
        write_results(r, out);
    }
    auto out = open(trace_path_for(path));
    write_traces(r, out);
}

struct ResultRow {
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    std::uint64_t distinct_measurements = 0;
    double best_ft = 0.0; // native units
    double best_fa = 0.0;
    std::string best_config;
};

struct ResultsFile {
    nlohmann::json header;
    std::string label;
    std::string case_id;
    ObjectiveSense target_sense = ObjectiveSense::Minimize;
    std::vector<ResultRow> rows;
    std::vector<RunTrace> traces; // oriented; empty unless loaded

    // Terminal best targets, oriented so smaller is better.
    [[nodiscard]] auto oriented_targets() const -> std::vector<double>
    {
        std::vector<double> v;
        v.reserve(rows.size());
        for (auto const& r : rows) {
            v.push_back(orient(r.best_ft, target_sense));
        }
        return v;
    }
};

namespace detail {

    inline auto read_header(std::istream& in, std::string const& where) -> nlohmann::json
    {
        std::string line;
        if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
            throw Error(ErrorKind::Format, where + ":1: missing '# {spec}' header line");
        }
        try {
            return nlohmann::json::parse(line.substr(2));
        } catch (nlohmann::json::exception const& e) {
            throw Error(ErrorKind::Format, where + ":1: " + e.what());
        }
    }

    inline void expect_columns(std::istream& in, std::string const& where, std::string_view columns)
    {
        std::string line;
        if (!std::getline(in, line) || io::trim(line) != columns) {
            throw Error(ErrorKind::Format, where + ":2: expected columns '" + std::string(columns) + "'");
        }
    }

    inline auto parse_count(std::string_view s, std::string const& where) -> std::uint64_t
    {
        std::uint64_t v = 0;
        auto const* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (s.empty() || ec != std::errc{} || ptr != end) {
            throw Error(ErrorKind::Format, where + ": cannot parse count '" + std::string(s) + "'");
        }
        return v;
    }

} // namespace detail

inline auto load_results(std::filesystem::path const& path, bool with_traces = false) -> ResultsFile
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Format, "cannot open results '" + path.string() + "'");
    }
    auto const name = path.string();
    ResultsFile f;
    f.header = detail::read_header(in, name);
    try {
        f.label = f.header.at("label").get<std::string>();
        f.case_id = f.header.at("case").get<std::string>();
        f.target_sense = f.header.at("target").at("sense").get<std::string>() == "max" ? ObjectiveSense::Maximize
                                                                                     : ObjectiveSense::Minimize;
    } catch (nlohmann::json::exception const& e) {
        throw Error(ErrorKind::Format, name + ":1: " + e.what());
    }
    detail::expect_columns(in, name, results_columns);
    std::string line;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (io::trim(line).empty()) {
            continue;
        }
        auto const where = name + ":" + std::to_string(lineno);
        auto const cells = io::split(line, ',');
        if (cells.size() != 6) {
            throw Error(ErrorKind::Format, where + ": expected 6 columns, found " + std::to_string(cells.size()));
        }
        ResultRow row;
        row.run_index = detail::parse_count(cells[0], where);
        row.seed = detail::parse_count(cells[1], where);
        row.distinct_measurements = detail::parse_count(cells[2], where);
        row.best_ft = io::parse_double(cells[3], where);
        row.best_fa = io::parse_double(cells[4], where);
        row.best_config = std::string(cells[5]);
        f.rows.push_back(std::move(row));
    }
    if (!with_traces) {
        return f;
    }
    auto const tpath = trace_path_for(path);
    std::ifstream tin(tpath);
    if (!tin) {
        throw Error(ErrorKind::Format, "cannot open trace file '" + tpath.string() + "'");
    }
    auto const tname = tpath.string();
    detail::read_header(tin, tname);
    detail::expect_columns(tin, tname, trace_columns);
    f.traces.resize(f.rows.size());
    lineno = 2;
    while (std::getline(tin, line)) {
        ++lineno;
        if (io::trim(line).empty()) {
            continue;
        }
        auto const where = tname + ":" + std::to_string(lineno);
        auto const cells = io::split(line, ',');
        if (cells.size() != 3) {
            throw Error(ErrorKind::Format, where + ": expected 3 columns");
        }
        auto const run = detail::parse_count(cells[0], where);
        if (run >= f.traces.size()) {
            throw Error(ErrorKind::Format, where + ": run index out of range");
        }
        auto const count = detail::parse_count(cells[1], where);
        auto const best = orient(io::parse_double(cells[2], where), f.target_sense);
        f.traces[run].points.push_back({count, best});
    }
    return f;
}

// ---------------------------------------------------------------------------
// Comparison, sweeps, calibration, reports
// ---------------------------------------------------------------------------

inline auto compare_results(ResultsFile const& candidate, ResultsFile const& baseline, bool paired) -> ComparisonRow
{
    if (candidate.case_id != baseline.case_id) {
        throw Error(ErrorKind::Comparison,
                    "results describe different cases: '" + candidate.case_id + "' vs '" + baseline.case_id + "'");
    }
    if (paired && candidate.rows.size() != baseline.rows.size()) {
        throw Error(ErrorKind::Comparison, "paired comparison needs equal run counts (" +
                                               std::to_string(candidate.rows.size()) + " vs " +
                                               std::to_string(baseline.rows.size()) + ")");
    }
    auto const a = candidate.oriented_targets();
    auto const b = baseline.oriented_targets();
    ComparisonRow row;
    row.case_id = candidate.case_id;
    row.candidate = candidate.label;
    row.baseline = baseline.label;
    row.mean = to_native(mean(a), candidate.target_sense);
    row.stderr_ = standard_error(a);
    row.verdict = compare_groups(a, b, paired);
    return row;
}

inline auto terminal_targets(ExperimentResult const& r) -> std::vector<double>
{
    std::vector<double> v;
    v.reserve(r.runs.size());
    for (auto const& run : r.runs) {
        v.push_back(run.trace.best_target());
    }
    return v;
}

inline auto targets_at(ExperimentResult const& r, std::uint64_t count) -> std::vector<double>
{
    std::vector<double> v;
    v.reserve(r.runs.size());
    for (auto const& run : r.runs) {
        v.push_back(run.trace.best_at(count));
    }
    return v;
}

inline auto default_weights() -> std::vector<double> { return {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 10.0}; }
inline auto default_proportions() -> std::vector<double> { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}; }

struct WeightSweep {
    std::vector<double> weights;
    std::vector<SampleGroup> groups; // full budget, one per weight
    double best_weight = 0.0;
    std::map<double, std::vector<SampleGroup>> by_proportion;
    std::optional<double> min_proportion;
    nlohmann::ordered_json header;
};

inline auto weight_label(double w) -> std::string { return "w=" + io::format_double(w); }

// MMO with global-so-far normalization under each weight. A budget
// proportion p is scored on each run's best after round(p * budget)
// measurements; the searches never read the budget except to stop, so
// this equals a separate run at the reduced budget.
inline auto sweep_weights(ExperimentSpec const& base, std::vector<double> const& weights,
                          std::vector<double> const& proportions, std::size_t jobs = 1) -> WeightSweep
{
    if (weights.empty()) {
        throw Error(ErrorKind::Usage, "weight list is empty");
    }
    for (double p : proportions) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw Error(ErrorKind::Usage, "budget proportions must lie in (0, 1]");
        }
    }
    ExperimentSpec spec = base;
    spec.optimizer = OptimizerKind::Nsga2;
    spec.model = ModelKind::MMO;
    spec.normalization = NormalizationMode::GlobalSoFar;
    spec.label.clear();
    auto const first = resolve(spec);
    auto const src = load_source(first);

    WeightSweep out;
    out.weights = weights;
    out.header = spec_json(first, src);
    out.header.erase("weight");
    out.header.erase("label");
    out.header["weights"] = weights;
    out.header["proportions"] = proportions;

    std::vector<ExperimentResult> results;
    for (double w : weights) {
        spec.weight = w;
        spec.label = weight_label(w);
        results.push_back(run_experiment(spec, src, jobs));
        out.groups.push_back({weight_label(w), terminal_targets(results.back())});
    }
    out.best_weight = weights[select_best_index(out.groups)];
    if (!proportions.empty()) {
        auto const budget = *first.budget;
        for (double p : proportions) {
            auto const count = static_cast<std::uint64_t>(std::llround(p * static_cast<double>(budget)));
            auto& groups = out.by_proportion[p];
            for (std::size_t i = 0; i < weights.size(); ++i) {
                groups.push_back({weight_label(weights[i]), targets_at(results[i], std::max<std::uint64_t>(count, 1))});
            }
        }
        out.by_proportion[1.0] = out.groups;
        out.min_proportion = min_weight_budget_proportion(out.by_proportion);
    }
    return out;
}

inline auto sweep_json(WeightSweep const& s) -> nlohmann::ordered_json
{
    auto const sk = scott_knott(s.groups);
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < s.groups.size(); ++i) {
        rows.push_back({{"weight", s.weights[i]},
                        {"mean", mean(s.groups[i].values)},
                        {"stderr", standard_error(s.groups[i].values)},
                        {"rank", sk.rank[i]}});
    }
    nlohmann::ordered_json j{{"spec", s.header}, {"weights", rows}, {"best_weight", s.best_weight}};
    if (s.min_proportion) {
        auto per = nlohmann::ordered_json::array();
        for (auto const& [p, groups] : s.by_proportion) {
            per.push_back({{"proportion", p}, {"best", groups[select_best_index(groups)].label}});
        }
        j["by_proportion"] = per;
        j["min_budget_proportion"] = *s.min_proportion;
    }
    return j;
}

struct BudgetCalibration {
    std::uint64_t budget = 0;
    std::vector<std::string> optimizers;
    std::vector<std::uint64_t> grid;
    std::vector<std::vector<double>> change_fraction; // [grid][optimizer]
};

// Every roster entry runs once at the grid maximum; smaller grid budgets
// are scored on the same traces, which match a run stopped at that budget.
inline auto calibrate_budget_experiment(std::vector<ExperimentSpec> const& roster, std::vector<std::uint64_t> grid,
                                        std::size_t jobs = 1) -> BudgetCalibration
{
    if (roster.empty()) {
        throw Error(ErrorKind::Usage, "optimizer roster is empty");
    }
    if (grid.empty()) {
        throw Error(ErrorKind::Usage, "budget grid is empty");
    }
    BudgetCalibration cal;
    cal.grid = grid;
    std::vector<std::vector<RunTrace>> traces;
    for (auto spec : roster) {
        spec.budget = *std::max_element(grid.begin(), grid.end());
        auto result = run_experiment(spec, jobs);
        cal.optimizers.push_back(result.header.at("label").get<std::string>());
        std::vector<RunTrace> runs;
        for (auto& r : result.runs) {
            runs.push_back(std::move(r.trace));
        }
        traces.push_back(std::move(runs));
    }
    std::vector<BudgetTrial> trials;
    for (auto b : grid) {
        trials.push_back({b, traces});
        std::vector<double> fractions;
        for (auto const& runs : traces) {
            fractions.push_back(mean_late_change(runs, b));
        }
        cal.change_fraction.push_back(std::move(fractions));
    }
    cal.budget = calibrate_budget(trials);
    return cal;
}

inline auto calibration_json(BudgetCalibration const& c) -> nlohmann::ordered_json
{
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < c.grid.size(); ++g) {
        nlohmann::ordered_json row{{"budget", c.grid[g]}};
        for (std::size_t o = 0; o < c.optimizers.size(); ++o) {
            row[c.optimizers[o]] = c.change_fraction[g][o];
        }
        rows.push_back(row);
    }
    return {{"optimizers", c.optimizers}, {"grid", rows}, {"budget", c.budget}};
}

// Scott-Knott ranks, verdicts and speedups of every results file against a
// baseline, grouped by case.
inline auto build_report(std::vector<ResultsFile> const& files, std::string const& baseline_label, bool paired)
    -> nlohmann::ordered_json
{
    if (files.empty()) {
        throw Error(ErrorKind::Usage, "no results files to report on");
    }
    std::map<std::string, std::vector<ResultsFile const*>> by_case;
    for (auto const& f : files) {
        by_case[f.case_id].push_back(&f);
    }
    auto const& base_label = baseline_label.empty() ? files.front().label : baseline_label;
    std::vector<ComparisonRow> all_rows;
    auto cases = nlohmann::ordered_json::array();
    for (auto const& [case_id, members] : by_case) {
        std::vector<SampleGroup> groups;
        ResultsFile const* base = nullptr;
        for (auto const* f : members) {
            groups.push_back({f->label, f->oriented_targets()});
            if (f->label == base_label) {
                base = f;
            }
        }
        auto const sk = scott_knott(groups);
        auto ranks = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < groups.size(); ++i) {
            ranks.push_back({{"label", groups[i].label},
                             {"mean", to_native(mean(groups[i].values), members[i]->target_sense)},
                             {"stderr", standard_error(groups[i].values)},
                             {"rank", sk.rank[i]}});
        }
        nlohmann::ordered_json entry{{"case", case_id}, {"ranks", ranks}, {"best", select_best(groups)}};
        if (base != nullptr) {
            auto comps = nlohmann::ordered_json::array();
            for (auto const* f : members) {
                if (f == base) {
                    continue;
                }
                auto row = compare_results(*f, *base, paired);
                all_rows.push_back(row);
                nlohmann::ordered_json c = comparison_json(std::span<ComparisonRow const>(&row, 1))["rows"][0];
                if (!f->traces.empty() && !base->traces.empty()) {
                    auto const s = speedup(base->traces, f->traces);
                    c["speedup"] = s.reached() ? nlohmann::ordered_json(s.value()) : nlohmann::ordered_json("not-reached");
                }
                comps.push_back(c);
            }
            entry["comparisons"] = comps;
        }
        cases.push_back(entry);
    }
    auto summary = comparison_json(all_rows)["summary"];
    return {{"baseline", base_label}, {"cases", cases}, {"summary", summary}};
}

} // namespace mmo

#endif
