// mmo_tune: command-line experiment runner for multi-objectivized
// configuration tuning.

#include <mmo/analysis.hpp>
#include <mmo/experiment.hpp>
#include <mmo/measurement.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace {

struct SourceFlags {
    std::string landscape;
    std::string dataset;
};

struct RunFlags {
    SourceFlags source;
    mmo::ExperimentSpec spec;
    std::string model;
    std::string norm = "population";
    std::string optimizer = "nsga2";
    std::optional<std::uint64_t> budget;
    std::optional<std::size_t> stall;
    std::size_t jobs = 1;
    std::string out;
};

void add_source_flags(CLI::App* cmd, RunFlags& f)
{
    auto* land = cmd->add_option("--landscape", f.source.landscape, "Landscape manifest (JSON)");
    auto* data = cmd->add_option("--dataset", f.source.dataset, "Measured dataset (CSV)");
    land->excludes(data);
    cmd->add_option("--target", f.spec.target, "Target objective column (datasets)");
    cmd->add_option("--aux", f.spec.auxiliary, "Auxiliary objective column (datasets)");
}

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_model)
{
    add_source_flags(cmd, f);
    if (with_model) {
        cmd->add_option("--model", f.model, "single, pmo or mmo")->check(CLI::IsMember({"single", "pmo", "mmo"}));
        cmd->add_option("--norm", f.norm, "global or population")->check(CLI::IsMember({"global", "population"}));
        cmd->add_option("--weight", f.spec.weight, "MMO weight, > 0");
        cmd->add_option("--optimizer", f.optimizer, "nsga2, rs, shc, soga, sa, flash or flash-mmo");
        cmd->add_option("--label", f.spec.label, "Label recorded in the results header");
    }
    cmd->add_option("--budget", f.budget, "Distinct-measurement budget");
    cmd->add_option("--pop", f.spec.population, "Population size");
    cmd->add_option("--mutation", f.spec.mutation_rate, "Mutation rate");
    cmd->add_option("--crossover", f.spec.crossover_rate, "Crossover rate");
    cmd->add_option("--repeats", f.spec.repeats, "Independent repeats");
    cmd->add_option("--seed", f.spec.base_seed, "Base seed; run i uses seed + i");
    cmd->add_option("--k", f.spec.initial_samples, "Initial sample size of the surrogate loops");
    cmd->add_option("--surrogate-evals", f.spec.surrogate_evaluations, "Surrogate evaluations per acquisition");
    cmd->add_option("--inner-pop", f.spec.inner_population, "Inner population of flash-mmo");
    cmd->add_option("--inner-gens", f.spec.inner_generations, "Inner generations of flash-mmo");
    cmd->add_option("--stall", f.stall, "Hill-climbing stall limit before restart");
    cmd->add_option("--sa-alpha", f.spec.sa_alpha, "Annealing cooling factor");
    cmd->add_option("--jobs", f.jobs, "Worker threads for repeats")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "Output path (stdout when omitted)");
}

auto to_spec(RunFlags const& f) -> mmo::ExperimentSpec
{
    auto spec = f.spec;
    if (!f.source.landscape.empty()) {
        spec.source_kind = mmo::SourceKind::Landscape;
        spec.source = f.source.landscape;
    } else if (!f.source.dataset.empty()) {
        spec.source_kind = mmo::SourceKind::Dataset;
        spec.source = f.source.dataset;
    } else {
        throw mmo::Error(mmo::ErrorKind::Usage, "one of --landscape or --dataset is required");
    }
    if (!f.model.empty()) {
        spec.model = mmo::parse_model(f.model);
    }
    spec.normalization = mmo::parse_normalization(f.norm);
    spec.optimizer = mmo::parse_optimizer(f.optimizer);
    spec.budget = f.budget;
    spec.stall_limit = f.stall;
    return spec;
}

auto open_out(std::string const& path) -> std::ofstream
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw mmo::Error(mmo::ErrorKind::Format, "cannot write '" + path + "'");
    }
    return out;
}

template <class Emit>
void emit(std::string const& path, Emit&& fn)
{
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    auto out = open_out(path);
    fn(out);
}

auto parse_list(std::string const& s) -> std::vector<double>
{
    std::vector<double> v;
    for (auto cell : mmo::io::split(s, ',')) {
        v.push_back(mmo::io::parse_double(cell, "list"));
    }
    return v;
}

auto usage_guard(mmo::Error const& e) -> int
{
    std::cerr << "mmo_tune: " << e.what() << '\n';
    return e.kind() == mmo::ErrorKind::Usage ? 2 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Meta multi-objectivization for software configuration tuning"};
    app.require_subcommand(1);

    RunFlags run;
    auto* run_cmd = app.add_subcommand("run", "Run seeded repeats of one optimizer/model");
    add_run_flags(run_cmd, run, true);

    std::string cmp_a;
    std::string cmp_b;
    bool cmp_paired = false;
    std::string cmp_format = "csv";
    std::string cmp_out;
    auto* cmp_cmd = app.add_subcommand("compare", "Compare a candidate results file against a baseline");
    cmp_cmd->add_option("candidate", cmp_a, "Candidate results CSV")->required();
    cmp_cmd->add_option("baseline", cmp_b, "Baseline results CSV")->required();
    cmp_cmd->add_flag("--paired", cmp_paired, "Signed-rank test on run-index pairs");
    cmp_cmd->add_option("--format", cmp_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmp_cmd->add_option("--out", cmp_out, "Output path");

    RunFlags sweep;
    std::string sweep_weights = "0.01,0.1,0.3,0.5,0.7,0.9,1,10";
    std::string sweep_props;
    bool sweep_min = false;
    auto* sweep_cmd = app.add_subcommand("sweep-weights", "Select the best MMO weight (global normalization)");
    add_run_flags(sweep_cmd, sweep, false);
    sweep_cmd->add_option("--weights", sweep_weights, "Comma-separated weights");
    sweep_cmd->add_flag("--min-proportion", sweep_min, "Also find the smallest budget proportion agreeing");
    sweep_cmd->add_option("--proportions", sweep_props, "Comma-separated budget proportions (implies --min-proportion)");

    mmo::LandscapeSpec gen;
    std::string gen_regime = "mixed";
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen-landscape", "Generate a synthetic landscape manifest");
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--levels", gen.levels, "Levels per option")->delimiter(',');
    gen_cmd->add_option("--bumps", gen.bumps, "Basins per objective");
    gen_cmd->add_option("--ruggedness", gen.ruggedness, "Noise amplitude");
    gen_cmd->add_option("--regime", gen_regime, "harmonic, conflicting or mixed");
    gen_cmd->add_option("--out", gen_out, "Output path");

    RunFlags cal;
    std::string cal_grid = "100,200,300,400,500,600,700,800,900,1000";
    std::string cal_roster = "nsga2,soga,rs,shc,sa";
    auto* cal_cmd = app.add_subcommand("calibrate-budget", "Find the smallest converged budget on a grid");
    add_run_flags(cal_cmd, cal, false);
    cal_cmd->add_option("--grid", cal_grid, "Comma-separated ascending budgets");
    cal_cmd->add_option("--optimizers", cal_roster, "Comma-separated roster; nsga2 runs MMO");

    std::vector<std::string> rep_files;
    std::string rep_baseline;
    bool rep_paired = false;
    bool rep_traces = false;
    std::string rep_format = "json";
    std::string rep_out;
    auto* rep_cmd = app.add_subcommand("report", "Rank, compare and compute speedups over results files");
    rep_cmd->add_option("results", rep_files, "Results CSV files")->required();
    rep_cmd->add_option("--baseline", rep_baseline, "Baseline label (first file when omitted)");
    rep_cmd->add_flag("--paired", rep_paired, "Signed-rank test on run-index pairs");
    rep_cmd->add_flag("--speedup", rep_traces, "Load trace files and report speedups");
    rep_cmd->add_option("--format", rep_format, "json or csv")->check(CLI::IsMember({"csv", "json"}));
    rep_cmd->add_option("--out", rep_out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) {
            auto const spec = mmo::resolve(to_spec(run));
            auto const src = mmo::load_source(spec);
            auto const result = mmo::run_experiment(spec, src, run.jobs);
            if (run.out.empty()) {
                mmo::write_results(result, std::cout);
            } else {
                mmo::save_results(result, run.out);
            }
        } else if (*cmp_cmd) {
            auto const row = mmo::compare_results(mmo::load_results(cmp_a), mmo::load_results(cmp_b), cmp_paired);
            std::span<mmo::ComparisonRow const> rows(&row, 1);
            emit(cmp_out, [&](std::ostream& out) {
                if (cmp_format == "json") {
                    out << mmo::comparison_json(rows).dump(2) << '\n';
                } else {
                    mmo::write_comparison_csv(rows, out);
                }
            });
        } else if (*sweep_cmd) {
            auto const weights = parse_list(sweep_weights);
            std::vector<double> props;
            if (!sweep_props.empty()) {
                props = parse_list(sweep_props);
            } else if (sweep_min) {
                props = mmo::default_proportions();
            }
            auto const result = mmo::sweep_weights(to_spec(sweep), weights, props, sweep.jobs);
            emit(sweep.out, [&](std::ostream& out) { out << mmo::sweep_json(result).dump(2) << '\n'; });
        } else if (*gen_cmd) {
            gen.regime = mmo::parse_regime(gen_regime);
            auto const land = mmo::generate_landscape(gen);
            emit(gen_out, [&](std::ostream& out) { out << mmo::landscape_manifest(land).dump(2) << '\n'; });
        } else if (*cal_cmd) {
            std::vector<std::uint64_t> grid;
            for (double b : parse_list(cal_grid)) {
                if (!(b >= 1.0) || b != std::floor(b)) {
                    throw mmo::Error(mmo::ErrorKind::Usage, "grid budgets must be positive integers");
                }
                grid.push_back(static_cast<std::uint64_t>(b));
            }
            std::vector<mmo::ExperimentSpec> roster;
            auto const base = to_spec(cal);
            for (auto name : mmo::io::split(cal_roster, ',')) {
                auto spec = base;
                spec.optimizer = mmo::parse_optimizer(name);
                if (mmo::is_surrogate(spec.optimizer)) {
                    throw mmo::Error(mmo::ErrorKind::Usage, "surrogate loops have a fixed budget");
                }
                spec.model = spec.optimizer == mmo::OptimizerKind::Nsga2 ? mmo::ModelKind::MMO
                                                                        : mmo::ModelKind::SingleObjective;
                roster.push_back(spec);
            }
            auto const result = mmo::calibrate_budget_experiment(roster, grid, cal.jobs);
            emit(cal.out, [&](std::ostream& out) { out << mmo::calibration_json(result).dump(2) << '\n'; });
        } else if (*rep_cmd) {
            std::vector<mmo::ResultsFile> files;
            for (auto const& f : rep_files) {
                files.push_back(mmo::load_results(mmo::resolve_source_path(f), rep_traces));
            }
            auto const report = mmo::build_report(files, rep_baseline, rep_paired);
            emit(rep_out, [&](std::ostream& out) {
                if (rep_format == "json") {
                    out << report.dump(2) << '\n';
                    return;
                }
                std::vector<mmo::ComparisonRow> rows;
                auto const& base = rep_baseline.empty() ? files.front().label : rep_baseline;
                for (auto const& cand : files) {
                    for (auto const& b : files) {
                        if (b.label == base && cand.label != base && cand.case_id == b.case_id) {
                            rows.push_back(mmo::compare_results(cand, b, rep_paired));
                        }
                    }
                }
                mmo::write_comparison_csv(rows, out);
            });
        }
    } catch (mmo::Error const& e) {
        return usage_guard(e);
    } catch (std::exception const& e) {
        std::cerr << "mmo_tune: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
