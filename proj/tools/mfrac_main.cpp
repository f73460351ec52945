#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfrac/cascade.hpp"
#include "mfrac/io.hpp"
#include "mfrac/mrm.hpp"
#include "mfrac/mrw.hpp"
#include "mfrac/parallel.hpp"

namespace {

using namespace mfrac;

std::vector<double> parse_q_arg(const std::string& s) {
    std::vector<double> q;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            q.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty())
        q.push_back(std::stod(cur));
    if (q.empty())
        throw ValidationError("--q: empty list");
    return q;
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw Error("cannot open for writing: " + out_path);
    out << text;
}

Realization simulate_from_config(const ExperimentConfig& cfg, int threads) {
    const Experiment& e = cfg.exp;
    const MixedGrid grid = MixedGrid::make(e.T, e.n, e.chi);
    switch (e.process) {
    case Process::Cascade:
        return sample_cascade(e.model, grid, e.depth_extra, e.seed, e.n, threads).data;
    case Process::Mrm:
        return sample_mrm(e.model, grid, e.oversample, e.seed, e.n, threads).data;
    case Process::MrwHalf:
        return sample_mrw(e.model, 0.5, grid, e.oversample, e.seed, e.n, threads).data;
    case Process::MrwH:
        return sample_mrw(e.model, e.H, grid, e.oversample, e.seed, e.n, threads).data;
    }
    throw Error("unreachable");
}

int run(int argc, char** argv) {
    CLI::App app{"multifractal simulation and scaling-function estimation"};
    app.require_subcommand(1);

    std::string config_path, in_path, out_path, format = "json";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    app.add_option("--seed", seed, "master seed (overrides config)")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--format", format, "output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.fallthrough();

    auto* sim = app.add_subcommand("simulate", "sample a realization and write it as CSV");
    sim->add_option("-c,--config", config_path, "experiment config (JSON)")->required();

    auto* est = app.add_subcommand("estimate", "estimate the scaling function from data");
    std::string q_arg = "2", method = "ratio", levels_arg, series_format = "increments";
    bool series = false;
    long L_arg = 1, bootstrap = 200;
    est->add_option("--in", in_path, "realization CSV (j,k,value) or series CSV")->required();
    est->add_flag("--series", series, "input is a series CSV with column x");
    est->add_option("--series-format", series_format, "increments|levels")
        ->check(CLI::IsMember({"increments", "levels"}));
    est->add_option("--L", L_arg, "number of independent blocks in a series input");
    est->add_option("--q", q_arg, "comma-separated q list");
    est->add_option("--levels", levels_arg, "level range lo:hi (default: finest pair)");
    est->add_option("--method", method, "ratio|regression")
        ->check(CLI::IsMember({"ratio", "regression"}));
    est->add_option("--bootstrap", bootstrap, "bootstrap resamples for std errors");

    auto* ver = app.add_subcommand("verify", "run a replicated Monte Carlo experiment");
    ver->add_option("-c,--config", config_path, "experiment config (JSON)")->required();

    auto* repc = app.add_subcommand("report", "render a verify report");
    std::string data_dir;
    repc->add_option("--in", in_path, "McReport JSON produced by verify")->required();
    repc->add_option("--data-dir", data_dir, "also write gnuplot-ready .dat files here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // exit code 1 for any usage error; 0 for --help and friends
        return app.exit(e) == 0 ? 0 : 1;
    }
    const int nthreads = effective_threads(threads);

    if (sim->parsed()) {
        ExperimentConfig cfg = parse_config(config_path);
        if (seed_set)
            cfg.exp.seed = seed;
        const Realization r = simulate_from_config(cfg, nthreads);
        if (out_path.empty())
            throw ValidationError("simulate: --out is required");
        write_realization_csv(out_path, r);
        std::cerr << "wrote " << r.grid.L << " x " << r.per_block() << " values to " << out_path
                  << "\n";
        return 0;
    }

    if (est->parsed()) {
        Realization r;
        if (series)
            r = ingest_series(in_path,
                              series_format == "levels" ? SeriesFormat::Levels
                                                        : SeriesFormat::Increments,
                              L_arg);
        else
            r = read_realization_csv(in_path);
        int lo = r.level - 1, hi = r.level;
        if (!levels_arg.empty()) {
            const auto colon = levels_arg.find(':');
            if (colon == std::string::npos)
                throw ValidationError("--levels: expected lo:hi");
            lo = std::stoi(levels_arg.substr(0, colon));
            hi = std::stoi(levels_arg.substr(colon + 1));
        }
        const EstimateReport rep =
            zeta_curve(r, parse_q_arg(q_arg), lo, hi,
                       method == "ratio" ? CurveMethod::Ratio : CurveMethod::Regression,
                       bootstrap, seed_set ? seed : r.seed);
        write_output(out_path, format == "csv" ? estimate_report_csv(rep)
                                               : estimate_report_json(rep));
        return 0;
    }

    if (ver->parsed()) {
        ExperimentConfig cfg = parse_config(config_path);
        if (seed_set)
            cfg.exp.seed = seed;
        std::string text;
        if (cfg.experiment_kind == "rate") {
            const McReport rep = rate_experiment(cfg.exp, cfg.n_list, nthreads);
            text = format == "csv" ? mc_report_csv(rep) : mc_report_json(rep);
        } else if (cfg.experiment_kind == "covariance") {
            const DecayKind kind =
                cfg.exp.process == Process::Mrm ? DecayKind::Mrm : DecayKind::MrwSigma;
            const CovarianceDecay d =
                covariance_decay(cfg.exp.model, kind, cfg.exp.q_list.at(0), cfg.exp.n,
                                 cfg.k_list, cfg.exp.R, cfg.exp.seed, cfg.exp.oversample,
                                 cfg.exp.H, nthreads);
            text = covariance_decay_json(d);
        } else {
            const McReport rep = run_replications(cfg.exp, nthreads);
            text = format == "csv" ? mc_report_csv(rep) : mc_report_json(rep);
        }
        write_output(out_path, text);
        return 0;
    }

    if (repc->parsed()) {
        std::ifstream in(in_path);
        if (!in)
            throw Error("cannot open: " + in_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::cout << mc_report_table(text);
        if (!data_dir.empty()) {
            for (const auto& f : mc_report_datafiles(text, data_dir))
                std::cerr << "wrote " << f << "\n";
        }
        return 0;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mfrac::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mfrac::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mfrac::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mfrac::NonNumeric& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mfrac::ConditionViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
