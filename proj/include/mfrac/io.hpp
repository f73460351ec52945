#pragma once

#include <string>
#include <vector>

#include "mfrac/estimators.hpp"
#include "mfrac/grid.hpp"
#include "mfrac/harness.hpp"

namespace mfrac {

// A parsed + validated experiment configuration (JSON file, flat keys).
struct ExperimentConfig {
    Experiment exp;
    std::string experiment_kind = "consistency"; // consistency|clt|rate|covariance
    std::vector<int> n_list;                     // rate experiments
    std::vector<long> k_list;                    // covariance experiments
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Realization CSV: header "j,k,<value>" (value column "mass" for measures,
// "dx" for increments), 17 significant digits so doubles round-trip exactly.
void write_realization_csv(const std::string& path, const Realization& r);
Realization read_realization_csv(const std::string& path);

enum class SeriesFormat { Increments, Levels };

// Series CSV with a header naming a column "x". `levels` data is
// first-differenced. Length must equal L * 2^n for some integer n.
Realization ingest_series(const std::string& path, SeriesFormat format, long L = 1);

std::string estimate_report_json(const EstimateReport& rep);
std::string estimate_report_csv(const EstimateReport& rep);

std::string mc_report_json(const McReport& rep);
std::string mc_report_csv(const McReport& rep); // one row per replication

std::string covariance_decay_json(const CovarianceDecay& d);

// Human-readable table for `report`.
std::string mc_report_table(const std::string& json_text);
// gnuplot-ready data files (variance vs n, per-q summary); returns filenames.
std::vector<std::string> mc_report_datafiles(const std::string& json_text,
                                             const std::string& out_dir);

} // namespace mfrac
