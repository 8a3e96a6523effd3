#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "padfree/config.hpp"

namespace padfree {

struct ConvergenceRow {
    double s = 0.0;
    double err_lap = 0.0;
    double err_gradx = 0.0;
    double err_grady = 0.0;
    double avg_n = 0.0;
    double cost = 0.0;
    double wall_seconds = 0.0;
};

struct TimeSample {
    double t = 0.0;
    double value = 0.0;  ///< L2 error for Burgers cases, KE/KE0 for KH
    double avg_n = 0.0;
};

struct ExperimentReport {
    CaseId case_id = CaseId::converge;
    std::vector<ConvergenceRow> convergence;
    std::vector<TimeSample> timeseries;

    bool aborted = false;
    std::string abort_reason;
    double abort_time = 0.0;
    std::size_t abort_node = 0;

    double final_time = 0.0;
    std::size_t steps = 0;
    double time_averaged_avg_n = 0.0;  ///< <N> averaged over steps
    double max_abs_value = 0.0;        ///< last sampled max |field| over interior nodes
    double y_min = 0.0;                ///< KH only: Y range over the run
    double y_max = 0.0;
    double wall_seconds = 0.0;         ///< reported on stdout only, never written to files
};

/// Runs one case end to end. With write_files, reports land in cfg.out_dir,
/// each headed by the resolved configuration; the directory is created.
/// Numerical aborts are caught and recorded in the report.
ExperimentReport run_experiment(const RunConfig& cfg, bool write_files = true);

/// Column name of TimeSample::value for a case.
std::string timeseries_value_name(CaseId id);

}  // namespace padfree
