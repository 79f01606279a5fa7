#ifndef BHO_BENCH_EXPERIMENT_HPP
#define BHO_BENCH_EXPERIMENT_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "data/dataset.hpp"
#include "models/model.hpp"

namespace bho::bench {

/// One benchmark row. Floats print with 6 significant digits; reruns with the
/// same config reproduce every column except time_s byte for byte.
struct RunRecord {
    std::string method;
    std::uint64_t seed = 0;
    double time_s = 0.0;
    double val_err = 0.0;
    double test_err = 0.0;
    int iters = 0;
    std::string status;
};

std::string run_record_csv_header();
std::string to_csv_row(const RunRecord& record);

struct ExperimentOutcome {
    RunRecord record;
    std::string trajectory_jsonl;  // empty for the gradient-free baselines
    nlohmann::json report;         // stationarity report for converged runs
    bool solver_failure = false;
};

/**
 * Build the bilevel model a dataset describes. Classification sets get a
 * K-fold assignment drawn from fold_seed; the weight-cap box defaults to
 * [1e-6, 10] per coordinate.
 */
models::Model model_from_dataset(const data::Dataset& dataset, int folds,
                                 std::uint64_t fold_seed);

/**
 * Run one method on one dataset. config keys (all optional except method):
 *   method: "ldmma" | "grid" | "random"
 *   seed:   driver seed (random-search draws and SVM fold assignment)
 *   folds:  SVM fold count (default 3)
 *   run:    {epsilon, beta, lambda0, max_outer_iters, step_tol, majorization,
 *            solver: {max_iter, tol}}
 *   grid:   {log10_lo, log10_hi, points}
 *   random: {samples}
 */
ExperimentOutcome run_experiment(const data::Dataset& dataset,
                                 const nlohmann::json& config);

/// Generator dispatch used by the CLI and the C API: spec holds kind plus the
/// generator's size parameters.
data::Dataset generate_dataset(const nlohmann::json& spec);

}  // namespace bho::bench

#endif
