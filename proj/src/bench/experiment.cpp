#include "bench/experiment.hpp"

#include <chrono>
#include <stdexcept>

#include <fmt/format.h>

#include "baselines/search.hpp"
#include "ldmma/ldmma.hpp"

namespace bho::bench {

using data::Dataset;
using models::Model;
using nlohmann::json;

std::string run_record_csv_header()
{
    return "method,seed,time_s,val_err,test_err,iters,status";
}

std::string to_csv_row(const RunRecord& r)
{
    return fmt::format("{},{},{:.6g},{:.6g},{:.6g},{},{}", r.method, r.seed, r.time_s,
                       r.val_err, r.test_err, r.iters, r.status);
}

Model model_from_dataset(const Dataset& dataset, int folds, std::uint64_t fold_seed)
{
    if (dataset.task == data::Task::Classification)
    {
        models::SvmProblem problem;
        problem.a = dataset.rows(dataset.train_idx);
        problem.labels = dataset.target_rows(dataset.train_idx);
        problem.folds = folds;
        problem.fold_of =
            data::kfold_split(static_cast<int>(dataset.train_idx.size()), folds, fold_seed);
        const int p = dataset.num_features();
        problem.w_lb = Eigen::VectorXd::Constant(p, 1e-6);
        problem.w_ub = Eigen::VectorXd::Constant(p, 10.0);
        problem.a_te = dataset.rows(dataset.test_idx);
        problem.labels_te = dataset.target_rows(dataset.test_idx);
        return Model::svm_cv(std::move(problem));
    }

    models::RegressionSplits splits;
    splits.a_tr = dataset.rows(dataset.train_idx);
    splits.b_tr = dataset.target_rows(dataset.train_idx);
    splits.a_val = dataset.rows(dataset.val_idx);
    splits.b_val = dataset.target_rows(dataset.val_idx);
    splits.a_te = dataset.rows(dataset.test_idx);
    splits.b_te = dataset.target_rows(dataset.test_idx);
    if (!dataset.groups.empty())
    {
        return Model::sparse_group_lasso(std::move(splits), dataset.groups);
    }
    return Model::elastic_net(std::move(splits));
}

namespace {

solver::Settings solver_settings_from(const json& config)
{
    solver::Settings s;
    if (config.contains("solver"))
    {
        const json& j = config["solver"];
        if (j.contains("max_iter"))
        {
            s.max_iter = j["max_iter"];
        }
        if (j.contains("tol"))
        {
            const double tol = j["tol"];
            s.tol_gap = s.tol_primal = s.tol_dual = tol;
        }
    }
    return s;
}

ldmma::RunConfig run_config_from(const json& config)
{
    ldmma::RunConfig rc;
    if (!config.contains("run"))
    {
        return rc;
    }
    const json& j = config["run"];
    if (j.contains("epsilon"))
    {
        rc.epsilon = j["epsilon"];
    }
    if (j.contains("beta"))
    {
        rc.beta = j["beta"];
    }
    if (j.contains("lambda0"))
    {
        const auto values = j["lambda0"].get<std::vector<double>>();
        rc.lambda0 = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
    }
    if (j.contains("max_outer_iters"))
    {
        rc.max_outer_iters = j["max_outer_iters"];
    }
    if (j.contains("step_tol"))
    {
        rc.step_tol = j["step_tol"];
    }
    if (j.contains("majorization"))
    {
        const std::string name = j["majorization"];
        if (name == "auto")
        {
            rc.majorization = reform::MajorizationPolicy::Auto;
        }
        else if (name == "cauchy")
        {
            rc.majorization = reform::MajorizationPolicy::CauchyQuadratic;
        }
        else if (name == "square")
        {
            rc.majorization = reform::MajorizationPolicy::SquareLinearized;
        }
        else
        {
            throw std::invalid_argument("unknown majorization policy: " + name);
        }
    }
    rc.solver_settings = solver_settings_from(j);
    return rc;
}

baselines::GridSpec grid_spec_from(const json& config, const char* key)
{
    baselines::GridSpec spec;
    if (config.contains(key))
    {
        const json& j = config[key];
        if (j.contains("log10_lo"))
        {
            spec.log10_lo = j["log10_lo"];
        }
        if (j.contains("log10_hi"))
        {
            spec.log10_hi = j["log10_hi"];
        }
        if (j.contains("points"))
        {
            spec.points = j["points"];
        }
    }
    return spec;
}

}  // namespace

ExperimentOutcome run_experiment(const Dataset& dataset, const json& config)
{
    const std::string method = config.at("method");
    const std::uint64_t seed = config.value("seed", 0ULL);
    const int folds = config.value("folds", 3);

    const Model model = model_from_dataset(dataset, folds, seed);
    const solver::Settings settings =
        config.contains("run") ? solver_settings_from(config["run"]) : solver::Settings{};

    ExperimentOutcome outcome;
    outcome.record.method = method;
    outcome.record.seed = seed;
    outcome.record.status = "ok";

    const auto t0 = std::chrono::steady_clock::now();
    if (method == "ldmma")
    {
        ldmma::RunConfig rc = run_config_from(config);
        const auto result = ldmma::run(model, rc);
        outcome.record.iters = result.iterations;
        outcome.trajectory_jsonl = result.trajectory.to_jsonl();
        if (result.final_point.x.size() == 0)
        {
            outcome.record.status = solver::status_name(result.status);
            outcome.solver_failure = true;
        }
        else
        {
            outcome.record.val_err = model.val_error(result.final_point.x);
            outcome.record.test_err =
                model.test_error(result.final_point.x, result.final_point.lambda, settings);
            if (!result.converged)
            {
                outcome.record.status = "max_outer_iters";
            }
            else
            {
                const auto report = ldmma::kkt_report(model, result.final_point, rc);
                outcome.report = json{
                    {"gap_activity", report.gap_activity},
                    {"fixed_point_residual", report.fixed_point_residual},
                    {"fixed_point_relative", report.fixed_point_relative},
                    {"stationary", report.stationary},
                    {"gap_row_multiplier", report.gap_row_multiplier},
                };
            }
        }
    }
    else if (method == "grid" || method == "random")
    {
        const auto spec = grid_spec_from(config, method == "grid" ? "grid" : "random");
        baselines::SearchResult result;
        if (method == "grid")
        {
            result = baselines::grid_search(model, spec, settings);
        }
        else
        {
            const int samples =
                config.contains("random") ? config["random"].value("samples", 100) : 100;
            result = baselines::random_search(model, samples, spec, seed, settings);
        }
        outcome.record.iters = result.evaluations;
        if (result.best_hyper.size() == 0)
        {
            outcome.record.status = "all_points_failed";
            outcome.solver_failure = true;
        }
        else
        {
            outcome.record.val_err = result.best_val_error;
            outcome.record.test_err = result.test_error;
        }
    }
    else
    {
        throw std::invalid_argument("unknown method: " + method);
    }
    outcome.record.time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return outcome;
}

Dataset generate_dataset(const json& spec)
{
    const std::string kind = spec.at("kind");
    const std::uint64_t seed = spec.value("seed", 1ULL);
    if (kind == "elastic-net")
    {
        return data::gen_elastic_net(seed, spec.value("ntr", 50), spec.value("nval", 20),
                                     spec.value("nte", 100), spec.value("p", 60));
    }
    if (kind == "sgl")
    {
        return data::gen_sgl(seed, spec.value("n", 90), spec.value("p", 180),
                             spec.value("m", 9));
    }
    if (kind == "svm")
    {
        return data::gen_svm(seed, spec.value("n", 100), spec.value("p", 10),
                             spec.value("noise", 0.4));
    }
    if (kind == "matrix-completion")
    {
        throw std::invalid_argument(
            "unsupported variant: matrix-completion needs a semidefinite cone");
    }
    throw std::invalid_argument("unknown dataset kind: " + kind);
}

}  // namespace bho::bench
