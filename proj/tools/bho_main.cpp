// Command-line harness: dataset generation, single tuning runs, and seeded
// benchmark sweeps with CSV output. Links the library through its C API only.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bho/bho.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitSolverAbort = 1;
constexpr int kExitUsage = 2;

[[noreturn]] void die_usage(const std::string& message)
{
    std::fprintf(stderr, "error: %s\n", message.c_str());
    std::exit(kExitUsage);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> seeds;
    std::istringstream stream(text);
    std::string part;
    while (std::getline(stream, part, ','))
    {
        const auto dots = part.find("..");
        if (dots != std::string::npos)
        {
            const std::uint64_t lo = std::stoull(part.substr(0, dots));
            const std::uint64_t hi = std::stoull(part.substr(dots + 2));
            for (std::uint64_t s = lo; s <= hi; s++)
            {
                seeds.push_back(s);
            }
        }
        else if (!part.empty())
        {
            seeds.push_back(std::stoull(part));
        }
    }
    if (seeds.empty())
    {
        die_usage("no seeds given");
    }
    return seeds;
}

std::vector<std::string> parse_methods(const std::string& text)
{
    std::vector<std::string> methods;
    std::istringstream stream(text);
    std::string part;
    while (std::getline(stream, part, ','))
    {
        if (part.empty())
        {
            continue;
        }
        if (part != "ldmma" && part != "grid" && part != "random")
        {
            die_usage("unknown method '" + part + "' (want ldmma, grid, or random)");
        }
        methods.push_back(part);
    }
    if (methods.empty())
    {
        die_usage("no methods given");
    }
    return methods;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path);
    if (!out)
    {
        die_usage("cannot write " + path);
    }
    out << content;
}

struct DatasetHandle {
    bho_dataset* ptr = nullptr;
    ~DatasetHandle() { bho_dataset_free(ptr); }
};

struct ResultHandle {
    bho_result* ptr = nullptr;
    ~ResultHandle() { bho_result_free(ptr); }
};

json load_config_file(const std::string& path)
{
    if (path.empty())
    {
        return json::object();
    }
    std::ifstream in(path);
    if (!in)
    {
        die_usage("cannot read config " + path);
    }
    return json::parse(in);
}

/* Flag overrides applied on top of a config file. */
struct RunFlags {
    std::string method = "ldmma";
    std::uint64_t seed = 1;
    int folds = -1;
    double epsilon = -1.0;
    double beta = -1.0;
    int max_outer_iters = -1;
    double step_tol = -1.0;
    std::string majorization;
    int grid_points = -1;
    int samples = -1;
    double solver_tol = -1.0;

    json merged(json config) const
    {
        config["method"] = method;
        config["seed"] = seed;
        if (folds > 0)
        {
            config["folds"] = folds;
        }
        if (epsilon > 0.0)
        {
            config["run"]["epsilon"] = epsilon;
        }
        if (beta >= 0.0)
        {
            config["run"]["beta"] = beta;
        }
        if (max_outer_iters > 0)
        {
            config["run"]["max_outer_iters"] = max_outer_iters;
        }
        if (step_tol > 0.0)
        {
            config["run"]["step_tol"] = step_tol;
        }
        if (!majorization.empty())
        {
            config["run"]["majorization"] = majorization;
        }
        if (grid_points > 1)
        {
            config["grid"]["points"] = grid_points;
        }
        if (samples > 0)
        {
            config["random"]["samples"] = samples;
        }
        if (solver_tol > 0.0)
        {
            config["run"]["solver"]["tol"] = solver_tol;
        }
        return config;
    }
};

struct BenchTask {
    std::string method;
    std::uint64_t seed = 0;
    bho_status status = BHO_OK;
    std::string csv_row;
    std::string trajectory;
    std::string error;
};

int cmd_generate(const json& spec, const std::string& stem)
{
    DatasetHandle dataset;
    const bho_status rc = bho_dataset_generate(spec.dump().c_str(), &dataset.ptr);
    if (rc != BHO_OK)
    {
        die_usage(bho_last_error());
    }
    if (bho_dataset_save(dataset.ptr, stem.c_str()) != BHO_OK)
    {
        die_usage(bho_last_error());
    }
    std::fputs(bho_dataset_manifest(dataset.ptr, stem.c_str()), stdout);
    return kExitOk;
}

int cmd_run(const std::string& data_stem, const json& config, const std::string& out_dir)
{
    DatasetHandle dataset;
    if (bho_dataset_load(data_stem.c_str(), &dataset.ptr) != BHO_OK)
    {
        die_usage(bho_last_error());
    }

    ResultHandle result;
    const bho_status rc = bho_run(dataset.ptr, config.dump().c_str(), &result.ptr);
    if (rc != BHO_OK && result.ptr == nullptr)
    {
        die_usage(bho_last_error());
    }

    std::printf("%s\n%s\n", bho_result_csv_header(), bho_result_record_csv(result.ptr));

    if (!out_dir.empty())
    {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/results.csv", std::string(bho_result_csv_header()) + "\n" +
                                                 bho_result_record_csv(result.ptr) + "\n");
        const std::string trajectory = bho_result_trajectory_jsonl(result.ptr);
        if (!trajectory.empty())
        {
            write_file(out_dir + "/trajectory.jsonl", trajectory);
        }
        write_file(out_dir + "/report.json",
                   std::string(bho_result_report_json(result.ptr)) + "\n");
    }
    return rc == BHO_OK ? kExitOk : kExitSolverAbort;
}

std::string format_aggregate_row(const std::string& method,
                                 const std::vector<BenchTask*>& rows)
{
    int successes = 0;
    double sums[3] = {0, 0, 0};
    std::vector<std::array<double, 3>> values;
    for (const BenchTask* task : rows)
    {
        if (task->status != BHO_OK)
        {
            continue;
        }
        /* columns: method,seed,time_s,val_err,test_err,iters,status */
        std::istringstream stream(task->csv_row);
        std::string cell;
        std::array<double, 3> v{};
        for (int col = 0; std::getline(stream, cell, ','); col++)
        {
            if (col >= 2 && col <= 4)
            {
                v[col - 2] = std::stod(cell);
            }
        }
        values.push_back(v);
        for (int i = 0; i < 3; i++)
        {
            sums[i] += v[i];
        }
        successes++;
    }

    char buf[256];
    if (successes == 0)
    {
        std::snprintf(buf, sizeof buf, "%s,%zu,0,nan,nan,nan,nan,nan,nan", method.c_str(),
                      rows.size());
        return buf;
    }
    double mean[3], sd[3] = {0, 0, 0};
    for (int i = 0; i < 3; i++)
    {
        mean[i] = sums[i] / successes;
    }
    if (successes > 1)
    {
        for (const auto& v : values)
        {
            for (int i = 0; i < 3; i++)
            {
                sd[i] += (v[i] - mean[i]) * (v[i] - mean[i]);
            }
        }
        for (int i = 0; i < 3; i++)
        {
            sd[i] = std::sqrt(sd[i] / (successes - 1));
        }
    }
    std::snprintf(buf, sizeof buf, "%s,%zu,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g",
                  method.c_str(), rows.size(),
                  successes / static_cast<double>(rows.size()), mean[0], sd[0], mean[1],
                  sd[1], mean[2], sd[2]);
    return buf;
}

int cmd_bench(const json& dataset_spec, const std::string& data_stem,
              const std::vector<std::string>& methods,
              const std::vector<std::uint64_t>& seeds, const json& base_config, int jobs,
              const std::string& out_dir)
{
    /* Shared handle for file datasets; synthetic models draw one per seed. */
    DatasetHandle loaded;
    if (!data_stem.empty())
    {
        if (bho_dataset_load(data_stem.c_str(), &loaded.ptr) != BHO_OK)
        {
            die_usage(bho_last_error());
        }
    }

    std::vector<BenchTask> tasks;
    for (const std::string& method : methods)
    {
        for (const std::uint64_t seed : seeds)
        {
            BenchTask task;
            task.method = method;
            task.seed = seed;
            tasks.push_back(std::move(task));
        }
    }

    std::mutex next_mutex;
    size_t next = 0;
    auto worker = [&]() {
        while (true)
        {
            size_t index;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= tasks.size())
                {
                    return;
                }
                index = next++;
            }
            BenchTask& task = tasks[index];

            DatasetHandle generated;
            bho_dataset* dataset = loaded.ptr;
            if (dataset == nullptr)
            {
                json spec = dataset_spec;
                spec["seed"] = task.seed;
                if (bho_dataset_generate(spec.dump().c_str(), &generated.ptr) != BHO_OK)
                {
                    task.status = BHO_ERROR_INTERNAL;
                    task.error = bho_last_error();
                    continue;
                }
                dataset = generated.ptr;
            }

            json config = base_config;
            config["method"] = task.method;
            config["seed"] = task.seed;
            ResultHandle result;
            task.status = bho_run(dataset, config.dump().c_str(), &result.ptr);
            if (result.ptr != nullptr)
            {
                task.csv_row = bho_result_record_csv(result.ptr);
                task.trajectory = bho_result_trajectory_jsonl(result.ptr);
            }
            if (task.status != BHO_OK)
            {
                task.error = bho_last_error();
            }
        }
    };

    const int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    {
        std::vector<std::thread> pool;
        for (int i = 0; i < thread_count; i++)
        {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool)
        {
            t.join();
        }
    }

    /* Deterministic emit order: methods then seeds, as listed. */
    std::string runs_csv = std::string(bho_result_csv_header()) + "\n";
    int successes = 0;
    for (const BenchTask& task : tasks)
    {
        if (!task.csv_row.empty())
        {
            runs_csv += task.csv_row + "\n";
        }
        else
        {
            runs_csv += task.method + "," + std::to_string(task.seed) +
                        ",nan,nan,nan,0,generate_failed\n";
        }
        if (task.status == BHO_OK)
        {
            successes++;
        }
        else
        {
            std::fprintf(stderr, "warning: %s seed %llu failed: %s\n", task.method.c_str(),
                         static_cast<unsigned long long>(task.seed), task.error.c_str());
        }
    }

    std::string summary_csv =
        "method,seeds,coverage,time_mean,time_std,val_mean,val_std,test_mean,test_std\n";
    for (const std::string& method : methods)
    {
        std::vector<BenchTask*> rows;
        for (BenchTask& task : tasks)
        {
            if (task.method == method)
            {
                rows.push_back(&task);
            }
        }
        summary_csv += format_aggregate_row(method, rows) + "\n";
    }

    std::fputs(summary_csv.c_str(), stdout);
    if (!out_dir.empty())
    {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/runs.csv", runs_csv);
        write_file(out_dir + "/summary.csv", summary_csv);
        for (const BenchTask& task : tasks)
        {
            if (!task.trajectory.empty())
            {
                write_file(out_dir + "/trajectory_" + task.method + "_" +
                               std::to_string(task.seed) + ".jsonl",
                           task.trajectory);
            }
        }
    }
    return successes > 0 ? kExitOk : kExitSolverAbort;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bilevel hyperparameter optimization benchmarks (library v" +
                 std::string(bho_version()) + ")"};
    app.require_subcommand(1);

    /* generate */
    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset to disk");
    std::string gen_kind, gen_out = "dataset";
    std::uint64_t gen_seed = 1;
    int ntr = 50, nval = 20, nte = 100, p = 60;
    int sgl_n = 90, sgl_m = 9;
    int svm_n = 100;
    double svm_noise = 0.4;
    generate->add_option("kind", gen_kind, "elastic-net | sgl | svm")->required();
    generate->add_option("--seed", gen_seed, "generator seed");
    generate->add_option("--ntr", ntr, "training samples (elastic-net)");
    generate->add_option("--nval", nval, "validation samples (elastic-net)");
    generate->add_option("--nte", nte, "test samples (elastic-net)");
    generate->add_option("-p,--features", p, "feature count");
    generate->add_option("-n,--samples", sgl_n, "training samples (sgl) / samples (svm)");
    generate->add_option("-M,--groups", sgl_m, "group count (sgl)");
    generate->add_option("--noise", svm_noise, "label noise (svm)");
    generate->add_option("--out", gen_out, "output stem");

    /* run */
    auto* run = app.add_subcommand("run", "Run one tuning method on a dataset");
    std::string run_data, run_out, run_config_path;
    RunFlags flags;
    run->add_option("--data", run_data, "dataset stem")->required();
    run->add_option("--method", flags.method, "ldmma | grid | random")->required();
    run->add_option("--seed", flags.seed, "driver seed (folds, random draws)");
    run->add_option("--config", run_config_path, "JSON config file");
    run->add_option("--out", run_out, "output directory");
    run->add_option("--folds", flags.folds, "SVM fold count");
    run->add_option("--epsilon", flags.epsilon, "relaxation epsilon");
    run->add_option("--beta", flags.beta, "proximal weight");
    run->add_option("--max-outer-iters", flags.max_outer_iters, "outer iteration cap");
    run->add_option("--step-tol", flags.step_tol, "relative step tolerance");
    run->add_option("--majorization", flags.majorization, "auto | cauchy | square");
    run->add_option("--grid-points", flags.grid_points, "grid points per direction");
    run->add_option("--samples", flags.samples, "random-search samples");
    run->add_option("--solver-tol", flags.solver_tol, "subproblem solver tolerance");

    /* bench */
    auto* bench = app.add_subcommand("bench", "Seeded sweep over methods with aggregation");
    std::string bench_model = "elastic-net", bench_data, bench_out, bench_config_path;
    std::string bench_methods = "ldmma,grid", bench_seeds = "1..10";
    int jobs = 1;
    RunFlags bench_flags;
    bench->add_option("--model", bench_model, "elastic-net | sgl | svm (synthetic data)");
    bench->add_option("--data", bench_data, "dataset stem (overrides --model)");
    bench->add_option("--methods", bench_methods, "comma-separated methods");
    bench->add_option("--seeds", bench_seeds, "e.g. 1,2,3 or 1..10");
    bench->add_option("--jobs", jobs, "concurrent runs");
    bench->add_option("--config", bench_config_path, "JSON config file");
    bench->add_option("--out", bench_out, "output directory");
    bench->add_option("--ntr", ntr, "training samples (elastic-net)");
    bench->add_option("--nval", nval, "validation samples (elastic-net)");
    bench->add_option("--nte", nte, "test samples (elastic-net)");
    bench->add_option("-p,--features", p, "feature count");
    bench->add_option("-n,--samples-n", sgl_n, "training samples (sgl) / samples (svm)");
    bench->add_option("-M,--groups", sgl_m, "group count (sgl)");
    bench->add_option("--folds", bench_flags.folds, "SVM fold count");
    bench->add_option("--epsilon", bench_flags.epsilon, "relaxation epsilon");
    bench->add_option("--beta", bench_flags.beta, "proximal weight");
    bench->add_option("--max-outer-iters", bench_flags.max_outer_iters, "outer cap");
    bench->add_option("--step-tol", bench_flags.step_tol, "relative step tolerance");
    bench->add_option("--grid-points", bench_flags.grid_points, "grid points per direction");
    bench->add_option("--samples", bench_flags.samples, "random-search samples");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (generate->parsed())
        {
            json spec{{"kind", gen_kind}, {"seed", gen_seed}};
            if (gen_kind == "elastic-net")
            {
                spec["ntr"] = ntr;
                spec["nval"] = nval;
                spec["nte"] = nte;
                spec["p"] = p;
            }
            else if (gen_kind == "sgl")
            {
                spec["n"] = sgl_n;
                spec["p"] = p;
                spec["m"] = sgl_m;
            }
            else if (gen_kind == "svm")
            {
                spec["n"] = sgl_n;
                spec["p"] = p;
                spec["noise"] = svm_noise;
            }
            else
            {
                die_usage("unknown dataset kind '" + gen_kind + "'");
            }
            (void)svm_n;
            return cmd_generate(spec, gen_out);
        }
        if (run->parsed())
        {
            return cmd_run(run_data, flags.merged(load_config_file(run_config_path)),
                           run_out);
        }
        if (bench->parsed())
        {
            json base = load_config_file(bench_config_path);
            base = bench_flags.merged(base);
            base.erase("method");
            base.erase("seed");
            json spec{{"kind", bench_model}};
            if (bench_model == "elastic-net")
            {
                spec["ntr"] = ntr;
                spec["nval"] = nval;
                spec["nte"] = nte;
                spec["p"] = p;
            }
            else if (bench_model == "sgl")
            {
                spec["n"] = sgl_n;
                spec["p"] = p;
                spec["m"] = sgl_m;
            }
            else if (bench_model == "svm")
            {
                spec["n"] = sgl_n;
                spec["p"] = p;
            }
            else if (bench_data.empty())
            {
                die_usage("unknown model '" + bench_model + "'");
            }
            return cmd_bench(spec, bench_data, parse_methods(bench_methods),
                             parse_seeds(bench_seeds), base, jobs, bench_out);
        }
    }
    catch (const std::exception& e)
    {
        die_usage(e.what());
    }
    return kExitUsage;
}
