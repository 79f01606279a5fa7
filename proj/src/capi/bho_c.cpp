#include "bho/bho.h"

#include <exception>
#include <string>
#include <memory>

#include <json.hpp>

#include "bench/experiment.hpp"
#include "data/dataset.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message)
{
    g_last_error = message;
}

template <typename Fn>
bho_status guarded(Fn&& fn)
{
    try
    {
        return fn();
    }
    catch (const std::invalid_argument& e)
    {
        set_error(e.what());
        return BHO_ERROR_INVALID_ARGUMENT;
    }
    catch (const nlohmann::json::exception& e)
    {
        set_error(e.what());
        return BHO_ERROR_INVALID_ARGUMENT;
    }
    catch (const std::runtime_error& e)
    {
        set_error(e.what());
        const std::string what = e.what();
        if (what.find("cannot read") != std::string::npos ||
            what.find("cannot write") != std::string::npos)
        {
            return BHO_ERROR_IO;
        }
        return BHO_ERROR_INTERNAL;
    }
    catch (const std::exception& e)
    {
        set_error(e.what());
        return BHO_ERROR_INTERNAL;
    }
}

}  // namespace

struct bho_dataset {
    bho::data::Dataset data;
    std::string manifest_cache;
};

struct bho_result {
    bho::bench::ExperimentOutcome outcome;
    std::string record_json;
    std::string record_csv;
};

extern "C" {

const char* bho_version(void)
{
    return "0.1.0";
}

const char* bho_last_error(void)
{
    return g_last_error.c_str();
}

bho_status bho_dataset_generate(const char* json_spec, bho_dataset** out)
{
    if (json_spec == nullptr || out == nullptr)
    {
        set_error("null argument");
        return BHO_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        const auto spec = nlohmann::json::parse(json_spec);
        if (spec.value("kind", "") == "matrix-completion")
        {
            set_error("unsupported variant: matrix-completion needs a semidefinite cone");
            return BHO_ERROR_UNSUPPORTED;
        }
        auto handle = std::make_unique<bho_dataset>();
        handle->data = bho::bench::generate_dataset(spec);
        *out = handle.release();
        return BHO_OK;
    });
}

bho_status bho_dataset_load(const char* stem, bho_dataset** out)
{
    if (stem == nullptr || out == nullptr)
    {
        set_error("null argument");
        return BHO_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        auto handle = std::make_unique<bho_dataset>();
        handle->data = bho::data::load_dataset(stem);
        *out = handle.release();
        return BHO_OK;
    });
}

bho_status bho_dataset_save(const bho_dataset* dataset, const char* stem)
{
    if (dataset == nullptr || stem == nullptr)
    {
        set_error("null argument");
        return BHO_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        bho::data::save_dataset(dataset->data, stem);
        return BHO_OK;
    });
}

const char* bho_dataset_manifest(bho_dataset* dataset, const char* stem)
{
    if (dataset == nullptr)
    {
        return "";
    }
    dataset->manifest_cache =
        bho::data::manifest(dataset->data, stem == nullptr ? "dataset" : stem);
    return dataset->manifest_cache.c_str();
}

void bho_dataset_free(bho_dataset* dataset)
{
    delete dataset;
}

bho_status bho_run(const bho_dataset* dataset, const char* json_config, bho_result** out)
{
    if (dataset == nullptr || json_config == nullptr || out == nullptr)
    {
        set_error("null argument");
        return BHO_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        const auto config = nlohmann::json::parse(json_config);
        auto handle = std::make_unique<bho_result>();
        handle->outcome = bho::bench::run_experiment(dataset->data, config);

        const auto& rec = handle->outcome.record;
        handle->record_json = nlohmann::json{{"method", rec.method},
                                             {"seed", rec.seed},
                                             {"time_s", rec.time_s},
                                             {"val_err", rec.val_err},
                                             {"test_err", rec.test_err},
                                             {"iters", rec.iters},
                                             {"status", rec.status}}
                                  .dump();
        handle->record_csv = bho::bench::to_csv_row(rec);
        const bool failed = handle->outcome.solver_failure;
        *out = handle.release();
        if (failed)
        {
            set_error("method aborted: see the record's status column");
            return BHO_ERROR_SOLVER;
        }
        return BHO_OK;
    });
}

const char* bho_result_record_json(const bho_result* result)
{
    return result == nullptr ? "" : result->record_json.c_str();
}

const char* bho_result_record_csv(const bho_result* result)
{
    return result == nullptr ? "" : result->record_csv.c_str();
}

const char* bho_result_csv_header(void)
{
    static const std::string header = bho::bench::run_record_csv_header();
    return header.c_str();
}

const char* bho_result_trajectory_jsonl(const bho_result* result)
{
    return result == nullptr ? "" : result->outcome.trajectory_jsonl.c_str();
}

const char* bho_result_report_json(const bho_result* result)
{
    static thread_local std::string cache;
    if (result == nullptr)
    {
        return "{}";
    }
    cache = result->outcome.report.is_null() ? "{}" : result->outcome.report.dump();
    return cache.c_str();
}

void bho_result_free(bho_result* result)
{
    delete result;
}

}  // extern "C"
