#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>

extern "C" {
#include "bho/bho.h"
}

namespace {

std::string temp_stem(const char* name)
{
    const auto dir = std::filesystem::temp_directory_path() / "bho_capi";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("C interface - version and error state")
{
    CHECK(std::string(bho_version()).find('.') != std::string::npos);
    CHECK(bho_dataset_generate(nullptr, nullptr) == BHO_ERROR_INVALID_ARGUMENT);
    CHECK(std::string(bho_last_error()) == "null argument");
}

TEST_CASE("C interface - generate, save, load, manifest")
{
    bho_dataset* dataset = nullptr;
    REQUIRE(bho_dataset_generate(
                R"({"kind":"elastic-net","seed":1,"ntr":10,"nval":5,"nte":5,"p":16})",
                &dataset) == BHO_OK);
    REQUIRE(dataset != nullptr);

    const std::string stem = temp_stem("en");
    CHECK(bho_dataset_save(dataset, stem.c_str()) == BHO_OK);

    const std::string manifest = bho_dataset_manifest(dataset, stem.c_str());
    CHECK(manifest.find("kind: elastic-net") != std::string::npos);
    CHECK(manifest.find("samples: 20") != std::string::npos);

    bho_dataset* loaded = nullptr;
    REQUIRE(bho_dataset_load(stem.c_str(), &loaded) == BHO_OK);
    bho_dataset_free(loaded);
    bho_dataset_free(dataset);

    SECTION("precondition violations surface as invalid arguments")
    {
        bho_dataset* bad = nullptr;
        CHECK(bho_dataset_generate(R"({"kind":"elastic-net","seed":1,"p":10})", &bad) ==
              BHO_ERROR_INVALID_ARGUMENT);
        CHECK(std::string(bho_last_error()).find("p >= 15") != std::string::npos);
        CHECK(bho_dataset_generate(R"({"kind":"matrix-completion"})", &bad) ==
              BHO_ERROR_UNSUPPORTED);
        CHECK(bho_dataset_generate("{not json", &bad) == BHO_ERROR_INVALID_ARGUMENT);
        CHECK(bho_dataset_load(temp_stem("missing").c_str(), &bad) == BHO_ERROR_IO);
    }
}

TEST_CASE("C interface - run methods end to end")
{
    bho_dataset* dataset = nullptr;
    REQUIRE(bho_dataset_generate(
                R"({"kind":"elastic-net","seed":2,"ntr":12,"nval":6,"nte":6,"p":16})",
                &dataset) == BHO_OK);

    SECTION("ldmma run produces a record, trajectory, and report")
    {
        bho_result* result = nullptr;
        REQUIRE(bho_run(dataset,
                        R"({"method":"ldmma","seed":1,"run":{"max_outer_iters":15}})",
                        &result) == BHO_OK);
        const std::string csv = bho_result_record_csv(result);
        CHECK(csv.rfind("ldmma,1,", 0) == 0);
        CHECK(std::string(bho_result_csv_header()) ==
              "method,seed,time_s,val_err,test_err,iters,status");
        CHECK(std::string(bho_result_trajectory_jsonl(result)).find("ul_objective") !=
              std::string::npos);
        bho_result_free(result);
    }
    SECTION("grid run")
    {
        bho_result* result = nullptr;
        REQUIRE(bho_run(dataset, R"({"method":"grid","seed":1,"grid":{"points":3}})",
                        &result) == BHO_OK);
        CHECK(std::string(bho_result_record_csv(result)).find(",9,ok") != std::string::npos);
        bho_result_free(result);
    }
    SECTION("unknown method is rejected")
    {
        bho_result* result = nullptr;
        CHECK(bho_run(dataset, R"({"method":"annealing"})", &result) ==
              BHO_ERROR_INVALID_ARGUMENT);
    }
    bho_dataset_free(dataset);
}

TEST_CASE("C interface - svm path")
{
    bho_dataset* dataset = nullptr;
    REQUIRE(bho_dataset_generate(R"({"kind":"svm","seed":3,"n":36,"p":3})", &dataset) ==
            BHO_OK);
    bho_result* result = nullptr;
    REQUIRE(bho_run(dataset,
                    R"({"method":"random","seed":5,"folds":3,"random":{"samples":3}})",
                    &result) == BHO_OK);
    CHECK(std::string(bho_result_record_csv(result)).rfind("random,5,", 0) == 0);
    bho_result_free(result);
    bho_dataset_free(dataset);
}
