#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ldmma/ldmma.hpp"
#include "reform/assemble.hpp"

using namespace bho;
using Catch::Approx;
using Eigen::VectorXd;

TEST_CASE("initialization")
{
    solver::Settings tight;
    tight.tol_gap = tight.tol_primal = tight.tol_dual = 1e-11;
    SECTION("zero data gives the zero iterate")
    {
        const auto model = testing::toy_elastic_net(VectorXd::Zero(3), VectorXd::Zero(3));
        const auto z0 = ldmma::initialize(model, VectorXd::Constant(2, 0.01), tight);
        CHECK(z0.x.lpNorm<Eigen::Infinity>() <= 1e-5);
        CHECK(z0.r.lpNorm<Eigen::Infinity>() <= 1e-5);
        CHECK(reform::duality_gap_value(model, z0) <= 1e-6);
    }
    SECTION("soft-threshold start")
    {
        VectorXd b_tr(2);
        b_tr << 2, 0;
        const auto model = testing::toy_elastic_net(b_tr, VectorXd::Zero(2));
        VectorXd lambda0(2);
        lambda0 << 1.0, 0.0;
        const auto z0 = ldmma::initialize(model, lambda0, tight);
        CHECK(z0.x(0) == Approx(1.0).margin(1e-5));
        CHECK(z0.x(1) == Approx(0.0).margin(1e-5));
        CHECK(z0.r(0) == Approx(1.0).margin(1e-5));
        CHECK(reform::duality_gap_value(model, z0) <= 1e-6);
    }
    SECTION("gap vanishes for every model kind")
    {
        const auto en = testing::small_elastic_net(31);
        CHECK(reform::duality_gap_value(en, ldmma::initialize(en, ldmma::default_lambda0(en))) <=
              1e-6);
        const auto sgl = testing::small_sgl(32);
        CHECK(reform::duality_gap_value(sgl, ldmma::initialize(sgl, ldmma::default_lambda0(sgl))) <=
              1e-6);
        const auto svm = testing::small_svm(33);
        CHECK(reform::duality_gap_value(svm, ldmma::initialize(svm, ldmma::default_lambda0(svm))) <=
              1e-6);
    }
}

TEST_CASE("trivial run converges immediately")
{
    const auto model = testing::toy_elastic_net(VectorXd::Zero(3), VectorXd::Zero(3));
    ldmma::RunConfig config;
    config.epsilon = 0.01;
    /* The step certificate can only resolve sqrt(solver gap / beta). */
    config.solver_settings.tol_gap = config.solver_settings.tol_primal =
        config.solver_settings.tol_dual = 1e-11;
    config.step_tol = 1e-3;
    const auto result = ldmma::run(model, config);
    CHECK(result.converged);
    CHECK(result.iterations <= 3);
    CHECK(model.ul_objective(result.final_point.x) <= 1e-8);
}

TEST_CASE("runs decrease monotonically and stay feasible")
{
    for (std::uint64_t seed : {41, 42})
    {
        const auto model = testing::small_elastic_net(seed, 20, 8, 10, 24);
        ldmma::RunConfig config;
        config.max_outer_iters = 25;
        const auto result = ldmma::run(model, config);
        REQUIRE(result.trajectory.records.size() >= 2);

        const auto& recs = result.trajectory.records;
        for (size_t k = 1; k < recs.size(); k++)
        {
            /* sufficient decrease with the proximal weight */
            const double lhs = recs[k].ul_objective - recs[k - 1].ul_objective;
            const double rhs = -0.5 * config.beta * recs[k].step_norm * recs[k].step_norm;
            REQUIRE(lhs <= rhs + 1e-8);
            REQUIRE(recs[k].gap_value <= config.epsilon + 0.01 + 1e-6);
        }
        /* iterate feasibility at the final point */
        CHECK(reform::duality_gap_value(model, result.final_point) <= 0.01 + 1e-6);
        CHECK(reform::p_activities(model, result.final_point).maxCoeff() <= 1e-8);
        if (result.converged)
        {
            CHECK(recs.back().step_norm_relative <= config.step_tol);
        }
    }
}

TEST_CASE("reruns reproduce the trajectory bit for bit")
{
    const auto model = testing::small_elastic_net(43);
    ldmma::RunConfig config;
    config.max_outer_iters = 10;
    const auto a = ldmma::run(model, config);
    const auto b = ldmma::run(model, config);
    REQUIRE(a.trajectory.records.size() == b.trajectory.records.size());
    for (size_t k = 0; k < a.trajectory.records.size(); k++)
    {
        REQUIRE(a.trajectory.records[k].ul_objective == b.trajectory.records[k].ul_objective);
        REQUIRE(a.trajectory.records[k].step_norm == b.trajectory.records[k].step_norm);
        REQUIRE(a.trajectory.records[k].gap_value == b.trajectory.records[k].gap_value);
    }
}

TEST_CASE("stationarity report")
{
    const auto model = testing::toy_elastic_net(VectorXd::Zero(4), VectorXd::Zero(4));
    ldmma::RunConfig config;
    config.max_outer_iters = 60;
    config.solver_settings.tol_gap = config.solver_settings.tol_primal =
        config.solver_settings.tol_dual = 1e-11;
    config.step_tol = 1e-3;
    const auto result = ldmma::run(model, config);
    REQUIRE(result.converged);

    const auto report = ldmma::kkt_report(model, result.final_point, config);
    CHECK(report.stationary);
    CHECK(report.fixed_point_relative <= config.step_tol);
    CHECK(report.gap_activity <= 1e-6);
    CHECK(report.p_activities.maxCoeff() <= 1e-8);

    /* the starting point of a non-trivial run is not stationary */
    const auto nontrivial = testing::small_elastic_net(44, 16, 6, 8, 20);
    const auto z0 = ldmma::initialize(nontrivial, ldmma::default_lambda0(nontrivial));
    const auto report0 = ldmma::kkt_report(nontrivial, z0, config);
    CHECK_FALSE(report0.stationary);
}

TEST_CASE("config guards and defaults")
{
    ldmma::RunConfig bad;
    bad.step_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    const auto en = testing::small_elastic_net(45);
    CHECK(ldmma::default_epsilon(en) == 0.01);
    CHECK(ldmma::default_lambda0(en).size() == 2);
    const auto svm = testing::small_svm(46);
    CHECK(ldmma::default_epsilon(svm) == 1.0);
    CHECK(ldmma::default_lambda0(svm)(0) == Approx(0.1));
}

TEST_CASE("trajectory serializes to JSON lines")
{
    const auto model = testing::toy_elastic_net(VectorXd::Zero(2), VectorXd::Zero(2));
    const auto result = ldmma::run(model, {});
    const std::string jsonl = result.trajectory.to_jsonl();
    CHECK(jsonl.find("\"ul_objective\"") != std::string::npos);
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') ==
          static_cast<long>(result.trajectory.records.size()));
}
