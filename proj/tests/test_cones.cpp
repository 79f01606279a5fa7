#include <catch2/catch_amalgamated.hpp>

#include "conic/builder.hpp"
#include "conic/cone.hpp"
#include "data/rng.hpp"

using namespace bho;
using Catch::Approx;
using Eigen::VectorXd;

namespace {

conic::Cone zero(int d) { return {conic::ConeKind::Zero, d}; }
conic::Cone nonneg(int d) { return {conic::ConeKind::NonNegative, d}; }
conic::Cone soc(int d) { return {conic::ConeKind::SecondOrder, d}; }

VectorXd vec(std::initializer_list<double> v)
{
    VectorXd out(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v)
    {
        out(i++) = x;
    }
    return out;
}

/* Brute-force projection: minimize ||p - s|| over a fine grid of cone points. */
VectorXd grid_project_soc(const VectorXd& s, int steps, double radius)
{
    REQUIRE((s.size() == 2 || s.size() == 3));
    VectorXd best = VectorXd::Zero(s.size());
    double best_d = (s - best).norm();
    for (int it = 0; it <= steps; it++)
    {
        const double t = radius * it / steps;
        if (s.size() == 2)
        {
            for (int ix = -steps; ix <= steps; ix++)
            {
                const double x = t * ix / steps;
                VectorXd p = vec({t, x});
                if ((s - p).norm() < best_d)
                {
                    best_d = (s - p).norm();
                    best = p;
                }
            }
        }
        else
        {
            for (int ia = 0; ia < 2 * steps; ia++)
            {
                const double ang = 2.0 * M_PI * ia / (2 * steps);
                for (int ir = 0; ir <= steps; ir++)
                {
                    const double r = t * ir / steps;
                    VectorXd p = vec({t, r * std::cos(ang), r * std::sin(ang)});
                    if ((s - p).norm() < best_d)
                    {
                        best_d = (s - p).norm();
                        best = p;
                    }
                }
            }
        }
    }
    return best;
}

VectorXd random_cone_member(data::Rng& rng, const conic::Cone& cone)
{
    VectorXd v(cone.dim);
    switch (cone.kind)
    {
    case conic::ConeKind::Zero:
        v.setZero();
        break;
    case conic::ConeKind::NonNegative:
        for (int i = 0; i < cone.dim; i++)
        {
            v(i) = 3.0 * rng.uniform();
        }
        break;
    case conic::ConeKind::SecondOrder:
    {
        for (int i = 1; i < cone.dim; i++)
        {
            v(i) = rng.normal();
        }
        v(0) = v.tail(cone.dim - 1).norm() + 3.0 * rng.uniform();
        break;
    }
    }
    return v;
}

}  // namespace

TEST_CASE("program validation")
{
    conic::Program p;
    p.num_vars = 3;
    p.cost = VectorXd::Zero(3);
    p.A.resize(2, 3);
    p.rhs = VectorXd::Zero(2);
    p.cones = {nonneg(2)};
    CHECK(conic::validate(p).empty());

    SECTION("cone/row mismatch")
    {
        p.cones = {nonneg(3)};
        const auto errors = conic::validate(p);
        REQUIRE_FALSE(errors.empty());
        CHECK(errors.front().find("cone/row mismatch") != std::string::npos);
    }
    SECTION("one-dimensional SOC rejected")
    {
        p.cones = {nonneg(1), soc(1)};
        const auto errors = conic::validate(p);
        REQUIRE_FALSE(errors.empty());
        CHECK(errors.front().find("SOC dim < 2") != std::string::npos);
    }
}

TEST_CASE("cone projections")
{
    CHECK(conic::project_onto_cone(vec({-1, 2}), nonneg(2)).isApprox(vec({0, 2})));
    CHECK(conic::project_onto_cone(vec({3, 1, 0}), soc(3)).isApprox(vec({3, 1, 0})));

    /* Interior SOC case against the closed form and against brute force. */
    const VectorXd s = vec({1, 2, 0});
    const VectorXd p = conic::project_onto_cone(s, soc(3));
    CHECK(p(0) == Approx(1.5).margin(1e-12));
    CHECK(p(1) == Approx(1.5).margin(1e-12));
    CHECK(p(2) == Approx(0.0).margin(1e-12));
    const VectorXd pg = grid_project_soc(s, 60, 4.0);
    CHECK((p - pg).norm() < 0.1);

    CHECK_THROWS_AS(conic::project_onto_cone(vec({1, 2}), soc(3)), std::invalid_argument);
}

TEST_CASE("cone distances")
{
    CHECK(conic::cone_distance(vec({1, 1}), nonneg(2)) == Approx(0.0).margin(1e-15));
    CHECK(conic::cone_distance(vec({0.3, 0}), zero(2)) == Approx(0.3));
    CHECK(conic::cone_distance(vec({0, 1}), soc(2)) == Approx(std::sqrt(0.5)).epsilon(1e-12));

    /* Brute-force oracle for the SOC distance. */
    const VectorXd pg = grid_project_soc(vec({0, 1}), 400, 2.0);
    CHECK((vec({0, 1}) - pg).norm() == Approx(std::sqrt(0.5)).margin(1e-2));
}

TEST_CASE("projection properties")
{
    data::Rng rng(7);
    const std::vector<conic::Cone> kinds = {zero(4), nonneg(4), soc(4)};
    for (const conic::Cone& cone : kinds)
    {
        for (int trial = 0; trial < 10000; trial++)
        {
            VectorXd s(cone.dim);
            for (int i = 0; i < cone.dim; i++)
            {
                s(i) = 4.0 * rng.normal();
            }
            const VectorXd p = conic::project_onto_cone(s, cone);
            /* Idempotence */
            REQUIRE((conic::project_onto_cone(p, cone) - p).norm() <= 1e-12);
        }
    }

    /* Optimality: no random member is closer than the projection. */
    for (const conic::Cone& cone : {nonneg(4), soc(4)})
    {
        for (int trial = 0; trial < 25; trial++)
        {
            VectorXd s(cone.dim);
            for (int i = 0; i < cone.dim; i++)
            {
                s(i) = 4.0 * rng.normal();
            }
            const double dist = conic::cone_distance(s, cone);
            for (int member = 0; member < 40; member++)
            {
                const VectorXd m = random_cone_member(rng, cone);
                REQUIRE(dist <= (s - m).norm() + 1e-12);
            }
        }
    }

    /* Moreau decomposition for the self-dual SOC: s = P_K(s) - P_K(-s). */
    for (int trial = 0; trial < 1000; trial++)
    {
        VectorXd s(5);
        for (int i = 0; i < 5; i++)
        {
            s(i) = 4.0 * rng.normal();
        }
        const VectorXd pk = conic::project_onto_cone(s, soc(5));
        const VectorXd pk_polar = conic::project_onto_cone(-s, soc(5));
        REQUIRE((s - (pk - pk_polar)).norm() <= 1e-10);
    }
}

TEST_CASE("builder emits rows matching stated expressions")
{
    conic::ProgramBuilder b;
    const auto x = b.add_vars("x", 2);
    b.add_objective(x[0], 1.0);
    b.add_nonneg(conic::LinExpr::var(x[0]) - conic::LinExpr(1.0));  // x0 - 1 >= 0
    b.add_zero(conic::LinExpr::var(x[1]) + conic::LinExpr(-2.0));   // x1 = 2
    b.add_soc({conic::LinExpr(3.0), conic::LinExpr::var(x[0]), conic::LinExpr::var(x[1])});

    const conic::Program p = b.build();
    REQUIRE(conic::validate(p).empty());
    CHECK(p.num_rows() == 5);

    /* Slack of each row at a chosen point equals the stated expression. */
    VectorXd zv = vec({1.5, 2.0});
    VectorXd slack = p.rhs - p.A * zv;
    CHECK(slack(0) == Approx(0.5));     // x0 - 1
    CHECK(slack(1) == Approx(0.0));     // x1 - 2
    CHECK(slack(2) == Approx(3.0));
    CHECK(slack(3) == Approx(1.5));
    CHECK(slack(4) == Approx(2.0));
}

TEST_CASE("program dump is stable")
{
    conic::ProgramBuilder b;
    const auto x = b.add_vars("x", 1);
    b.add_objective(x[0], 2.0);
    b.add_nonneg(conic::LinExpr::var(x[0]));
    const std::string text = conic::dump(b.build());
    CHECK(text ==
          "vars 1 rows 1 offset 0\n"
          "cones nonneg:1\n"
          "A 0 0 -1\n"
          "c 0 2\n");
}
