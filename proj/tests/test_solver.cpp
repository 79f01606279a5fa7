#include <catch2/catch_amalgamated.hpp>

#include "conic/builder.hpp"
#include "data/rng.hpp"
#include "solver/socp.hpp"

using namespace bho;
using Catch::Approx;
using Eigen::VectorXd;
using conic::LinExpr;

namespace {

void check_optimal_certificates(const conic::Program& p, const solver::Solution& sol)
{
    REQUIRE(sol.status == solver::Status::Optimal);
    const auto r = solver::kkt_residuals(p, sol);
    CHECK(r.primal <= 1e-8);
    CHECK(r.dual <= 1e-8);
    CHECK(r.gap <= 1e-8);
    CHECK(conic::cone_product_distance(sol.s, p.cones) <= 1e-7);
    CHECK(conic::dual_cone_product_distance(sol.y, p.cones) <= 1e-7);
}

}  // namespace

TEST_CASE("minimal nonnegative problem")
{
    conic::ProgramBuilder b;
    const auto z = b.add_vars("z", 1);
    b.add_objective(z[0], 1.0);
    b.add_nonneg(LinExpr::var(z[0]));
    const auto p = b.build();
    const auto sol = solver::solve(p);
    check_optimal_certificates(p, sol);
    CHECK(sol.z(0) == Approx(0.0).margin(1e-7));
    CHECK(sol.objective == Approx(0.0).margin(1e-7));
}

TEST_CASE("linear objective over the unit ball")
{
    conic::ProgramBuilder b;
    const auto z = b.add_vars("z", 2);
    const auto t = b.add_vars("t", 1);
    b.add_objective(z[0], 3.0);
    b.add_objective(z[1], 4.0);
    b.add_zero(LinExpr::var(t[0]) - LinExpr(1.0));
    b.add_soc({LinExpr::var(t[0]), LinExpr::var(z[0]), LinExpr::var(z[1])});
    const auto p = b.build();
    const auto sol = solver::solve(p);
    check_optimal_certificates(p, sol);

    /* Analytic minimizer of a linear function over the unit ball is -c/||c||. */
    CHECK(sol.objective == Approx(-5.0).margin(1e-6));
    CHECK(sol.z(0) == Approx(-0.6).margin(1e-6));
    CHECK(sol.z(1) == Approx(-0.8).margin(1e-6));

    /* Dense grid over the ball cannot beat it. */
    double best = 0.0;
    for (int i = -50; i <= 50; i++)
    {
        for (int j = -50; j <= 50; j++)
        {
            const double a = i / 50.0, bb = j / 50.0;
            if (a * a + bb * bb <= 1.0)
            {
                best = std::min(best, 3.0 * a + 4.0 * bb);
            }
        }
    }
    CHECK(sol.objective <= best + 1e-6);
}

TEST_CASE("objective constant on feasible set")
{
    conic::ProgramBuilder b;
    const auto z = b.add_vars("z", 2);
    b.add_objective(z[0], 1.0);
    b.add_objective(z[1], 1.0);
    b.add_zero(LinExpr::var(z[0]) + LinExpr::var(z[1]) - LinExpr(1.0));
    b.add_nonneg(LinExpr::var(z[0]));
    b.add_nonneg(LinExpr::var(z[1]));
    const auto p = b.build();
    const auto sol = solver::solve(p);
    check_optimal_certificates(p, sol);
    CHECK(sol.objective == Approx(1.0).margin(1e-7));
}

TEST_CASE("kkt residuals from analytic certificates")
{
    /* Unit-ball problem above: z* = (-0.6, -0.8, 1), s* known, y* known. */
    conic::ProgramBuilder b;
    const auto z = b.add_vars("z", 2);
    const auto t = b.add_vars("t", 1);
    b.add_objective(z[0], 3.0);
    b.add_objective(z[1], 4.0);
    b.add_zero(LinExpr::var(t[0]) - LinExpr(1.0));
    b.add_soc({LinExpr::var(t[0]), LinExpr::var(z[0]), LinExpr::var(z[1])});
    const auto p = b.build();

    solver::Solution sol;
    sol.z = VectorXd(3);
    sol.z << -0.6, -0.8, 1.0;
    sol.s = VectorXd(4);
    sol.s << 0.0, 1.0, -0.6, -0.8;
    /* Stationarity: A'y = -c with the SOC dual (5, 3, 4) and equality dual -5. */
    sol.y = VectorXd(4);
    sol.y << -5.0, 5.0, 3.0, 4.0;
    const auto r = solver::kkt_residuals(p, sol);
    CHECK(r.primal <= 1e-10);
    CHECK(r.dual <= 1e-10);
    CHECK(r.gap <= 1e-10);

    SECTION("trivial point exposes the dual residual formula")
    {
        solver::Solution triv;
        triv.z = VectorXd::Zero(3);
        triv.s = p.rhs;
        triv.y = VectorXd::Zero(4);
        const auto rt = solver::kkt_residuals(p, triv);
        CHECK(rt.dual == Approx(p.cost.norm() / (1.0 + p.cost.norm())));
        CHECK(rt.primal <= 1e-12);
    }

    SECTION("perturbing z grows the primal residual like ||A dz||")
    {
        for (double delta : {1e-4, 1e-2})
        {
            solver::Solution pert = sol;
            VectorXd dz = VectorXd::Zero(3);
            dz(0) = delta;
            pert.z += dz;
            const auto rp = solver::kkt_residuals(p, pert);
            const double expected = (p.A * dz).norm() / (1.0 + p.rhs.norm());
            CHECK(rp.primal == Approx(expected).epsilon(1e-6));
        }
    }
}

namespace {

conic::Program ridge_program(const VectorXd& target, double lam)
{
    /* min 1/2||x - target||^2 + lam/2 ||x||^2 via two epigraph variables */
    conic::ProgramBuilder b;
    const int n = static_cast<int>(target.size());
    const auto x = b.add_vars("x", n);
    const auto e1 = b.add_vars("fit", 1);
    const auto e2 = b.add_vars("reg", 1);
    std::vector<LinExpr> fit, reg;
    for (int i = 0; i < n; i++)
    {
        fit.push_back(LinExpr::var(x[i]) - LinExpr(target(i)));
        reg.push_back(LinExpr::var(x[i]));
    }
    b.add_half_sqnorm_epigraph(fit, LinExpr::var(e1[0]));
    b.add_half_sqnorm_epigraph(reg, LinExpr::var(e2[0]));
    b.add_objective(e1[0], 1.0);
    b.add_objective(e2[0], lam);
    return b.build();
}

}  // namespace

TEST_CASE("ridge oracle")
{
    data::Rng rng(3);
    VectorXd target(6);
    for (int i = 0; i < 6; i++)
    {
        target(i) = 2.0 * rng.normal();
    }
    const double lam = 0.7;
    const auto p = ridge_program(target, lam);
    /* Strongly convex oracles need a tight gap: argmin error scales like
     * sqrt(gap) on quadratics. */
    solver::Settings tight;
    tight.tol_gap = tight.tol_primal = tight.tol_dual = 1e-11;
    const auto sol = solver::solve(p, tight);
    check_optimal_certificates(p, sol);
    for (int i = 0; i < 6; i++)
    {
        CHECK(sol.z(i) == Approx(target(i) / (1.0 + lam)).margin(1e-6));
    }

    SECTION("argmin invariant to positive objective scaling")
    {
        conic::Program scaled = p;
        scaled.cost *= 37.5;
        const auto sol2 = solver::solve(scaled, tight);
        REQUIRE(sol2.status == solver::Status::Optimal);
        CHECK((sol2.z.head(6) - sol.z.head(6)).norm() <= 1e-6);
    }
}

TEST_CASE("soft-threshold oracle")
{
    /* min 1/2||x - b||^2 + lam ||x||_1 with split variables */
    VectorXd target(4);
    target << 2.0, -0.3, 0.05, -3.0;
    const double lam = 0.5;

    conic::ProgramBuilder b;
    const auto x = b.add_vars("x", 4);
    const auto up = b.add_vars("pos", 4);
    const auto un = b.add_vars("neg", 4);
    const auto e1 = b.add_vars("fit", 1);
    std::vector<LinExpr> fit;
    for (int i = 0; i < 4; i++)
    {
        fit.push_back(LinExpr::var(x[i]) - LinExpr(target(i)));
        b.add_zero(LinExpr::var(x[i]) - LinExpr::var(up[i]) + LinExpr::var(un[i]));
        b.add_nonneg(LinExpr::var(up[i]));
        b.add_nonneg(LinExpr::var(un[i]));
        b.add_objective(up[i], lam);
        b.add_objective(un[i], lam);
    }
    b.add_half_sqnorm_epigraph(fit, LinExpr::var(e1[0]));
    b.add_objective(e1[0], 1.0);

    const auto p = b.build();
    const auto sol = solver::solve(p);
    check_optimal_certificates(p, sol);
    for (int i = 0; i < 4; i++)
    {
        const double expect =
            (target(i) > 0 ? 1.0 : -1.0) * std::max(std::abs(target(i)) - lam, 0.0);
        CHECK(sol.z(i) == Approx(expect).margin(1e-6));
    }
}

TEST_CASE("random SOCPs against constructed optima")
{
    data::Rng rng(11);
    for (int instance = 0; instance < 20; instance++)
    {
        const int n = 3 + static_cast<int>(rng.uniform_int(5));
        const int n_eq = static_cast<int>(rng.uniform_int(3));
        const int n_lp = 2 + static_cast<int>(rng.uniform_int(4));
        const int soc_dim = 3 + static_cast<int>(rng.uniform_int(3));
        const int m = n_eq + n_lp + soc_dim;

        Eigen::MatrixXd A(m, n);
        for (int i = 0; i < m; i++)
        {
            for (int j = 0; j < n; j++)
            {
                A(i, j) = rng.normal();
            }
        }

        /* Build a primal/dual pair with per-cone complementarity, then read
         * off b and c so the optimum is known exactly. */
        VectorXd zstar(n);
        for (int j = 0; j < n; j++)
        {
            zstar(j) = rng.normal();
        }
        VectorXd sstar = VectorXd::Zero(m);
        VectorXd ystar = VectorXd::Zero(m);
        for (int i = 0; i < n_eq; i++)
        {
            ystar(i) = rng.normal();
        }
        for (int i = n_eq; i < n_eq + n_lp; i++)
        {
            if (rng.uniform() < 0.5)
            {
                sstar(i) = 0.5 + rng.uniform();
            }
            else
            {
                ystar(i) = 0.5 + rng.uniform();
            }
        }
        {
            const int at = n_eq + n_lp;
            if (rng.uniform() < 0.5)
            {
                /* slack interior, dual zero */
                for (int i = 1; i < soc_dim; i++)
                {
                    sstar(at + i) = rng.normal();
                }
                sstar(at) = sstar.segment(at + 1, soc_dim - 1).norm() + 0.5 + rng.uniform();
            }
            else
            {
                for (int i = 1; i < soc_dim; i++)
                {
                    ystar(at + i) = rng.normal();
                }
                ystar(at) = ystar.segment(at + 1, soc_dim - 1).norm() + 0.5 + rng.uniform();
            }
        }

        conic::Program p;
        p.num_vars = n;
        p.A = A.sparseView();
        p.rhs = A * zstar + sstar;
        p.cost = -(A.transpose() * ystar);
        p.cones = {{conic::ConeKind::Zero, n_eq},
                   {conic::ConeKind::NonNegative, n_lp},
                   {conic::ConeKind::SecondOrder, soc_dim}};
        if (n_eq == 0)
        {
            p.cones.erase(p.cones.begin());
        }

        const double opt = p.cost.dot(zstar);
        const auto sol = solver::solve(p);
        INFO("instance " << instance);
        check_optimal_certificates(p, sol);
        CHECK(sol.objective == Approx(opt).margin(1e-6 * (1.0 + std::abs(opt))));
    }
}

TEST_CASE("iteration budget surfaces as MaxIterReached")
{
    const auto p = ridge_program(VectorXd::Ones(5), 0.1);
    solver::Settings settings;
    settings.max_iter = 2;
    const auto sol = solver::solve(p, settings);
    CHECK(sol.status == solver::Status::MaxIterReached);
    CHECK(sol.iterations <= 2);
}

TEST_CASE("primal infeasibility is detected")
{
    conic::ProgramBuilder b;
    const auto z = b.add_vars("z", 1);
    b.add_objective(z[0], 1.0);
    b.add_nonneg(LinExpr::var(z[0]) - LinExpr(1.0));   // z >= 1
    b.add_nonneg(LinExpr(-1.0) - LinExpr::var(z[0]));  // z <= -1
    const auto sol = solver::solve(b.build());
    CHECK(sol.status == solver::Status::PrimalInfeasible);
}

TEST_CASE("unbounded problem is detected as dual infeasible")
{
    conic::ProgramBuilder b;
    const auto z = b.add_vars("z", 1);
    b.add_objective(z[0], -1.0);
    b.add_nonneg(LinExpr::var(z[0]));  // min -z, z >= 0
    const auto sol = solver::solve(b.build());
    CHECK(sol.status == solver::Status::DualInfeasible);
}

TEST_CASE("equality-only program")
{
    conic::ProgramBuilder b;
    const auto z = b.add_vars("z", 2);
    b.add_objective(z[0], 1.0);
    b.add_objective(z[1], 1.0);
    b.add_zero(LinExpr::var(z[0]) + LinExpr::var(z[1]) - LinExpr(1.0));
    const auto p = b.build();
    const auto sol = solver::solve(p);
    REQUIRE(sol.status == solver::Status::Optimal);
    CHECK(sol.objective == Approx(1.0).margin(1e-6));
}
