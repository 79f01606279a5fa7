#include <stdexcept>

#include <fmt/format.h>

#include "models/model.hpp"
#include "reform/assemble.hpp"

namespace bho::models {

using conic::LinExpr;
using conic::ProgramBuilder;
using conic::VarBlock;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

/// Rows tying the loss conjugate argument to its representation:
/// A' w + sum_i rho_i = 0, with group atoms scattered into their support.
void add_conjugate_link_rows(ProgramBuilder& builder, const Model& model,
                             const VarBlock& w, const std::vector<VarBlock>& rho)
{
    const MatrixXd& a = model.reg().a_tr;
    const int p = static_cast<int>(a.cols());
    std::vector<LinExpr> rows(p);
    for (int j = 0; j < p; j++)
    {
        for (int i = 0; i < a.rows(); i++)
        {
            if (a(i, j) != 0.0)
            {
                rows[j].add(w[i], a(i, j));
            }
        }
    }
    for (size_t i = 0; i < rho.size(); i++)
    {
        const auto& support = model.regularizers()[i].support();
        for (int k = 0; k < rho[i].dim; k++)
        {
            rows[support[k]].add(rho[i][k], 1.0);
        }
    }
    for (int j = 0; j < p; j++)
    {
        builder.add_zero(rows[j]);
    }
}

std::vector<LinExpr> affine_rows(const MatrixXd& a, const VectorXd& b, const VarBlock& x)
{
    std::vector<LinExpr> rows;
    rows.reserve(a.rows());
    for (int i = 0; i < a.rows(); i++)
    {
        LinExpr e(-b(i));
        for (int j = 0; j < a.cols(); j++)
        {
            if (a(i, j) != 0.0)
            {
                e.add(x[j], a(i, j));
            }
        }
        rows.push_back(e);
    }
    return rows;
}

std::vector<LinExpr> shifted_vars(const VarBlock& block, const VectorXd& shift)
{
    std::vector<LinExpr> rows;
    rows.reserve(block.dim);
    for (int i = 0; i < block.dim; i++)
    {
        rows.push_back(LinExpr::var(block[i]) + LinExpr(shift(i)));
    }
    return rows;
}

}  // namespace

LowerLevelResult regression_ll_solve(const Model& model, const VectorXd& hyper,
                                     const solver::Settings& settings, bool want_duals)
{
    const auto& atoms = model.regularizers();
    const int tau = static_cast<int>(atoms.size());
    const int p = model.x_dim();

    /* Primal training problem: min l(x) + sum_i lambda_i P_i(x). Terms with
     * lambda_i = 0 impose nothing and are dropped. */
    ProgramBuilder primal;
    const auto x = primal.add_vars("x", p);
    const auto fit = primal.add_vars("fit", 1);
    model.loss().epigraph_rows(primal, "loss", x, LinExpr::var(fit[0]));
    primal.add_objective(fit[0], 1.0);
    for (int i = 0; i < tau; i++)
    {
        if (hyper(i) > 0.0)
        {
            const auto ri = primal.add_vars(fmt::format("pr{}", i), 1);
            atoms[i].epigraph_rows(primal, fmt::format("p{}", i), x, LinExpr::var(ri[0]));
            primal.add_objective(ri[0], hyper(i));
        }
    }
    const auto built = primal.build_with_layout();
    const auto sol = solver::solve(built.program, settings);

    LowerLevelResult out;
    out.status = sol.status;
    if (!certificate_grade(sol))
    {
        return out;
    }
    out.status = solver::Status::Optimal;
    out.x = built.slice(sol.z, "x");

    out.point.x = out.x;
    out.point.lambda = hyper;
    out.point.r.resize(tau);
    for (int i = 0; i < tau; i++)
    {
        out.point.r(i) = atoms[i].eval(out.x);
    }
    if (!want_duals)
    {
        return out;
    }

    /* Dual side: min l*(A-transposed representation) + sum_i lambda_i
     * P_i*(rho_i / lambda_i); its optimal value is minus the primal one, and
     * its minimizers are the conjugate certificates. */
    ProgramBuilder dual;
    const int n_tr = static_cast<int>(model.reg().b_tr.size());
    const auto w = dual.add_vars("w", n_tr);
    const auto ew = dual.add_vars("conj", 1);
    /* l*(A' w) = b'w + 1/2||w||^2, kept in this centered form so the pieces
     * stay at the scale of the residual rather than ||b||^2. */
    dual.add_half_sqnorm_epigraph(shifted_vars(w, Eigen::VectorXd::Zero(n_tr)),
                                  LinExpr::var(ew[0]));
    dual.add_objective(ew[0], 1.0);
    for (int i = 0; i < n_tr; i++)
    {
        dual.add_objective(w[i], model.reg().b_tr(i));
    }

    std::vector<VarBlock> rho;
    for (int i = 0; i < tau; i++)
    {
        rho.push_back(
            dual.add_vars(fmt::format("rho{}", i),
                          static_cast<int>(atoms[i].support().size())));
        const auto si = dual.add_vars(fmt::format("s{}", i), 1);
        atoms[i].perspective_conjugate_rows(dual, fmt::format("pc{}", i), rho[i],
                                            LinExpr(hyper(i)), LinExpr::var(si[0]));
        dual.add_objective(si[0], 1.0);
    }
    add_conjugate_link_rows(dual, model, w, rho);

    const auto dual_built = dual.build_with_layout();
    const auto dual_sol = solver::solve(dual_built.program, settings);
    if (!certificate_grade(dual_sol))
    {
        out.status = dual_sol.status;
        return out;
    }
    for (int i = 0; i < tau; i++)
    {
        out.point.rho.push_back(dual_built.slice(dual_sol.z, fmt::format("rho{}", i)));
    }
    out.point.aux["w"] = dual_built.slice(dual_sol.z, "w");
    VectorXd s(tau);
    for (int i = 0; i < tau; i++)
    {
        s(i) = dual_built.slice(dual_sol.z, fmt::format("s{}", i))(0);
    }
    out.point.aux["s"] = s;
    return out;
}

conic::BuiltProgram build_regression_subproblem(const Model& model,
                                                const reform::IteratePoint& anchor,
                                                double eps, double beta,
                                                reform::MajorizationPolicy policy)
{
    const auto& atoms = model.regularizers();
    const int tau = static_cast<int>(atoms.size());
    const int p = model.x_dim();
    const int n_tr = static_cast<int>(model.reg().b_tr.size());
    if (anchor.lambda.size() != tau || anchor.r.size() != tau)
    {
        throw std::invalid_argument("build_regression_subproblem: anchor shape mismatch");
    }

    ProgramBuilder b;
    const auto x = b.add_vars("x", p);
    const auto lambda = b.add_vars("lambda", tau);
    const auto r = b.add_vars("r", tau);
    std::vector<VarBlock> rho;
    for (int i = 0; i < tau; i++)
    {
        rho.push_back(b.add_vars(fmt::format("rho{}", i),
                                 static_cast<int>(atoms[i].support().size())));
    }
    const auto w = b.add_vars("w", n_tr);
    std::vector<VarBlock> s;
    for (int i = 0; i < tau; i++)
    {
        s.push_back(b.add_vars(fmt::format("s{}", i), 1));
    }
    const auto t = b.add_vars("t", 1);

    for (int i = 0; i < tau; i++)
    {
        b.add_nonneg(LinExpr::var(lambda[i]));
        atoms[i].epigraph_rows(b, fmt::format("p{}", i), x, LinExpr::var(r[i]));
        atoms[i].perspective_conjugate_rows(b, fmt::format("pc{}", i), rho[i],
                                            LinExpr::var(lambda[i]), LinExpr::var(s[i][0]));
    }
    add_conjugate_link_rows(b, model, w, rho);

    /* One cone hosts the whole relaxed certificate,
     *   1/2||A x - b||^2 + sum_i m_i(lambda_i, r_i) + 1/2||w||^2
     *     <= eps - b'w - S,
     * with S collecting the s_i and the affine parts of square-linearized
     * majorization terms. The loss conjugate appears in the centered form
     * b'w + 1/2||w||^2 so no ||b||^2-sized terms have to cancel. */
    const VectorXd& b_tr = model.reg().b_tr;
    LinExpr s_total;
    for (int i = 0; i < tau; i++)
    {
        s_total.add(s[i][0], 1.0);
    }
    for (int i = 0; i < n_tr; i++)
    {
        s_total.add(w[i], b_tr(i));
    }

    std::vector<LinExpr> cone;
    for (LinExpr& e : affine_rows(model.reg().a_tr, b_tr, x))
    {
        cone.push_back(std::move(e));
    }
    for (int i = 0; i < tau; i++)
    {
        const auto kind =
            reform::resolve_majorization(policy, anchor.lambda(i), anchor.r(i));
        if (kind == reform::MajorizationKind::CauchyQuadratic)
        {
            cone.push_back(
                LinExpr::var(r[i], std::sqrt(anchor.lambda(i) / anchor.r(i))));
            cone.push_back(
                LinExpr::var(lambda[i], std::sqrt(anchor.r(i) / anchor.lambda(i))));
        }
        else
        {
            const double d = anchor.lambda(i) - anchor.r(i);
            cone.push_back(LinExpr::var(lambda[i], 1.0 / std::sqrt(2.0)) +
                           LinExpr::var(r[i], 1.0 / std::sqrt(2.0)));
            s_total += LinExpr(0.25 * d * d);
            s_total.add(lambda[i], -0.5 * d);
            s_total.add(r[i], 0.5 * d);
        }
    }
    for (LinExpr& e : shifted_vars(w, Eigen::VectorXd::Zero(n_tr)))
    {
        cone.push_back(std::move(e));
    }
    b.name_row("gap", b.add_half_sqnorm_epigraph(cone, LinExpr(eps) - s_total));

    /* Upper-level epigraph and objective. */
    atoms::Atom ul = atoms::Atom::least_squares(model.reg().a_val, model.reg().b_val);
    ul.epigraph_rows(b, "ul", x, LinExpr::var(t[0]));
    b.add_objective(t[0], 1.0);

    if (beta > 0.0)
    {
        b.add_objective(beta * reform::add_proximal_epigraph(b, anchor));
    }
    return b.build_with_layout();
}

}  // namespace bho::models
