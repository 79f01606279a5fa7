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

SvmFit svm_train(const MatrixXd& a, const VectorXd& labels, double lambda,
                 const VectorXd& w_cap, const solver::Settings& settings)
{
    const int m = static_cast<int>(a.rows());
    const int p = static_cast<int>(a.cols());

    ProgramBuilder b;
    const auto w = b.add_vars("w", p);
    const auto c = b.add_vars("c", 1);
    const auto u = b.add_vars("u", m);
    const auto e = b.add_vars("e", 1);

    for (int j = 0; j < m; j++)
    {
        /* u_j >= 1 - b_j (a_j' w - c), u_j >= 0 */
        LinExpr margin(-1.0);
        margin.add(u[j], 1.0);
        for (int l = 0; l < p; l++)
        {
            if (a(j, l) != 0.0)
            {
                margin.add(w[l], labels(j) * a(j, l));
            }
        }
        margin.add(c[0], -labels(j));
        b.add_nonneg(margin);
        b.add_nonneg(LinExpr::var(u[j]));
        b.add_objective(u[j], 1.0);
    }
    {
        std::vector<LinExpr> vec;
        for (int l = 0; l < p; l++)
        {
            vec.push_back(LinExpr::var(w[l]));
            b.add_nonneg(LinExpr(w_cap(l)) - LinExpr::var(w[l]));
            b.add_nonneg(LinExpr::var(w[l]) + LinExpr(w_cap(l)));
        }
        b.add_half_sqnorm_epigraph(vec, LinExpr::var(e[0]));
        b.add_objective(e[0], lambda);
    }

    const auto built = b.build_with_layout();
    const auto sol = solver::solve(built.program, settings);
    SvmFit fit;
    fit.status = certificate_grade(sol) ? solver::Status::Optimal : sol.status;
    if (fit.status == solver::Status::Optimal)
    {
        fit.w = built.slice(sol.z, "w");
        fit.c = built.slice(sol.z, "c")(0);
    }
    return fit;
}

namespace {

struct FoldDuals {
    solver::Status status;
    VectorXd rho, v, alpha1, alpha2;
    double s = 0.0;
    double objective = 0.0;  // equals minus the fold's training optimum
};

/* Dual of one fold's training problem at fixed (lambda, w_cap):
 *   min  -1'v + w_cap'(alpha1 + alpha2) + s
 *   s.t. sum_j b_j v_j a_j - rho + alpha2 - alpha1 = 0,  sum_j b_j v_j = 0,
 *        0 <= v <= 1, alpha >= 0, ||(sqrt2 rho, lambda - s)|| <= lambda + s.
 */
FoldDuals svm_fold_duals(const MatrixXd& a, const VectorXd& labels,
                         const std::vector<int>& rows, double lambda,
                         const VectorXd& w_cap, const solver::Settings& settings)
{
    const int m = static_cast<int>(rows.size());
    const int p = static_cast<int>(a.cols());

    ProgramBuilder b;
    const auto v = b.add_vars("v", m);
    const auto a1 = b.add_vars("alpha1", p);
    const auto a2 = b.add_vars("alpha2", p);
    const auto rho = b.add_vars("rho", p);
    const auto s = b.add_vars("s", 1);

    for (int l = 0; l < p; l++)
    {
        LinExpr link;
        for (int idx = 0; idx < m; idx++)
        {
            const int j = rows[idx];
            if (a(j, l) != 0.0)
            {
                link.add(v[idx], labels(j) * a(j, l));
            }
        }
        link.add(rho[l], -1.0).add(a2[l], 1.0).add(a1[l], -1.0);
        b.add_zero(link);
        b.add_nonneg(LinExpr::var(a1[l]));
        b.add_nonneg(LinExpr::var(a2[l]));
        b.add_objective(a1[l], w_cap(l));
        b.add_objective(a2[l], w_cap(l));
    }
    {
        LinExpr bias;
        for (int idx = 0; idx < m; idx++)
        {
            bias.add(v[idx], labels(rows[idx]));
        }
        b.add_zero(bias);
    }
    for (int idx = 0; idx < m; idx++)
    {
        b.add_nonneg(LinExpr::var(v[idx]));
        b.add_nonneg(LinExpr(1.0) - LinExpr::var(v[idx]));
        b.add_objective(v[idx], -1.0);
    }
    {
        std::vector<LinExpr> entries{LinExpr::var(s[0]) + LinExpr(lambda)};
        for (int l = 0; l < p; l++)
        {
            entries.push_back(LinExpr::var(rho[l], std::sqrt(2.0)));
        }
        entries.push_back(LinExpr(lambda) - LinExpr::var(s[0]));
        b.add_soc(entries);
        b.add_objective(s[0], 1.0);
    }

    const auto built = b.build_with_layout();
    const auto sol = solver::solve(built.program, settings);
    FoldDuals out;
    out.status = certificate_grade(sol) ? solver::Status::Optimal : sol.status;
    if (out.status == solver::Status::Optimal)
    {
        out.rho = built.slice(sol.z, "rho");
        out.v = built.slice(sol.z, "v");
        out.alpha1 = built.slice(sol.z, "alpha1");
        out.alpha2 = built.slice(sol.z, "alpha2");
        out.s = built.slice(sol.z, "s")(0);
        out.objective = sol.objective;
    }
    return out;
}

}  // namespace

LowerLevelResult svm_ll_solve(const Model& model, const VectorXd& hyper,
                              const solver::Settings& settings, bool want_duals)
{
    const auto& svm = model.svm();
    const int p = static_cast<int>(svm.a.cols());
    const double lambda = hyper(0);
    const VectorXd w_cap = hyper.tail(p);

    LowerLevelResult out;
    out.x = VectorXd::Zero(model.x_dim());
    out.point.lambda = hyper;
    out.point.r = VectorXd::Zero(1 + p);

    double r1 = 0.0;
    VectorXd r2 = VectorXd::Zero(p);
    VectorXd s_values(svm.folds);
    for (int k = 0; k < svm.folds; k++)
    {
        const auto rows = model.svm_fold_rows(k, true);
        MatrixXd a_fold(rows.size(), p);
        VectorXd b_fold(rows.size());
        for (size_t i = 0; i < rows.size(); i++)
        {
            a_fold.row(i) = svm.a.row(rows[i]);
            b_fold(i) = svm.labels(rows[i]);
        }
        const SvmFit fit = svm_train(a_fold, b_fold, lambda, w_cap, settings);
        if (fit.status != solver::Status::Optimal)
        {
            out.status = fit.status;
            return out;
        }
        out.x.segment(k * (p + 1), p) = fit.w;
        out.x(k * (p + 1) + p) = fit.c;
        r1 += model.svm_fold_weight(k) * 0.5 * fit.w.squaredNorm();

        if (want_duals)
        {
            const FoldDuals duals =
                svm_fold_duals(svm.a, svm.labels, rows, lambda, w_cap, settings);
            if (duals.status != solver::Status::Optimal)
            {
                out.status = duals.status;
                return out;
            }
            out.point.rho.push_back(duals.rho);
            out.point.aux[fmt::format("v{}", k)] = duals.v;
            out.point.aux[fmt::format("alpha1_{}", k)] = duals.alpha1;
            out.point.aux[fmt::format("alpha2_{}", k)] = duals.alpha2;
            s_values(k) = duals.s;
            r2 += model.svm_fold_weight(k) * (duals.alpha1 + duals.alpha2);
        }
    }
    out.point.x = out.x;
    out.point.r(0) = r1;
    out.point.r.tail(p) = r2;
    if (want_duals)
    {
        out.point.aux["s"] = s_values;
    }
    out.status = solver::Status::Optimal;
    return out;
}

conic::BuiltProgram build_svm_subproblem(const Model& model,
                                         const reform::IteratePoint& anchor, double eps,
                                         double beta, reform::MajorizationPolicy policy)
{
    const auto& svm = model.svm();
    const int p = static_cast<int>(svm.a.cols());
    const int folds = svm.folds;
    if (anchor.lambda.size() != 1 + p || anchor.r.size() != 1 + p)
    {
        throw std::invalid_argument("build_svm_subproblem: anchor shape mismatch");
    }

    ProgramBuilder b;
    const auto x = b.add_vars("x", folds * (p + 1));
    const auto lambda = b.add_vars("lambda", 1 + p);  // (lambda, w_cap)
    const auto r = b.add_vars("r", 1 + p);            // (r1, r2)
    std::vector<VarBlock> rho, v, a1, a2, s, utr, uval;
    for (int k = 0; k < folds; k++)
    {
        rho.push_back(b.add_vars(fmt::format("rho{}", k), p));
    }
    for (int k = 0; k < folds; k++)
    {
        const int m_tr = model.svm_fold_size(k, true);
        const int m_val = model.svm_fold_size(k, false);
        v.push_back(b.add_vars(fmt::format("v{}", k), m_tr));
        a1.push_back(b.add_vars(fmt::format("alpha1_{}", k), p));
        a2.push_back(b.add_vars(fmt::format("alpha2_{}", k), p));
        s.push_back(b.add_vars(fmt::format("s{}", k), 1));
        utr.push_back(b.add_vars(fmt::format("utr{}", k), m_tr));
        uval.push_back(b.add_vars(fmt::format("uval{}", k), m_val));
    }

    const int lam_col = lambda[0];
    b.add_nonneg(LinExpr::var(lam_col));
    for (int l = 0; l < p; l++)
    {
        /* bounds on the weight cap */
        b.add_nonneg(LinExpr::var(lambda[1 + l]) - LinExpr(svm.w_lb(l)));
        b.add_nonneg(LinExpr(svm.w_ub(l)) - LinExpr::var(lambda[1 + l]));
    }

    LinExpr certificate;
    std::vector<LinExpr> r1_vec;  // sqrt(weight) * w^k entries

    for (int k = 0; k < folds; k++)
    {
        const double weight = model.svm_fold_weight(k);
        const auto tr_rows = model.svm_fold_rows(k, true);
        const auto val_rows = model.svm_fold_rows(k, false);
        const int w_at = x[k * (p + 1)];
        const int c_at = x[k * (p + 1) + p];

        auto hinge_row = [&](int j, int u_col) {
            LinExpr margin(-1.0);
            margin.add(u_col, 1.0);
            for (int l = 0; l < p; l++)
            {
                if (svm.a(j, l) != 0.0)
                {
                    margin.add(w_at + l, svm.labels(j) * svm.a(j, l));
                }
            }
            margin.add(c_at, -svm.labels(j));
            b.add_nonneg(margin);
            b.add_nonneg(LinExpr::var(u_col));
        };
        for (size_t idx = 0; idx < tr_rows.size(); idx++)
        {
            hinge_row(tr_rows[idx], utr[k][static_cast<int>(idx)]);
            certificate.add(utr[k][static_cast<int>(idx)], weight);
        }
        for (size_t idx = 0; idx < val_rows.size(); idx++)
        {
            hinge_row(val_rows[idx], uval[k][static_cast<int>(idx)]);
            b.add_objective(uval[k][static_cast<int>(idx)],
                            1.0 / (static_cast<double>(folds) *
                                   static_cast<double>(val_rows.size())));
        }

        /* box -w_cap <= w^k <= w_cap */
        for (int l = 0; l < p; l++)
        {
            b.add_nonneg(LinExpr::var(lambda[1 + l]) - LinExpr::var(w_at + l));
            b.add_nonneg(LinExpr::var(w_at + l) + LinExpr::var(lambda[1 + l]));
            r1_vec.push_back(LinExpr::var(w_at + l, std::sqrt(weight)));
        }

        /* fold duals: link rows, box on v, alpha >= 0 */
        for (int l = 0; l < p; l++)
        {
            LinExpr link;
            for (size_t idx = 0; idx < tr_rows.size(); idx++)
            {
                const int j = tr_rows[idx];
                if (svm.a(j, l) != 0.0)
                {
                    link.add(v[k][static_cast<int>(idx)], svm.labels(j) * svm.a(j, l));
                }
            }
            link.add(rho[k][l], -1.0).add(a2[k][l], 1.0).add(a1[k][l], -1.0);
            b.add_zero(link);
            b.add_nonneg(LinExpr::var(a1[k][l]));
            b.add_nonneg(LinExpr::var(a2[k][l]));
        }
        {
            LinExpr bias;
            for (size_t idx = 0; idx < tr_rows.size(); idx++)
            {
                bias.add(v[k][static_cast<int>(idx)], svm.labels(tr_rows[idx]));
            }
            b.add_zero(bias);
        }
        for (int idx = 0; idx < v[k].dim; idx++)
        {
            b.add_nonneg(LinExpr::var(v[k][idx]));
            b.add_nonneg(LinExpr(1.0) - LinExpr::var(v[k][idx]));
            certificate.add(v[k][idx], -weight);
        }

        /* ||(sqrt2 rho, lambda - s)|| <= lambda + s */
        {
            std::vector<LinExpr> entries{LinExpr::var(s[k][0]) + LinExpr::var(lam_col)};
            for (int l = 0; l < p; l++)
            {
                entries.push_back(LinExpr::var(rho[k][l], std::sqrt(2.0)));
            }
            entries.push_back(LinExpr::var(lam_col) - LinExpr::var(s[k][0]));
            b.add_soc(entries);
            certificate.add(s[k][0], weight);
        }
    }

    /* r1 >= fold-weighted 1/2 sum ||w^k||^2, one cone over all folds. */
    b.add_half_sqnorm_epigraph(r1_vec, LinExpr::var(r[0]));

    /* r2 = fold-weighted sum of box multipliers. */
    for (int l = 0; l < p; l++)
    {
        LinExpr link = LinExpr::var(r[1 + l]);
        for (int k = 0; k < folds; k++)
        {
            link.add(a1[k][l], -model.svm_fold_weight(k));
            link.add(a2[k][l], -model.svm_fold_weight(k));
        }
        b.add_zero(link);
    }

    /* Majorized bilinear pairs (lambda, r1) and per-coordinate (w_cap, r2). */
    certificate += reform::majorization_bound_rows(
        b, "mlam", lam_col, r[0],
        anchor.lambda(0), anchor.r(0),
        reform::resolve_majorization(policy, anchor.lambda(0), anchor.r(0)));
    for (int l = 0; l < p; l++)
    {
        certificate += reform::majorization_bound_rows(
            b, fmt::format("mcap{}", l), lambda[1 + l], r[1 + l],
            anchor.lambda(1 + l), anchor.r(1 + l),
            reform::resolve_majorization(policy, anchor.lambda(1 + l), anchor.r(1 + l)));
    }

    b.name_row("gap", b.add_nonneg(LinExpr(eps) - certificate));

    if (beta > 0.0)
    {
        b.add_objective(beta * reform::add_proximal_epigraph(b, anchor));
    }
    return b.build_with_layout();
}

}  // namespace bho::models
