#include "reform/assemble.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace bho::reform {

using atoms::Atom;
using atoms::AtomKind;
using conic::LinExpr;
using conic::ProgramBuilder;
using conic::VarBlock;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// lambda P*(rho/lambda) for a regularizer atom, with the 0 P*(rho/0)
/// convention: 0 if rho = 0 and +inf otherwise.
double perspective_conjugate_value(const Atom& atom, const VectorXd& rho, double lambda)
{
    const double tol = atoms::kDomainTol * (1.0 + std::abs(lambda));
    switch (atom.kind())
    {
    case AtomKind::L1Norm:
        return rho.lpNorm<Eigen::Infinity>() <= lambda + tol ? 0.0 : kInf;
    case AtomKind::GroupL2Norm:
        return rho.norm() <= lambda + tol ? 0.0 : kInf;
    case AtomKind::HalfSquaredL2:
        if (lambda <= 0.0)
        {
            return rho.norm() <= tol ? 0.0 : kInf;
        }
        return 0.5 * rho.squaredNorm() / lambda;
    case AtomKind::LeastSquares:
        break;
    }
    throw std::logic_error("perspective_conjugate_value: unsupported atom");
}

double regression_gap(const models::Model& model, const IteratePoint& z)
{
    const auto& atoms_list = model.regularizers();
    const int tau = static_cast<int>(atoms_list.size());
    if (z.lambda.size() != tau || z.r.size() != tau ||
        static_cast<int>(z.rho.size()) != tau)
    {
        throw std::invalid_argument("duality_gap_value: iterate shape mismatch");
    }

    double value = model.loss().eval(z.x);

    VectorXd rho_sum = VectorXd::Zero(model.x_dim());
    for (int i = 0; i < tau; i++)
    {
        const auto& support = atoms_list[i].support();
        if (z.rho[i].size() != static_cast<long>(support.size()))
        {
            throw std::invalid_argument("duality_gap_value: rho block size mismatch");
        }
        for (size_t k = 0; k < support.size(); k++)
        {
            rho_sum(support[k]) += z.rho[i](k);
        }
        const double term =
            perspective_conjugate_value(atoms_list[i], z.rho[i], z.lambda(i));
        if (!std::isfinite(term))
        {
            return kInf;
        }
        value += term + z.lambda(i) * z.r(i);
    }

    const auto conj = model.loss().conjugate(-rho_sum);
    if (!conj.finite)
    {
        return kInf;
    }
    return value + conj.value;
}

double svm_gap(const models::Model& model, const IteratePoint& z)
{
    const auto& svm = model.svm();
    const int p = static_cast<int>(svm.a.cols());
    const int folds = svm.folds;
    if (z.lambda.size() != 1 + p || z.r.size() != 1 + p ||
        static_cast<int>(z.rho.size()) != folds)
    {
        throw std::invalid_argument("duality_gap_value: iterate shape mismatch");
    }
    const double lambda = z.lambda(0);
    const VectorXd w_cap = z.lambda.tail(p);

    double value = z.lambda(0) * z.r(0) + w_cap.dot(z.r.tail(p));
    VectorXd alpha_total = VectorXd::Zero(p);

    for (int k = 0; k < folds; k++)
    {
        const double weight = model.svm_fold_weight(k);
        const VectorXd w = model.svm_w(z.x, k);
        const double c = model.svm_c(z.x, k);
        const auto rows = model.svm_fold_rows(k, true);

        double fold_hinge = 0.0;
        for (int j : rows)
        {
            fold_hinge += std::max(1.0 - svm.labels(j) * (svm.a.row(j).dot(w) - c), 0.0);
        }

        const VectorXd& rho = z.rho[k];
        double s_true;
        if (lambda <= 0.0)
        {
            if (rho.norm() > atoms::kDomainTol)
            {
                return kInf;
            }
            s_true = 0.0;
        }
        else
        {
            s_true = 0.5 * rho.squaredNorm() / lambda;
        }

        /* The structural conjugate's domain: the duals stored in aux must
         * satisfy the linear system tying them to rho. */
        const auto v_it = z.aux.find(fmt::format("v{}", k));
        const auto a1_it = z.aux.find(fmt::format("alpha1_{}", k));
        const auto a2_it = z.aux.find(fmt::format("alpha2_{}", k));
        if (v_it == z.aux.end() || a1_it == z.aux.end() || a2_it == z.aux.end())
        {
            throw std::invalid_argument("duality_gap_value: SVM iterate lacks dual aux");
        }
        const VectorXd& v = v_it->second;
        const VectorXd& a1 = a1_it->second;
        const VectorXd& a2 = a2_it->second;
        const int m = static_cast<int>(rows.size());
        if (v.size() != m || a1.size() != p || a2.size() != p)
        {
            throw std::invalid_argument("duality_gap_value: SVM dual aux shape mismatch");
        }

        const double tol = atoms::kDomainTol;
        VectorXd link = -rho + a2 - a1;
        double bias_link = 0.0;
        for (int idx = 0; idx < m; idx++)
        {
            const int j = rows[idx];
            link += svm.labels(j) * v(idx) * svm.a.row(j).transpose();
            bias_link += svm.labels(j) * v(idx);
        }
        const double scale = 1.0 + rho.norm() + v.lpNorm<1>();
        if (link.lpNorm<Eigen::Infinity>() > tol * scale ||
            std::abs(bias_link) > tol * scale || v.minCoeff() < -tol ||
            v.maxCoeff() > 1.0 + tol || a1.minCoeff() < -tol || a2.minCoeff() < -tol)
        {
            return kInf;
        }
        alpha_total += weight * (a1 + a2);
        value += weight * (fold_hinge + s_true - v.sum());
    }

    /* r2 must be the fold-weighted sum of the box multipliers. */
    if ((alpha_total - z.r.tail(p)).lpNorm<Eigen::Infinity>() >
        atoms::kDomainTol * (1.0 + alpha_total.lpNorm<Eigen::Infinity>()))
    {
        return kInf;
    }
    return value;
}

}  // namespace

double duality_gap_value(const models::Model& model, const IteratePoint& z)
{
    if (z.lambda.minCoeff() < 0.0)
    {
        throw std::invalid_argument("duality_gap_value: lambda must be nonnegative");
    }
    if (model.variant() == models::Variant::SvmCv)
    {
        return svm_gap(model, z);
    }
    return regression_gap(model, z);
}

Eigen::VectorXd p_activities(const models::Model& model, const IteratePoint& z)
{
    VectorXd out(model.p_count());
    for (int i = 0; i < model.p_count(); i++)
    {
        out(i) = model.p_value(i, z.x) - z.r(i);
    }
    return out;
}

LinExpr add_proximal_epigraph(ProgramBuilder& builder, const IteratePoint& anchor)
{
    const auto pi = builder.add_vars("prox", 1);
    std::vector<LinExpr> diffs;
    auto add_block = [&](const std::string& name, const VectorXd& ref) {
        const VarBlock& block = builder.block(name);
        if (block.dim != ref.size())
        {
            throw std::invalid_argument("add_proximal_epigraph: anchor block mismatch");
        }
        for (int i = 0; i < block.dim; i++)
        {
            diffs.push_back(LinExpr::var(block[i]) - LinExpr(ref(i)));
        }
    };
    add_block("x", anchor.x);
    add_block("lambda", anchor.lambda);
    add_block("r", anchor.r);
    for (size_t i = 0; i < anchor.rho.size(); i++)
    {
        add_block(fmt::format("rho{}", i), anchor.rho[i]);
    }
    builder.add_half_sqnorm_epigraph(diffs, LinExpr::var(pi[0]));
    return LinExpr::var(pi[0]);
}

conic::BuiltProgram assemble_subproblem(const models::Model& model,
                                        const IteratePoint& anchor, double eps, double beta,
                                        MajorizationPolicy policy)
{
    if (eps <= 0.0 || beta < 0.0)
    {
        throw std::invalid_argument("assemble_subproblem: need eps > 0 and beta >= 0");
    }
    if (model.variant() == models::Variant::SvmCv)
    {
        /* The cross-validated SVM has no atom decomposition; its structural
         * builder is the conic form. */
        return models::build_svm_subproblem(model, anchor, eps, beta, policy);
    }

    const auto& atoms_list = model.regularizers();
    const int tau = static_cast<int>(atoms_list.size());
    const int p = model.x_dim();
    const int n_tr = static_cast<int>(model.reg().b_tr.size());
    if (anchor.lambda.size() != tau || anchor.r.size() != tau)
    {
        throw std::invalid_argument("assemble_subproblem: anchor shape mismatch");
    }

    ProgramBuilder b;
    const auto x = b.add_vars("x", p);
    const auto lambda = b.add_vars("lambda", tau);
    const auto r = b.add_vars("r", tau);
    std::vector<VarBlock> rho;
    for (int i = 0; i < tau; i++)
    {
        rho.push_back(b.add_vars(fmt::format("rho{}", i),
                                 static_cast<int>(atoms_list[i].support().size())));
    }
    const auto w = b.add_vars("w", n_tr);
    std::vector<VarBlock> s;
    for (int i = 0; i < tau; i++)
    {
        s.push_back(b.add_vars(fmt::format("s{}", i), 1));
    }
    const auto fit = b.add_vars("fit", 1);
    const auto conj = b.add_vars("conj", 1);
    const auto t = b.add_vars("t", 1);

    for (int i = 0; i < tau; i++)
    {
        b.add_nonneg(LinExpr::var(lambda[i]));
        atoms_list[i].epigraph_rows(b, fmt::format("p{}", i), x, LinExpr::var(r[i]));
        atoms_list[i].perspective_conjugate_rows(b, fmt::format("pc{}", i), rho[i],
                                                 LinExpr::var(lambda[i]),
                                                 LinExpr::var(s[i][0]));
    }

    /* Loss value and conjugate epigraphs; the conjugate is hosted in the
     * centered form b'w + 1/2||w||^2. */
    model.loss().epigraph_rows(b, "loss", x, LinExpr::var(fit[0]));
    {
        std::vector<LinExpr> plain;
        for (int i = 0; i < n_tr; i++)
        {
            plain.push_back(LinExpr::var(w[i]));
        }
        b.add_half_sqnorm_epigraph(plain, LinExpr::var(conj[0]));
    }
    {
        /* A' w + sum_i rho_i = 0 */
        const Eigen::MatrixXd& a = model.reg().a_tr;
        std::vector<LinExpr> rows(p);
        for (int j = 0; j < p; j++)
        {
            for (int i = 0; i < n_tr; i++)
            {
                if (a(i, j) != 0.0)
                {
                    rows[j].add(w[i], a(i, j));
                }
            }
        }
        for (int i = 0; i < tau; i++)
        {
            const auto& support = atoms_list[i].support();
            for (int k = 0; k < rho[i].dim; k++)
            {
                rows[support[k]].add(rho[i][k], 1.0);
            }
        }
        for (int j = 0; j < p; j++)
        {
            b.add_zero(rows[j]);
        }
    }

    /* Majorized bilinear terms, then the relaxed certificate row itself. */
    LinExpr certificate = LinExpr::var(fit[0]) + LinExpr::var(conj[0]);
    for (int i = 0; i < n_tr; i++)
    {
        certificate.add(w[i], model.reg().b_tr(i));
    }
    for (int i = 0; i < tau; i++)
    {
        certificate.add(s[i][0], 1.0);
        const auto kind = resolve_majorization(policy, anchor.lambda(i), anchor.r(i));
        certificate += majorization_bound_rows(b, fmt::format("m{}", i), lambda[i], r[i],
                                               anchor.lambda(i), anchor.r(i), kind);
    }
    b.name_row("gap", b.add_nonneg(LinExpr(eps) - certificate));

    atoms::Atom ul = atoms::Atom::least_squares(model.reg().a_val, model.reg().b_val);
    ul.epigraph_rows(b, "ul", x, LinExpr::var(t[0]));
    b.add_objective(t[0], 1.0);
    if (beta > 0.0)
    {
        b.add_objective(beta * add_proximal_epigraph(b, anchor));
    }
    return b.build_with_layout();
}

}  // namespace bho::reform
