#include "models/model.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace bho::models {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* variant_name(Variant v)
{
    switch (v)
    {
    case Variant::ElasticNet:
        return "elastic-net";
    case Variant::SparseGroupLasso:
        return "sgl";
    case Variant::SvmCv:
        return "svm";
    }
    return "?";
}

Model Model::elastic_net(RegressionSplits data)
{
    const int p = static_cast<int>(data.a_tr.cols());
    Model m;
    m.variant_ = Variant::ElasticNet;
    m.regs_ = {atoms::Atom::l1(p), atoms::Atom::half_squared(p)};
    m.loss_ = {atoms::Atom::least_squares(data.a_tr, data.b_tr)};
    m.reg_ = std::move(data);
    return m;
}

Model Model::sparse_group_lasso(RegressionSplits data, std::vector<std::vector<int>> groups)
{
    const int p = static_cast<int>(data.a_tr.cols());
    std::vector<bool> seen(p, false);
    for (const auto& g : groups)
    {
        for (int idx : g)
        {
            if (idx < 0 || idx >= p || seen[idx])
            {
                throw std::invalid_argument("sparse_group_lasso: groups must partition "
                                            "the coordinates");
            }
            seen[idx] = true;
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
    {
        throw std::invalid_argument("sparse_group_lasso: groups must cover all coordinates");
    }

    Model m;
    m.variant_ = Variant::SparseGroupLasso;
    for (const auto& g : groups)
    {
        m.regs_.push_back(atoms::Atom::group_l2(p, g));
    }
    m.regs_.push_back(atoms::Atom::l1(p));
    m.loss_ = {atoms::Atom::least_squares(data.a_tr, data.b_tr)};
    m.groups_ = std::move(groups);
    m.reg_ = std::move(data);
    return m;
}

Model Model::svm_cv(SvmProblem data)
{
    if (data.labels.size() != data.a.rows() ||
        static_cast<int>(data.fold_of.size()) != data.a.rows())
    {
        throw std::invalid_argument("svm_cv: label/fold sizes do not match the sample matrix");
    }
    for (int i = 0; i < data.labels.size(); i++)
    {
        if (data.labels(i) != 1.0 && data.labels(i) != -1.0)
        {
            throw std::invalid_argument("svm_cv: labels must be in {-1, +1}");
        }
    }
    for (int f : data.fold_of)
    {
        if (f < 0 || f >= data.folds)
        {
            throw std::invalid_argument("svm_cv: fold index out of range");
        }
    }
    const int p = static_cast<int>(data.a.cols());
    if (data.w_lb.size() != p || data.w_ub.size() != p)
    {
        throw std::invalid_argument("svm_cv: weight-cap bounds must have one entry per "
                                    "feature");
    }
    if (data.w_lb.minCoeff() <= 0.0 || ((data.w_ub - data.w_lb).minCoeff() < 0.0))
    {
        throw std::invalid_argument("svm_cv: need 0 < w_lb <= w_ub");
    }

    Model m;
    m.variant_ = Variant::SvmCv;
    m.svm_ = std::move(data);
    return m;
}

int Model::tau() const
{
    switch (variant_)
    {
    case Variant::ElasticNet:
        return 2;
    case Variant::SparseGroupLasso:
        return static_cast<int>(regs_.size());
    case Variant::SvmCv:
        return 1 + static_cast<int>(svm_.a.cols());
    }
    return 0;
}

int Model::x_dim() const
{
    switch (variant_)
    {
    case Variant::ElasticNet:
    case Variant::SparseGroupLasso:
        return static_cast<int>(reg_.a_tr.cols());
    case Variant::SvmCv:
        return svm_.folds * (static_cast<int>(svm_.a.cols()) + 1);
    }
    return 0;
}

int Model::p_count() const
{
    return variant_ == Variant::SvmCv ? 1 : static_cast<int>(regs_.size());
}

double Model::p_value(int i, const VectorXd& x) const
{
    if (variant_ == Variant::SvmCv)
    {
        if (i != 0)
        {
            throw std::out_of_range("p_value: SVM has a single epigraph constraint");
        }
        double total = 0.0;
        for (int k = 0; k < svm_.folds; k++)
        {
            total += svm_fold_weight(k) * 0.5 * svm_w(x, k).squaredNorm();
        }
        return total;
    }
    return regs_.at(i).eval(x);
}

double Model::ul_objective(const VectorXd& x) const
{
    switch (variant_)
    {
    case Variant::ElasticNet:
    case Variant::SparseGroupLasso:
        return 0.5 * (reg_.a_val * x - reg_.b_val).squaredNorm();
    case Variant::SvmCv:
    {
        double total = 0.0;
        for (int k = 0; k < svm_.folds; k++)
        {
            const auto rows = svm_fold_rows(k, false);
            const VectorXd w = svm_w(x, k);
            const double c = svm_c(x, k);
            double fold = 0.0;
            for (int j : rows)
            {
                fold += std::max(1.0 - svm_.labels(j) * (svm_.a.row(j).dot(w) - c), 0.0);
            }
            total += fold / (static_cast<double>(svm_.folds) *
                             static_cast<double>(rows.size()));
        }
        return total;
    }
    }
    return 0.0;
}

double Model::val_error(const VectorXd& x) const
{
    if (variant_ == Variant::SvmCv)
    {
        return ul_objective(x);  // already the mean hinge over folds
    }
    return ul_objective(x) / static_cast<double>(reg_.b_val.size());
}

double Model::test_error(const VectorXd& x, const VectorXd& hyper,
                         const solver::Settings& settings) const
{
    switch (variant_)
    {
    case Variant::ElasticNet:
    case Variant::SparseGroupLasso:
        return 0.5 * (reg_.a_te * x - reg_.b_te).squaredNorm() /
               static_cast<double>(reg_.b_te.size());
    case Variant::SvmCv:
    {
        /* Refit on the whole CV set at the tuned hyperparameters, then score
         * the held-out samples. */
        const double lambda = hyper(0);
        const VectorXd w_cap = hyper.tail(hyper.size() - 1);
        const SvmFit fit = svm_train(svm_.a, svm_.labels, lambda, w_cap, settings);
        if (fit.status != solver::Status::Optimal)
        {
            throw std::runtime_error("test_error: SVM refit failed");
        }
        return hinge_loss(svm_.a_te, svm_.labels_te, fit.w, fit.c) /
               static_cast<double>(svm_.labels_te.size());
    }
    }
    return 0.0;
}

int Model::svm_fold_size(int k, bool train) const
{
    int n = 0;
    for (int f : svm_.fold_of)
    {
        if (train ? (f != k) : (f == k))
        {
            n++;
        }
    }
    return n;
}

std::vector<int> Model::svm_fold_rows(int k, bool train) const
{
    std::vector<int> rows;
    for (int i = 0; i < static_cast<int>(svm_.fold_of.size()); i++)
    {
        if (train ? (svm_.fold_of[i] != k) : (svm_.fold_of[i] == k))
        {
            rows.push_back(i);
        }
    }
    return rows;
}

double Model::svm_fold_weight(int k) const
{
    return 1.0 / (static_cast<double>(svm_.folds) *
                  static_cast<double>(svm_fold_size(k, true)));
}

VectorXd Model::svm_w(const VectorXd& x, int k) const
{
    const int p = static_cast<int>(svm_.a.cols());
    return x.segment(k * (p + 1), p);
}

double Model::svm_c(const VectorXd& x, int k) const
{
    const int p = static_cast<int>(svm_.a.cols());
    return x(k * (p + 1) + p);
}

double hinge_loss(const MatrixXd& a, const VectorXd& labels, const VectorXd& w, double c)
{
    double total = 0.0;
    for (int j = 0; j < a.rows(); j++)
    {
        total += std::max(1.0 - labels(j) * (a.row(j).dot(w) - c), 0.0);
    }
    return total;
}

bool certificate_grade(const solver::Solution& sol)
{
    /* Tight solves may stall just short of their target; anything at the
     * default 1e-8 residual level is accurate enough for certificates. */
    if (sol.status == solver::Status::Optimal)
    {
        return true;
    }
    if (sol.status != solver::Status::MaxIterReached)
    {
        return false;
    }
    return sol.residuals.primal <= 1e-8 && sol.residuals.dual <= 1e-8 &&
           sol.residuals.gap <= 1e-8;
}

LowerLevelResult ll_solve(const Model& model, const VectorXd& hyper,
                          const solver::Settings& settings, bool want_duals)
{
    if (hyper.size() != model.tau())
    {
        throw std::invalid_argument("ll_solve: hyperparameter vector has wrong length");
    }
    if (hyper.minCoeff() < 0.0)
    {
        throw std::invalid_argument("ll_solve: hyperparameters must be nonnegative");
    }
    /* Certificates must make the recomputed duality gap vanish to 1e-6;
     * plain 1e-8 solves leave too much slack on both sides of the pairing. */
    solver::Settings effective = settings;
    if (want_duals)
    {
        effective.tol_gap = std::min(effective.tol_gap, 1e-10);
        effective.tol_primal = std::min(effective.tol_primal, 1e-10);
        effective.tol_dual = std::min(effective.tol_dual, 1e-10);
    }
    if (model.variant() == Variant::SvmCv)
    {
        return svm_ll_solve(model, hyper, effective, want_duals);
    }
    return regression_ll_solve(model, hyper, effective, want_duals);
}

conic::BuiltProgram build_subproblem(const Model& model, const reform::IteratePoint& anchor,
                                     double eps, double beta,
                                     reform::MajorizationPolicy policy)
{
    if (eps <= 0.0 || beta < 0.0)
    {
        throw std::invalid_argument("build_subproblem: need eps > 0 and beta >= 0");
    }
    if (model.variant() == Variant::SvmCv)
    {
        return build_svm_subproblem(model, anchor, eps, beta, policy);
    }
    return build_regression_subproblem(model, anchor, eps, beta, policy);
}

reform::IteratePoint extract_point(const Model& model, const conic::BuiltProgram& built,
                                   const VectorXd& z)
{
    reform::IteratePoint point;
    point.x = built.slice(z, "x");
    point.lambda = built.slice(z, "lambda");
    point.r = built.slice(z, "r");
    for (int i = 0;; i++)
    {
        const std::string name = fmt::format("rho{}", i);
        if (built.blocks.count(name) == 0)
        {
            break;
        }
        point.rho.push_back(built.slice(z, name));
    }
    for (const auto& [name, block] : built.blocks)
    {
        if (name == "x" || name == "lambda" || name == "r" || name.rfind("rho", 0) == 0)
        {
            continue;
        }
        point.aux[name] = z.segment(block.start, block.dim);
    }
    return point;
}

}  // namespace bho::models
