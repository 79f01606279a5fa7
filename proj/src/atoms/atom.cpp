#include "atoms/atom.hpp"

#include <numeric>
#include <stdexcept>

#include <Eigen/QR>

namespace bho::atoms {

using conic::LinExpr;
using Eigen::VectorXd;

namespace {

std::vector<int> full_support(int dim)
{
    std::vector<int> s(dim);
    std::iota(s.begin(), s.end(), 0);
    return s;
}

void check_dim(const VectorXd& v, int dim, const char* where)
{
    if (v.size() != dim)
    {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch");
    }
}

}  // namespace

Atom Atom::l1(int dim)
{
    Atom a;
    a.kind_ = AtomKind::L1Norm;
    a.dim_ = dim;
    a.support_ = full_support(dim);
    return a;
}

Atom Atom::group_l2(int dim, std::vector<int> group)
{
    Atom a;
    a.kind_ = AtomKind::GroupL2Norm;
    a.dim_ = dim;
    for (int idx : group)
    {
        if (idx < 0 || idx >= dim)
        {
            throw std::invalid_argument("group_l2: index out of range");
        }
    }
    a.support_ = std::move(group);
    return a;
}

Atom Atom::half_squared(int dim)
{
    Atom a;
    a.kind_ = AtomKind::HalfSquaredL2;
    a.dim_ = dim;
    a.support_ = full_support(dim);
    return a;
}

Atom Atom::least_squares(Eigen::MatrixXd a_mat, VectorXd b)
{
    if (a_mat.rows() != b.size())
    {
        throw std::invalid_argument("least_squares: rows(A) != length(b)");
    }
    Atom a;
    a.kind_ = AtomKind::LeastSquares;
    a.dim_ = static_cast<int>(a_mat.cols());
    a.support_ = full_support(a.dim_);
    a.a_ = std::move(a_mat);
    a.b_ = std::move(b);
    return a;
}

double Atom::eval(const VectorXd& x) const
{
    check_dim(x, dim_, "Atom::eval");
    switch (kind_)
    {
    case AtomKind::L1Norm:
        return x.lpNorm<1>();
    case AtomKind::GroupL2Norm:
    {
        double sq = 0.0;
        for (int idx : support_)
        {
            sq += x(idx) * x(idx);
        }
        return std::sqrt(sq);
    }
    case AtomKind::HalfSquaredL2:
        return 0.5 * x.squaredNorm();
    case AtomKind::LeastSquares:
        return 0.5 * (a_ * x - b_).squaredNorm();
    }
    throw std::logic_error("unknown atom kind");
}

ConjugateValue Atom::conjugate(const VectorXd& y) const
{
    check_dim(y, dim_, "Atom::conjugate");
    ConjugateValue out;
    switch (kind_)
    {
    case AtomKind::L1Norm:
        if (y.lpNorm<Eigen::Infinity>() <= 1.0 + kDomainTol)
        {
            out.value = 0.0;
            out.finite = true;
        }
        return out;
    case AtomKind::GroupL2Norm:
    {
        double in_sq = 0.0, off = 0.0;
        std::vector<bool> in_group(dim_, false);
        for (int idx : support_)
        {
            in_group[idx] = true;
            in_sq += y(idx) * y(idx);
        }
        for (int i = 0; i < dim_; i++)
        {
            if (!in_group[i])
            {
                off = std::max(off, std::abs(y(i)));
            }
        }
        if (std::sqrt(in_sq) <= 1.0 + kDomainTol && off <= kDomainTol)
        {
            out.value = 0.0;
            out.finite = true;
        }
        return out;
    }
    case AtomKind::HalfSquaredL2:
        out.value = 0.5 * y.squaredNorm();
        out.finite = true;
        return out;
    case AtomKind::LeastSquares:
    {
        /* l*(y) = 1/2||w + b||^2 - 1/2||b||^2 over A'w = y, minimized over
         * the representations of y; in the shifted variable u = w + b this
         * is the least-norm solution of A'u = y + A'b, which keeps the value
         * exact when A is rank deficient. */
        const VectorXd rhs = y + a_.transpose() * b_;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a_.transpose());
        const VectorXd u = cod.solve(rhs);
        const double res = (a_.transpose() * u - rhs).norm();
        if (res > kDomainTol * (1.0 + rhs.norm()))
        {
            return out;
        }
        /* Evaluate as b'w + 1/2||w||^2 rather than the difference of two
         * ||b||^2-sized squares, which cancels catastrophically. */
        const VectorXd w = u - b_;
        out.value = b_.dot(w) + 0.5 * w.squaredNorm();
        out.finite = true;
        out.certificate = w;
        return out;
    }
    }
    throw std::logic_error("unknown atom kind");
}

void Atom::epigraph_rows(conic::ProgramBuilder& builder, const std::string& name,
                         const conic::VarBlock& x_cols, const conic::LinExpr& r) const
{
    if (x_cols.dim != dim_)
    {
        throw std::invalid_argument("epigraph_rows: x block has wrong dimension");
    }
    switch (kind_)
    {
    case AtomKind::L1Norm:
    {
        /* x = u - v, u,v >= 0, sum(u + v) <= r */
        const auto pos = builder.add_vars(name + ".pos", dim_);
        const auto neg = builder.add_vars(name + ".neg", dim_);
        LinExpr total;
        for (int i = 0; i < dim_; i++)
        {
            builder.add_zero(LinExpr::var(x_cols[i]) - LinExpr::var(pos[i]) +
                             LinExpr::var(neg[i]));
            builder.add_nonneg(LinExpr::var(pos[i]));
            builder.add_nonneg(LinExpr::var(neg[i]));
            total.add(pos[i], 1.0).add(neg[i], 1.0);
        }
        builder.add_nonneg(r - total);
        return;
    }
    case AtomKind::GroupL2Norm:
    {
        std::vector<LinExpr> entries{r};
        for (int idx : support_)
        {
            entries.push_back(LinExpr::var(x_cols[idx]));
        }
        builder.add_soc(entries);
        return;
    }
    case AtomKind::HalfSquaredL2:
    {
        std::vector<LinExpr> vec;
        for (int i = 0; i < dim_; i++)
        {
            vec.push_back(LinExpr::var(x_cols[i]));
        }
        builder.add_half_sqnorm_epigraph(vec, r);
        return;
    }
    case AtomKind::LeastSquares:
    {
        std::vector<LinExpr> vec;
        for (int row = 0; row < a_.rows(); row++)
        {
            LinExpr e(-b_(row));
            for (int col = 0; col < dim_; col++)
            {
                if (a_(row, col) != 0.0)
                {
                    e.add(x_cols[col], a_(row, col));
                }
            }
            vec.push_back(e);
        }
        builder.add_half_sqnorm_epigraph(vec, r);
        return;
    }
    }
}

void Atom::perspective_conjugate_rows(conic::ProgramBuilder& builder, const std::string& name,
                                      const conic::VarBlock& rho_cols,
                                      const conic::LinExpr& lambda,
                                      const conic::LinExpr& s) const
{
    (void)name;
    if (rho_cols.dim != static_cast<int>(support_.size()))
    {
        throw std::invalid_argument("perspective_conjugate_rows: rho block has wrong dimension");
    }
    switch (kind_)
    {
    case AtomKind::L1Norm:
        /* ||rho||_inf <= lambda as 2*dim nonnegative rows; s pinned to 0.
         * At lambda = 0 these force rho = 0. */
        for (int i = 0; i < rho_cols.dim; i++)
        {
            builder.add_nonneg(lambda - LinExpr::var(rho_cols[i]));
            builder.add_nonneg(lambda + LinExpr::var(rho_cols[i]));
        }
        builder.add_zero(s);
        return;
    case AtomKind::GroupL2Norm:
    {
        std::vector<LinExpr> entries{lambda};
        for (int i = 0; i < rho_cols.dim; i++)
        {
            entries.push_back(LinExpr::var(rho_cols[i]));
        }
        builder.add_soc(entries);
        builder.add_zero(s);
        return;
    }
    case AtomKind::HalfSquaredL2:
    {
        /* ||(sqrt(2) rho, s - lambda)|| <= s + lambda */
        std::vector<LinExpr> entries{s + lambda};
        for (int i = 0; i < rho_cols.dim; i++)
        {
            entries.push_back(LinExpr::var(rho_cols[i], std::sqrt(2.0)));
        }
        entries.push_back(s - lambda);
        builder.add_soc(entries);
        return;
    }
    case AtomKind::LeastSquares:
        throw std::logic_error("perspective_conjugate_rows: loss atoms are handled via "
                               "their conjugate epigraph");
    }
}

}  // namespace bho::atoms
