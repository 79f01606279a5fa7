#include "reform/majorize.hpp"

#include <cmath>
#include <stdexcept>

namespace bho::reform {

using conic::LinExpr;

MajorizationKind resolve_majorization(MajorizationPolicy policy, double xi_bar,
                                      double zeta_bar)
{
    switch (policy)
    {
    case MajorizationPolicy::CauchyQuadratic:
        return MajorizationKind::CauchyQuadratic;
    case MajorizationPolicy::SquareLinearized:
        return MajorizationKind::SquareLinearized;
    case MajorizationPolicy::Auto:
        return (xi_bar > 0.0 && zeta_bar > 0.0) ? MajorizationKind::CauchyQuadratic
                                                : MajorizationKind::SquareLinearized;
    }
    throw std::logic_error("unknown majorization policy");
}

namespace {

void require_positive_anchor(MajorizationKind kind, double xi_bar, double zeta_bar)
{
    if (kind == MajorizationKind::CauchyQuadratic && (xi_bar <= 0.0 || zeta_bar <= 0.0))
    {
        throw std::invalid_argument(
            "CauchyQuadratic majorization needs strictly positive anchors");
    }
}

}  // namespace

double majorize(MajorizationKind kind, double xi, double zeta, double xi_bar,
                double zeta_bar)
{
    require_positive_anchor(kind, xi_bar, zeta_bar);
    switch (kind)
    {
    case MajorizationKind::CauchyQuadratic:
        return 0.5 * ((xi_bar / zeta_bar) * zeta * zeta + (zeta_bar / xi_bar) * xi * xi);
    case MajorizationKind::SquareLinearized:
    {
        const double d = xi_bar - zeta_bar;
        return 0.25 * (xi + zeta) * (xi + zeta) + 0.25 * d * d - 0.5 * d * (xi - zeta);
    }
    }
    throw std::logic_error("unknown majorization kind");
}

std::pair<double, double> majorize_gradient(MajorizationKind kind, double xi, double zeta,
                                            double xi_bar, double zeta_bar)
{
    require_positive_anchor(kind, xi_bar, zeta_bar);
    if (xi == xi_bar && zeta == zeta_bar)
    {
        return {zeta_bar, xi_bar};  // exact at the anchor for both kinds
    }
    switch (kind)
    {
    case MajorizationKind::CauchyQuadratic:
        return {(zeta_bar / xi_bar) * xi, (xi_bar / zeta_bar) * zeta};
    case MajorizationKind::SquareLinearized:
    {
        const double d = xi_bar - zeta_bar;
        const double sum_half = 0.5 * (xi + zeta);
        return {sum_half - 0.5 * d, sum_half + 0.5 * d};
    }
    }
    throw std::logic_error("unknown majorization kind");
}

LinExpr majorization_bound_rows(conic::ProgramBuilder& builder, const std::string& name,
                                int xi_col, int zeta_col, double xi_bar, double zeta_bar,
                                MajorizationKind kind)
{
    require_positive_anchor(kind, xi_bar, zeta_bar);
    const auto q = builder.add_vars(name, 1);
    switch (kind)
    {
    case MajorizationKind::CauchyQuadratic:
    {
        builder.add_half_sqnorm_epigraph(
            {LinExpr::var(zeta_col, std::sqrt(xi_bar / zeta_bar)),
             LinExpr::var(xi_col, std::sqrt(zeta_bar / xi_bar))},
            LinExpr::var(q[0]));
        return LinExpr::var(q[0]);
    }
    case MajorizationKind::SquareLinearized:
    {
        /* q >= (xi+zeta)^2/4; constant and linearized parts ride along. */
        builder.add_half_sqnorm_epigraph(
            {LinExpr::var(xi_col, 1.0 / std::sqrt(2.0)) +
             LinExpr::var(zeta_col, 1.0 / std::sqrt(2.0))},
            LinExpr::var(q[0]));
        const double d = xi_bar - zeta_bar;
        LinExpr bound = LinExpr::var(q[0]) + LinExpr(0.25 * d * d);
        bound.add(xi_col, -0.5 * d);
        bound.add(zeta_col, 0.5 * d);
        return bound;
    }
    }
    throw std::logic_error("unknown majorization kind");
}

}  // namespace bho::reform
