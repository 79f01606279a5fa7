#ifndef BHO_REFORM_MAJORIZE_HPP
#define BHO_REFORM_MAJORIZE_HPP

#include <string>
#include <utility>

#include "conic/builder.hpp"

namespace bho::reform {

/// Smooth upper bounds on the bilinear product xi * zeta that touch it at the
/// anchor. CauchyQuadratic needs strictly positive anchors; SquareLinearized
/// is valid everywhere.
enum class MajorizationKind { CauchyQuadratic, SquareLinearized };

/// Per-pair selection rule: Auto picks CauchyQuadratic where both anchors are
/// strictly positive and falls back to SquareLinearized otherwise.
enum class MajorizationPolicy { Auto, CauchyQuadratic, SquareLinearized };

MajorizationKind resolve_majorization(MajorizationPolicy policy, double xi_bar,
                                      double zeta_bar);

/// m(xi, zeta; xi_bar, zeta_bar). CauchyQuadratic:
///   (xi_bar/zeta_bar) zeta^2 / 2 + (zeta_bar/xi_bar) xi^2 / 2,
/// SquareLinearized:
///   (xi+zeta)^2/4 + (xi_bar-zeta_bar)^2/4 - (xi_bar-zeta_bar)(xi-zeta)/2.
double majorize(MajorizationKind kind, double xi, double zeta, double xi_bar,
                double zeta_bar);

/// Closed-form partials (d/dxi, d/dzeta); equals (zeta_bar, xi_bar) at the
/// anchor for both kinds.
std::pair<double, double> majorize_gradient(MajorizationKind kind, double xi, double zeta,
                                            double xi_bar, double zeta_bar);

/// Emit the epigraph of the majorization's quadratic part into the builder
/// and return an affine expression e with e >= m(xi, zeta; anchors) on the
/// feasible set. The expression goes into the relaxed duality-gap row.
conic::LinExpr majorization_bound_rows(conic::ProgramBuilder& builder, const std::string& name,
                                       int xi_col, int zeta_col, double xi_bar,
                                       double zeta_bar, MajorizationKind kind);

}  // namespace bho::reform

#endif
