#ifndef BHO_REFORM_ASSEMBLE_HPP
#define BHO_REFORM_ASSEMBLE_HPP

#include "models/model.hpp"
#include "reform/iterate.hpp"
#include "reform/majorize.hpp"

namespace bho::reform {

/**
 * Value of the relaxed lower-level optimality certificate
 *
 *     F(x, lambda, rho) + sum_i lambda_i r_i
 *
 * (without the epsilon shift). Nonnegative up to round-off whenever finite;
 * zero exactly at lower-level optima paired with their duals. Returns +inf
 * when a conjugate domain condition fails beyond numerical tolerance, so it
 * doubles as a feasibility probe.
 */
double duality_gap_value(const models::Model& model, const IteratePoint& z);

/// Componentwise constraint activities P_i(x) - r_i for the genuine epigraph
/// constraints of the model.
Eigen::VectorXd p_activities(const models::Model& model, const IteratePoint& z);

/**
 * Generic assembly of the proximal epsilon-relaxed subproblem around the
 * anchor, built from the model's atoms: epigraph rows P_i(x) <= r_i,
 * perspective-conjugate rows, the loss conjugate materialized through w, the
 * majorized bilinear terms, and one linear row bounding the whole certificate
 * by epsilon. The SVM variant dispatches to its structural builder, which is
 * the only conic form it has.
 */
conic::BuiltProgram assemble_subproblem(const models::Model& model,
                                        const IteratePoint& anchor, double eps, double beta,
                                        MajorizationPolicy policy);

/// Epigraph of the proximal distance 1/2 || z - anchor ||^2 over the blocks
/// (x, lambda, r, rho) already registered in the builder. Returns the
/// epigraph variable's expression.
conic::LinExpr add_proximal_epigraph(conic::ProgramBuilder& builder,
                                     const IteratePoint& anchor);

}  // namespace bho::reform

#endif
