#ifndef BHO_SOLVER_SOCP_HPP
#define BHO_SOLVER_SOCP_HPP

#include <optional>
#include <string>

#include "conic/cone.hpp"

namespace bho::solver {

struct Settings {
    int max_iter = 200;
    double tol_gap = 1e-8;
    double tol_primal = 1e-8;
    double tol_dual = 1e-8;
    std::optional<double> time_limit_seconds;
    bool verbose = false;
};

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, MaxIterReached, NumericalError };

const char* status_name(Status status);

struct Residuals {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
};

struct Solution {
    Status status = Status::NumericalError;
    Eigen::VectorXd z;  // primal variables
    Eigen::VectorXd s;  // slacks, one per row, in the cone product
    Eigen::VectorXd y;  // duals, one per row, in the dual cone product
    double objective = 0.0;
    int iterations = 0;
    Residuals residuals;
};

/**
 * Solve a standard-form cone program over zero / nonnegative / second-order
 * cones with a primal-dual interior-point method: Nesterov-Todd scaling on
 * the homogeneous self-dual embedding, Mehrotra predictor-corrector steps,
 * fraction-to-boundary 0.99, and a quasi-definite KKT factorization with
 * static regularization and iterative refinement.
 *
 * The program must pass conic::validate. Deterministic for fixed inputs.
 */
Solution solve(const conic::Program& program, const Settings& settings = {});

/// Unscaled optimality residuals recomputed from (z, s, y):
///   primal = ||A z + s - b|| / (1 + ||b||)
///   dual   = ||A' y + c||    / (1 + ||c||)
///   gap    = |c'z + b'y|     / (1 + |c'z|)
Residuals kkt_residuals(const conic::Program& program, const Solution& solution);

}  // namespace bho::solver

#endif
