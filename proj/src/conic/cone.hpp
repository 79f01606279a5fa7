#ifndef BHO_CONIC_CONE_HPP
#define BHO_CONIC_CONE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bho::conic {

enum class ConeKind { Zero, NonNegative, SecondOrder };

/// One factor of the cone product. SecondOrder uses the (t, x) layout with
/// the radius component first.
struct Cone {
    ConeKind kind;
    int dim;
};

/**
 * Standard-form cone problem
 *
 *   minimize    cost' z + obj_offset
 *   subject to  A z + s = rhs,   s in K1 x K2 x ... ,
 *
 * where the cones cover the rows of A in order.
 */
struct Program {
    int num_vars = 0;
    Eigen::VectorXd cost;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd rhs;
    std::vector<Cone> cones;
    double obj_offset = 0.0;

    int num_rows() const { return static_cast<int>(A.rows()); }
};

/// Empty result means the program is well formed; otherwise one message per
/// violated invariant.
std::vector<std::string> validate(const Program& program);

/// Euclidean projection of s onto the cone. Throws std::invalid_argument on a
/// dimension mismatch.
Eigen::VectorXd project_onto_cone(const Eigen::VectorXd& s, const Cone& cone);

/// Distance of s to the cone, ||s - project(s)||_2.
double cone_distance(const Eigen::VectorXd& s, const Cone& cone);

/// Distance to the full cone product of a program-sized slack vector.
double cone_product_distance(const Eigen::VectorXd& s, const std::vector<Cone>& cones);

/// Distance of a dual vector to the dual cone product (Zero rows are free).
double dual_cone_product_distance(const Eigen::VectorXd& y, const std::vector<Cone>& cones);

/// Plain-text dump of a program: dimensions, cone list, one line per nonzero
/// of A, then c and rhs. Stable format for golden-file tests.
std::string dump(const Program& program);

}  // namespace bho::conic

#endif
