#ifndef BHO_ATOMS_ATOM_HPP
#define BHO_ATOMS_ATOM_HPP

#include <limits>
#include <string>
#include <vector>

#include "conic/builder.hpp"

namespace bho::atoms {

enum class AtomKind { L1Norm, GroupL2Norm, HalfSquaredL2, LeastSquares };

/// Tolerance for conjugate domain membership checks. Certificates coming out
/// of a 1e-8 conic solve land within this of the exact domain.
inline constexpr double kDomainTol = 1e-7;

struct ConjugateValue {
    double value = std::numeric_limits<double>::infinity();
    bool finite = false;
    Eigen::VectorXd certificate;  // LeastSquares: the w with A' w = y
};

/**
 * A convex building block: a regularizer P_i or the loss l. Knows its value,
 * Fenchel conjugate, and how to emit conic rows for the epigraph P(x) <= r
 * and the perspective-conjugate lambda P*(rho/lambda) <= s.
 *
 * GroupL2Norm atoms act on one coordinate group of the ambient vector; their
 * conjugate is finite only when the off-group components vanish.
 */
class Atom {
  public:
    static Atom l1(int dim);
    static Atom group_l2(int dim, std::vector<int> group);
    static Atom half_squared(int dim);
    static Atom least_squares(Eigen::MatrixXd a, Eigen::VectorXd b);

    AtomKind kind() const { return kind_; }
    int dim() const { return dim_; }
    /// Coordinates of x the atom actually touches.
    const std::vector<int>& support() const { return support_; }
    const Eigen::MatrixXd& ls_matrix() const { return a_; }
    const Eigen::VectorXd& ls_rhs() const { return b_; }

    double eval(const Eigen::VectorXd& x) const;
    ConjugateValue conjugate(const Eigen::VectorXd& y) const;

    /// Emit rows enforcing P(x) <= r. x_cols has ambient length; auxiliary
    /// variables are registered under names prefixed by `name`. r may be a
    /// variable or any affine expression.
    void epigraph_rows(conic::ProgramBuilder& builder, const std::string& name,
                       const conic::VarBlock& x_cols, const conic::LinExpr& r) const;

    /// Emit rows enforcing lambda P*(rho/lambda) <= s with rho indexed over
    /// the support. L1/GroupL2 pin s = 0; at lambda = 0 the rows force
    /// rho = 0, matching the 0 * P*(rho/0) convention. lambda and s may be
    /// variables or fixed values.
    void perspective_conjugate_rows(conic::ProgramBuilder& builder, const std::string& name,
                                    const conic::VarBlock& rho_cols,
                                    const conic::LinExpr& lambda,
                                    const conic::LinExpr& s) const;

  private:
    AtomKind kind_;
    int dim_ = 0;
    std::vector<int> support_;
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
};

}  // namespace bho::atoms

#endif
