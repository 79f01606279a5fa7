#ifndef BHO_CONIC_BUILDER_HPP
#define BHO_CONIC_BUILDER_HPP

#include <map>
#include <string>
#include <vector>

#include "conic/cone.hpp"

namespace bho::conic {

/// Affine expression sum_j coeff_j * z_{col_j} + constant.
struct LinExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    LinExpr() = default;
    /* implicit */ LinExpr(double c) : constant(c) {}

    static LinExpr var(int col, double coeff = 1.0)
    {
        LinExpr e;
        e.terms.emplace_back(col, coeff);
        return e;
    }

    LinExpr& add(int col, double coeff)
    {
        terms.emplace_back(col, coeff);
        return *this;
    }

    LinExpr& operator+=(const LinExpr& other)
    {
        terms.insert(terms.end(), other.terms.begin(), other.terms.end());
        constant += other.constant;
        return *this;
    }

    friend LinExpr operator+(LinExpr a, const LinExpr& b)
    {
        a += b;
        return a;
    }

    friend LinExpr operator-(LinExpr a, const LinExpr& b)
    {
        for (const auto& [col, coeff] : b.terms)
        {
            a.terms.emplace_back(col, -coeff);
        }
        a.constant -= b.constant;
        return a;
    }

    friend LinExpr operator*(double scale, LinExpr e)
    {
        for (auto& [col, coeff] : e.terms)
        {
            coeff *= scale;
        }
        e.constant *= scale;
        return e;
    }
};

/// Contiguous block of variables registered under a name.
struct VarBlock {
    int start = 0;
    int dim = 0;

    int operator[](int i) const { return start + i; }
    int index() const { return start; }
};

/// A finished program together with its named variable layout.
struct BuiltProgram {
    Program program;
    std::map<std::string, VarBlock> blocks;
    std::map<std::string, int> named_rows;

    const VarBlock& block(const std::string& name) const;
    Eigen::VectorXd slice(const Eigen::VectorXd& z, const std::string& name) const;
};

/**
 * Incremental construction of a standard-form Program. Rows are stated as
 * expressions in the natural direction:
 *
 *   add_zero(e)      ->  e = 0
 *   add_nonneg(e)    ->  e >= 0
 *   add_soc(es)      ->  || (es[1..]) ||_2 <= es[0]
 *
 * and each emitted slack is the expression itself, so duals line up with the
 * stated rows. The named variable blocks double as the layout map callers use
 * to recover structured iterates from a solution vector.
 */
class ProgramBuilder {
  public:
    VarBlock add_vars(const std::string& name, int dim);

    void add_objective(int col, double coeff);
    void add_objective(const LinExpr& e);
    void add_offset(double value) { offset_ += value; }

    int add_zero(const LinExpr& e);
    int add_nonneg(const LinExpr& e);
    int add_soc(const std::vector<LinExpr>& entries);

    /// Remember a row index under a name (e.g. the relaxed certificate row)
    /// so callers can look up its dual.
    void name_row(const std::string& name, int row) { named_rows_[name] = row; }

    /// Epigraph rows for a squared norm: 1/2 || vec ||^2 <= t, encoded as the
    /// cone ||(vec, t - 1/2)|| <= t + 1/2.
    int add_half_sqnorm_epigraph(const std::vector<LinExpr>& vec, const LinExpr& t);

    int num_vars() const { return num_vars_; }
    int num_rows() const { return static_cast<int>(rhs_.size()); }

    const VarBlock& block(const std::string& name) const;
    bool has_block(const std::string& name) const { return blocks_.count(name) > 0; }
    const std::map<std::string, VarBlock>& blocks() const { return blocks_; }

    Program build() const;
    BuiltProgram build_with_layout() const;

  private:
    void push_row(const LinExpr& e);

    int num_vars_ = 0;
    std::vector<Eigen::Triplet<double>> triplets_;
    std::vector<double> rhs_;
    std::vector<Cone> cones_;
    std::vector<std::pair<int, double>> cost_terms_;
    double offset_ = 0.0;
    std::map<std::string, VarBlock> blocks_;
    std::map<std::string, int> named_rows_;
};

}  // namespace bho::conic

#endif
