#include "conic/builder.hpp"

#include <stdexcept>

namespace bho::conic {

const VarBlock& BuiltProgram::block(const std::string& name) const
{
    auto it = blocks.find(name);
    if (it == blocks.end())
    {
        throw std::out_of_range("unknown variable block '" + name + "'");
    }
    return it->second;
}

Eigen::VectorXd BuiltProgram::slice(const Eigen::VectorXd& z, const std::string& name) const
{
    const VarBlock& b = block(name);
    return z.segment(b.start, b.dim);
}

BuiltProgram ProgramBuilder::build_with_layout() const
{
    return {build(), blocks_, named_rows_};
}

VarBlock ProgramBuilder::add_vars(const std::string& name, int dim)
{
    if (dim < 0)
    {
        throw std::invalid_argument("add_vars: negative dimension");
    }
    if (blocks_.count(name) > 0)
    {
        throw std::invalid_argument("add_vars: duplicate block '" + name + "'");
    }
    VarBlock block{num_vars_, dim};
    num_vars_ += dim;
    blocks_[name] = block;
    return block;
}

void ProgramBuilder::add_objective(int col, double coeff)
{
    cost_terms_.emplace_back(col, coeff);
}

void ProgramBuilder::add_objective(const LinExpr& e)
{
    for (const auto& [col, coeff] : e.terms)
    {
        cost_terms_.emplace_back(col, coeff);
    }
    offset_ += e.constant;
}

void ProgramBuilder::push_row(const LinExpr& e)
{
    /* Row encodes slack = e:  A z + s = b with A_row = -coeffs, b_row = const. */
    const int row = static_cast<int>(rhs_.size());
    for (const auto& [col, coeff] : e.terms)
    {
        if (col < 0 || col >= num_vars_)
        {
            throw std::out_of_range("row references unknown variable column");
        }
        triplets_.emplace_back(row, col, -coeff);
    }
    rhs_.push_back(e.constant);
}

int ProgramBuilder::add_zero(const LinExpr& e)
{
    const int row = num_rows();
    push_row(e);
    cones_.push_back({ConeKind::Zero, 1});
    return row;
}

int ProgramBuilder::add_nonneg(const LinExpr& e)
{
    const int row = num_rows();
    push_row(e);
    cones_.push_back({ConeKind::NonNegative, 1});
    return row;
}

int ProgramBuilder::add_soc(const std::vector<LinExpr>& entries)
{
    if (entries.size() < 2)
    {
        throw std::invalid_argument("add_soc: need at least head and one element");
    }
    const int row = num_rows();
    for (const LinExpr& e : entries)
    {
        push_row(e);
    }
    cones_.push_back({ConeKind::SecondOrder, static_cast<int>(entries.size())});
    return row;
}

int ProgramBuilder::add_half_sqnorm_epigraph(const std::vector<LinExpr>& vec, const LinExpr& t)
{
    std::vector<LinExpr> entries;
    entries.reserve(vec.size() + 2);
    entries.push_back(t + LinExpr(0.5));
    for (const LinExpr& e : vec)
    {
        entries.push_back(e);
    }
    entries.push_back(t - LinExpr(0.5));
    return add_soc(entries);
}

const VarBlock& ProgramBuilder::block(const std::string& name) const
{
    auto it = blocks_.find(name);
    if (it == blocks_.end())
    {
        throw std::out_of_range("unknown variable block '" + name + "'");
    }
    return it->second;
}

Program ProgramBuilder::build() const
{
    Program p;
    p.num_vars = num_vars_;
    p.cost = Eigen::VectorXd::Zero(num_vars_);
    for (const auto& [col, coeff] : cost_terms_)
    {
        p.cost(col) += coeff;
    }
    p.A.resize(static_cast<int>(rhs_.size()), num_vars_);
    p.A.setFromTriplets(triplets_.begin(), triplets_.end());
    p.rhs = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), static_cast<int>(rhs_.size()));
    p.cones = cones_;
    p.obj_offset = offset_;
    return p;
}

}  // namespace bho::conic
