#include "conic/cone.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace bho::conic {

std::vector<std::string> validate(const Program& program)
{
    std::vector<std::string> errors;

    if (program.num_vars < 0)
    {
        errors.push_back("negative variable count");
    }
    if (program.cost.size() != program.num_vars)
    {
        errors.push_back(fmt::format("cost length {} != variable count {}",
                                     program.cost.size(), program.num_vars));
    }
    if (program.A.cols() != program.num_vars)
    {
        errors.push_back(fmt::format("A has {} columns, expected {}",
                                     program.A.cols(), program.num_vars));
    }
    if (program.rhs.size() != program.A.rows())
    {
        errors.push_back(fmt::format("rhs length {} != row count {}",
                                     program.rhs.size(), program.A.rows()));
    }

    long cone_total = 0;
    for (size_t i = 0; i < program.cones.size(); i++)
    {
        const Cone& cone = program.cones[i];
        if (cone.dim < 1)
        {
            errors.push_back(fmt::format("cone {} has dim {} < 1", i, cone.dim));
        }
        if (cone.kind == ConeKind::SecondOrder && cone.dim < 2)
        {
            errors.push_back(fmt::format("cone {}: SOC dim < 2 (express as NonNegative)", i));
        }
        cone_total += cone.dim;
    }
    if (cone_total != program.A.rows())
    {
        errors.push_back(fmt::format("cone/row mismatch: cones sum to {} but A has {} rows",
                                     cone_total, program.A.rows()));
    }

    return errors;
}

Eigen::VectorXd project_onto_cone(const Eigen::VectorXd& s, const Cone& cone)
{
    if (s.size() != cone.dim)
    {
        throw std::invalid_argument(fmt::format(
            "project_onto_cone: vector length {} != cone dim {}", s.size(), cone.dim));
    }

    switch (cone.kind)
    {
    case ConeKind::Zero:
        return Eigen::VectorXd::Zero(s.size());
    case ConeKind::NonNegative:
        return s.cwiseMax(0.0);
    case ConeKind::SecondOrder:
    {
        const double t = s(0);
        const double xnorm = s.tail(s.size() - 1).norm();
        if (xnorm <= t)
        {
            return s;
        }
        if (xnorm <= -t)
        {
            return Eigen::VectorXd::Zero(s.size());
        }
        Eigen::VectorXd p(s.size());
        const double scale = 0.5 * (t + xnorm);
        p(0) = scale;
        p.tail(s.size() - 1) = (scale / xnorm) * s.tail(s.size() - 1);
        return p;
    }
    }
    throw std::logic_error("unknown cone kind");
}

double cone_distance(const Eigen::VectorXd& s, const Cone& cone)
{
    return (s - project_onto_cone(s, cone)).norm();
}

double cone_product_distance(const Eigen::VectorXd& s, const std::vector<Cone>& cones)
{
    double sq = 0.0;
    int at = 0;
    for (const Cone& cone : cones)
    {
        const double d = cone_distance(s.segment(at, cone.dim), cone);
        sq += d * d;
        at += cone.dim;
    }
    if (at != s.size())
    {
        throw std::invalid_argument("cone_product_distance: length mismatch");
    }
    return std::sqrt(sq);
}

double dual_cone_product_distance(const Eigen::VectorXd& y, const std::vector<Cone>& cones)
{
    /* Dual of {0} is the whole space; NonNegative and SecondOrder are self-dual. */
    double sq = 0.0;
    int at = 0;
    for (const Cone& cone : cones)
    {
        if (cone.kind != ConeKind::Zero)
        {
            const double d = cone_distance(y.segment(at, cone.dim), cone);
            sq += d * d;
        }
        at += cone.dim;
    }
    if (at != y.size())
    {
        throw std::invalid_argument("dual_cone_product_distance: length mismatch");
    }
    return std::sqrt(sq);
}

namespace {

const char* kind_name(ConeKind kind)
{
    switch (kind)
    {
    case ConeKind::Zero:
        return "zero";
    case ConeKind::NonNegative:
        return "nonneg";
    case ConeKind::SecondOrder:
        return "soc";
    }
    return "?";
}

}  // namespace

std::string dump(const Program& program)
{
    std::string out;
    out += fmt::format("vars {} rows {} offset {:.17g}\n", program.num_vars,
                       program.A.rows(), program.obj_offset);
    out += "cones";
    for (const Cone& cone : program.cones)
    {
        out += fmt::format(" {}:{}", kind_name(cone.kind), cone.dim);
    }
    out += "\n";
    for (int col = 0; col < program.A.outerSize(); col++)
    {
        for (Eigen::SparseMatrix<double>::InnerIterator it(program.A, col); it; ++it)
        {
            out += fmt::format("A {} {} {:.17g}\n", it.row(), it.col(), it.value());
        }
    }
    for (int i = 0; i < program.cost.size(); i++)
    {
        if (program.cost(i) != 0.0)
        {
            out += fmt::format("c {} {:.17g}\n", i, program.cost(i));
        }
    }
    for (int i = 0; i < program.rhs.size(); i++)
    {
        if (program.rhs(i) != 0.0)
        {
            out += fmt::format("b {} {:.17g}\n", i, program.rhs(i));
        }
    }
    return out;
}

}  // namespace bho::conic
