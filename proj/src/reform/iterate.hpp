#ifndef BHO_REFORM_ITERATE_HPP
#define BHO_REFORM_ITERATE_HPP

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bho::reform {

/**
 * State of the outer iteration, z = (x, lambda, r, rho). The step norm and
 * proximal distance run over exactly these four blocks; aux carries the
 * remaining certificates of the last subproblem solve (w, s, and for the
 * cross-validated SVM the per fold v and box multipliers).
 */
struct IteratePoint {
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;
    Eigen::VectorXd r;
    std::vector<Eigen::VectorXd> rho;
    std::map<std::string, Eigen::VectorXd> aux;

    Eigen::VectorXd stacked() const
    {
        long total = x.size() + lambda.size() + r.size();
        for (const auto& p : rho)
        {
            total += p.size();
        }
        Eigen::VectorXd out(total);
        long at = 0;
        out.segment(at, x.size()) = x;
        at += x.size();
        out.segment(at, lambda.size()) = lambda;
        at += lambda.size();
        out.segment(at, r.size()) = r;
        at += r.size();
        for (const auto& p : rho)
        {
            out.segment(at, p.size()) = p;
            at += p.size();
        }
        return out;
    }

    double distance_to(const IteratePoint& other) const
    {
        return (stacked() - other.stacked()).norm();
    }
};

}  // namespace bho::reform

#endif
