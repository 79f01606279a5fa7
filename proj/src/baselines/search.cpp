#include "baselines/search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "data/rng.hpp"

namespace bho::baselines {

using Eigen::VectorXd;

void GridSpec::validate() const
{
    if (log10_lo >= log10_hi || points < 2)
    {
        throw std::invalid_argument("GridSpec: need lo < hi and points >= 2");
    }
}

namespace {

/// Directions actually searched. The elastic net sweeps both penalties; the
/// sparse group lasso ties all group penalties to one value and the l1
/// penalty to another (a full M+1-dimensional grid is intractable and the
/// 10x10 baseline means exactly this tied pair); the SVM tunes lambda only,
/// with the weight cap parked at its upper bound.
int searched_dims(const models::Model& model)
{
    switch (model.variant())
    {
    case models::Variant::SvmCv:
        return 1;
    case models::Variant::SparseGroupLasso:
        return 2;
    case models::Variant::ElasticNet:
        return 2;
    }
    return model.tau();
}

VectorXd to_hyper(const models::Model& model, const VectorXd& searched)
{
    switch (model.variant())
    {
    case models::Variant::ElasticNet:
        return searched;
    case models::Variant::SparseGroupLasso:
    {
        VectorXd hyper(model.tau());
        hyper.head(model.tau() - 1).setConstant(searched(0));  // group penalties
        hyper(model.tau() - 1) = searched(1);                  // l1 penalty
        return hyper;
    }
    case models::Variant::SvmCv:
    {
        VectorXd hyper(model.tau());
        hyper(0) = searched(0);
        hyper.tail(hyper.size() - 1) = model.svm().w_ub;
        return hyper;
    }
    }
    return searched;
}

bool lex_less(const VectorXd& a, const VectorXd& b)
{
    for (int i = 0; i < a.size(); i++)
    {
        if (a(i) != b(i))
        {
            return a(i) < b(i);
        }
    }
    return false;
}

SearchResult sweep(const models::Model& model, const std::vector<VectorXd>& candidates,
                   const solver::Settings& settings)
{
    SearchResult result;
    result.best_val_error = std::numeric_limits<double>::infinity();

    for (const VectorXd& searched : candidates)
    {
        result.evaluations++;
        const VectorXd hyper = to_hyper(model, searched);
        double val = std::numeric_limits<double>::infinity();
        VectorXd x;
        try
        {
            const auto ll = models::ll_solve(model, hyper, settings, /*want_duals=*/false);
            if (ll.status == solver::Status::Optimal)
            {
                x = ll.x;
                val = model.val_error(x);
            }
        }
        catch (const std::exception&)
        {
            // scored +inf below
        }
        if (!std::isfinite(val))
        {
            result.failures++;
            continue;
        }
        const bool better =
            val < result.best_val_error ||
            (val == result.best_val_error && result.best_hyper.size() > 0 &&
             lex_less(hyper, result.best_hyper));
        if (better || result.best_hyper.size() == 0)
        {
            result.best_val_error = val;
            result.best_hyper = hyper;
            result.best_x = x;
        }
    }

    if (result.best_hyper.size() > 0)
    {
        result.test_error = model.test_error(result.best_x, result.best_hyper, settings);
    }
    return result;
}

}  // namespace

SearchResult grid_search(const models::Model& model, const GridSpec& spec,
                         const solver::Settings& settings)
{
    spec.validate();
    const int dims = searched_dims(model);

    std::vector<double> ticks(spec.points);
    for (int i = 0; i < spec.points; i++)
    {
        ticks[i] = std::pow(
            10.0, spec.log10_lo + (spec.log10_hi - spec.log10_lo) * i / (spec.points - 1));
    }

    /* Full cartesian product, lexicographic order. */
    std::vector<VectorXd> candidates;
    std::vector<int> at(dims, 0);
    while (true)
    {
        VectorXd point(dims);
        for (int d = 0; d < dims; d++)
        {
            point(d) = ticks[at[d]];
        }
        candidates.push_back(point);
        int d = dims - 1;
        while (d >= 0 && ++at[d] == spec.points)
        {
            at[d] = 0;
            d--;
        }
        if (d < 0)
        {
            break;
        }
    }
    return sweep(model, candidates, settings);
}

SearchResult random_search(const models::Model& model, int n, const GridSpec& spec,
                           std::uint64_t seed, const solver::Settings& settings)
{
    spec.validate();
    if (n < 1)
    {
        throw std::invalid_argument("random_search: need n >= 1");
    }
    const int dims = searched_dims(model);
    data::Rng rng(seed);
    std::vector<VectorXd> candidates;
    for (int i = 0; i < n; i++)
    {
        VectorXd point(dims);
        for (int d = 0; d < dims; d++)
        {
            point(d) = std::pow(10.0, rng.uniform(spec.log10_lo, spec.log10_hi));
        }
        candidates.push_back(point);
    }
    return sweep(model, candidates, settings);
}

}  // namespace bho::baselines
