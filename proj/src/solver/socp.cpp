#include "solver/socp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <fmt/format.h>

namespace bho::solver {

const char* status_name(Status status)
{
    switch (status)
    {
    case Status::Optimal:
        return "optimal";
    case Status::PrimalInfeasible:
        return "primal_infeasible";
    case Status::DualInfeasible:
        return "dual_infeasible";
    case Status::MaxIterReached:
        return "max_iter";
    case Status::NumericalError:
        return "numerical_error";
    }
    return "?";
}

Residuals kkt_residuals(const conic::Program& program, const Solution& solution)
{
    if (solution.z.size() != program.num_vars || solution.s.size() != program.A.rows() ||
        solution.y.size() != program.A.rows())
    {
        throw std::invalid_argument("kkt_residuals: vector lengths do not match program");
    }
    Residuals r;
    const double cz = program.cost.dot(solution.z);
    const double by = program.rhs.dot(solution.y);
    r.primal = (program.A * solution.z + solution.s - program.rhs).norm() /
               (1.0 + program.rhs.norm());
    r.dual = (program.A.transpose() * solution.y + program.cost).norm() /
             (1.0 + program.cost.norm());
    r.gap = std::abs(cz + by) / (1.0 + std::abs(cz));
    return r;
}

namespace {

/* The interior-point internals run in extended precision: near a smooth
 * optimum every conic optimality measure is quadratic in the argmin error,
 * so certifying 1e-6 solutions needs residuals around 1e-12, below the noise
 * floor of plain double step reconstruction. */
using Scalar = long double;
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using SpMat = Eigen::SparseMatrix<Scalar>;
using Eigen::VectorXd;

constexpr double kDeltaStat = 1e-8;    // static KKT regularization
constexpr double kGamma = 0.99;        // fraction-to-boundary
constexpr double kStepMin = 1e-6;
constexpr double kStepMax = 0.999;
constexpr double kSigmaMin = 1e-4;
constexpr double kSigmaMax = 1.0;
constexpr int kNitRef = 9;
constexpr double kLinSysAcc = 1e-14;
constexpr double kIrErrFact = 6.0;
constexpr double kInfeasTol = 1e-8;

struct SocScaling {
    int dim = 0;
    double eta_square = 1.0;
    double a = 0.0;
    double w = 0.0;
    double d1 = 0.0;
    double u0 = 0.0;
    double u1 = 0.0;
    double v1 = 0.0;
    Vec q;
};

/* Internal reordered problem: equality rows first, then the LP cone, then
 * SOC blocks, as
 *     min c'x  s.t.  Ae x = be,  G x + s = h,  s in K. */
struct Ipm {
    const conic::Program& prog;
    const Settings& settings;

    int n = 0;       // variables
    int n_eq = 0;    // equality rows
    int n_lc = 0;    // LP cone rows
    int n_ineq = 0;  // all cone rows (LP + SOC)
    int dim_kkt = 0;

    SpMat Ae, G, Aet, Gt;
    Vec c, be, h;

    // Row permutation: for each original row, its slot in (eq | cone) order.
    std::vector<int> orig_to_eq;    // -1 if not an equality row
    std::vector<int> orig_to_cone;  // -1 if not a cone row

    std::vector<SocScaling> socs;
    Vec lp_v, lp_w;

    // Equilibration scales
    Vec e_col, e_eq, e_cone;
    Scalar c_scale = 1.0;

    SpMat K;
    Eigen::SimplicialLDLT<SpMat, Eigen::Upper> ldlt;
    std::vector<Scalar*> v_slots;  // scaling entries inside K
    std::vector<Scalar*> ag_slots; // A'/G' entries inside K

    // Iterate
    Vec x, y, z, s, lambda;
    Scalar tau = 1.0, kap = 1.0;

    // Residual workspace
    Vec rx, ry, rz;
    Scalar rt = 0.0, hresx = 0.0, hresy = 0.0, hresz = 0.0;
    Scalar cx = 0.0, by = 0.0, hz = 0.0;

    explicit Ipm(const conic::Program& p, const Settings& s) : prog(p), settings(s) {}

    void split_rows();
    void equilibrate();
    void setup_kkt();
    void set_kkt_identity_scaling();
    void update_scalings_in_kkt();
    bool update_scalings();
    void scale(const Vec& in, Vec& out) const;       // out = W in
    void scale2add(const Vec& in, Vec& out) const;   // out += V_exp in
    Scalar conic_product(const Vec& u, const Vec& v, Vec& out) const;
    void conic_division(const Vec& u, const Vec& w, Vec& out) const;
    void bring_to_cone(const Vec& r, Vec& out) const;
    int solve_kkt(const Vec& rhs, Vec& dx, Vec& dy, Vec& dz,
                  bool init_scaling) const;
    Scalar line_search(const Vec& ds_by_w, const Vec& w_dz, Scalar dtau,
                       Scalar dkap) const;
    void compute_residuals();

    Solution run();
    Solution candidate() const;
    void expand_cone_rhs(const Vec& cone_vec, Vec& rhs, int offset) const;
};

void Ipm::split_rows()
{
    n = prog.num_vars;
    const int m = prog.num_rows();
    orig_to_eq.assign(m, -1);
    orig_to_cone.assign(m, -1);

    int row = 0;
    std::vector<std::pair<int, int>> soc_spans;  // (orig start, dim)
    std::vector<int> lp_origs, eq_origs;
    for (const conic::Cone& cone : prog.cones)
    {
        switch (cone.kind)
        {
        case conic::ConeKind::Zero:
            for (int i = 0; i < cone.dim; i++)
            {
                eq_origs.push_back(row + i);
            }
            break;
        case conic::ConeKind::NonNegative:
            for (int i = 0; i < cone.dim; i++)
            {
                lp_origs.push_back(row + i);
            }
            break;
        case conic::ConeKind::SecondOrder:
            soc_spans.emplace_back(row, cone.dim);
            break;
        }
        row += cone.dim;
    }

    n_eq = static_cast<int>(eq_origs.size());
    n_lc = static_cast<int>(lp_origs.size());
    n_ineq = n_lc;
    socs.clear();
    for (auto [start, dim] : soc_spans)
    {
        SocScaling sc;
        sc.dim = dim;
        sc.q = Vec::Zero(dim - 1);
        socs.push_back(std::move(sc));
        n_ineq += dim;
    }

    std::vector<int> cone_origs = lp_origs;
    for (auto [start, dim] : soc_spans)
    {
        for (int i = 0; i < dim; i++)
        {
            cone_origs.push_back(start + i);
        }
    }
    for (int i = 0; i < n_eq; i++)
    {
        orig_to_eq[eq_origs[i]] = i;
    }
    for (int i = 0; i < n_ineq; i++)
    {
        orig_to_cone[cone_origs[i]] = i;
    }

    std::vector<Eigen::Triplet<Scalar>> te, tg;
    for (int col = 0; col < prog.A.outerSize(); col++)
    {
        for (Eigen::SparseMatrix<double>::InnerIterator it(prog.A, col); it; ++it)
        {
            const int r = static_cast<int>(it.row());
            if (orig_to_eq[r] >= 0)
            {
                te.emplace_back(orig_to_eq[r], col, it.value());
            }
            else
            {
                tg.emplace_back(orig_to_cone[r], col, it.value());
            }
        }
    }
    Ae.resize(n_eq, n);
    Ae.setFromTriplets(te.begin(), te.end());
    G.resize(n_ineq, n);
    G.setFromTriplets(tg.begin(), tg.end());

    c = prog.cost.cast<Scalar>();
    /* Normalize the objective so the argmin is exactly invariant to positive
     * rescaling of the cost vector. Duals are scaled back on extraction. */
    c_scale = std::max(c.lpNorm<Eigen::Infinity>(), Scalar(1e-12));
    c /= c_scale;
    be.resize(n_eq);
    h.resize(n_ineq);
    for (int i = 0; i < m; i++)
    {
        if (orig_to_eq[i] >= 0)
        {
            be(orig_to_eq[i]) = prog.rhs(i);
        }
        else
        {
            h(orig_to_cone[i]) = prog.rhs(i);
        }
    }
}

namespace detail {

void max_rows(Vec& e, const SpMat& m)
{
    for (int j = 0; j < m.outerSize(); j++)
    {
        for (SpMat::InnerIterator it(m, j); it; ++it)
        {
            e(it.row()) = std::max(std::fabs(it.value()), e(it.row()));
        }
    }
}

void max_cols(Vec& e, const SpMat& m)
{
    for (int j = 0; j < m.outerSize(); j++)
    {
        for (SpMat::InnerIterator it(m, j); it; ++it)
        {
            e(j) = std::max(std::fabs(it.value()), e(j));
        }
    }
}

void scale_rows(const Vec& e, SpMat& m)
{
    for (int j = 0; j < m.outerSize(); j++)
    {
        for (SpMat::InnerIterator it(m, j); it; ++it)
        {
            it.valueRef() /= e(it.row());
        }
    }
}

void scale_cols(const Vec& e, SpMat& m)
{
    for (int j = 0; j < m.outerSize(); j++)
    {
        for (SpMat::InnerIterator it(m, j); it; ++it)
        {
            it.valueRef() /= e(j);
        }
    }
}

}  // namespace detail

void Ipm::equilibrate()
{
    e_col = Vec::Ones(n);
    e_eq = Vec::Ones(n_eq);
    e_cone = Vec::Ones(n_ineq);

    Vec col_tmp(n), eq_tmp(n_eq), cone_tmp(n_ineq);
    for (int iter = 0; iter < 3; iter++)
    {
        col_tmp.setZero();
        eq_tmp.setZero();
        cone_tmp.setZero();

        detail::max_cols(col_tmp, Ae);
        detail::max_cols(col_tmp, G);
        detail::max_rows(eq_tmp, Ae);
        detail::max_rows(cone_tmp, G);

        /* A second-order cone must be scaled uniformly to stay a cone. */
        int at = n_lc;
        for (const SocScaling& sc : socs)
        {
            cone_tmp.segment(at, sc.dim).setConstant(cone_tmp.segment(at, sc.dim).sum());
            at += sc.dim;
        }

        auto sqrt_or_one = [](Scalar v) {
            return std::fabs(v) < Scalar(1e-6) ? Scalar(1) : std::sqrt(v);
        };
        col_tmp = col_tmp.unaryExpr(sqrt_or_one);
        eq_tmp = eq_tmp.unaryExpr(sqrt_or_one);
        cone_tmp = cone_tmp.unaryExpr(sqrt_or_one);

        detail::scale_rows(eq_tmp, Ae);
        detail::scale_rows(cone_tmp, G);
        detail::scale_cols(col_tmp, Ae);
        detail::scale_cols(col_tmp, G);

        e_col = e_col.cwiseProduct(col_tmp);
        e_eq = e_eq.cwiseProduct(eq_tmp);
        e_cone = e_cone.cwiseProduct(cone_tmp);
    }

    c = c.cwiseQuotient(e_col);
    be = be.cwiseQuotient(e_eq);
    h = h.cwiseQuotient(e_cone);
}

void Ipm::setup_kkt()
{
    const int n_sc = static_cast<int>(socs.size());
    const int mtilde = n_ineq + 2 * n_sc;
    dim_kkt = n + n_eq + mtilde;

    Aet = Ae.transpose();
    Gt = G.transpose();

    /* Upper triangle of
     *     [ dI   Ae'       G'   ]
     *     [ .   -dI        0    ]
     *     [ .    .   -V(scaled) ]
     * with the SOC scaling blocks expanded by two rows each.      */
    std::vector<Eigen::Triplet<Scalar>> trip;

    for (int k = 0; k < n; k++)
    {
        trip.emplace_back(k, k, kDeltaStat);
    }
    for (int k = 0; k < n_eq; k++)
    {
        trip.emplace_back(n + k, n + k, -kDeltaStat);
    }
    for (int col = 0; col < Aet.outerSize(); col++)
    {
        for (SpMat::InnerIterator it(Aet, col); it; ++it)
        {
            trip.emplace_back(it.row(), n + col, it.value());
        }
    }
    int col_k = n + n_eq;
    for (int col = 0; col < n_lc; col++)
    {
        for (SpMat::InnerIterator it(Gt, col); it; ++it)
        {
            trip.emplace_back(it.row(), col_k, it.value());
        }
        col_k++;
    }
    {
        int col_g = n_lc;
        for (const SocScaling& sc : socs)
        {
            for (int j = 0; j < sc.dim; j++)
            {
                for (SpMat::InnerIterator it(Gt, col_g); it; ++it)
                {
                    trip.emplace_back(it.row(), col_k, it.value());
                }
                col_g++;
                col_k++;
            }
            col_k += 2;
        }
    }

    /* Scaling block, placeholder identity values. */
    int diag = n + n_eq;
    for (int k = 0; k < n_lc; k++)
    {
        trip.emplace_back(diag, diag, -1.0);
        diag++;
    }
    for (const SocScaling& sc : socs)
    {
        for (int k = 0; k < sc.dim; k++)
        {
            trip.emplace_back(diag, diag, -1.0);
            diag++;
        }
        trip.emplace_back(diag, diag, -1.0);
        for (int k = 1; k < sc.dim; k++)
        {
            trip.emplace_back(diag - sc.dim + k, diag, 0.0);
        }
        diag++;
        trip.emplace_back(diag, diag, 1.0);
        for (int k = 0; k < sc.dim; k++)
        {
            trip.emplace_back(diag - sc.dim - 1 + k, diag, 0.0);
        }
        diag++;
    }

    K.resize(dim_kkt, dim_kkt);
    K.setFromTriplets(trip.begin(), trip.end());

    /* Cache value slots for fast per-iteration updates. */
    v_slots.clear();
    diag = n + n_eq;
    for (int k = 0; k < n_lc; k++)
    {
        v_slots.push_back(&K.coeffRef(diag, diag));
        diag++;
    }
    for (const SocScaling& sc : socs)
    {
        for (int k = 0; k < sc.dim; k++)
        {
            v_slots.push_back(&K.coeffRef(diag, diag));
            diag++;
        }
        v_slots.push_back(&K.coeffRef(diag, diag));
        for (int k = 1; k < sc.dim; k++)
        {
            v_slots.push_back(&K.coeffRef(diag - sc.dim + k, diag));
        }
        diag++;
        v_slots.push_back(&K.coeffRef(diag, diag));
        for (int k = 0; k < sc.dim; k++)
        {
            v_slots.push_back(&K.coeffRef(diag - sc.dim - 1 + k, diag));
        }
        diag++;
    }

    ldlt.analyzePattern(K);
}

void Ipm::set_kkt_identity_scaling()
{
    size_t i = 0;
    for (int k = 0; k < n_lc; k++)
    {
        *v_slots[i++] = -1.0 - kDeltaStat;
    }
    for (const SocScaling& sc : socs)
    {
        for (int k = 0; k < sc.dim; k++)
        {
            *v_slots[i++] = -1.0 - kDeltaStat;
        }
        *v_slots[i++] = -1.0;
        for (int k = 1; k < sc.dim; k++)
        {
            *v_slots[i++] = 0.0;
        }
        *v_slots[i++] = 1.0 + kDeltaStat;
        for (int k = 0; k < sc.dim; k++)
        {
            *v_slots[i++] = 0.0;
        }
    }
}

void Ipm::update_scalings_in_kkt()
{
    size_t i = 0;
    for (int k = 0; k < n_lc; k++)
    {
        *v_slots[i++] = -lp_v(k) - kDeltaStat;
    }
    for (const SocScaling& sc : socs)
    {
        *v_slots[i++] = -sc.eta_square * sc.d1 - kDeltaStat;
        for (int k = 1; k < sc.dim; k++)
        {
            *v_slots[i++] = -sc.eta_square - kDeltaStat;
        }
        *v_slots[i++] = -sc.eta_square;
        for (int k = 1; k < sc.dim; k++)
        {
            *v_slots[i++] = -sc.eta_square * sc.v1 * sc.q(k - 1);
        }
        *v_slots[i++] = sc.eta_square + kDeltaStat;
        *v_slots[i++] = -sc.eta_square * sc.u0;
        for (int k = 1; k < sc.dim; k++)
        {
            *v_slots[i++] = -sc.eta_square * sc.u1 * sc.q(k - 1);
        }
    }
}

bool Ipm::update_scalings()
{
    lp_v = s.head(n_lc).cwiseQuotient(z.head(n_lc));
    lp_w = lp_v.cwiseSqrt();
    if (!lp_v.allFinite() || (n_lc > 0 && lp_v.minCoeff() <= 0.0))
    {
        return false;
    }

    int at = n_lc;
    for (SocScaling& sc : socs)
    {
        const Scalar sres = s(at) * s(at) - s.segment(at + 1, sc.dim - 1).squaredNorm();
        const Scalar zres = z(at) * z(at) - z.segment(at + 1, sc.dim - 1).squaredNorm();
        if (sres <= 0.0 || zres <= 0.0)
        {
            return false;
        }
        const Scalar snorm = std::sqrt(sres);
        const Scalar znorm = std::sqrt(zres);
        const Vec sbar = s.segment(at, sc.dim) / snorm;
        const Vec zbar = z.segment(at, sc.dim) / znorm;
        sc.eta_square = snorm / znorm;

        double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
        const Scalar a = (0.5 / gamma) * (sbar(0) + zbar(0));
        sc.q = (0.5 / gamma) * (sbar.tail(sc.dim - 1) - zbar.tail(sc.dim - 1));
        const Scalar w = sc.q.squaredNorm();

        const Scalar cc = (1.0 + a) + w / (1.0 + a);
        const Scalar dd = 1.0 + 2.0 / (1.0 + a) + w / std::pow(1.0 + a, 2);
        const Scalar d1 =
            std::max(Scalar(0), Scalar(0.5) * (a * a + w * (Scalar(1) - cc * cc / (Scalar(1) + w * dd))));
        const Scalar u0_square = a * a + w - d1;
        const Scalar c2byu02 = (cc * cc) / u0_square;
        if (c2byu02 - dd <= 0.0)
        {
            return false;
        }
        sc.d1 = d1;
        sc.u0 = std::sqrt(u0_square);
        sc.u1 = std::sqrt(c2byu02);
        sc.v1 = std::sqrt(c2byu02 - dd);
        sc.a = a;
        sc.w = w;
        at += sc.dim;
    }

    scale(z, lambda);
    return true;
}

void Ipm::scale(const Vec& in, Vec& out) const
{
    out.resize(n_ineq);
    out.head(n_lc) = lp_w.cwiseProduct(in.head(n_lc));
    int at = n_lc;
    for (const SocScaling& sc : socs)
    {
        const Scalar eta = std::sqrt(sc.eta_square);
        const Scalar zeta = sc.q.dot(in.segment(at + 1, sc.dim - 1));
        const Scalar factor = in(at) + zeta / (1.0 + sc.a);
        out(at) = eta * (sc.a * in(at) + zeta);
        out.segment(at + 1, sc.dim - 1) =
            eta * (in.segment(at + 1, sc.dim - 1) + factor * sc.q);
        at += sc.dim;
    }
}

void Ipm::scale2add(const Vec& in, Vec& out) const
{
    out.head(n_lc) += lp_v.cwiseProduct(in.head(n_lc)).eval();
    int at = n_lc;
    for (const SocScaling& sc : socs)
    {
        const int i1 = at;
        const int i2 = i1 + 1;
        const int i3 = i1 + sc.dim;
        const int i4 = i3 + 1;
        out(i1) += sc.eta_square * (sc.d1 * in(i1) + sc.u0 * in(i4));
        const Scalar v1x3_plus_u1x4 = sc.v1 * in(i3) + sc.u1 * in(i4);
        out.segment(i2, sc.dim - 1) +=
            sc.eta_square * (in.segment(i2, sc.dim - 1) + v1x3_plus_u1x4 * sc.q);
        const Scalar qtx2 = sc.q.dot(in.segment(i2, sc.dim - 1));
        out(i3) += sc.eta_square * (sc.v1 * qtx2 + in(i3));
        out(i4) += sc.eta_square * (sc.u0 * in(i1) + sc.u1 * qtx2 - in(i4));
        at += sc.dim + 2;
    }
}

Scalar Ipm::conic_product(const Vec& u, const Vec& v, Vec& out) const
{
    out.resize(n_ineq);
    out.head(n_lc) = u.head(n_lc).cwiseProduct(v.head(n_lc));
    Scalar mu = out.head(n_lc).lpNorm<1>();
    int at = n_lc;
    for (const SocScaling& sc : socs)
    {
        out(at) = u.segment(at, sc.dim).dot(v.segment(at, sc.dim));
        mu += std::abs(out(at));
        out.segment(at + 1, sc.dim - 1) = u(at) * v.segment(at + 1, sc.dim - 1) +
                                          v(at) * u.segment(at + 1, sc.dim - 1);
        at += sc.dim;
    }
    return mu;
}

void Ipm::conic_division(const Vec& u, const Vec& w, Vec& out) const
{
    out.resize(n_ineq);
    out.head(n_lc) = w.head(n_lc).cwiseQuotient(u.head(n_lc));
    int at = n_lc;
    for (const SocScaling& sc : socs)
    {
        const Scalar u0 = u(at);
        const Scalar w0 = w(at);
        const Scalar rho = u0 * u0 - u.segment(at + 1, sc.dim - 1).squaredNorm();
        const Scalar zeta = u.segment(at + 1, sc.dim - 1).dot(w.segment(at + 1, sc.dim - 1));
        const Scalar factor = (zeta / u0 - w0) / rho;
        out(at) = (u0 * w0 - zeta) / rho;
        out.segment(at + 1, sc.dim - 1) =
            factor * u.segment(at + 1, sc.dim - 1) + w.segment(at + 1, sc.dim - 1) / u0;
        at += sc.dim;
    }
}

void Ipm::bring_to_cone(const Vec& r, Vec& out) const
{
    Scalar alpha = -0.99;
    for (int i = 0; i < n_lc; i++)
    {
        if (r(i) <= 0.0 && -r(i) > alpha)
        {
            alpha = -r(i);
        }
    }
    int at = n_lc;
    for (const SocScaling& sc : socs)
    {
        const Scalar res = r(at) - r.segment(at + 1, sc.dim - 1).norm();
        if (res <= 0.0 && -res > alpha)
        {
            alpha = -res;
        }
        at += sc.dim;
    }
    alpha += 1.0;
    out = r;
    out.head(n_lc).array() += alpha;
    at = n_lc;
    for (const SocScaling& sc : socs)
    {
        out(at) += alpha;
        at += sc.dim;
    }
}

void Ipm::expand_cone_rhs(const Vec& cone_vec, Vec& rhs, int offset) const
{
    rhs.segment(offset, n_lc) = cone_vec.head(n_lc);
    int src = n_lc;
    int dst = offset + n_lc;
    for (const SocScaling& sc : socs)
    {
        rhs.segment(dst, sc.dim) = cone_vec.segment(src, sc.dim);
        src += sc.dim;
        dst += sc.dim;
        rhs(dst++) = 0.0;
        rhs(dst++) = 0.0;
    }
}

int Ipm::solve_kkt(const Vec& rhs, Vec& dx, Vec& dy, Vec& dz,
                   bool init_scaling) const
{
    Vec sol = ldlt.solve(rhs);
    const int n_sc = static_cast<int>(socs.size());
    const int mtilde = n_ineq + 2 * n_sc;

    const Scalar threshold = (Scalar(1) + rhs.lpNorm<Eigen::Infinity>()) * Scalar(kLinSysAcc);
    Scalar err_prev = std::numeric_limits<Scalar>::max();
    Vec correction(dim_kkt);

    auto collapse_dz = [&](const Vec& full, Vec& out) {
        out.resize(n_ineq);
        out.head(n_lc) = full.segment(n + n_eq, n_lc);
        int src = n + n_eq + n_lc;
        int dst = n_lc;
        for (const SocScaling& sc : socs)
        {
            out.segment(dst, sc.dim) = full.segment(src, sc.dim);
            src += sc.dim + 2;
            dst += sc.dim;
        }
    };

    int k_ref = 0;
    for (k_ref = 0; k_ref <= kNitRef; k_ref++)
    {
        const Vec dxc = sol.head(n);
        const Vec dyc = sol.segment(n, n_eq);
        Vec dzc;
        collapse_dz(sol, dzc);
        const Vec dz_exp = sol.tail(mtilde);

        /* Residual against the unregularized KKT matrix. */
        Vec ex = rhs.head(n) - Gt * dzc;
        if (n_eq > 0)
        {
            ex -= Aet * dyc;
        }
        Vec ey = rhs.segment(n, n_eq);
        if (n_eq > 0)
        {
            ey -= Ae * dxc;
        }
        Vec ez = Vec::Zero(mtilde);
        {
            const Vec gdx = G * dxc;
            ez.head(n_lc) = -gdx.head(n_lc);
            int src = n_lc;
            int dst = n_lc;
            for (const SocScaling& sc : socs)
            {
                ez.segment(dst, sc.dim) = -gdx.segment(src, sc.dim);
                src += sc.dim;
                dst += sc.dim + 2;
            }
            ez += rhs.tail(mtilde);
            if (init_scaling)
            {
                /* Identity scaling block: V_exp = blkdiag(I, (I,1,-1)...) */
                ez.head(n_lc) += dz_exp.head(n_lc);
                int at = n_lc;
                for (const SocScaling& sc : socs)
                {
                    ez.segment(at, sc.dim) += dz_exp.segment(at, sc.dim);
                    ez(at + sc.dim) += dz_exp(at + sc.dim);
                    ez(at + sc.dim + 1) -= dz_exp(at + sc.dim + 1);
                    at += sc.dim + 2;
                }
            }
            else
            {
                scale2add(dz_exp, ez);
            }
        }

        Scalar err = std::max(ex.lpNorm<Eigen::Infinity>(), ez.lpNorm<Eigen::Infinity>());
        if (n_eq > 0)
        {
            err = std::max(err, ey.lpNorm<Eigen::Infinity>());
        }

        if (k_ref > 0 && err > err_prev)
        {
            sol -= correction;
            k_ref--;
            break;
        }
        if (k_ref == kNitRef || err < threshold ||
            (k_ref > 0 && err_prev < Scalar(kIrErrFact) * err))
        {
            break;
        }
        err_prev = err;

        Vec e(dim_kkt);
        e << ex, ey, ez;
        correction = ldlt.solve(e);
        sol += correction;
    }

    dx = sol.head(n);
    dy = sol.segment(n, n_eq);
    collapse_dz(sol, dz);
    return k_ref;
}

Scalar Ipm::line_search(const Vec& ds_by_w, const Vec& w_dz, Scalar dtau,
                        Scalar dkap) const
{
    Scalar alpha = 10.0;
    if (n_lc > 0)
    {
        const Scalar rhomin = ds_by_w.head(n_lc).cwiseQuotient(lambda.head(n_lc)).minCoeff();
        const Scalar sigmamin = w_dz.head(n_lc).cwiseQuotient(lambda.head(n_lc)).minCoeff();
        const Scalar worst = std::min(rhomin, sigmamin);
        alpha = worst < Scalar(0) ? Scalar(1) / (-worst) : Scalar(1e13);
    }
    if (dtau < 0.0)
    {
        alpha = std::min(alpha, -tau / dtau);
    }
    if (dkap < 0.0)
    {
        alpha = std::min(alpha, -kap / dkap);
    }

    int at = n_lc;
    for (const SocScaling& sc : socs)
    {
        const Scalar lknorm2 = lambda(at) * lambda(at) -
                               lambda.segment(at + 1, sc.dim - 1).squaredNorm();
        if (lknorm2 <= 0.0)
        {
            at += sc.dim;
            continue;
        }
        const Scalar lknorm = std::sqrt(lknorm2);
        const Vec lkbar = lambda.segment(at, sc.dim) / lknorm;
        const Scalar lknorminv = 1.0 / lknorm;

        auto conic_step_of = [&](const Vec& d) {
            const Scalar lkbar_times_d =
                lkbar(0) * d(at) - lkbar.tail(sc.dim - 1).dot(d.segment(at + 1, sc.dim - 1));
            Vec rho(sc.dim);
            rho(0) = lknorminv * lkbar_times_d;
            const Scalar factor = (lkbar_times_d + d(at)) / (lkbar(0) + 1.0);
            rho.tail(sc.dim - 1) =
                lknorminv *
                (d.segment(at + 1, sc.dim - 1) - factor * lkbar.tail(sc.dim - 1));
            return rho.tail(sc.dim - 1).norm() - rho(0);
        };

        const Scalar step = std::max({Scalar(0), conic_step_of(ds_by_w), conic_step_of(w_dz)});
        if (step != 0.0)
        {
            alpha = std::min(alpha, 1.0 / step);
        }
        at += sc.dim;
    }
    return std::clamp(alpha, Scalar(kStepMin), Scalar(kStepMax));
}

void Ipm::compute_residuals()
{
    rx = -(Gt * z);
    if (n_eq > 0)
    {
        rx -= Aet * y;
    }
    hresx = rx.norm();
    rx -= tau * c;

    if (n_eq > 0)
    {
        ry = Ae * x;
        hresy = ry.norm();
        ry -= tau * be;
    }
    else
    {
        ry.resize(0);
        hresy = 0.0;
    }

    rz = s + G * x;
    hresz = rz.norm();
    rz -= tau * h;

    cx = c.dot(x);
    by = n_eq > 0 ? be.dot(y) : 0.0;
    hz = h.dot(z);
    rt = kap + cx + by + hz;
}

Solution Ipm::candidate() const
{
    Solution sol;
    sol.z = (x.array() / (e_col.array() * tau)).matrix().cast<double>();
    sol.y.resize(prog.num_rows());
    for (int i = 0; i < prog.num_rows(); i++)
    {
        if (orig_to_eq[i] >= 0)
        {
            sol.y(i) =
                static_cast<double>(c_scale * y(orig_to_eq[i]) / (e_eq(orig_to_eq[i]) * tau));
        }
        else
        {
            const int k = orig_to_cone[i];
            sol.y(i) = static_cast<double>(c_scale * z(k) / (e_cone(k) * tau));
        }
    }

    /* Report the slack the point itself defines, projected onto the cones;
     * the interior-point s accumulates reconstruction noise that would only
     * obscure the true infeasibility of z. */
    const VectorXd exact = prog.rhs - prog.A * sol.z;
    sol.s.resize(prog.num_rows());
    int at = 0;
    for (const conic::Cone& cone : prog.cones)
    {
        if (cone.kind == conic::ConeKind::Zero)
        {
            sol.s.segment(at, cone.dim).setZero();
        }
        else
        {
            sol.s.segment(at, cone.dim) =
                conic::project_onto_cone(exact.segment(at, cone.dim), cone);
        }
        at += cone.dim;
    }
    sol.objective = prog.cost.dot(sol.z) + prog.obj_offset;
    return sol;
}

Solution Ipm::run()
{
    const auto t_start = std::chrono::steady_clock::now();
    split_rows();
    equilibrate();
    setup_kkt();

    const int n_sc = static_cast<int>(socs.size());
    const int mtilde = n_ineq + 2 * n_sc;
    const Scalar cone_degree = static_cast<Scalar>(n_lc + n_sc);

    x = Vec::Zero(n);
    y = Vec::Zero(n_eq);
    z = Vec::Zero(n_ineq);
    s = Vec::Zero(n_ineq);
    lambda = Vec::Zero(n_ineq);

    Solution best = candidate();
    best.status = Status::NumericalError;
    double best_merit = std::numeric_limits<double>::max();

    auto consider_best = [&](const Solution& cand, const Residuals& r) {
        const double merit = std::max({r.primal, r.dual, r.gap});
        if (merit < best_merit)
        {
            best_merit = merit;
            best = cand;
            best.residuals = r;
        }
    };

    auto finish = [&](Status status, int iters) {
        best.status = status;
        best.iterations = iters;
        return best;
    };

    /* Initial point from two solves with identity scaling. */
    set_kkt_identity_scaling();
    ldlt.factorize(K);
    if (ldlt.info() != Eigen::Success)
    {
        return finish(Status::NumericalError, 0);
    }

    Vec rhs1 = Vec::Zero(dim_kkt);
    rhs1.segment(n, n_eq) = be;
    expand_cone_rhs(h, rhs1, n + n_eq);

    Vec rhs2 = Vec::Zero(dim_kkt);
    rhs2.head(n) = -c;

    Vec dx1(n), dy1(n_eq), dz1(n_ineq);
    Vec dx2(n), dy2(n_eq), dz2(n_ineq);
    solve_kkt(rhs1, dx1, dy1, dz1, true);
    x = dx1;
    bring_to_cone(-dz1, s);
    solve_kkt(rhs2, dx2, dy2, dz2, true);
    y = dy2;
    bring_to_cone(dz2, z);
    tau = 1.0;
    kap = 1.0;

    rhs1.head(n) = -c;

    Vec w_dz(n_ineq), ds_by_w(n_ineq), ds(n_ineq), ds1(n_ineq), ds2(n_ineq);
    Scalar pres_prev = std::numeric_limits<Scalar>::max();

    int iter = 0;
    for (iter = 0; iter <= settings.max_iter; iter++)
    {
        compute_residuals();

        const Scalar gap_inner = s.dot(z);
        const Scalar mu = (gap_inner + kap * tau) / (cone_degree + Scalar(1));

        const Solution cand = candidate();
        const Residuals res = kkt_residuals(prog, cand);
        consider_best(cand, res);

        const Scalar nx = x.norm(), ny = y.norm(), nz = z.norm(), ns = s.norm();
        const Scalar pres_int =
            std::max(n_eq > 0 ? ry.norm() / std::max(Scalar(1) + be.norm() + nx, Scalar(1)) : Scalar(0),
                     rz.norm() / std::max(Scalar(1) + h.norm() + nx + ns, Scalar(1))) /
            tau;

        if (settings.verbose)
        {
            fmt::print("it {:3d}  obj {:+.6e}  rp {:.2e}  rd {:.2e}  rg {:.2e}  mu {:.2e}\n",
                       iter, cand.objective, res.primal, res.dual, res.gap,
                       static_cast<double>(mu));
        }

        if (res.primal <= settings.tol_primal && res.dual <= settings.tol_dual &&
            res.gap <= settings.tol_gap)
        {
            best = cand;
            best.residuals = res;
            return finish(Status::Optimal, iter);
        }

        /* Infeasibility certificates. */
        if ((hz + by) / std::max(ny + nz, Scalar(1)) < Scalar(-1e-8) &&
            hresx / std::max(ny + nz, Scalar(1)) < Scalar(kInfeasTol) && tau < kap)
        {
            return finish(Status::PrimalInfeasible, iter);
        }
        if (cx / std::max(nx, Scalar(1)) < Scalar(-1e-8) && tau < kap &&
            std::max(hresy / std::max(nx, Scalar(1)), hresz / std::max(nx + ns, Scalar(1))) <
                Scalar(kInfeasTol))
        {
            return finish(Status::DualInfeasible, iter);
        }

        if (iter == settings.max_iter)
        {
            return finish(Status::MaxIterReached, iter);
        }
        if (settings.time_limit_seconds &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                    .count() > *settings.time_limit_seconds)
        {
            return finish(Status::MaxIterReached, iter);
        }
        if (!std::isfinite(static_cast<double>(mu)) ||
            !std::isfinite(static_cast<double>(pres_int)))
        {
            return finish(Status::NumericalError, iter);
        }
        if (iter > 0 && pres_int > Scalar(500) * pres_prev)
        {
            return finish(Status::MaxIterReached, iter);
        }
        pres_prev = pres_int;

        /* s or z on the cone boundary: the scaling is undefined and no
         * further progress is possible; surface the best iterate. */
        if (!update_scalings())
        {
            return finish(Status::MaxIterReached, iter);
        }
        update_scalings_in_kkt();
        ldlt.factorize(K);
        if (ldlt.info() != Eigen::Success)
        {
            return finish(Status::NumericalError, iter);
        }

        solve_kkt(rhs1, dx1, dy1, dz1, false);
        const Scalar dtau_denom =
            kap / tau - c.dot(dx1) - (n_eq > 0 ? be.dot(dy1) : Scalar(0)) - h.dot(dz1);

        /* Affine (predictor) direction. */
        rhs2.head(n) = rx;
        rhs2.segment(n, n_eq) = -ry;
        expand_cone_rhs(s - rz, rhs2, n + n_eq);
        solve_kkt(rhs2, dx2, dy2, dz2, false);

        const Scalar dtauaff =
            (rt - kap + c.dot(dx2) + (n_eq > 0 ? be.dot(dy2) : Scalar(0)) + h.dot(dz2)) /
            dtau_denom;
        dz2 += dtauaff * dz1;
        scale(dz2, w_dz);
        ds_by_w = -w_dz - lambda;
        const Scalar dkapaff = -kap - kap / tau * dtauaff;

        const Scalar step_aff =
            std::min(Scalar(1), line_search(ds_by_w, w_dz, dtauaff, dkapaff));
        const Scalar sigma = std::clamp(Scalar(std::pow(1.0 - static_cast<double>(step_aff), 3)),
                                        Scalar(kSigmaMin), Scalar(kSigmaMax));

        /* Combined (corrector) direction. */
        conic_product(lambda, lambda, ds1);
        conic_product(ds_by_w, w_dz, ds2);
        const Scalar sigmamu = sigma * mu;
        ds1 += ds2;
        ds1.head(n_lc).array() -= sigmamu;
        {
            int at = n_lc;
            for (const SocScaling& sc : socs)
            {
                ds1(at) -= sigmamu;
                at += sc.dim;
            }
        }
        conic_division(lambda, ds1, ds_by_w);
        scale(ds_by_w, ds1);

        const Scalar one_minus_sigma = Scalar(1) - sigma;
        rhs2.head(n) = one_minus_sigma * rx;
        rhs2.segment(n, n_eq) = -one_minus_sigma * ry;
        expand_cone_rhs(-one_minus_sigma * rz + ds1, rhs2, n + n_eq);
        solve_kkt(rhs2, dx2, dy2, dz2, false);

        const Scalar bkap = kap * tau + dkapaff * dtauaff - sigmamu;
        const Scalar dtau = (one_minus_sigma * rt - bkap / tau + c.dot(dx2) +
                             (n_eq > 0 ? be.dot(dy2) : Scalar(0)) + h.dot(dz2)) /
                            dtau_denom;
        dx2 += dtau * dx1;
        dy2 += dtau * dy1;
        dz2 += dtau * dz1;

        scale(dz2, w_dz);
        ds_by_w = -(ds_by_w + w_dz);
        const Scalar dkap = -(bkap + kap * dtau) / tau;

        const Scalar step = kGamma * line_search(ds_by_w, w_dz, dtau, dkap);
        scale(ds_by_w, ds);

        x += step * dx2;
        y += step * dy2;
        z += step * dz2;
        s += step * ds;
        kap += step * dkap;
        tau += step * dtau;

        if (tau <= Scalar(0) || kap < Scalar(0) || !std::isfinite(static_cast<double>(tau)))
        {
            return finish(Status::NumericalError, iter);
        }

        /* The embedding is homogeneous: renormalize tau to 1 so the 1/tau
         * backscaling cannot amplify round-off in the recovered iterate. */
        x /= tau;
        y /= tau;
        z /= tau;
        s /= tau;
        kap /= tau;
        tau = Scalar(1);
    }
    return finish(Status::MaxIterReached, iter);
}

/* Degenerate shapes the interior-point loop does not cover. */

Solution solve_no_rows(const conic::Program& program)
{
    Solution sol;
    sol.z = VectorXd::Zero(program.num_vars);
    sol.s.resize(0);
    sol.y.resize(0);
    sol.objective = program.obj_offset;
    sol.status = program.cost.norm() == 0.0 ? Status::Optimal : Status::DualInfeasible;
    return sol;
}

Solution solve_equality_only(const conic::Program& program)
{
    const int n = program.num_vars;
    const int m = program.num_rows();
    Eigen::SparseMatrix<double> K(n + m, n + m);
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < n; k++)
    {
        trip.emplace_back(k, k, kDeltaStat);
    }
    for (int k = 0; k < m; k++)
    {
        trip.emplace_back(n + k, n + k, -kDeltaStat);
    }
    const Eigen::SparseMatrix<double> At = program.A.transpose();
    for (int col = 0; col < At.outerSize(); col++)
    {
        for (Eigen::SparseMatrix<double>::InnerIterator it(At, col); it; ++it)
        {
            trip.emplace_back(it.row(), n + col, it.value());
        }
    }
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt(K);

    Solution sol;
    sol.z = VectorXd::Zero(n);
    sol.y = VectorXd::Zero(m);
    sol.s = VectorXd::Zero(m);
    if (ldlt.info() != Eigen::Success)
    {
        sol.status = Status::NumericalError;
        return sol;
    }
    VectorXd rhs(n + m);
    rhs << -program.cost, program.rhs;
    VectorXd w = ldlt.solve(rhs);
    for (int refine = 0; refine < 4; refine++)
    {
        VectorXd e(n + m);
        e.head(n) = -program.cost - At * w.tail(m);
        e.tail(m) = program.rhs - program.A * w.head(n);
        w += ldlt.solve(e);
    }
    sol.z = w.head(n);
    sol.y = w.tail(m);
    sol.objective = program.cost.dot(sol.z) + program.obj_offset;
    sol.residuals = kkt_residuals(program, sol);
    sol.status = (sol.residuals.primal <= 1e-7 && sol.residuals.dual <= 1e-7)
                     ? Status::Optimal
                     : Status::NumericalError;
    return sol;
}

}  // namespace

Solution solve(const conic::Program& program, const Settings& settings)
{
    const auto errors = conic::validate(program);
    if (!errors.empty())
    {
        throw std::invalid_argument("solve: invalid program: " + errors.front());
    }
    if (settings.max_iter < 1 || settings.tol_gap <= 0.0 || settings.tol_primal <= 0.0 ||
        settings.tol_dual <= 0.0)
    {
        throw std::invalid_argument("solve: invalid settings");
    }

    if (program.num_rows() == 0)
    {
        return solve_no_rows(program);
    }
    const bool has_cone_rows =
        std::any_of(program.cones.begin(), program.cones.end(),
                    [](const conic::Cone& c) { return c.kind != conic::ConeKind::Zero; });
    if (!has_cone_rows)
    {
        return solve_equality_only(program);
    }

    Ipm ipm(program, settings);
    Solution sol = ipm.run();
    sol.residuals = kkt_residuals(program, sol);
    return sol;
}

}  // namespace bho::solver
