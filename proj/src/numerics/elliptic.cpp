#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>

#include "sfl/numerics.hpp"

namespace sfl {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

void eval_all(const Grid2D& g, int m, const NodeResidual& res, std::span<const double> u,
              std::vector<double>& out) {
    const std::size_t n = g.interior_count();
    out.assign(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) res(StencilView(g, u, m, i), out.data() + i * m);
}

double max_abs(const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

double norm2(const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r += x * x;
    return std::sqrt(r);
}

bool finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Forward-difference Jacobian; perturbing one unknown only touches its own row
/// block and those of its interior lattice neighbours.
void assemble(const Grid2D& g, int m, const NodeResidual& res, std::vector<double>& u,
              const std::vector<double>& r0, double fd_step, std::vector<Eigen::Triplet<double, int>>& trip) {
    trip.clear();
    const std::size_t n = g.interior_count();
    std::vector<double> tmp(static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < n; ++j) {
        const auto& nd = g.node(j);
        int rows[5];
        int nr = 0;
        rows[nr++] = static_cast<int>(j);
        for (int d = 0; d < 4; ++d)
            if (nd.nb[d] >= 0 && !g.is_boundary(static_cast<std::size_t>(nd.nb[d]))) rows[nr++] = nd.nb[d];
        for (int c = 0; c < m; ++c) {
            const std::size_t col = j * m + c;
            const double keep = u[col];
            const double eps = fd_step * std::max(1.0, std::abs(keep));
            u[col] = keep + eps;
            const double step = u[col] - keep;
            for (int k = 0; k < nr; ++k) {
                const std::size_t row = static_cast<std::size_t>(rows[k]);
                res(StencilView(g, u, m, row), tmp.data());
                for (int cc = 0; cc < m; ++cc)
                    trip.emplace_back(static_cast<int>(row * m + cc), static_cast<int>(col),
                                      (tmp[cc] - r0[row * m + cc]) / step);
            }
            u[col] = keep;
        }
    }
}

}  // namespace

double residual_norm(const Grid2D& grid, int m, const NodeResidual& residual, std::span<const double> u) {
    std::vector<double> r;
    eval_all(grid, m, residual, u, r);
    return max_abs(r);
}

NewtonReport solve_elliptic_newton(const Grid2D& grid, int m, const NodeResidual& residual,
                                   std::vector<double>& u, const NewtonOptions& opt) {
    if (u.size() != grid.size() * m) throw InputError("solve_elliptic_newton: field size mismatch");
    if (!finite(u)) throw InputError("solve_elliptic_newton: non-finite initial or boundary data");
    const std::size_t nu = grid.interior_count() * m;
    NewtonReport rep;
    std::vector<double> r, rt, ut;
    eval_all(grid, m, residual, u, r);
    double rmax = max_abs(r);
    if (nu == 0) {
        rep.residual = rmax;
        return rep;
    }

    SpMat J(static_cast<int>(nu), static_cast<int>(nu));
    Eigen::UmfPackLU<SpMat> lu;
    bool analysed = false, factored = false;
    std::vector<Eigen::Triplet<double, int>> trip;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(nu)), d;
    auto trial = [&](double lambda) {
        ut = u;
        for (std::size_t k = 0; k < nu; ++k) ut[k] += lambda * d[static_cast<Eigen::Index>(k)];
        eval_all(grid, m, residual, ut, rt);
        return finite(rt);
    };
    int polish = 0;
    for (int it = 0; it < opt.max_iter; ++it) {
        if (rmax <= opt.tol) {
            if (polish >= opt.polish_steps) break;
            ++polish;
        }
        for (std::size_t k = 0; k < nu; ++k) rhs[static_cast<Eigen::Index>(k)] = -r[k];
        const double n0 = norm2(r);
        bool accepted = false;
        // chord step with the previous factorization when it still contracts well
        if (factored && opt.reuse_factorization) {
            d = lu.solve(rhs);
            if (trial(1.0) && norm2(rt) < opt.chord_contraction * n0) accepted = true;
        }
        if (!accepted) {
            assemble(grid, m, residual, u, r, opt.fd_step, trip);
            J.setFromTriplets(trip.begin(), trip.end());
            if (!analysed) {
                lu.analyzePattern(J);
                analysed = true;
            }
            lu.factorize(J);
            if (lu.info() != Eigen::Success)
                throw ConvergenceError("solve_elliptic_newton: singular Jacobian", rmax, it);
            factored = true;
            d = lu.solve(rhs);
            double lambda = 1.0;
            for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
                if (trial(lambda) && norm2(rt) < n0) {
                    accepted = true;
                    break;
                }
            }
        }
        rep.iterations = it + 1;
        if (!accepted) {
            if (rmax <= opt.tol) break;
            throw ConvergenceError("solve_elliptic_newton: line search stalled", rmax, it + 1);
        }
        const double prev = rmax;
        u.swap(ut);
        r.swap(rt);
        rmax = max_abs(r);
        // stop polishing once the decrease flattens out at roundoff
        if (prev <= opt.tol && rmax > 0.1 * prev) break;
    }
    rep.residual = rmax;
    if (rmax > opt.tol) throw ConvergenceError("solve_elliptic_newton: no convergence", rmax, rep.iterations);
    return rep;
}

std::vector<double> solve_elliptic_newton(const Grid2D& grid, const NodeResidual& residual,
                                          const std::function<double(cplx)>& boundary,
                                          const NewtonOptions& opt, NewtonReport* report) {
    std::vector<double> u(grid.size(), 0.0);
    for (std::size_t i = grid.interior_count(); i < grid.size(); ++i) u[i] = boundary(grid.node(i).z);
    NewtonReport rep = solve_elliptic_newton(grid, 1, residual, u, opt);
    if (report) *report = rep;
    return u;
}

}  // namespace sfl
