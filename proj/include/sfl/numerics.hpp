#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sfl/errors.hpp"

namespace sfl {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Special functions

/// Modified Bessel function of the first kind, order zero.
double bessel_I0(double x);

/// sup over (b, a) of exp(-g2 (a - b)) I0(g1 a) / I0(g1 b).
double bessel_ratio_bound(double g1, double g2, std::span<const std::pair<double, double>> samples);

// ---------------------------------------------------------------------------
// Decay fits

struct DecayFit {
    double rate = 0.0;       ///< slope of -log v against d
    double intercept = 0.0;  ///< -log v at d = 0
    double residual = 0.0;   ///< rms deviation of -log v from the line
    std::size_t count = 0;
};

/// Least-squares fit of -log v = rate * d + intercept.
DecayFit fit_decay_rate(std::span<const std::pair<double, double>> samples);

// ---------------------------------------------------------------------------
// Contour quadrature

/// Closed curve sampled uniformly in a parameter s in [0, 2 pi).
struct ClosedPath {
    std::vector<cplx> z;
    std::vector<cplx> dz_ds;

    static ClosedPath circle(cplx center, double radius, std::size_t n);
};

struct ContourResult {
    cplx value;
    double error = 0.0;  ///< |I_n - I_{n/2}|
};

/// Trapezoidal rule for the integral of f(z) dz along the path.
ContourResult contour_integrate(const ClosedPath& path, const std::function<cplx(cplx)>& f);

// ---------------------------------------------------------------------------
// Truncated Laurent series

/// sum_{k >= low} c_k (x - center)^k, known modulo O((x - center)^order).
class PowerSeries {
public:
    PowerSeries() = default;
    PowerSeries(cplx center, int low, std::vector<cplx> coeffs, int order);

    static PowerSeries monomial(cplx coeff, int power, int order, cplx center = 0.0);
    static PowerSeries constant(cplx c, int order, cplx center = 0.0);
    /// Polynomial about `center` from coefficients about 0 (lowest degree first).
    static PowerSeries from_polynomial(std::span<const cplx> poly, cplx center, int order);

    cplx center() const { return center_; }
    int low() const { return low_; }
    int order() const { return order_; }
    /// Coefficient of x^k; 0 outside the stored range, throws for k >= order.
    cplx coeff(int k) const;
    /// Lowest power with a nonzero coefficient, or order() if none.
    int valuation() const;

    PowerSeries operator+(const PowerSeries& o) const;
    PowerSeries operator-(const PowerSeries& o) const;
    PowerSeries operator*(const PowerSeries& o) const;
    PowerSeries operator*(cplx s) const;
    PowerSeries operator-() const { return *this * cplx(-1.0); }

    PowerSeries derivative() const;
    /// Antiderivative with zero constant term; requires no x^{-1} term.
    PowerSeries integrate() const;
    /// Reciprocal; the leading coefficient must be nonzero.
    PowerSeries inverse() const;
    /// Principal power c^s x^{v s} (1 + w)^s; v s must be an integer.
    PowerSeries pow(double s) const;
    /// f(g(x)) with f a power series in its own variable and g(0) = 0, g' (0) != 0 allowed.
    PowerSeries compose(const PowerSeries& g) const;
    /// Series g with f(g(x)) = x; requires valuation 1.
    PowerSeries reversion() const;
    /// x -> w x.
    PowerSeries substitute_scale(cplx w) const;
    /// Truncate to a smaller order.
    PowerSeries truncated(int order) const;

    cplx evaluate(cplx x) const;

private:
    void check_compatible(const PowerSeries& o) const;

    cplx center_ = 0.0;
    int low_ = 0;
    std::vector<cplx> c_;
    int order_ = 0;
};

PowerSeries operator*(cplx s, const PowerSeries& p);

// ---------------------------------------------------------------------------
// Planar grids

enum class RegionKind { Disc, Annulus, Rectangle };

/// Disc, annulus or axis-aligned rectangle, with a signed level function (< 0 inside).
struct Region {
    RegionKind kind = RegionKind::Disc;
    cplx center = 0.0;
    double r_in = 0.0;
    double r_out = 1.0;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

    static Region disc(double R, cplx center = 0.0);
    static Region annulus(double r_in, double r_out, cplx center = 0.0);
    static Region rectangle(double x0, double x1, double y0, double y1);

    double level(cplx z) const;
    bool contains(cplx z) const { return level(z) <= 0.0; }
};

enum Dir : int { East = 0, West = 1, North = 2, South = 3 };

/// Uniform lattice restricted to a region. Interior nodes come first, followed by
/// boundary points placed exactly on the region boundary where lattice arms cross it.
class Grid2D {
public:
    struct Node {
        cplx z;
        bool boundary = false;
        std::array<int, 4> nb{-1, -1, -1, -1};  ///< neighbour index per Dir (interior nodes only)
        std::array<double, 4> arm{0, 0, 0, 0};  ///< distance to that neighbour
    };

    Grid2D(const Region& region, double h);

    const Region& region() const { return region_; }
    double spacing() const { return h_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t interior_count() const { return n_interior_; }
    std::size_t boundary_count() const { return nodes_.size() - n_interior_; }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Node>& nodes() const { return nodes_; }
    bool is_boundary(std::size_t i) const { return i >= n_interior_; }

private:
    Region region_;
    double h_;
    std::size_t n_interior_ = 0;
    std::vector<Node> nodes_;
};

/// Local values of an m-component node-major field around an interior node,
/// with Shortley-Weller difference formulas.
class StencilView {
public:
    StencilView(const Grid2D& g, std::span<const double> u, int m, std::size_t node)
        : g_(&g), u_(u), m_(m), i_(node) {}

    std::size_t index() const { return i_; }
    cplx z() const { return g_->node(i_).z; }
    int components() const { return m_; }
    double operator()(int c) const { return u_[i_ * m_ + c]; }
    double at(Dir d, int c) const { return u_[g_->node(i_).nb[d] * m_ + c]; }
    double arm(Dir d) const { return g_->node(i_).arm[d]; }
    double dx(int c) const;
    double dy(int c) const;
    double dxx(int c) const;
    double dyy(int c) const;
    double lap(int c) const { return dxx(c) + dyy(c); }

private:
    const Grid2D* g_;
    std::span<const double> u_;
    int m_;
    std::size_t i_;
};

/// Per-interior-node residual: writes `components()` values.
using NodeResidual = std::function<void(const StencilView&, double* out)>;

struct NewtonOptions {
    double tol = 1e-9;        ///< max-norm residual target
    int max_iter = 50;
    int polish_steps = 4;     ///< extra steps while the residual keeps dropping tenfold
    double fd_step = 1e-7;    ///< relative finite-difference step for the Jacobian
    bool reuse_factorization = true;
    double chord_contraction = 0.25;  ///< a reused factorization must shrink the residual this much
};

struct NewtonReport {
    int iterations = 0;
    double residual = 0.0;    ///< final max-norm residual
};

/// Damped Newton for an m-component field. `u` holds the initial guess on interior
/// nodes and the Dirichlet data on boundary nodes (node-major).
NewtonReport solve_elliptic_newton(const Grid2D& grid, int m, const NodeResidual& residual,
                                   std::vector<double>& u, const NewtonOptions& opt = {});

/// Single-component convenience form: boundary values taken from `boundary(z)`.
std::vector<double> solve_elliptic_newton(const Grid2D& grid, const NodeResidual& residual,
                                          const std::function<double(cplx)>& boundary,
                                          const NewtonOptions& opt = {},
                                          NewtonReport* report = nullptr);

/// Max-norm of the residual over interior nodes.
double residual_norm(const Grid2D& grid, int m, const NodeResidual& residual,
                     std::span<const double> u);

// ---------------------------------------------------------------------------
// Radial boundary-value problems

struct RadialProfile {
    std::vector<double> r;   ///< strictly increasing, r[0] = 0
    std::vector<double> u;
    std::vector<double> du;

    /// Cubic Hermite interpolation; throws RegionError outside [0, r.back()].
    double value(double x) const;
    double derivative(double x) const;
};

/// Right-hand side f(r, u) of u'' + u'/r = f(r, u).
struct RadialRhs {
    std::function<double(double, double)> f;
    std::function<double(double, double)> dfdu;  ///< optional; differenced if empty
};

struct RadialOptions {
    std::size_t cells = 4000;
    double tol = 1e-10;      ///< target for RadialReport::residual
    int max_iter = 50;
    std::function<double(double)> initial;  ///< optional initial guess
};

struct RadialReport {
    int iterations = 0;
    double residual = 0.0;   ///< max control-volume residual over max(1, max flux |r u'|)
    double pointwise = 0.0;  ///< max over nodes of |u'' + u'/r - f|
};

/// Regular solution with u'(0) = 0 and u(r_max) = outer_value.
RadialProfile solve_radial_bvp(const RadialRhs& rhs, double r_max, double outer_value,
                               const RadialOptions& opt = {}, RadialReport* report = nullptr);

/// Tridiagonal solve; sub[0] and sup[n-1] are ignored.
std::vector<double> thomas_solve(std::vector<double> sub, std::vector<double> diag,
                                 std::vector<double> sup, std::vector<double> rhs);

}  // namespace sfl
