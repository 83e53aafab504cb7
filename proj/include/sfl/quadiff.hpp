#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sfl/numerics.hpp"

namespace sfl {

/// phi = p(z) dz^2 with p a polynomial (coefficients lowest degree first).
class QuadraticDifferential {
public:
    explicit QuadraticDifferential(std::vector<cplx> coeffs);

    const std::vector<cplx>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    cplx p(cplx z) const;
    cplx dp(cplx z) const;

private:
    std::vector<cplx> c_;
};

/// Simple zero P with the cube-root coordinate zP, phi = (3/2)^2 zP dzP^2, zP(P) = 0.
struct Zero {
    cplx location;
    PowerSeries coord;    ///< zP as a series in x = z - P (center 0)
    PowerSeries inverse;  ///< z - P as a series in zP
    double radius = 0.0;  ///< Euclidean radius on which both series are trusted
    double flat_radius = 0.0;  ///< flat radius of the disc inside `radius`

    cplx zP(cplx z) const;
    /// Developing angle in [0, 3 pi) of the geodesic leaving P in the Euclidean direction d.
    double angle_toward(cplx d) const;
};

/// All zeros, ordered by real then imaginary part; throws DomainError on a repeated root.
std::vector<Zero> zeros(const QuadraticDifferential& phi);

/// Integral of |p|^{1/2} |dz| along the polyline through `path`.
double flat_length(const QuadraticDifferential& phi, std::span<const cplx> path);

struct ShootOptions {
    double hit_radius = -1.0;   ///< flat hit distance; negative means 1e-4 * L_max
    double tol = 1e-12;         ///< integrator tolerance
};

/// Closest approach of a geodesic to a zero it passes inside that zero's chart.
struct Pass {
    int zero = -1;
    double s = 0.0;      ///< arclength at the closest approach
    double miss = 0.0;   ///< signed flat distance; zero means the geodesic runs into the zero
};

struct Geodesic {
    int start = -1;
    double angle = 0.0;
    std::vector<double> s;
    std::vector<cplx> path;
    std::vector<cplx> sqrt_p;   ///< tracked branch of p^{1/2} at each sample
    std::vector<Pass> passes;
    std::optional<int> hit;     ///< zero reached, if any
    double length = 0.0;        ///< arclength at the end of the trajectory
};

/// Flat geodesic leaving zs[from] at developing angle `angle`, stopped at L_max or at a hit.
Geodesic shoot_geodesic(const QuadraticDifferential& phi, std::span<const Zero> zs, int from,
                        double angle, double L_max, const ShootOptions& opt = {});

struct SaddleConnection {
    int start = -1;
    int end = -1;
    cplx start_point;
    cplx end_point;
    double angle = 0.0;
    double length = 0.0;
    std::vector<cplx> path;
};

struct SweepOptions {
    int resolution = 256;       ///< angles per zero over [0, 3 pi)
    double hit_tol = 1e-9;      ///< refined miss distance
    int max_bisections = 60;
    bool dedupe = true;         ///< drop the reversed copy of each connection
};

/// Saddle connections of length <= L_max found by an angular sweep, sorted by length.
/// Complete only up to the sweep resolution.
std::vector<SaddleConnection> saddle_connections(const QuadraticDifferential& phi, double L_max,
                                                 const SweepOptions& opt = {});

struct Threshold {
    std::optional<double> value;            ///< empty: none found below the cutoff
    std::optional<SaddleConnection> witness;
    double cutoff = 0.0;
    int resolution = 0;
};

Threshold threshold(const QuadraticDifferential& phi, double L_max, const SweepOptions& opt = {});

/// |int_P^z p^{1/2} dz|; throws RegionError unless it is below certified_radius.
double distance_from_zero(const QuadraticDifferential& phi, const Zero& P, cplx z,
                          double certified_radius = std::numeric_limits<double>::infinity());

}  // namespace sfl
