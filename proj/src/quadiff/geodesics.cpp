#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "sfl/quadiff.hpp"
#include "quadiff_detail.hpp"

namespace sfl {

namespace {

constexpr int kChartSamples = 24;

/// Local chart at a zero: zP(x), its derivative, and the inverse.
struct Chart {
    const Zero* zero;
    PowerSeries d;

    explicit Chart(const Zero& z) : zero(&z), d(z.coord.derivative()) {}

    /// Square root u of zP(z) with (3/2) u zP'(z) equal to the tracked p^{1/2}.
    cplx root(cplx z, cplx sigma) const {
        const cplx x = z - zero->location;
        const cplx u = std::sqrt(zero->coord.evaluate(x));
        const cplx s = 1.5 * u * d.evaluate(x);
        return std::abs(s - sigma) <= std::abs(s + sigma) ? u : -u;
    }

    /// Point with zP = u^2, and the matching branch (3/2) u zP' of p^{1/2}.
    std::pair<cplx, cplx> point(cplx u) const {
        const cplx target = u * u;
        cplx x = zero->inverse.evaluate(target);
        for (int it = 0; it < 4; ++it) {
            const cplx dz = d.evaluate(x);
            if (dz == cplx(0.0)) break;
            x -= (zero->coord.evaluate(x) - target) / dz;
        }
        return {zero->location + x, 1.5 * u * d.evaluate(x)};
    }
};

void push(Geodesic& g, double s, cplx z, cplx sigma) {
    g.s.push_back(s);
    g.path.push_back(z);
    g.sqrt_p.push_back(sigma);
}

/// Samples w = A + tau e along tau in (0, tau_end] inside a chart, u^3 = w continuous from uA.
std::pair<cplx, cplx> traverse(Geodesic& g, const Chart& ch, cplx uA, cplx e, double s0, double tau_end) {
    const cplx A = uA * uA * uA;
    std::pair<cplx, cplx> last;
    for (int j = 1; j <= kChartSamples; ++j) {
        const double tau = tau_end * j / kChartSamples;
        const cplx w = A + tau * e;
        const cplx u = (w == cplx(0.0)) ? cplx(0.0) : uA * std::pow(std::abs(w / A), 1.0 / 3.0) *
                                                         std::polar(1.0, std::arg(w / A) / 3.0);
        last = ch.point(u);
        push(g, s0 + tau, last.first, last.second);
    }
    return last;
}

}  // namespace

Geodesic shoot_geodesic(const QuadraticDifferential& phi, std::span<const Zero> zs, int from,
                        double angle, double L_max, const ShootOptions& opt) {
    if (from < 0 || static_cast<std::size_t>(from) >= zs.size())
        throw PreconditionError("shoot_geodesic: start index out of range");
    if (!(L_max > 0)) throw PreconditionError("shoot_geodesic: L_max must be positive");
    if (!(angle >= 0 && angle <= 3 * M_PI)) throw PreconditionError("shoot_geodesic: angle outside [0, 3 pi)");

    const double hit_r = opt.hit_radius < 0 ? 1e-4 * L_max : opt.hit_radius;
    const cplx e = std::polar(1.0, angle);
    std::vector<Chart> charts;
    charts.reserve(zs.size());
    double max_dt = L_max / 50;
    for (const auto& z : zs) {
        charts.emplace_back(z);
        max_dt = std::min(max_dt, 0.25 * z.flat_radius);
    }

    Geodesic g;
    g.start = from;
    g.angle = angle;
    const Chart& home = charts[static_cast<std::size_t>(from)];
    push(g, 0.0, zs[from].location, 0.0);

    // leave the start zero along w = tau e, u = tau^{1/3} e^{i angle / 3}
    const double s0 = std::min(zs[from].flat_radius, L_max);
    const cplx dir = std::polar(1.0, angle / 3);
    std::pair<cplx, cplx> cur;
    for (int j = 1; j <= kChartSamples; ++j) {
        const double tau = s0 * j / kChartSamples;
        cur = home.point(std::cbrt(tau) * dir);
        push(g, tau, cur.first, cur.second);
    }
    double s = s0;
    cplx sigma = cur.second;
    std::array<double, 2> x{cur.first.real(), cur.first.imag()};

    std::vector<bool> armed(zs.size(), true);
    armed[static_cast<std::size_t>(from)] = false;

    auto rhs = [&](const std::array<double, 2>& y, std::array<double, 2>& dy, double) {
        const cplx z(y[0], y[1]);
        const cplx v = e / detail::tracked_sqrt(phi.p(z), sigma);
        dy[0] = v.real();
        dy[1] = v.imag();
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(opt.tol, opt.tol, ode::runge_kutta_dopri5<std::array<double, 2>>());
    double dt = max_dt;

    while (s < L_max) {
        dt = std::min({dt, max_dt, L_max - s});
        if (stepper.try_step(rhs, x, s, dt) != ode::success) {
            if (dt < 1e-14 * (1 + s)) {
                std::ostringstream msg;
                msg << "shoot_geodesic: step size underflow at z = " << x[0] << (x[1] < 0 ? "" : "+")
                    << x[1] << "i, s = " << s;
                throw NumericalError(msg.str());
            }
            continue;
        }
        cplx z(x[0], x[1]);
        sigma = detail::tracked_sqrt(phi.p(z), sigma);
        push(g, s, z, sigma);

        for (std::size_t q = 0; q < zs.size(); ++q) {
            const double dist = std::abs(z - zs[q].location);
            if (!armed[q]) {
                if (dist > zs[q].radius) armed[q] = true;
                continue;
            }
            if (dist >= 0.9 * zs[q].radius) continue;
            armed[q] = false;
            const Chart& ch = charts[q];
            const cplx uA = ch.root(z, sigma);
            const cplx A = uA * uA * uA;
            const double proj = (A * std::conj(e)).real();
            if (proj >= 0) continue;  // already past the closest approach
            const double miss = (A * std::conj(e)).imag();
            const double s_star = s - proj;
            g.passes.push_back({static_cast<int>(q), s_star, miss});
            if (std::abs(miss) < hit_r && s_star <= L_max) {
                traverse(g, ch, uA, e, s, -proj);
                g.path.back() = zs[q].location;
                g.sqrt_p.back() = 0.0;
                g.hit = static_cast<int>(q);
                g.length = s_star;
                return g;
            }
            const double tau_end = std::min(-2 * proj, L_max - s);
            const auto out = traverse(g, ch, uA, e, s, tau_end);
            s += tau_end;
            z = out.first;
            sigma = out.second;
            x = {z.real(), z.imag()};
            dt = max_dt;
            break;
        }
    }
    g.length = s;
    return g;
}

namespace {

const Pass* match(const Geodesic& g, int zero, double s_ref, double window) {
    const Pass* best = nullptr;
    for (const auto& p : g.passes) {
        if (p.zero != zero || std::abs(p.s - s_ref) > window) continue;
        if (!best || std::abs(p.s - s_ref) < std::abs(best->s - s_ref)) best = &p;
    }
    return best;
}

cplx midpoint(const SaddleConnection& c, const std::vector<double>& s) {
    const double half = 0.5 * c.length;
    for (std::size_t k = 1; k < s.size(); ++k)
        if (s[k] >= half) {
            const double t = (half - s[k - 1]) / (s[k] - s[k - 1]);
            return c.path[k - 1] + t * (c.path[k] - c.path[k - 1]);
        }
    return c.path.back();
}

struct Found {
    SaddleConnection c;
    cplx mid;
};

}  // namespace

std::vector<SaddleConnection> saddle_connections(const QuadraticDifferential& phi, double L_max,
                                                 const SweepOptions& opt) {
    if (!(L_max > 0)) throw PreconditionError("saddle_connections: L_max must be positive");
    if (opt.resolution < 64) throw PreconditionError("saddle_connections: resolution below 64");
    const auto zs = zeros(phi);
    const int N = opt.resolution;
    const double window = 0.1 * L_max;
    ShootOptions exact;
    exact.hit_radius = 0.0;
    ShootOptions closing;
    closing.hit_radius = 10 * opt.hit_tol;

    std::vector<Found> found;
    for (int P = 0; P < static_cast<int>(zs.size()); ++P) {
        std::vector<Geodesic> shots;
        shots.reserve(static_cast<std::size_t>(N));
        for (int k = 0; k < N; ++k) shots.push_back(shoot_geodesic(phi, zs, P, 3 * M_PI * k / N, L_max));

        for (int k = 0; k < N; ++k) {
            const Geodesic& ga = shots[static_cast<std::size_t>(k)];
            const Geodesic& gb = shots[static_cast<std::size_t>((k + 1) % N)];
            const double ta = 3 * M_PI * k / N, tb = 3 * M_PI * (k + 1) / N;
            for (const auto& pa : ga.passes) {
                if (pa.s > L_max) continue;
                const Pass* pb = match(gb, pa.zero, pa.s, window);
                if (!pb || (pa.miss > 0) == (pb->miss > 0)) continue;

                double lo = ta, hi = tb, m_lo = pa.miss, s_ref = pa.s, theta = ta;
                bool ok = false;
                for (int it = 0; it < opt.max_bisections; ++it) {
                    theta = 0.5 * (lo + hi);
                    const Geodesic g = shoot_geodesic(phi, zs, P, theta, L_max * 1.05, exact);
                    const Pass* pm = match(g, pa.zero, s_ref, window);
                    if (!pm) break;
                    s_ref = pm->s;
                    if (std::abs(pm->miss) < opt.hit_tol) {
                        ok = true;
                        break;
                    }
                    if ((pm->miss > 0) == (m_lo > 0)) {
                        lo = theta;
                        m_lo = pm->miss;
                    } else {
                        hi = theta;
                    }
                }
                if (!ok || s_ref > L_max) continue;
                if (theta >= 3 * M_PI) theta -= 3 * M_PI;
                const Geodesic g = shoot_geodesic(phi, zs, P, theta, L_max * 1.05, closing);
                if (!g.hit || *g.hit != pa.zero || std::abs(g.length - s_ref) > 1e-6) continue;

                SaddleConnection c;
                c.start = P;
                c.end = pa.zero;
                c.start_point = zs[P].location;
                c.end_point = zs[pa.zero].location;
                c.angle = theta;
                c.length = g.length;
                c.path = g.path;
                const cplx mid = midpoint(c, g.s);
                bool dup = false;
                for (const auto& f : found)
                    if (f.c.start == c.start && f.c.end == c.end && std::abs(f.c.angle - c.angle) < 1e-6)
                        dup = true;
                if (!dup) found.push_back({std::move(c), mid});
            }
        }
    }

    if (opt.dedupe) {
        std::vector<Found> kept;
        for (auto& f : found) {
            bool dup = false;
            for (const auto& k : kept)
                if (k.c.start == f.c.end && k.c.end == f.c.start && std::abs(k.c.length - f.c.length) < 1e-6 &&
                    std::abs(k.mid - f.mid) < 1e-4 * (1 + std::abs(f.mid)))
                    dup = true;
            if (!dup) kept.push_back(std::move(f));
        }
        found = std::move(kept);
    }

    std::vector<SaddleConnection> out;
    for (auto& f : found) out.push_back(std::move(f.c));
    std::sort(out.begin(), out.end(), [](const SaddleConnection& a, const SaddleConnection& b) {
        if (a.length != b.length) return a.length < b.length;
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end < b.end;
        return a.angle < b.angle;
    });
    return out;
}

Threshold threshold(const QuadraticDifferential& phi, double L_max, const SweepOptions& opt) {
    Threshold t;
    t.cutoff = L_max;
    t.resolution = opt.resolution;
    auto sc = saddle_connections(phi, L_max, opt);
    if (!sc.empty()) {
        t.value = sc.front().length;
        t.witness = std::move(sc.front());
    }
    return t;
}

}  // namespace sfl
