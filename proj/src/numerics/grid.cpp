#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/tools/roots.hpp>

#include "sfl/numerics.hpp"

namespace sfl {

Region Region::disc(double R, cplx center) {
    if (!(R > 0.0)) throw InputError("Region::disc: radius must be positive");
    Region r;
    r.kind = RegionKind::Disc;
    r.center = center;
    r.r_out = R;
    return r;
}

Region Region::annulus(double r_in, double r_out, cplx center) {
    if (!(r_in > 0.0) || !(r_out > r_in)) throw InputError("Region::annulus: need 0 < r_in < r_out");
    Region r;
    r.kind = RegionKind::Annulus;
    r.center = center;
    r.r_in = r_in;
    r.r_out = r_out;
    return r;
}

Region Region::rectangle(double x0, double x1, double y0, double y1) {
    if (!(x1 > x0) || !(y1 > y0)) throw InputError("Region::rectangle: empty rectangle");
    Region r;
    r.kind = RegionKind::Rectangle;
    r.x0 = x0;
    r.x1 = x1;
    r.y0 = y0;
    r.y1 = y1;
    r.center = cplx(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    return r;
}

double Region::level(cplx z) const {
    switch (kind) {
        case RegionKind::Disc:
            return std::abs(z - center) - r_out;
        case RegionKind::Annulus: {
            const double r = std::abs(z - center);
            return std::max(r_in - r, r - r_out);
        }
        case RegionKind::Rectangle:
            return std::max(std::max(x0 - z.real(), z.real() - x1), std::max(y0 - z.imag(), z.imag() - y1));
    }
    return 0.0;
}

namespace {

const cplx kDirs[4] = {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)};

/// Distance along `e` from z to the first boundary crossing within (0, smax], or -1.
double crossing(const Region& reg, cplx z, cplx e, double h, double smax) {
    const int steps = static_cast<int>(std::ceil(smax / (h / 8.0)));
    double a = 0.0;
    for (int k = 1; k <= steps; ++k) {
        const double b = std::min(smax, k * (h / 8.0));
        if (reg.level(z + b * e) >= 0.0) {
            auto f = [&](double s) { return reg.level(z + s * e); };
            if (f(b) == 0.0) return b;
            boost::math::tools::eps_tolerance<double> tol(52);
            std::uintmax_t it = 200;
            auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, tol, it);
            // settle on the side closest to the zero level
            return std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
        }
        a = b;
    }
    return -1.0;
}

}  // namespace

Grid2D::Grid2D(const Region& region, double h) : region_(region), h_(h) {
    if (!(h > 0.0)) throw InputError("Grid2D: spacing must be positive");
    double xmin, xmax, ymin, ymax;
    cplx anchor;
    if (region.kind == RegionKind::Rectangle) {
        xmin = region.x0, xmax = region.x1, ymin = region.y0, ymax = region.y1;
        anchor = cplx(region.x0, region.y0);
    } else {
        xmin = region.center.real() - region.r_out, xmax = region.center.real() + region.r_out;
        ymin = region.center.imag() - region.r_out, ymax = region.center.imag() + region.r_out;
        anchor = region.center;
    }
    const int i0 = static_cast<int>(std::floor((xmin - anchor.real()) / h)) - 1;
    const int i1 = static_cast<int>(std::ceil((xmax - anchor.real()) / h)) + 1;
    const int j0 = static_cast<int>(std::floor((ymin - anchor.imag()) / h)) - 1;
    const int j1 = static_cast<int>(std::ceil((ymax - anchor.imag()) / h)) + 1;
    auto lat = [&](int i, int j) { return anchor + cplx(i * h, j * h); };

    std::map<std::pair<int, int>, bool> interior;
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
            if (region.level(lat(i, j)) < -0.05 * h) interior[{j, i}] = true;

    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    const double smax = 2.0 * h;
    // demote nodes whose axial arms leave the region too far away
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& [key, in] : interior) {
            if (!in) continue;
            const auto [j, i] = key;
            for (int d = 0; d < 4; ++d) {
                auto it = interior.find({j + dj[d], i + di[d]});
                if (it != interior.end() && it->second) continue;
                if (crossing(region, lat(i, j), kDirs[d], h, smax) < 0.0) {
                    in = false;
                    changed = true;
                    break;
                }
            }
        }
    }

    std::map<std::pair<int, int>, int> index;
    for (auto& [key, in] : interior) {
        if (!in) continue;
        index[key] = static_cast<int>(nodes_.size());
        Node n;
        n.z = lat(key.second, key.first);
        nodes_.push_back(n);
    }
    n_interior_ = nodes_.size();
    for (auto& [key, idx] : index) {
        const auto [j, i] = key;
        for (int d = 0; d < 4; ++d) {
            auto it = index.find({j + dj[d], i + di[d]});
            if (it != index.end()) {
                nodes_[idx].nb[d] = it->second;
                nodes_[idx].arm[d] = h;
                continue;
            }
            const double s = crossing(region, nodes_[idx].z, kDirs[d], h, smax);
            Node b;
            b.z = nodes_[idx].z + s * kDirs[d];
            b.boundary = true;
            nodes_[idx].nb[d] = static_cast<int>(nodes_.size());
            nodes_[idx].arm[d] = s;
            nodes_.push_back(b);
        }
    }
}

double StencilView::dx(int c) const {
    const double hE = arm(East), hW = arm(West);
    const double u0 = (*this)(c);
    return (hW * hW * (at(East, c) - u0) + hE * hE * (u0 - at(West, c))) / (hE * hW * (hE + hW));
}

double StencilView::dy(int c) const {
    const double hN = arm(North), hS = arm(South);
    const double u0 = (*this)(c);
    return (hS * hS * (at(North, c) - u0) + hN * hN * (u0 - at(South, c))) / (hN * hS * (hN + hS));
}

double StencilView::dxx(int c) const {
    const double hE = arm(East), hW = arm(West);
    const double u0 = (*this)(c);
    return 2.0 * ((at(East, c) - u0) / hE + (at(West, c) - u0) / hW) / (hE + hW);
}

double StencilView::dyy(int c) const {
    const double hN = arm(North), hS = arm(South);
    const double u0 = (*this)(c);
    return 2.0 * ((at(North, c) - u0) / hN + (at(South, c) - u0) / hS) / (hN + hS);
}

}  // namespace sfl
