#include <algorithm>
#include <cmath>

#include "sfl/localmodel.hpp"

namespace sfl {

namespace {

template <class T>
T d1(const T& u0, const T& up, const T& um, double hp, double hm) {
    return (hm * hm * (up - u0) + hp * hp * (u0 - um)) / (hp * hm * (hp + hm));
}

template <class T>
T d2(const T& u0, const T& up, const T& um, double hp, double hm) {
    return 2.0 * ((up - u0) / hp + (um - u0) / hm) / (hp + hm);
}

/// Shortley-Weller x/y derivatives and Laplacian of a nodal quantity q(node index).
template <class T, class Q>
void derivs(const Grid2D& g, std::size_t i, Q q, T& qx, T& qy, T& lap) {
    const auto& n = g.node(i);
    const T c = q(i), e = q(n.nb[East]), w = q(n.nb[West]), no = q(n.nb[North]), so = q(n.nb[South]);
    qx = d1(c, e, w, n.arm[East], n.arm[West]);
    qy = d1(c, no, so, n.arm[North], n.arm[South]);
    lap = d2(c, e, w, n.arm[East], n.arm[West]) + d2(c, no, so, n.arm[North], n.arm[South]);
}

struct KEntries {
    double a;
    cplx b;
    double c;
};

KEntries entries(const double* u) {
    const double a = std::exp(u[0]);
    const cplx b(u[1], u[2]);
    return {a, b, (1.0 + std::norm(b)) / a};
}

std::shared_ptr<const Grid2D> disc_grid(double R, const DiscOptions& opt) {
    if (!(R > 0.0) || opt.divisions < 4) throw InputError("disc solve: bad radius or resolution");
    return std::make_shared<Grid2D>(Region::disc(R), R / static_cast<double>(opt.divisions));
}

/// Mode-by-mode extension of boundary data on |z| = R: sum_k g_k kernel(|k|, r) e^{i k theta}.
class ModeExtension {
public:
    ModeExtension(const std::function<cplx(cplx)>& g, double R, std::function<double(int, double)> kernel)
        : kernel_(std::move(kernel)) {
        const int M = 256;
        std::vector<cplx> samples(M);
        for (int j = 0; j < M; ++j) samples[j] = g(std::polar(R, 2.0 * M_PI * j / M));
        double cmax = 0.0;
        std::vector<std::pair<int, cplx>> all;
        for (int k = -M / 2 + 1; k < M / 2; ++k) {
            cplx acc = 0.0;
            for (int j = 0; j < M; ++j) acc += samples[j] * std::polar(1.0, -2.0 * M_PI * k * j / M);
            acc /= static_cast<double>(M);
            cmax = std::max(cmax, std::abs(acc));
            all.emplace_back(k, acc);
        }
        for (auto& [k, c] : all)
            if (std::abs(c) > 1e-12 * cmax) modes_.emplace_back(k, c);
    }

    cplx operator()(cplx z) const {
        const double r = std::abs(z), th = std::arg(z);
        cplx acc = 0.0;
        for (auto& [k, c] : modes_) acc += c * kernel_(std::abs(k), r) * std::polar(1.0, k * th);
        return acc;
    }

private:
    std::function<double(int, double)> kernel_;
    std::vector<std::pair<int, cplx>> modes_;
};

/// Kernel of the linearized off-diagonal equation, Laplacian minus 16.
std::function<double(int, double)> bessel_kernel(double R) {
    return [R](int k, double r) { return std::cyl_bessel_i(static_cast<double>(k), 4.0 * r) / std::cyl_bessel_i(static_cast<double>(k), 4.0 * R); };
}

std::function<double(int, double)> harmonic_kernel(double R) {
    return [R](int k, double r) { return std::pow(r / R, k); };
}

}  // namespace

double HermitianField::a(std::size_t i) const { return std::exp(u[3 * i]); }
cplx HermitianField::b(std::size_t i) const { return {u[3 * i + 1], u[3 * i + 2]}; }
double HermitianField::c(std::size_t i) const { return (1.0 + std::norm(b(i))) / a(i); }
Mat2 HermitianField::H(std::size_t i) const {
    Mat2 m;
    m << a(i), b(i), std::conj(b(i)), c(i);
    return m;
}

double SymmetricField::a(std::size_t i) const { return std::sqrt(1.0 + bt[i] * bt[i]); }

void symmetric_residual(const StencilView& s, double* out) {
    const double b = s(0);
    const double gx = s.dx(0), gy = s.dy(0);
    out[0] = s.lap(0) - b * (gx * gx + gy * gy) / (1.0 + b * b) - 16.0 * (1.0 + b * b) * b;
}

void general_residual(const StencilView& s, double* out) {
    // K = conj(H) = [[a, conj b], [b, c]]; G = K dbar(K^{-1} dK) - K [F, F^dagger]
    KEntries k[5];
    double buf[3];
    for (int c = 0; c < 3; ++c) buf[c] = s(c);
    k[0] = entries(buf);
    for (int d = 0; d < 4; ++d) {
        for (int c = 0; c < 3; ++c) buf[c] = s.at(static_cast<Dir>(d), c);
        k[d + 1] = entries(buf);
    }
    const double hE = s.arm(East), hW = s.arm(West), hN = s.arm(North), hS = s.arm(South);
    auto grad = [&](auto get, auto& gx, auto& gy, auto& lap) {
        gx = d1(get(k[0]), get(k[1]), get(k[2]), hE, hW);
        gy = d1(get(k[0]), get(k[3]), get(k[4]), hN, hS);
        lap = d2(get(k[0]), get(k[1]), get(k[2]), hE, hW) + d2(get(k[0]), get(k[3]), get(k[4]), hN, hS);
    };
    double ax, ay, al, cx, cy, cl;
    cplx bx, by, bl;
    grad([](const KEntries& e) { return e.a; }, ax, ay, al);
    grad([](const KEntries& e) { return e.c; }, cx, cy, cl);
    grad([](const KEntries& e) { return e.b; }, bx, by, bl);
    const double a = k[0].a, c = k[0].c;
    const cplx b = k[0].b, bb = std::conj(b);
    const cplx I(0.0, 1.0);
    // entries of dK = (K_x - i K_y)/2 and dbar K = (K_x + i K_y)/2
    const cplx dA = 0.5 * (ax - I * ay), dC = 0.5 * (cx - I * cy);
    const cplx dB = 0.5 * (bx - I * by), dBb = 0.5 * (std::conj(bx) - I * std::conj(by));
    const cplx eA = std::conj(dA), eC = std::conj(dC), eB = std::conj(dBb), eBb = std::conj(dB);
    // K^{-1} = [[c, -conj b], [-b, a]]
    Mat2 dK, eK, Kinv, K, comm, L;
    dK << dA, dBb, dB, dC;
    eK << eA, eBb, eB, eC;
    Kinv << c, -bb, -b, a;
    K << a, bb, b, c;
    comm << 0.0, 4.0 * bb * c, 4.0 * a * b, 0.0;
    L << al, std::conj(bl), bl, cl;
    const Mat2 G = 0.25 * L - eK * Kinv * dK - K * comm;
    out[0] = G(0, 0).real();
    out[1] = G(0, 1).real();
    out[2] = G(0, 1).imag();
}

SymmetricField solve_disc_symmetric(double R, const std::function<double(cplx)>& boundary_b, const DiscOptions& opt) {
    SymmetricField f;
    f.grid = disc_grid(R, opt);
    f.R = R;
    const Grid2D& g = *f.grid;
    f.bt.assign(g.size(), 0.0);
    for (std::size_t i = g.interior_count(); i < g.size(); ++i) f.bt[i] = boundary_b(g.node(i).z);
    const ModeExtension ext([&](cplx z) { return cplx(boundary_b(z)); }, R, bessel_kernel(R));
    for (std::size_t i = 0; i < g.interior_count(); ++i) f.bt[i] = ext(g.node(i).z).real();
    f.report = solve_elliptic_newton(g, 1, symmetric_residual, f.bt, opt.newton);
    return f;
}

HermitianField solve_disc_general(double R, const std::function<Mat2(cplx)>& boundary_H, const DiscOptions& opt) {
    HermitianField f;
    f.grid = disc_grid(R, opt);
    f.R = R;
    const Grid2D& g = *f.grid;
    f.u.assign(3 * g.size(), 0.0);
    auto checked = [&](cplx z) {
        const Mat2 H = boundary_H(z);
        const double det = (H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0)).real();
        if (!(H(0, 0).real() > 0.0) || std::abs(det - 1.0) > 1e-10 || std::abs(H(0, 1) - std::conj(H(1, 0))) > 1e-12)
            throw InputError("solve_disc_general: boundary data must be Hermitian with det 1");
        return H;
    };
    for (std::size_t i = g.interior_count(); i < g.size(); ++i) {
        const Mat2 H = checked(g.node(i).z);
        f.u[3 * i] = std::log(H(0, 0).real());
        f.u[3 * i + 1] = H(0, 1).real();
        f.u[3 * i + 2] = H(0, 1).imag();
    }
    // initial guess: harmonic log a and the linearized off-diagonal solution
    const ModeExtension la([&](cplx z) { return cplx(std::log(checked(z)(0, 0).real())); }, R, harmonic_kernel(R));
    const ModeExtension lb([&](cplx z) { return checked(z)(0, 1); }, R, bessel_kernel(R));
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
        const cplx z = g.node(i).z, b = lb(z);
        f.u[3 * i] = la(z).real();
        f.u[3 * i + 1] = b.real();
        f.u[3 * i + 2] = b.imag();
    }
    f.report = solve_elliptic_newton(g, 3, general_residual, f.u, opt.newton);
    return f;
}

SubsolutionReport subsolution_check(const HermitianField& f) {
    const Grid2D& g = *f.grid;
    SubsolutionReport rep;
    const double h = g.spacing();
    rep.slack = 10.0 * h * h;
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
        if (f.b(i) == cplx(0.0)) continue;
        double qx, qy, lap;
        derivs<double>(g, i, [&](std::size_t j) { return std::norm(f.b(j)); }, qx, qy, lap);
        const double lhs = -0.25 * lap, rhs = -8.0 * std::norm(f.b(i));
        rep.max_violation = std::max(rep.max_violation, lhs - rhs);
        ++rep.checked;
    }
    return rep;
}

SubsolutionReport subsolution_check(const SymmetricField& f) {
    const Grid2D& g = *f.grid;
    SubsolutionReport rep;
    const double h = g.spacing();
    double bmax = 0.0;
    for (double x : f.bt) bmax = std::max(bmax, std::abs(x));
    rep.slack = 10.0 * h * h * bmax;
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
        if (f.bt[i] == 0.0) continue;
        double qx, qy, lap;
        derivs<double>(g, i, [&](std::size_t j) { return std::abs(f.bt[j]); }, qx, qy, lap);
        const double lhs = -0.25 * lap, rhs = -4.0 * std::abs(f.bt[i]);
        rep.max_violation = std::max(rep.max_violation, lhs - rhs);
        ++rep.checked;
    }
    return rep;
}

EnergyReport energy_identity(const HermitianField& f, double margin) {
    const Grid2D& g = *f.grid;
    EnergyReport rep;
    const cplx I(0.0, 1.0);
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
        if (std::abs(g.node(i).z) > f.R - margin) continue;
        double ax, ay, al, cx, cy, cl, px, py, pl;
        cplx bx, by, bl;
        derivs<double>(g, i, [&](std::size_t j) { return f.a(j); }, ax, ay, al);
        derivs<double>(g, i, [&](std::size_t j) { return f.c(j); }, cx, cy, cl);
        derivs<cplx>(g, i, [&](std::size_t j) { return f.b(j); }, bx, by, bl);
        derivs<double>(g, i, [&](std::size_t j) { return f.a(j) * f.c(j); }, px, py, pl);
        const cplx da = 0.5 * (ax - I * ay), dc = 0.5 * (cx - I * cy);
        const cplx db = 0.5 * (bx - I * by), dbbar = 0.5 * (std::conj(bx) - I * std::conj(by));
        const double b2 = std::norm(f.b(i));
        const double res = -0.25 * pl + dpi_norm_sq(f.a(i), f.b(i), f.c(i), da, db, dbbar, dc) +
                           8.0 * (1.0 + b2) * b2;
        rep.max_residual = std::max(rep.max_residual, std::abs(res));
        ++rep.checked;
    }
    return rep;
}

DecayFit offdiag_decay(const HermitianField& f, double r_lo, double r_hi) {
    std::vector<std::pair<double, double>> s;
    const Grid2D& g = *f.grid;
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
        const double r = std::abs(g.node(i).z);
        if (r > r_lo && r < r_hi && std::abs(f.b(i)) > 0.0) s.emplace_back(f.R - r, std::abs(f.b(i)));
    }
    return fit_decay_rate(s);
}

DecayFit offdiag_decay(const SymmetricField& f, double r_lo, double r_hi) {
    std::vector<std::pair<double, double>> s;
    const Grid2D& g = *f.grid;
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
        const double r = std::abs(g.node(i).z);
        if (r > r_lo && r < r_hi && f.bt[i] != 0.0) s.emplace_back(f.R - r, std::abs(f.bt[i]));
    }
    return fit_decay_rate(s);
}

double barrier_excess(const SymmetricField& f) {
    const Grid2D& g = *f.grid;
    double bmax = 0.0;
    for (std::size_t i = g.interior_count(); i < g.size(); ++i) bmax = std::max(bmax, std::abs(f.bt[i]));
    double ex = -INFINITY;
    const double i0R = bessel_I0(4.0 * f.R);
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
        const double J = 2.0 * bmax * bessel_I0(4.0 * std::abs(g.node(i).z)) / i0R;
        ex = std::max(ex, std::abs(f.bt[i]) - J);
    }
    return ex;
}

}  // namespace sfl
