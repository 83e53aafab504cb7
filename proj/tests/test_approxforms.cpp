#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "sfl/approxforms.hpp"

using namespace sfl;

namespace {

const QuadraticDifferential kTwoZeros({-1.0, 0.0, 1.0});  // z^2 - 1
const QuadraticDifferential kModel({0.0, 2.25});          // (3/2)^2 z
constexpr double kM = M_PI / 2;                           // threshold of z^2 - 1
const cplx I(0.0, 1.0);

Mat2 C0() { return ModelHiggs::C0(); }
Mat2 s3() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

cplx trace_pair(const Mat2& X, const Mat2& Y, const Mat2& H) { return (X * adjoint(Y, H)).trace(); }

Mat2 random_mat(std::mt19937& g) {
    std::normal_distribution<double> n;
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = cplx(n(g), n(g));
    return m;
}

/// Part commuting with f: (X + f X f^{-1}) / 2.
Mat2 commuting_part(const Mat2& X, cplx zeta) {
    const Mat2 f = ModelHiggs::F(zeta);
    return 0.5 * (X + f * X * f.inverse());
}

template <class F>
Mat2 d_zeta(const F& fn, cplx z, double h) {
    const Mat2 dx = (fn(z + h) - fn(z - h)) / (2 * h);
    const Mat2 dy = (fn(z + I * h) - fn(z - I * h)) / (2 * h);
    return 0.5 * (dx - I * dy);
}

template <class F>
Mat2 d_zetabar(const F& fn, cplx z, double h) {
    const Mat2 dx = (fn(z + h) - fn(z - h)) / (2 * h);
    const Mat2 dy = (fn(z + I * h) - fn(z - I * h)) / (2 * h);
    return 0.5 * (dx + I * dy);
}

/// Richardson-extrapolated central difference; the cutoff varies on the glue width.
template <class F>
Mat2 d_zetabar_rich(const F& fn, cplx z, double h) {
    return (4.0 * d_zetabar(fn, z, 0.5 * h) - d_zetabar(fn, z, h)) / 3.0;
}

const ZeroChart& chart_at(const GluedMetric& g, double x) {
    for (const auto& c : g.charts())
        if (std::abs(c.zero().location - x) < 1e-12) return c;
    throw std::runtime_error("no chart");
}

ChartPoint point(const ZeroChart& c, cplx zeta) {
    const double rho = std::abs(zeta);
    const double r[] = {rho};
    return c.ray(std::arg(zeta), r).front();
}

}  // namespace

// ---------------------------------------------------------------------------
// Limiting configuration

TEST(Limiting, DetOneAndDiagonalInSheetFrame) {
    std::mt19937 g(1);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 50; ++k) {
        const cplx z(u(g), u(g));
        const Mat2 H = limiting_metric(kTwoZeros, z);
        EXPECT_NEAR(std::abs(H.determinant() - 1.0), 0.0, 1e-12);
        const cplx xi = std::sqrt(kTwoZeros.p(z));
        const Mat2 G = gram_in_frame(H, sheet_frame(xi));
        EXPECT_LT(std::abs(G(0, 1)), 1e-12 * std::abs(G(0, 0)));
        EXPECT_NEAR(G(0, 0).real(), G(1, 1).real(), 1e-12 * std::abs(G(0, 0)));
        EXPECT_NEAR(G(0, 0).real(), 2 * std::abs(xi), 1e-12 * std::abs(G(0, 0)));
    }
    EXPECT_THROW(limiting_metric(kTwoZeros, 1.0), DomainError);
}

TEST(Limiting, SymmetricHiggsField) {
    const cplx z(0.3, -0.7);
    const Mat2 T = global_higgs(kTwoZeros, z);
    EXPECT_LT((T.transpose() * C0() - C0() * T).norm(), 1e-14);
    const cplx xi = std::sqrt(kTwoZeros.p(z));
    const Mat2 S = sheet_frame(xi);
    EXPECT_LT((T * S.col(0) - xi * S.col(0)).norm(), 1e-13);
    EXPECT_LT((T * S.col(1) + xi * S.col(1)).norm(), 1e-13);
}

TEST(Limiting, MatchesModelFarFieldNearZero) {
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, 8.0, s);
    const auto& c = chart_at(gm, 1.0);
    for (double arg : {0.2, 1.7, 4.0, 5.9}) {
        const double rho = 0.95 * c.rho_max();
        const auto p = point(c, std::polar(rho, arg));
        const Mat2 Hinf = limiting_metric(kTwoZeros, p.z);
        // h(u_i, u_j) = D^T H conj(D)
        const Mat2 D = model_frame(p.dz);
        const Mat2 local = D.transpose() * Hinf * D.conjugate();
        EXPECT_NEAR(std::abs(local(0, 0) - std::pow(rho, -0.5)), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(local(1, 1) - std::pow(rho, 0.5)), 0.0, 1e-10);
        EXPECT_LT(std::abs(local(0, 1)), 1e-12);
        // The model metric at t = 8 and this radius agrees with its far field to 1e-6.
        const Mat2 model = model_metric_at(gm.profile(), p.zeta);
        EXPECT_LT((model - local).norm(), 1e-6 * local.norm());
    }
}

TEST(Limiting, MonodromySwapsSheets) {
    // Continue xi = sqrt(p) along a small loop around z = 1.
    const std::size_t n = 400;
    cplx xi = std::sqrt(kTwoZeros.p(1.0 + 0.3));
    const cplx xi0 = xi;
    for (std::size_t k = 1; k <= n; ++k) {
        const cplx z = 1.0 + std::polar(0.3, 2 * M_PI * static_cast<double>(k) / n);
        const cplx r = std::sqrt(kTwoZeros.p(z));
        xi = std::abs(r - xi) < std::abs(r + xi) ? r : -r;
    }
    EXPECT_LT(std::abs(xi + xi0), 1e-12);
    const Mat2 before = sheet_frame(xi0), after = sheet_frame(xi);
    EXPECT_LT((after.col(0) - before.col(1)).norm(), 1e-12);
    EXPECT_LT((after.col(1) - before.col(0)).norm(), 1e-12);
    const Mat2 H = limiting_metric(kTwoZeros, 1.3);
    const Mat2 Gb = gram_in_frame(H, before), Ga = gram_in_frame(H, after);
    EXPECT_NEAR(Ga(0, 0).real(), Gb(1, 1).real(), 1e-12);
    EXPECT_NEAR(Ga(1, 1).real(), Gb(0, 0).real(), 1e-12);
}

TEST(FAlpha, Examples) {
    const auto one = [](cplx, cplx) { return cplx(1.0); };
    const auto fibre = [](cplx, cplx xi) { return xi; };
    const auto mixed = [](cplx z, cplx xi) { return std::exp(z) + z * xi + xi * xi * xi; };
    std::mt19937 g(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 20; ++k) {
        const cplx z(u(g), u(g));
        EXPECT_LT((F_alpha(kTwoZeros, one, z) - Mat2::Identity()).norm(), 1e-14);
        EXPECT_LT((F_alpha(kTwoZeros, fibre, z) - global_higgs(kTwoZeros, z)).norm(), 1e-12);
        const Mat2 F = F_alpha(kTwoZeros, mixed, z), T = global_higgs(kTwoZeros, z);
        EXPECT_LT((T * F - F * T).norm(), 1e-10 * (1 + F.norm() * T.norm()));
        const cplx xi = std::sqrt(kTwoZeros.p(z));
        const Mat2 S = sheet_frame(xi);
        EXPECT_LT((F * S.col(0) - mixed(z, xi) * S.col(0)).norm(), 1e-10 * (1 + F.norm()));
    }
    EXPECT_THROW(F_alpha(kTwoZeros, one, -1.0), FrameError);
}

// ---------------------------------------------------------------------------
// Cutoffs

TEST(Cutoff, ScheduleAndStep) {
    const auto s = CutoffSchedule::from_threshold(kM, 0.3);
    EXPECT_DOUBLE_EQ(s.kappa0, kM / 2);
    EXPECT_DOUBLE_EQ(s.delta, std::min((kM / 2 - 0.3) / 10, 0.3 / 20));
    EXPECT_LT(0.0, s.inner());
    EXPECT_LT(s.inner(), s.outer());
    EXPECT_LT(s.outer(), s.kappa0);
    EXPECT_THROW(CutoffSchedule::from_threshold(kM, 0.0), ScheduleError);
    EXPECT_THROW(CutoffSchedule::from_threshold(kM, kM / 2), ScheduleError);
    EXPECT_THROW(CutoffSchedule::from_threshold(kM, 1.0), ScheduleError);

    EXPECT_EQ(s.chi(0.0), 1.0);
    EXPECT_EQ(s.chi(s.inner()), 1.0);
    EXPECT_EQ(s.chi(s.outer()), 0.0);
    EXPECT_EQ(s.chi(2.0), 0.0);
    double prev = 1.0, max_slope = 0.0;
    for (int k = 0; k <= 2000; ++k) {
        const double d = s.inner() + (s.outer() - s.inner()) * k / 2000.0;
        const double c = s.chi(d);
        EXPECT_LE(c, prev + 1e-15);
        prev = c;
        max_slope = std::max(max_slope, std::abs(s.dchi(d)));
        if (k > 0 && k < 2000) {
            const double e = 1e-7 * s.delta;
            EXPECT_NEAR(s.dchi(d), (s.chi(d + e) - s.chi(d - e)) / (2 * e), 1e-5 / s.delta);
        }
    }
    EXPECT_LE(max_slope, 2.0 / s.delta * (1 + 1e-12));
    EXPECT_GT(max_slope, 1.9 / s.delta);
}

// ---------------------------------------------------------------------------
// Split representation

TEST(Split, RoundTripAndTraces) {
    std::mt19937 g(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 100; ++k) {
        const cplx zeta(u(g), u(g));
        const double r = std::abs(zeta);
        const Mat2 X = random_mat(g), Y = random_mat(g);
        const SplitEnd sx = SplitEnd::of(X, zeta), sy = SplitEnd::of(Y, zeta);
        EXPECT_LT((sx.matrix(zeta) - X).norm(), 1e-12 * X.norm() / std::min(1.0, r));
        const Mat2 f = ModelHiggs::F(zeta);
        const Mat2 Xc = sx.commuting(zeta);
        EXPECT_LT((f * Xc - Xc * f).norm(), 1e-11 * X.norm() / std::min(1.0, r));
        EXPECT_LT((Xc - commuting_part(X, zeta)).norm(), 1e-11 * X.norm() / std::min(1.0, r));

        const double w = u(g);
        Mat2 H = Mat2::Zero();
        H(0, 0) = std::exp(-0.5 * std::log(r) + w);
        H(1, 1) = std::exp(0.5 * std::log(r) - w);
        const cplx oracle = trace_pair(X, Y, H);
        EXPECT_LT(std::abs(split_trace(sx, sy, r, w) - oracle), 1e-11 * (1 + std::abs(oracle)) / r);

        // Reference parts and shifts.
        SplitEnd a = sx, b = sy;
        a.x0 = cplx(u(g), u(g));
        a.x1 = cplx(u(g), u(g));
        b.x1 = cplx(u(g), u(g));
        SplitEnd a_ref, b_ref;
        a_ref.x0 = a.x0;
        a_ref.x1 = a.x1;
        b_ref.x1 = b.x1;
        Mat2 Hinf = Mat2::Zero();
        Hinf(0, 0) = std::pow(r, -0.5);
        Hinf(1, 1) = std::pow(r, 0.5);
        const cplx diff = trace_pair(a.matrix(zeta), b.matrix(zeta), H) -
                          trace_pair(a_ref.matrix(zeta), b_ref.matrix(zeta), Hinf);
        EXPECT_LT(std::abs(split_trace_shift(a, b, r, w) - diff), 1e-10 * (1 + std::abs(diff)) / r);
    }
}

TEST(Split, ShiftResolvesTinyGauge) {
    // With a commuting reference and w of order 1e-20 the shift is of order w^2 and w |dX|.
    SplitEnd X;
    X.x1 = 1.0;
    const double w = 1e-20;
    const double shift = split_trace_shift(X, X, 0.5, w).real();
    // 2 c^2 r (cosh 2w - 1) |x1|^2 = 2 c^2 r 2 sinh^2 w
    EXPECT_NEAR(shift, 2 * 2.25 * 0.5 * 2 * w * w, 1e-12 * w * w);
}

TEST(Frames, ModelFrameConjugatesHiggs) {
    const auto s = CutoffSchedule::from_threshold(kM, 0.4);
    const GluedMetric gm(kTwoZeros, 2.0, s);
    for (const auto& gc : gm.charts()) {
        const ZeroChart c(kTwoZeros, gc.zero(), s.kappa0, {HolDifferential{{1.0}}});
        for (double arg : {0.3, 2.0, 3.5, 6.0}) {
            for (double frac : {0.05, 0.5, 0.99}) {
                const auto p = point(c, std::polar(frac * c.rho_max(), arg));
                const Mat2 D = model_frame(p.dz);
                EXPECT_NEAR(std::abs(D.determinant() - 1.0), 0.0, 1e-13);
                const Mat2 lhs = D * ModelHiggs::F(p.zeta) * D.inverse();
                const Mat2 rhs = global_higgs(kTwoZeros, p.z) * p.dz;
                EXPECT_LT((lhs - rhs).norm(), 1e-9 * rhs.norm());
                EXPECT_LT((D.transpose() * C0() * D - C0()).norm(), 1e-13);
                // F_nu transported to the global frame is (q/p) Theta dz.
                SplitForm fnu;
                fnu.dz.x1 = p.g1.at(0);
                const FormValue glob = to_global(to_matrices(fnu, p.zeta), p.dz);
                const Mat2 expect = global_higgs(kTwoZeros, p.z) / kTwoZeros.p(p.z);
                EXPECT_LT((glob.dz - expect).norm(), 1e-8 * expect.norm());
                EXPECT_LT(glob.dzbar.norm(), 1e-14);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Charts

TEST(Chart, ModelIsIdentity) {
    const auto zs = zeros(kModel);
    const ZeroChart c(kModel, zs[0], 1.0, {HolDifferential{{1.0}}});
    const double rho[] = {0.01, 0.3, 0.7, 0.99};
    for (double arg : {0.0, 1.0, 3.0}) {
        for (const auto& p : c.ray(arg, rho)) {
            EXPECT_LT(std::abs(p.z - p.zeta), 1e-12);
            EXPECT_LT(std::abs(p.dz - 1.0), 1e-12);
            EXPECT_LT(std::abs(p.alpha1[0] - 8.0 / 9.0), 1e-12);
            EXPECT_LT(std::abs(p.g1[0] - 4.0 / (9.0 * p.zeta)), 1e-10 * std::abs(p.g1[0]));
        }
    }
}

TEST(Chart, TwoZerosRaysSatisfyDefiningEquations) {
    const auto zs = zeros(kTwoZeros);
    const HolDifferential nu{{1.0}}, mu{{0.3, cplx(0.5, 0.2)}};
    for (const auto& P : zs) {
        const ZeroChart c(kTwoZeros, P, kM / 2 * 0.99, {nu, mu});
        std::vector<double> rho;
        for (int k = 1; k <= 60; ++k) rho.push_back(c.rho_max() * k / 60.0);
        for (double arg : {0.1, 2.2, 4.4}) {
            const auto pts = c.ray(arg, rho);
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const auto& p = pts[k];
                // (dz/dzeta)^2 p(z) = (9/4) zeta
                EXPECT_LT(std::abs(p.dz * p.dz * kTwoZeros.p(p.z) - 2.25 * p.zeta), 1e-9 * std::abs(p.zeta));
                // flat distance from P is |zeta|^{3/2}
                EXPECT_NEAR(distance_from_zero(kTwoZeros, P, p.z), std::pow(rho[k], 1.5), 1e-8);
                const auto [zeta, dzeta] = c.zeta_of(p.z);
                EXPECT_LT(std::abs(zeta - p.zeta), 1e-9);
                EXPECT_LT(std::abs(dzeta * p.dz - 1.0), 1e-8);
                EXPECT_LT(std::abs(p.g1[1] - mu.numerator(p.z) / kTwoZeros.p(p.z)), 1e-10 * std::abs(p.g1[1]));
            }
            // d(alpha1 xi_P)/dzeta = q (dz/dzeta)^2 / xi_P along the ray.
            for (std::size_t k = 5; k + 5 < pts.size(); k += 7) {
                const double e = 1e-5;
                const double r2[] = {rho[k] - e, rho[k] + e};
                const auto q = c.ray(arg, r2);
                const cplx dir = std::polar(1.0, arg);
                for (int j = 0; j < 2; ++j) {
                    const auto A = [&](const ChartPoint& x) { return x.alpha1[j] * 1.5 * std::sqrt(x.zeta); };
                    const cplx lhs = (A(q[1]) - A(q[0])) / (2 * e * dir);
                    const auto& p = pts[k];
                    const cplx rhs = (j == 0 ? nu : mu).numerator(p.z) * p.dz * p.dz / (1.5 * std::sqrt(p.zeta));
                    EXPECT_LT(std::abs(lhs - rhs), 1e-6 * std::abs(rhs));
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Glued metric

TEST(Glued, RegionsAndDeterminant) {
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, 3.0, s);
    const double r2 = std::pow(s.inner(), 2.0 / 3.0), r1 = std::pow(s.outer(), 2.0 / 3.0);
    for (double rho : {0.01, 0.3, 0.9 * r2, r2, 0.5 * (r1 + r2), r1, 1.2 * r1}) {
        const cplx zeta = std::polar(rho, 0.7);
        const Mat2 H = gm.local(zeta);
        EXPECT_NEAR(std::abs(H.determinant() - 1.0), 0.0, 1e-12);
        if (rho <= r2) {
            const Mat2 M = model_metric_at(gm.profile(), zeta);
            EXPECT_LT((H - M).norm(), 1e-12 * M.norm());
        }
        if (rho >= r1) {
            EXPECT_EQ(H(0, 0).real(), std::pow(rho, -0.5));
            EXPECT_EQ(H(1, 1).real(), std::pow(rho, 0.5));
        }
    }
    for (cplx z : {cplx(0.0, 0.0), cplx(0.0, 1.5), cplx(3.0, 1.0)}) {
        EXPECT_EQ((gm.at(z) - limiting_metric(kTwoZeros, z)).norm(), 0.0);
    }
    const auto& c = chart_at(gm, -1.0);
    const auto p = point(c, std::polar(0.5 * r2, 2.0));
    const Mat2 expect = metric_to_global(gm.local(p.zeta), p.dz);
    EXPECT_LT((gm.at(p.z) - expect).norm(), 1e-8 * expect.norm());
    EXPECT_NEAR(std::abs(gm.at(p.z).determinant() - 1.0), 0.0, 1e-10);
}

TEST(Glued, ScheduleViolation) {
    CutoffSchedule bad{1.0, 0.5, 0.025};   // kappa0 above M/2 = pi/4
    EXPECT_THROW(GluedMetric(kTwoZeros, 2.0, bad), ScheduleError);
}

TEST(Glued, GlueDeviationDecays) {
    const double k0 = kM / 2;
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * k0);
    std::vector<std::pair<double, double>> dg, off;
    for (double t : {2.0, 4.0, 6.0, 8.0, 10.0, 12.0}) {
        const auto dev = glue_deviation(GluedMetric(kTwoZeros, t, s));
        dg.emplace_back(t, dev.diag);
        off.emplace_back(t, dev.off);
    }
    const double kd = s.kappa + 6 * s.delta;
    EXPECT_GE(fit_decay_rate(dg).rate, 8 * kd * 0.9);
    EXPECT_GE(fit_decay_rate(off).rate, 4 * kd * 0.9);
}

// ---------------------------------------------------------------------------
// H_{P,t}

TEST(HModel, MatchesMatrixFormulas) {
    const double t = 1.5;
    const auto prof = painleve_profile(t, profile_radius(t, 1.0));
    std::mt19937 g(11);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int k = 0; k < 40; ++k) {
        const cplx zeta(u(g), u(g));
        // model chart: alpha1 = 8/9, q/p = 4 / (9 zeta)
        const cplx a1 = 8.0 / 9.0, g1 = 4.0 / (9.0 * zeta);
        const FormValue H = to_matrices(H_model(prof, zeta, a1, g1), zeta);
        const Mat2 Hm = model_metric_at(prof, zeta);
        const double r = std::abs(zeta);
        const cplx dpsi = prof.dpsi_at(r) * std::conj(zeta) / (2 * r);
        Mat2 A = Mat2::Zero();
        A(0, 0) = dpsi;
        A(1, 1) = -dpsi;
        Mat2 dF = Mat2::Zero();
        dF(0, 1) = a1 * 1.5;  // d/dzeta of a1 f
        const Mat2 Fa = a1 * ModelHiggs::F(zeta);
        const Mat2 h10 = dF + A * Fa - Fa * A;
        const Mat2 Td = adjoint(ModelHiggs::F(zeta), Hm);
        const Mat2 h01 = t * (Td * Fa - Fa * Td);
        EXPECT_LT((H.dz - h10).norm(), 1e-9 * (1 + h10.norm()));
        EXPECT_LT((H.dzbar - h01).norm(), 1e-9 * (1 + h01.norm()));
        // commuting part equals F_nu
        const Mat2 fnu = g1 * ModelHiggs::F(zeta);
        EXPECT_LT((commuting_part(H.dz, zeta) - fnu).norm(), 1e-8 * fnu.norm());
        EXPECT_LT(commuting_part(H.dzbar, zeta).norm(), 1e-8 * (1 + H.dzbar.norm()));
        // (1,0) part symmetric, (0,1) part antisymmetric for C
        EXPECT_LT((H.dz.transpose() * C0() - C0() * H.dz).norm(), 1e-10 * H.dz.norm());
        EXPECT_LT((H.dzbar.transpose() * C0() + C0() * H.dzbar).norm(), 1e-10 * (1 + H.dzbar.norm()));
    }
    const FormValue zero = to_matrices(H_model(prof, 0.3, 0.0, 0.0), 0.3);
    EXPECT_EQ(zero.dz.norm() + zero.dzbar.norm(), 0.0);
}

TEST(HModel, HarmonicByDifferences) {
    const double t = 2.0;
    const auto prof = painleve_profile(t, profile_radius(t, 1.0));
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, t, s);
    const ZeroChart c(kTwoZeros, chart_at(gm, 1.0).zero(), s.kappa0, {HolDifferential{{1.0}}});
    const auto B = [&](cplx zeta) {
        const auto p = point(c, zeta);
        return to_matrices(H_model(prof, zeta, p.alpha1[0], p.g1[0]), zeta);
    };
    for (double h : {0.02, 0.01}) {
        double worst = 0.0;
        for (double arg : {0.4, 2.5, 5.0}) {
            for (double rho : {0.2, 0.5, 0.8}) {
                const cplx zeta = std::polar(rho, arg);
                const FormValue b = B(zeta);
                // (dbar + t ad theta) H: t [f, B2] - d_zetabar B1
                const Mat2 f = ModelHiggs::F(zeta);
                const Mat2 closed = t * (f * b.dzbar - b.dzbar * f) -
                                    d_zetabar([&](cplx z) { return B(z).dz; }, zeta, h);
                // (d_h + t ad theta^dagger) H: d_zeta B2 + [A, B2] - t [Theta^dagger, B1]
                const Mat2 Hm = model_metric_at(prof, zeta);
                const cplx dpsi = prof.dpsi_at(rho) * std::conj(zeta) / (2 * rho);
                Mat2 A = Mat2::Zero();
                A(0, 0) = dpsi;
                A(1, 1) = -dpsi;
                const Mat2 Td = adjoint(f, Hm);
                const Mat2 coclosed = d_zeta([&](cplx z) { return B(z).dzbar; }, zeta, h) +
                                      (A * b.dzbar - b.dzbar * A) - t * (Td * b.dz - b.dz * Td);
                const double scale = 1 + b.dz.norm() + b.dzbar.norm();
                worst = std::max({worst, closed.norm() / scale, coclosed.norm() / scale});
            }
        }
        EXPECT_LE(worst, 10 * h * h) << "h = " << h;
    }
}

TEST(HModel, RhoSolvesCorrection) {
    const double t = 2.0;
    const auto prof = painleve_profile(t, profile_radius(t, 1.0));
    const double h = 1e-3;
    for (double arg : {0.4, 2.5}) {
        for (double rho : {0.3, 0.7}) {
            const cplx zeta = std::polar(rho, arg);
            const cplx a1 = 8.0 / 9.0, g1 = 4.0 / (9.0 * zeta);
            const auto R = [&](cplx z) { return Mat2(rho_model(prof, z, a1) * s3()); };
            const FormValue H = to_matrices(H_model(prof, zeta, a1, g1), zeta);
            const Mat2 f = ModelHiggs::F(zeta);
            const Mat2 r = R(zeta);
            const Mat2 want10 = H.dz - g1 * f;
            EXPECT_LT((t * (f * r - r * f) - want10).norm(), 1e-10 * want10.norm());
            const Mat2 got01 = d_zetabar(R, zeta, h);
            // the profile is a piecewise cubic on a 1e-4 mesh, so its Laplacian is good to about 1e-4
            EXPECT_LT((got01 - H.dzbar).norm(), 1e-4 * H.dzbar.norm());
        }
    }
}

// ---------------------------------------------------------------------------
// H' and V'

TEST(Primed, RegionsAndClosedness) {
    const double t = 3.0;
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, t, s);
    const auto& c = chart_at(gm, 1.0);
    const double r2 = std::pow(s.inner(), 2.0 / 3.0), r1 = std::pow(s.outer(), 2.0 / 3.0);
    const HolDifferential nu{{1.0}}, mu{{0.2, 1.0}};
    const ZeroChart cm(kTwoZeros, c.zero(), s.kappa0, {nu, mu});
    const auto at = [&](cplx zeta) { return point(cm, zeta); };

    // inside X2: H' = H_{P,t}
    {
        const auto p = at(std::polar(0.5 * r2, 1.0));
        const auto a = to_matrices(H_prime_local(gm, p.zeta, p.alpha1[0], p.g1[0]), p.zeta);
        const auto b = to_matrices(H_model(gm.profile(), p.zeta, p.alpha1[0], p.g1[0]), p.zeta);
        EXPECT_LT((a.dz - b.dz).norm() + (a.dzbar - b.dzbar).norm(), 1e-12 * (a.dz.norm() + a.dzbar.norm()));
    }
    // outside X1: H' = F_nu, V' = F_tau exactly
    {
        const auto p = at(std::polar(std::min(1.02 * r1, 0.999 * cm.rho_max()), 2.0));
        const auto H = H_prime_local(gm, p.zeta, p.alpha1[0], p.g1[0]);
        EXPECT_EQ(H.dz.y0, 0.0);
        EXPECT_EQ(H.dz.y1, 0.0);
        EXPECT_EQ(H.dzbar.y0, 0.0);
        EXPECT_EQ(H.dz.x1 + H.dz.dx1, p.g1[0]);
        const auto V = V_prime_local(gm, p.zeta, p.alpha1[1], p.g1[1]);
        EXPECT_EQ(V.dz.y0, 0.0);
        EXPECT_EQ(V.dzbar.y1, 0.0);
        EXPECT_EQ(V.dzbar.dx1, 0.0);
        EXPECT_LT(std::abs(V.dzbar.x1 - std::conj(p.g1[1]) * std::conj(p.zeta) / std::abs(p.zeta)), 1e-15);
    }
    // tau = 0 gives V' = 0
    {
        const auto V = to_matrices(V_prime_local(gm, 0.4, 0.0, 0.0), 0.4);
        EXPECT_EQ(V.dz.norm() + V.dzbar.norm(), 0.0);
    }
    // (dbar + t ad theta) of H' and V' vanishes on the glue annulus to O(h^4)
    const double h = 1e-4;
    for (double arg : {0.5, 3.0}) {
        const double rho = 0.5 * (r1 + r2);
        const cplx zeta = std::polar(rho, arg);
        const auto HP = [&](cplx z) {
            const auto p = at(z);
            return to_matrices(H_prime_local(gm, z, p.alpha1[0], p.g1[0]), z);
        };
        const auto VP = [&](cplx z) {
            const auto p = at(z);
            return to_matrices(V_prime_local(gm, z, p.alpha1[1], p.g1[1]), z);
        };
        const Mat2 f = ModelHiggs::F(zeta);
        for (const auto& F : {std::function<FormValue(cplx)>(HP), std::function<FormValue(cplx)>(VP)}) {
            const FormValue b = F(zeta);
            const Mat2 closed = t * (f * b.dzbar - b.dzbar * f) - d_zetabar_rich([&](cplx z) { return F(z).dz; }, zeta, h);
            const Mat2 offpart = b.dz - commuting_part(b.dz, zeta);
            EXPECT_LT(closed.norm(), 1e-3 * (offpart.norm() + b.dzbar.norm()) + 1e-14);
        }
    }
}

TEST(Primed, FDaggerMatchesMetricAdjointAndSpectralCurve) {
    const double t = 2.0;
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, t, s);
    std::mt19937 g(13);
    std::uniform_real_distribution<double> u(-1, 1);
    const double r1 = std::pow(s.outer(), 2.0 / 3.0);
    for (int k = 0; k < 30; ++k) {
        const cplx zeta = std::polar(r1 * (0.05 + 0.95 * (u(g) + 1) / 2), 3 * u(g));
        const cplx b1(u(g), u(g));
        const Mat2 H = gm.local(zeta);
        const Mat2 Fb = b1 * ModelHiggs::F(zeta);
        const Mat2 Fd = F_dagger_local(gm, zeta, b1).matrix(zeta);
        EXPECT_LT((Fd - adjoint(Fb, H)).norm(), 1e-10 * (1 + Fd.norm()));
        // Spectral form: conj(b(xi)) on the eigenlines of Theta^dagger with eigenvalue conj(xi).
        const Mat2 Td = adjoint(ModelHiggs::F(zeta), H);
        Eigen::ComplexEigenSolver<Mat2> es(Td);
        const cplx xi = 1.5 * std::sqrt(zeta);
        for (int j = 0; j < 2; ++j) {
            const cplx lam = es.eigenvalues()(j);
            const cplx sheet = std::abs(lam - std::conj(xi)) < std::abs(lam + std::conj(xi)) ? xi : -xi;
            const cplx value = std::conj(b1 * sheet);
            const Eigen::Vector2cd v = es.eigenvectors().col(j);
            EXPECT_LT((Fd * v - value * v).norm(), 1e-9 * (1 + Fd.norm()));
        }
    }
}

TEST(Primed, VPrimeMatchesMatrixConstruction) {
    const double t = 2.5;
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, t, s);
    const auto& c = chart_at(gm, 1.0);
    const HolDifferential mu{{0.2, 1.0}};
    const ZeroChart cm(kTwoZeros, c.zero(), s.kappa0, {mu});
    const double r2 = std::pow(s.inner(), 2.0 / 3.0), r1 = std::pow(s.outer(), 2.0 / 3.0);
    const double h = 3e-5;
    for (double rho : {0.5 * r2, 0.3 * r2 + 0.7 * r1}) {
        const cplx zeta = std::polar(rho, 1.3);
        const auto p = point(cm, zeta);
        const auto G = [&](cplx z) {
            const auto q = point(cm, z);
            const double d = std::pow(std::abs(z), 1.5);
            return Mat2(s.chi(d) * adjoint(q.alpha1[0] * ModelHiggs::F(z), gm.local(z)));
        };
        // F_{tau°} = (1 - chi) F_tau - (dbar chi) F_beta with F_beta = conj(b) on the sheets.
        const double d = std::pow(rho, 1.5);
        const cplx dchi_bar = s.dchi(d) * 0.75 * zeta / std::sqrt(rho);
        const cplx u = std::conj(zeta) / rho;
        const Mat2 f = ModelHiggs::F(zeta);
        const Mat2 Ftau = std::conj(p.g1[0]) * u * f;
        const Mat2 Fbeta = std::conj(p.alpha1[0]) * u * f;
        const Mat2 v01 = (1 - s.chi(d)) * Ftau - dchi_bar * Fbeta + d_zetabar_rich(G, zeta, h);
        const Mat2 v10 = t * (f * G(zeta) - G(zeta) * f);
        const FormValue V = to_matrices(V_prime_local(gm, zeta, p.alpha1[0], p.g1[0]), zeta);
        EXPECT_LT((V.dzbar - v01).norm(), 1e-6 * v01.norm());
        EXPECT_LT((V.dz - v10).norm(), 1e-9 * (1 + v10.norm()));
    }
}

TEST(Primed, GlobalEvaluation) {
    const double t = 2.0;
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, t, s);
    const HolDifferential nu{{1.0}}, mu{{0.0, 1.0}};
    for (cplx z : {cplx(0.0, 0.0), cplx(0.5, 2.0), cplx(-2.5, -0.3)}) {
        const FormValue H = H_prime(gm, nu, z);
        const Mat2 Fnu = global_higgs(kTwoZeros, z) / kTwoZeros.p(z);
        EXPECT_LT((H.dz - Fnu).norm(), 1e-14 * Fnu.norm());
        EXPECT_EQ(H.dzbar.norm(), 0.0);
        const FormValue V = V_prime(gm, mu, z);
        EXPECT_EQ(V.dz.norm(), 0.0);
        // F_tau: conj(m(z) / xi) on the sheet xi, i.e. the adjoint of F_mu for h_inf
        const Mat2 Fmu = global_higgs(kTwoZeros, z) * (mu.numerator(z) / kTwoZeros.p(z));
        EXPECT_LE((V.dzbar - adjoint(Fmu, limiting_metric(kTwoZeros, z))).norm(), 1e-12 * Fmu.norm());
    }
    // Near a zero the global value is the transported chart value.
    const auto& c = chart_at(gm, -1.0);
    const ZeroChart cm(kTwoZeros, c.zero(), s.kappa0, {nu});
    const auto p = point(cm, std::polar(0.3, 0.9));
    const FormValue want = to_global(to_matrices(H_prime_local(gm, p.zeta, p.alpha1[0], p.g1[0]), p.zeta), p.dz);
    const FormValue got = H_prime(gm, nu, p.z);
    EXPECT_LT((got.dz - want.dz).norm() + (got.dzbar - want.dzbar).norm(), 1e-7 * (want.dz.norm() + want.dzbar.norm()));
}

// ---------------------------------------------------------------------------
// Pairings

TEST(Pairing, FNuWithLimitingMetricMatchesSpectral) {
    const SpectralCurve curve(kTwoZeros);
    const HolDifferential nu{{1.0}};
    const double R = 2.0;
    const MetricField m{[](cplx z) { return limiting_metric(kTwoZeros, z); },
                        [](cplx) -> Mat2 { return Mat2::Zero(); }};
    const FormField F = [&](cplx z) {
        FormValue v;
        v.dz = global_higgs(kTwoZeros, z) / kTwoZeros.p(z);
        return v;
    };
    // the annulus 1.2 < |z| < 2 keeps both zeros off the quadrature rings
    QuadratureOptions q;
    q.angles = 256;
    q.panels = 8;
    const cplx got = l2_pairing_forms(F, F, m, {0.0, 1.2, R}, q);
    L2Options o;
    o.interior_only = true;
    o.radius = R;
    const cplx outer = l2_pairing_hol(curve, nu, nu, o).interior;
    o.radius = 1.2;
    const cplx want = outer - l2_pairing_hol(curve, nu, nu, o).interior;
    EXPECT_NEAR(std::abs(got - want), 0.0, 1e-6 * std::abs(want));
    EXPECT_LT(std::abs(got.imag()), 1e-10 * std::abs(want));
}

TEST(Pairing, HermitianCovariantAdditive) {
    const double t = 1.5;
    const auto prof = painleve_profile(t, profile_radius(t, 1.0));
    const MetricField m = model_metric_field(prof);
    std::mt19937 g(17);
    Mat2 c1[3], c2[3];
    for (int k = 0; k < 3; ++k) {
        c1[k] = random_mat(g);
        c2[k] = random_mat(g);
    }
    const FormField r1 = [&](cplx z) {
        FormValue v;
        v.dz = c1[0] + z * c1[1];
        v.dzbar = std::conj(z) * c1[2];
        return v;
    };
    const FormField r2 = [&](cplx z) {
        FormValue v;
        v.dz = c2[0] * std::exp(z);
        v.dzbar = c2[1] + z * z * c2[2];
        return v;
    };
    const PolarRegion W{cplx(0.2, 0.1), 0.0, 0.5};
    const cplx a = l2_pairing_forms(r1, r2, m, W), b = l2_pairing_forms(r2, r1, m, W);
    EXPECT_LT(std::abs(a - std::conj(b)), 1e-11 * std::abs(a));
    EXPECT_LT(std::abs(l2_pairing_forms(r1, r1, m, W).imag()), 1e-12 * std::abs(a));

    // frame change S: X -> S^{-1} X S, H -> S^T H conj(S)
    const Mat2 S = Mat2::Identity() + 0.3 * random_mat(g);
    const Mat2 Si = S.inverse();
    const MetricField mS{[&](cplx z) { return Mat2(S.transpose() * m.H(z) * S.conjugate()); },
                         [](cplx) -> Mat2 { return Mat2::Zero(); }};
    const auto conj_form = [&](const FormField& r) {
        return FormField([&, r](cplx z) {
            FormValue v = r(z);
            v.dz = Si * v.dz * S;
            v.dzbar = Si * v.dzbar * S;
            return v;
        });
    };
    const cplx aS = l2_pairing_forms(conj_form(r1), conj_form(r2), mS, W);
    EXPECT_LT(std::abs(aS - a), 1e-10 * std::abs(a));

    const cplx in = l2_pairing_forms(r1, r2, m, {W.center, 0.0, 0.3});
    const cplx out = l2_pairing_forms(r1, r2, m, {W.center, 0.3, 0.5});
    EXPECT_LT(std::abs(in + out - a), 1e-10 * std::abs(a));
}

TEST(Stokes, RandomSmoothFields) {
    const double t = 1.5;
    const auto prof = painleve_profile(t, profile_radius(t, 1.0));
    const MetricField m = model_metric_field(prof);
    const auto Theta = [t](cplx z) { return Mat2(t * ModelHiggs::F(z)); };
    std::mt19937 g(19);
    Mat2 a[3], b[4];
    for (auto& x : a) x = random_mat(g);
    for (auto& x : b) x = random_mat(g);
    const auto A = [&](cplx z) { return Mat2(a[0] + std::sin(z) * a[1] + std::norm(z) * a[2]); };
    const FormField B = [&](cplx z) {
        FormValue v;
        v.dz = b[0] * std::exp(0.5 * z) + std::conj(z) * b[1];
        v.dzbar = b[2] + z * std::conj(z) * b[3];
        return v;
    };
    const PolarRegion W{cplx(0.5, 0.2), 0.0, 0.4};
    double prev = 0.0;
    for (double h : {0.04, 0.02}) {
        const auto rep = stokes_check(A, B, m, Theta, W, h);
        EXPECT_LE(rep.defect, 20 * h * h * rep.norms) << h;
        if (prev > 0) EXPECT_GE(prev / rep.defect, 3.5);
        prev = rep.defect;
    }
    // a supported inside W: no boundary term
    const auto bump = [&](cplx z) {
        const double s = std::norm(z - W.center) / (0.3 * 0.3);
        if (s >= 1) return Mat2(Mat2::Zero());
        return Mat2(std::exp(-1 / (1 - s)) * a[1]);
    };
    const auto rep = stokes_check(bump, B, m, Theta, W, 0.01);
    EXPECT_LT(std::abs(rep.boundary), 1e-14);
    EXPECT_LE(rep.defect, 20 * 1e-4 * rep.norms);
}

TEST(Stokes, HarmonicInstanceReducesToBoundary) {
    const double t = 2.0;
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, t, s);
    const auto& c = chart_at(gm, 1.0);
    const ZeroChart cm(kTwoZeros, c.zero(), s.kappa0, {HolDifferential{{1.0}}});
    const auto A = [&](cplx z) {
        const auto p = point(cm, z);
        return Mat2(p.alpha1[0] * ModelHiggs::F(z));
    };
    const FormField B = [&](cplx z) {
        const auto p = point(cm, z);
        return to_matrices(H_model(gm.profile(), z, p.alpha1[0], p.g1[0]), z);
    };
    const MetricField m = model_metric_field(gm.profile());
    const auto Theta = [t](cplx z) { return Mat2(t * ModelHiggs::F(z)); };
    const PolarRegion W{0.0, 0.0, std::pow(s.inner(), 2.0 / 3.0)};
    QuadratureOptions q;
    q.angles = 48;
    q.panels = 6;
    const double h = 0.01;
    const auto rep = stokes_check(A, B, m, Theta, W, h, q);
    EXPECT_LE(rep.defect, 20 * h * h * rep.norms);
    // the adjoint term vanishes for a harmonic form, leaving the contour integral
    EXPECT_LT(std::abs(rep.lhs - rep.boundary), 20 * h * h * rep.norms);
}

TEST(Aux, BoundaryIntegralMatchesResidue) {
    // nu1 = nu2 = d xi, eta = d xi: upsilon = (9/8) / xi
    LocalAuxTerm model{PowerSeries::constant(1.0, 12), PowerSeries::constant(1.0, 12),
                       PowerSeries::monomial(9.0 / 8.0, -1, 12)};
    EXPECT_NEAR(std::abs(aux_boundary_pairing(model, 0.3) - cplx(-4.5 * M_PI)), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(aux_boundary_pairing(model, 0.3) - aux_pairing_local(model)), 0.0, 1e-6);
    // even n1, n2 and a general upsilon
    LocalAuxTerm gen{PowerSeries(0.0, 0, {1.0, 0.0, cplx(0.3, 0.1), 0.0, 0.2}, 12),
                     PowerSeries(0.0, 0, {cplx(0.5, -0.4), 0.0, 0.7}, 12),
                     PowerSeries(0.0, -1, {cplx(0.2, 0.9), 0.4, cplx(-1.0, 0.5), 0.3}, 12)};
    for (double r : {0.1, 0.5}) {
        const cplx want = aux_pairing_local(gen);
        EXPECT_NEAR(std::abs(aux_boundary_pairing(gen, r) - want), 0.0, 1e-6 * std::abs(want));
    }
}

// ---------------------------------------------------------------------------
// Error lemmas

TEST(ErrorLemmas, ZeroPerturbationIsExact) {
    ErrorLemmaOptions o;
    o.offdiag = 0.0;
    o.drift = 0.0;
    o.gammas = {1.0};
    const auto rep = error_lemma_checks(o);
    EXPECT_EQ(rep.trace_lemma[0].max_remainder, 0.0);
    EXPECT_EQ(rep.norm_lemma[0].max_remainder, 0.0);
}

TEST(ErrorLemmas, NeedsEnoughTrials) {
    ErrorLemmaOptions o;
    o.trials = 10;
    EXPECT_THROW(error_lemma_checks(o), PreconditionError);
}

TEST(ErrorLemmas, RemainderRates) {
    ErrorLemmaOptions o;
    o.trials = 100;
    const auto rep = error_lemma_checks(o);
    for (const auto& f : rep.trace_lemma) EXPECT_GE(f.envelope_rate, 1.9 * f.gamma) << f.gamma;
    for (const auto& f : rep.norm_lemma) EXPECT_GE(f.envelope_rate, 1.9 * f.gamma) << f.gamma;
}

// ---------------------------------------------------------------------------
// Pipeline

TEST(PairingReport, ZeroForms) {
    const SpectralCurve curve(kTwoZeros);
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const double ts[] = {2.0, 3.0};
    const auto rep = pairing_report(curve, HolDifferential{{0.0}}, HolDifferential{{0.0}},
                                    AuxInput::zero(), s, ts);
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.pair_HH, cplx(0.0));
        EXPECT_EQ(r.pair_VV, cplx(0.0));
        EXPECT_EQ(r.pair_HV, cplx(0.0));
    }
    EXPECT_FALSE(rep.fits.HH.has_value());
}

TEST(PairingReport, BoundaryReductionMatchesAreaIntegral) {
    // At small t the X2 part of (H', H') - ||nu||^2 is large enough to integrate directly.
    const double t = 1.0;
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, t, s);
    const HolDifferential nu{{1.0}};
    const auto& c = chart_at(gm, 1.0);
    const ZeroChart cm(kTwoZeros, c.zero(), s.kappa0, {nu});
    const double r2 = std::pow(s.inner(), 2.0 / 3.0);
    const FormField H = [&](cplx z) {
        const auto p = point(cm, z);
        return to_matrices(H_model(gm.profile(), z, p.alpha1[0], p.g1[0]), z);
    };
    const FormField F = [&](cplx z) {
        const auto p = point(cm, z);
        FormValue v;
        v.dz = p.g1[0] * ModelHiggs::F(z);
        return v;
    };
    QuadratureOptions q;
    q.angles = 64;
    q.panels = 10;
    const MetricField hm = model_metric_field(gm.profile());
    const MetricField hinf{[](cplx z) {
                               Mat2 m = Mat2::Zero();
                               m(0, 0) = std::pow(std::abs(z), -0.5);
                               m(1, 1) = std::pow(std::abs(z), 0.5);
                               return m;
                           },
                           [](cplx) -> Mat2 { return Mat2::Zero(); }};
    const cplx area = l2_pairing_forms(H, H, hm, {0.0, 0.0, r2}, q) - l2_pairing_forms(F, F, hinf, {0.0, 0.0, r2}, q);
    // 2i contour of the shifted trace on |zeta| = r2
    cplx contour = 0.0;
    const std::size_t n = 256;
    for (std::size_t k = 0; k < n; ++k) {
        const double phi = 2 * M_PI * static_cast<double>(k) / n;
        const cplx zeta = std::polar(r2, phi);
        const auto p = point(cm, zeta);
        SplitEnd a;
        a.x1 = p.alpha1[0];
        const SplitForm hf = H_model(gm.profile(), zeta, p.alpha1[0], p.g1[0]);
        const cplx dzbar = -I * std::conj(zeta) * (2 * M_PI / n);
        contour += split_trace_shift(a, hf.dz, r2, gm.profile().v_at(r2)) * dzbar;
    }
    contour *= 2.0 * I;
    EXPECT_GT(std::abs(area), 1e-6);
    EXPECT_LT(std::abs(area - contour), 1e-3 * std::abs(area));
}

TEST(PairingReport, VerticalBoundaryReductionMatchesAreaIntegral) {
    const double t = 1.0;
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * kM / 2);
    const GluedMetric gm(kTwoZeros, t, s);
    const HolDifferential mu{{0.0, 1.0}};
    const ZeroChart cm(kTwoZeros, chart_at(gm, 1.0).zero(), s.kappa0, {mu});
    const double r2 = std::pow(s.inner(), 2.0 / 3.0);
    const FormField V = [&](cplx z) {
        const auto p = point(cm, z);
        return to_matrices(V_prime_local(gm, z, p.alpha1[0], p.g1[0]), z);
    };
    const FormField F = [&](cplx z) {
        const auto p = point(cm, z);
        FormValue v;
        v.dzbar = std::conj(p.g1[0]) * (std::conj(z) / std::abs(z)) * ModelHiggs::F(z);
        return v;
    };
    QuadratureOptions q;
    q.angles = 64;
    q.panels = 10;
    const MetricField hm = model_metric_field(gm.profile());
    const MetricField hinf{[](cplx z) {
                               Mat2 m = Mat2::Zero();
                               m(0, 0) = std::pow(std::abs(z), -0.5);
                               m(1, 1) = std::pow(std::abs(z), 0.5);
                               return m;
                           },
                           [](cplx) -> Mat2 { return Mat2::Zero(); }};
    const cplx area = l2_pairing_forms(V, V, hm, {0.0, 0.0, r2}, q) - l2_pairing_forms(F, F, hinf, {0.0, 0.0, r2}, q);
    // -2i contour of the shifted trace of F_b^dagger against the (0,1) part on |zeta| = r2
    cplx contour = 0.0;
    const std::size_t n = 256;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx zeta = std::polar(r2, 2 * M_PI * static_cast<double>(k) / n);
        const auto p = point(cm, zeta);
        const SplitEnd G = F_dagger_local(gm, zeta, p.alpha1[0]);
        const SplitForm vf = V_prime_local(gm, zeta, p.alpha1[0], p.g1[0]);
        const cplx dz = I * zeta * (2 * M_PI / n);
        contour += split_trace_shift(G, vf.dzbar, r2, gm.profile().v_at(r2)) * dz;
    }
    contour *= -2.0 * I;
    EXPECT_GT(std::abs(area), 1e-6);
    EXPECT_LT(std::abs(area - contour), 1e-3 * std::abs(area));
}

TEST(PairingReport, TwoZeroInstanceDecays) {
    const SpectralCurve curve(kTwoZeros);
    const double k0 = kM / 2;
    const auto s = CutoffSchedule::from_threshold(kM, 0.5 * k0);
    const std::vector<double> ts{2, 3, 4, 5, 6};
    const auto rep = pairing_report(curve, HolDifferential{{1.0}}, HolDifferential{{0.0, 1.0}},
                                    AuxInput::zero(), s, ts);
    ASSERT_TRUE(rep.fits.HH.has_value());
    ASSERT_TRUE(rep.fits.VV.has_value());
    EXPECT_GE(rep.fits.HH->rate, 4 * s.kappa);
    EXPECT_GE(rep.fits.VV->rate, 4 * s.kappa);
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.pair_HV, cplx(0.0));
        EXPECT_GT(r.target_HH.real(), 0.0);
        EXPECT_GT(r.target_VV.real(), 0.0);
        EXPECT_LT(r.diff_HH, 1e-2 * r.target_HH.real());
    }
}
