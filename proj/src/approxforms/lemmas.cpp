#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/multiprecision/cpp_complex.hpp>

#include "sfl/approxforms.hpp"

namespace sfl {

namespace {

using mp = boost::multiprecision::cpp_complex_50;
using mpr = boost::multiprecision::cpp_bin_float_50;

struct M2 {
    mp a, b, c, d;  // [[a, b], [c, d]]
};

M2 mul(const M2& x, const M2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

M2 conj_t(const M2& x) { return {conj(x.a), conj(x.c), conj(x.b), conj(x.d)}; }

M2 inv(const M2& x) {
    const mp det = x.a * x.d - x.b * x.c;
    return {x.d / det, -x.b / det, -x.c / det, x.a / det};
}

M2 add(const M2& x, const M2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }
M2 scale(const mp& s, const M2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }

/// K^{-1} X^* K with K = conj(H).
M2 dagger(const M2& X, const M2& H) {
    const M2 K{conj(H.a), conj(H.b), conj(H.c), conj(H.d)};
    return mul(mul(inv(K), conj_t(X)), K);
}

mp trace(const M2& x) { return x.a + x.d; }

struct Trial {
    std::complex<double> alpha1[2], alpha2[2];   // diagonal limits of A1, A2
    std::complex<double> off1[2], off2[2];       // off-diagonal directions
    std::complex<double> drift1[2], drift2[2];   // diagonal drift directions
    double a0;                                   // diagonal direction of H
    std::complex<double> b0;                     // off-diagonal direction of H
    std::complex<double> beta[2];                // second lemma
};

mp to_mp(std::complex<double> z) { return mp(z.real(), z.imag()); }

/// H = [[a, b], [conj b, c]], a = 1 + drift eps a0, b = offdiag eps b0 / 2, c = (1 + |b|^2) / a.
M2 metric(const Trial& tr, const mpr& eps, const ErrorLemmaOptions& o) {
    const mp a = mp(1) + mp(o.drift) * mp(eps) * mp(tr.a0);
    const mp b = mp(o.offdiag) * mp(eps) * to_mp(tr.b0) * mp(0.5);
    const mp c = (mp(1) + b * conj(b)) / a;
    return {a, b, conj(b), c};
}

M2 family(const std::complex<double>* al, const std::complex<double>* off, const std::complex<double>* dr,
          const mpr& eps, const ErrorLemmaOptions& o) {
    const mp e(eps), e2(eps * eps);
    return {to_mp(al[0]) + mp(o.drift) * e2 * to_mp(dr[0]), mp(o.offdiag) * e * to_mp(off[0]),
            mp(o.offdiag) * e * to_mp(off[1]), to_mp(al[1]) + mp(o.drift) * e2 * to_mp(dr[1])};
}

double remainder_trace(const Trial& tr, const mpr& eps, const ErrorLemmaOptions& o) {
    const M2 H = metric(tr, eps, o);
    const M2 A1 = family(tr.alpha1, tr.off1, tr.drift1, eps, o);
    const M2 A2 = family(tr.alpha2, tr.off2, tr.drift2, eps, o);
    const mp lhs = trace(mul(A1, dagger(A2, H)));
    const mp rhs = to_mp(tr.alpha1[0]) * conj(to_mp(tr.alpha2[0])) + to_mp(tr.alpha1[1]) * conj(to_mp(tr.alpha2[1]));
    return static_cast<double>(abs(lhs - rhs));
}

double remainder_norm(const Trial& tr, const mpr& eps, const ErrorLemmaOptions& o) {
    const M2 H = metric(tr, eps, o);
    const M2 P1{mp(1), mp(0), mp(0), mp(0)}, P2{mp(0), mp(0), mp(0), mp(1)};
    const mp a1 = to_mp(tr.alpha1[0]), a2 = to_mp(tr.alpha1[1]), b1 = to_mp(tr.beta[0]), b2 = to_mp(tr.beta[1]);
    const M2 G = add(add(scale(a1, P1), scale(a2, P2)), add(scale(b1, dagger(P1, H)), scale(b2, dagger(P2, H))));
    const mp lhs = trace(mul(G, dagger(G, H)));
    const mp rhs = (a1 + b1) * conj(a1 + b1) + (a2 + b2) * conj(a2 + b2);
    return static_cast<double>(abs(lhs - rhs));
}

/// Fit of -log r against t over positive samples; +inf when every sample is zero.
double rate_of(const std::vector<double>& ts, const std::vector<double>& r) {
    std::vector<std::pair<double, double>> s;
    for (std::size_t k = 0; k < ts.size(); ++k)
        if (r[k] > 0.0) s.emplace_back(ts[k], r[k]);
    if (s.empty()) return std::numeric_limits<double>::infinity();
    if (s.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return fit_decay_rate(s).rate;
}

LemmaFit fit(double gamma, const std::vector<double>& ts, const std::vector<std::vector<double>>& per_trial) {
    LemmaFit f;
    f.gamma = gamma;
    std::vector<double> env(ts.size(), 0.0);
    std::vector<double> rates;
    for (const auto& row : per_trial) {
        for (std::size_t k = 0; k < ts.size(); ++k) env[k] = std::max(env[k], row[k]);
        rates.push_back(rate_of(ts, row));
    }
    for (double e : env) f.max_remainder = std::max(f.max_remainder, e);
    f.envelope_rate = rate_of(ts, env);
    std::sort(rates.begin(), rates.end());
    f.min_rate = rates.front();
    f.median_rate = rates[rates.size() / 2];
    return f;
}

}  // namespace

ErrorLemmaReport error_lemma_checks(const ErrorLemmaOptions& opt) {
    if (opt.trials < 100) throw PreconditionError("error_lemma_checks: need at least 100 trials");
    if (opt.gammas.empty()) throw InputError("error_lemma_checks: no rates given");
    std::vector<double> ts = opt.ts;
    if (ts.empty())
        for (int k = 0; k <= 18; ++k) ts.push_back(1.0 + 0.5 * k);
    if (ts.size() < 2) throw InputError("error_lemma_checks: need at least two values of t");

    std::mt19937 gen(opt.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto c = [&]() { return std::complex<double>(u(gen), u(gen)); };
    std::vector<Trial> trials(opt.trials);
    for (auto& tr : trials) {
        for (int i = 0; i < 2; ++i) {
            tr.alpha1[i] = c();
            tr.alpha2[i] = c();
            tr.off1[i] = c();
            tr.off2[i] = c();
            tr.drift1[i] = c();
            tr.drift2[i] = c();
            tr.beta[i] = c();
        }
        tr.a0 = u(gen);
        tr.b0 = c();
    }

    ErrorLemmaReport rep;
    for (double gamma : opt.gammas) {
        if (!(gamma > 0.0)) throw InputError("error_lemma_checks: rates must be positive");
        std::vector<std::vector<double>> rt(trials.size(), std::vector<double>(ts.size()));
        std::vector<std::vector<double>> rn = rt;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const mpr eps = exp(mpr(-gamma) * mpr(ts[k]));
            for (std::size_t j = 0; j < trials.size(); ++j) {
                rt[j][k] = remainder_trace(trials[j], eps, opt);
                rn[j][k] = remainder_norm(trials[j], eps, opt);
            }
        }
        rep.trace_lemma.push_back(fit(gamma, ts, rt));
        rep.norm_lemma.push_back(fit(gamma, ts, rn));
    }
    return rep;
}

}  // namespace sfl
