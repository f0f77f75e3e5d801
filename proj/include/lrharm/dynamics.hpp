#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "couplings.hpp"

namespace lrharm {

enum class Kind { xx, pp, xp, px };

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::xx: return "xx";
        case Kind::pp: return "pp";
        case Kind::xp: return "xp";
        default: return "px";
    }
}

inline Kind kind_from_name(std::string_view s) {
    if (s == "xx") return Kind::xx;
    if (s == "pp") return Kind::pp;
    if (s == "xp") return Kind::xp;
    if (s == "px") return Kind::px;
    throw std::invalid_argument("unknown kernel kind: " + std::string(s));
}

inline constexpr Kind kAllKinds[4] = {Kind::xx, Kind::pp, Kind::xp, Kind::px};

enum class KernelMethod { series, spectral };

// The four commutator kernels at a fixed time:
//   i[x_i(t), x_j] = Cxx_ij,  i[p_i(t), p_j] = Cpp_ij,
//   i[x_i(t), p_j] = Cxp_ij,  i[p_i(t), x_j] = Cpx_ij.
// Each commutator is a scalar multiple of the identity, so |entry| equals the
// commutator's operator norm. certified_error bounds the max-entry truncation
// (series) or eigendecomposition residual effect (spectral); fp_error is a
// roundoff-accumulation majorant for the series path. Dominance and
// cross-method checks use certified_error + fp_error.
struct KernelSet {
    double t = 0.0;
    Eigen::MatrixXd Cxx, Cpp, Cxp, Cpx;
    double certified_error = 0.0;
    double fp_error = 0.0;
    KernelMethod method = KernelMethod::series;

    const Eigen::MatrixXd& kernel(Kind k) const {
        switch (k) {
            case Kind::xx: return Cxx;
            case Kind::pp: return Cpp;
            case Kind::xp: return Cxp;
            default: return Cpx;
        }
    }

    double total_error() const { return certified_error + fp_error; }
};

inline double kernel_entry(const KernelSet& ks, Kind k, int i, int j) {
    const auto& m = ks.kernel(k);
    if (i < 0 || j < 0 || i >= m.rows() || j >= m.cols())
        throw std::out_of_range("kernel_entry: index out of range");
    return m(i, j);
}

namespace detail {

// Neumaier-compensated entrywise accumulation of a matrix series.
struct CompensatedMatrix {
    Eigen::MatrixXd sum, comp;

    explicit CompensatedMatrix(int n)
        : sum(Eigen::MatrixXd::Zero(n, n)), comp(Eigen::MatrixXd::Zero(n, n)) {}

    void add(const Eigen::MatrixXd& x) {
        for (int j = 0; j < sum.cols(); ++j)
            for (int i = 0; i < sum.rows(); ++i) {
                const double s = sum(i, j);
                const double v = x(i, j);
                const double t = s + v;
                comp(i, j) += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
                sum(i, j) = t;
            }
    }

    Eigen::MatrixXd value() const { return sum + comp; }
};

inline double inf_norm(const Eigen::MatrixXd& m) {
    double best = 0.0;
    for (int i = 0; i < m.rows(); ++i) {
        double row = 0.0;
        for (int j = 0; j < m.cols(); ++j) row += std::abs(m(i, j));
        if (row > best) best = row;
    }
    return best;
}

// One term recurrence of an alternating kernel series, T_{m+1} = s_m * A * T_m
// with s_m = -t^2 / den(m), plus the infinity-norm envelopes needed for a
// rigorous roundoff majorant:
//   w      >= ||T_m||_inf  (envelope of the exact term),
//   perr   >= max-entry error of the computed T_m,
//   werr   accumulates sum_m perr_m (term errors reaching the output),
//   wsum   accumulates sum_m w_m (scale of the compensated accumulation).
struct SeriesTrack {
    Eigen::MatrixXd term;
    double w = 0.0, perr = 0.0, werr = 0.0, wsum = 0.0;

    void start(Eigen::MatrixXd t0, double w0, double perr0) {
        term = std::move(t0);
        w = w0;
        perr = perr0;
        werr = perr;
        wsum = w;
    }

    void advance(const Eigen::MatrixXd& a, double a_inf, double scale, int n_dim) {
        term = (scale * (a * term)).eval();
        const double s = std::abs(scale);
        const double eps = std::numeric_limits<double>::epsilon();
        // fl(scale*(A*T)): matmul error n*eps*||A|| ||T||, then scaling eps,
        // plus propagation of the incoming term error through A and scale.
        perr = s * a_inf * perr + s * a_inf * w * (n_dim + 4) * eps;
        w = s * a_inf * w;
        perr += eps * w;
        werr += perr;
        wsum += w;
    }

    // Roundoff majorant for the accumulated series (Neumaier summation keeps
    // the summation error near eps * sum of magnitudes).
    double fp_error(int /*n_dim*/) const {
        return werr + 4.0 * std::numeric_limits<double>::epsilon() * wsum;
    }
};

}  // namespace detail

// Partial sums of the four alternating series
//   Cxx =  sum_n (-1)^n t^(2n+1)/(2n+1)! ((PX)^n P),
//   Cpp =  sum_n (-1)^n t^(2n+1)/(2n+1)! ((XP)^n X),
//   Cxp = -sum_n (-1)^n t^(2n)/(2n)!     ((PX)^n),
//   Cpx =  sum_n (-1)^n t^(2n)/(2n)!     ((XP)^n),
// stopping when the cosh-tail majorant falls below tol. Works for arbitrary
// symmetric X, P; refuses tau > 30 where the alternating cancellation costs
// too much precision (use kernels_spectral or split the time interval).
inline KernelSet kernels_series(const CouplingPair& cp, double t, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("kernels_series: tol must be > 0");
    const int n = cp.size();
    const double eps = std::numeric_limits<double>::epsilon();

    const double np = spectral_norm_symmetric(cp.P);
    const double nx = spectral_norm_symmetric(cp.X);
    const double npx = product_spectral_norm(cp.P, cp.X);
    const double nxp = product_spectral_norm(cp.X, cp.P);
    const double tau = std::max(std::sqrt(npx), std::sqrt(nxp)) * std::abs(t);
    if (tau > 30.0)
        throw std::domain_error(
            "kernels_series: tau = " + std::to_string(tau) +
            " exceeds 30; use kernels_spectral (P = identity) or split the time interval");
    const double cosh_tau = std::cosh(tau);

    const Eigen::MatrixXd px = cp.P * cp.X;
    const Eigen::MatrixXd xp = cp.X * cp.P;
    const double px_inf = detail::inf_norm(px);
    const double xp_inf = detail::inf_norm(xp);
    const double t2 = t * t;

    detail::SeriesTrack vxx, vpp, exp_t, epx_t;
    vxx.start((t * cp.P).eval(), std::abs(t) * detail::inf_norm(cp.P),
              eps * std::abs(t) * detail::inf_norm(cp.P));
    vpp.start((t * cp.X).eval(), std::abs(t) * detail::inf_norm(cp.X),
              eps * std::abs(t) * detail::inf_norm(cp.X));
    exp_t.start(Eigen::MatrixXd::Identity(n, n), 1.0, 0.0);
    epx_t.start(Eigen::MatrixXd::Identity(n, n), 1.0, 0.0);

    detail::CompensatedMatrix sxx(n), spp(n), sxp(n), spx(n);

    // Scaled tail factors: podd_*(m) = (npx t^2)^m/(2m+1)!, peven analogues.
    const double ypx = npx * t2;
    const double yxp = nxp * t2;
    double podd_px = 1.0, podd_xp = 1.0, peven_px = 1.0, peven_xp = 1.0;

    double certified = 0.0;
    bool done = false;
    constexpr int kMaxTerms = 400;
    for (int m = 0; m <= kMaxTerms; ++m) {
        sxx.add(vxx.term);
        spp.add(vpp.term);
        sxp.add(exp_t.term);
        spx.add(epx_t.term);

        // Tail after including term m: series resume at index m+1.
        const double om = 2.0 * m;
        podd_px *= ypx / ((om + 2.0) * (om + 3.0));
        podd_xp *= yxp / ((om + 2.0) * (om + 3.0));
        peven_px *= ypx / ((om + 1.0) * (om + 2.0));
        peven_xp *= yxp / ((om + 1.0) * (om + 2.0));
        const double tail_xx = np * std::abs(t) * podd_px * cosh_tau;
        const double tail_pp = nx * std::abs(t) * podd_xp * cosh_tau;
        const double tail_xp = peven_px * cosh_tau;
        const double tail_px = peven_xp * cosh_tau;
        certified = std::max(std::max(tail_xx, tail_pp), std::max(tail_xp, tail_px));
        if (certified <= tol) {
            done = true;
            break;
        }
        const double sodd = -t2 / ((om + 2.0) * (om + 3.0));
        const double seven = -t2 / ((om + 1.0) * (om + 2.0));
        vxx.advance(px, px_inf, sodd, n);
        vpp.advance(xp, xp_inf, sodd, n);
        exp_t.advance(px, px_inf, seven, n);
        epx_t.advance(xp, xp_inf, seven, n);
    }
    if (!done)
        throw std::domain_error(
            "kernels_series: tol unreachable in double precision for tau = " +
            std::to_string(tau) + "; use kernels_spectral or split the time interval");

    KernelSet ks;
    ks.t = t;
    ks.method = KernelMethod::series;
    ks.Cxx = sxx.value();
    ks.Cpp = spp.value();
    ks.Cxp = (-sxp.value()).eval();
    ks.Cpx = spx.value();
    ks.certified_error = certified;
    ks.fp_error = std::max(std::max(vxx.fp_error(n), vpp.fp_error(n)),
                           std::max(exp_t.fp_error(n), epx_t.fp_error(n)));
    return ks;
}

namespace detail {

// sin(sqrt(lam) t)/sqrt(lam), continued through lam <= 0; the |lam| t^2 < 1e-4
// window switches to a 6-term Taylor expansion in u = lam t^2 to avoid 0/0.
inline double s_branch(double lam, double t) {
    const double u = lam * t * t;
    if (std::abs(u) < 1e-4) {
        return t * (1.0 -
                    u / 6.0 *
                        (1.0 -
                         u / 20.0 *
                             (1.0 - u / 42.0 * (1.0 - u / 72.0 * (1.0 - u / 110.0)))));
    }
    if (lam > 0.0) {
        const double w = std::sqrt(lam);
        return std::sin(w * t) / w;
    }
    const double w = std::sqrt(-lam);
    return std::sinh(w * t) / w;
}

// cos(sqrt(lam) t) continued through lam <= 0, same Taylor window.
inline double c_branch(double lam, double t) {
    const double u = lam * t * t;
    if (std::abs(u) < 1e-4) {
        return 1.0 -
               u / 2.0 *
                   (1.0 - u / 12.0 * (1.0 - u / 30.0 * (1.0 - u / 56.0 * (1.0 - u / 90.0))));
    }
    if (lam > 0.0) return std::cos(std::sqrt(lam) * t);
    return std::cosh(std::sqrt(-lam) * t);
}

}  // namespace detail

// P = identity specialization: X = U diag(lam) U^T and the kernels are entire
// functions of X,
//   Cxx = s(X,t), Cpp = X s(X,t), Cxp = -c(X,t), Cpx = c(X,t),
// with s, c the branch functions above. High-accuracy path for any tau.
inline KernelSet kernels_spectral(const CouplingPair& cp, double t) {
    if (!cp.p_is_identity())
        throw std::invalid_argument("kernels_spectral: requires P = identity; use kernels_series");
    const int n = cp.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cp.X);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("kernels_spectral: eigendecomposition failed");
    const Eigen::MatrixXd& u = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();

    Eigen::VectorXd fs(n), fc(n), fps(n);
    double fmax = 0.0;
    for (int k = 0; k < n; ++k) {
        fs(k) = detail::s_branch(lam(k), t);
        fc(k) = detail::c_branch(lam(k), t);
        fps(k) = lam(k) * fs(k);
        fmax = std::max(fmax, std::max(std::abs(fs(k)), std::max(std::abs(fc(k)), std::abs(fps(k)))));
    }

    // Assemble U f(Lam) U^T and symmetrize bitwise (the exact kernels are
    // symmetric functions of X when P = identity).
    auto assemble = [&u](const Eigen::VectorXd& f) {
        const Eigen::MatrixXd m = u * f.asDiagonal() * u.transpose();
        return (0.5 * (m + m.transpose())).eval();
    };
    KernelSet ks;
    ks.t = t;
    ks.method = KernelMethod::spectral;
    ks.Cxx = assemble(fs);
    ks.Cpp = assemble(fps);
    const Eigen::MatrixXd cmat = assemble(fc);
    ks.Cxp = (-cmat).eval();
    ks.Cpx = cmat;

    // Residual-scale error estimate: backward error of the eigendecomposition
    // propagated through a derivative majorant of the branch functions. The
    // cosh factor is genuine sensitivity when X is indefinite.
    const double eps = std::numeric_limits<double>::epsilon();
    const double r1 = (cp.X * u - u * lam.asDiagonal()).cwiseAbs().maxCoeff();
    const double r2 =
        (u.transpose() * u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    const double nx = std::max(std::abs(lam(0)), std::abs(lam(n - 1)));
    const double lam_min = lam(0);
    const double grow =
        lam_min < 0.0 ? std::cosh(std::sqrt(-lam_min) * std::abs(t)) : 1.0;
    const double at = std::abs(t);
    const double sens_odd = (at * at * at / 6.0) * grow;
    const double sens_even = (at * at / 2.0) * grow;
    const double sens_pp = at * grow + nx * sens_odd;
    const double sens = std::max(sens_odd, std::max(sens_even, sens_pp));
    ks.certified_error = 4.0 * sens * (r1 + nx * r2) + 8.0 * n * eps * fmax;
    ks.fp_error = 0.0;
    return ks;
}

// The n-th term of the requested kernel series (same scaling as in the sum);
// exposes the Lemma 1 support structure exactly.
inline Eigen::MatrixXd series_term(const CouplingPair& cp, double t, int order, Kind k) {
    if (order < 0) throw std::invalid_argument("series_term: order must be >= 0");
    const int n = cp.size();
    const double t2 = t * t;
    const bool odd = (k == Kind::xx || k == Kind::pp);
    Eigen::MatrixXd a, term;
    if (k == Kind::xx) {
        a = cp.P * cp.X;
        term = (t * cp.P).eval();
    } else if (k == Kind::pp) {
        a = cp.X * cp.P;
        term = (t * cp.X).eval();
    } else if (k == Kind::xp) {
        a = cp.P * cp.X;
        term = Eigen::MatrixXd::Identity(n, n);
    } else {
        a = cp.X * cp.P;
        term = Eigen::MatrixXd::Identity(n, n);
    }
    for (int m = 0; m < order; ++m) {
        const double om = 2.0 * m;
        const double scale = odd ? -t2 / ((om + 2.0) * (om + 3.0)) : -t2 / ((om + 1.0) * (om + 2.0));
        term = (scale * (a * term)).eval();
    }
    if (k == Kind::xp) term = (-term).eval();
    return term;
}

// Phase-space propagator (x(t), p(t))^T = S(t) (x, p)^T assembled from the
// kernels; S(0) = identity, S sigma S^T = sigma, S(t1+t2) = S(t1) S(t2).
inline Eigen::MatrixXd propagator(const KernelSet& ks) {
    const int n = static_cast<int>(ks.Cxx.rows());
    Eigen::MatrixXd s(2 * n, 2 * n);
    s.topLeftCorner(n, n) = -ks.Cxp;
    s.topRightCorner(n, n) = ks.Cxx;
    s.bottomLeftCorner(n, n) = -ks.Cpp;
    s.bottomRightCorner(n, n) = ks.Cpx;
    return s;
}

// sigma_ab with [r_a, r_b] = i sigma_ab for r = (x_1..x_n, p_1..p_n).
inline Eigen::MatrixXd symplectic_form(int n) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    s.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    s.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return s;
}

}  // namespace lrharm
