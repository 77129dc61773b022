#pragma once

/** \file nse.hpp
 * \brief Spectral Galerkin truncation of the 2D incompressible Navier--Stokes
 * equations on the 2*pi-periodic torus, with the energy estimates in terms of
 * the Grashof number and the viscosity rescaling v = u / nu, tau = nu t.
 *
 * Retained modes are the wavevectors 0 < |k|_inf <= kmax. Only the half space
 * (ky > 0, or ky == 0 and kx > 0) is stored; u_hat(-k) = conj(u_hat(k)).
 * Every mode carries one complex amplitude a_k along e_k = (-ky, kx) / |k|,
 * so the velocity is divergence free by construction. The real state vector
 * holds sqrt(2) (Re a_k, Im a_k), which makes its Euclidean norm equal to the
 * normalised L2 norm ||u||^2 = sum over all k of |u_hat(k)|^2. With that
 * normalisation the first Stokes eigenvalue is lambda1 = 1.
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pullback/attractors.hpp"
#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/process.hpp"
#include "pullback/systems/lorenz.hpp"

namespace pullback::nse {

using cplx = std::complex<double>;

inline constexpr double kSqrt2 = 1.41421356237309504880;

struct Wavevector {
    int kx = 0;
    int ky = 0;
    double norm2() const { return static_cast<double>(kx * kx + ky * ky); }
};

class ModeSet {
public:
    explicit ModeSet(int kmax) : kmax_(kmax) {
        if (kmax < 1) throw ConfigError("params.kmax", "must be at least 1");
        const int w = 2 * kmax + 1;
        lookup_.assign(static_cast<std::size_t>(w * w), 0);
        for (int ky = 0; ky <= kmax; ++ky)
            for (int kx = -kmax; kx <= kmax; ++kx) {
                if (ky == 0 && kx <= 0) continue;
                modes_.push_back({kx, ky});
            }
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            const auto& m = modes_[i];
            lookup_[slot(m.kx, m.ky)] = static_cast<long>(i) + 1;
            lookup_[slot(-m.kx, -m.ky)] = -(static_cast<long>(i) + 1);
        }
    }

    int kmax() const noexcept { return kmax_; }
    std::size_t size() const noexcept { return modes_.size(); }
    const Wavevector& operator[](std::size_t i) const { return modes_[i]; }
    const std::vector<Wavevector>& modes() const noexcept { return modes_; }

    /// Half-space index of k or -k, and whether k itself is the negative one. nullopt outside the set.
    std::optional<std::pair<std::size_t, bool>> locate(int kx, int ky) const {
        if (std::abs(kx) > kmax_ || std::abs(ky) > kmax_ || (kx == 0 && ky == 0)) return std::nullopt;
        const long v = lookup_[slot(kx, ky)];
        if (v > 0) return std::make_pair(static_cast<std::size_t>(v - 1), false);
        return std::make_pair(static_cast<std::size_t>(-v - 1), true);
    }

    /// Real state dimension.
    std::size_t state_dim() const noexcept { return 2 * modes_.size(); }

private:
    std::size_t slot(int kx, int ky) const {
        const int w = 2 * kmax_ + 1;
        return static_cast<std::size_t>((ky + kmax_) * w + (kx + kmax_));
    }

    int kmax_;
    std::vector<Wavevector> modes_;
    std::vector<long> lookup_;
};

/// Amplitudes a_k from a state vector.
inline std::vector<cplx> amplitudes(std::span<const double> x) {
    std::vector<cplx> a(x.size() / 2);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = cplx(x[2 * i], x[2 * i + 1]) / kSqrt2;
    return a;
}

inline std::vector<double> to_state(std::span<const cplx> a) {
    std::vector<double> x(2 * a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        x[2 * i] = kSqrt2 * a[i].real();
        x[2 * i + 1] = kSqrt2 * a[i].imag();
    }
    return x;
}

/// ||u||^2.
inline double energy(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

/// ||grad u||^2.
inline double enstrophy(const ModeSet& modes, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) s += modes[i].norm2() * (x[2 * i] * x[2 * i] + x[2 * i + 1] * x[2 * i + 1]);
    return s;
}

/// Velocity Fourier coefficient u_hat(k) = a_k e_k for a stored mode.
inline std::array<cplx, 2> velocity(const Wavevector& k, cplx a) {
    const double n = std::sqrt(k.norm2());
    return {a * (-k.ky / n), a * (k.kx / n)};
}

/**
 * One forcing entry: amplitude along e_k at wavevector k, modulated in time by
 * offset + mod_amplitude sin(mod_frequency t + mod_phase).
 */
struct ForcingEntry {
    int kx = 1;
    int ky = 0;
    cplx amplitude{0.0, 0.0};
    double offset = 1.0;
    double mod_amplitude = 0.0;
    double mod_frequency = 0.0;
    double mod_phase = 0.0;
};

class Forcing {
public:
    Forcing() = default;

    Forcing(const ModeSet& modes, std::vector<ForcingEntry> entries) : entries_(std::move(entries)) {
        std::vector<char> used(modes.size(), 0);
        for (const auto& e : entries_) {
            const auto loc = modes.locate(e.kx, e.ky);
            if (!loc) throw ConfigError("forcing.modes", "wavevector (" + std::to_string(e.kx) + ", " +
                                                             std::to_string(e.ky) + ") is outside the retained modes");
            if (used[loc->first]) throw ConfigError("forcing.modes", "duplicate wavevector");
            used[loc->first] = 1;
            index_.push_back(loc->first);
            // f_hat(-k) = alpha e_{-k} = -alpha e_k, so the stored coefficient at k is -conj(alpha).
            coeff_.push_back(loc->second ? -std::conj(e.amplitude) : e.amplitude);
        }
        size_ = modes.size();
    }

    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<ForcingEntry>& entries() const noexcept { return entries_; }

    bool autonomous() const {
        for (const auto& e : entries_)
            if (e.mod_amplitude != 0.0 && e.mod_frequency != 0.0) return false;
        return true;
    }

    double modulation(std::size_t j, double t) const {
        const auto& e = entries_[j];
        return e.offset + e.mod_amplitude * std::sin(e.mod_frequency * t + e.mod_phase);
    }

    /// Adds scale * f_k(t) to the amplitude derivative out[idx].
    void accumulate(double t, double scale, std::span<cplx> out) const {
        for (std::size_t j = 0; j < index_.size(); ++j) out[index_[j]] += scale * modulation(j, t) * coeff_[j];
    }

    /// ||f(t)||.
    double norm_at(double t) const {
        double s = 0.0;
        for (std::size_t j = 0; j < index_.size(); ++j) s += 2.0 * std::norm(coeff_[j] * modulation(j, t));
        return std::sqrt(s);
    }

    /// Upper bound of sup_t ||f(t)|| (exact when all entries share one modulation).
    double sup_norm() const {
        double s = 0.0;
        for (std::size_t j = 0; j < index_.size(); ++j) {
            const double m = std::abs(entries_[j].offset) + std::abs(entries_[j].mod_amplitude);
            s += 2.0 * std::norm(coeff_[j]) * m * m;
        }
        return std::sqrt(s);
    }

private:
    std::vector<ForcingEntry> entries_;
    std::vector<std::size_t> index_;
    std::vector<cplx> coeff_;
    std::size_t size_ = 0;
};

struct NseParams {
    double nu = 1.0;
    double lambda1 = 1.0;
    double f_sup = 0.0;
    double G = 0.0;
};

/// G = ||f||_inf / (lambda1 nu^2).
inline double grashof(double nu, double lambda1, double f_sup) {
    if (!(nu > 0.0)) throw Error("grashof: nu must be positive");
    if (!(lambda1 > 0.0)) throw Error("grashof: lambda1 must be positive");
    return f_sup / (lambda1 * nu * nu);
}

inline NseParams make_params(double nu, const Forcing& f) {
    return {nu, 1.0, f.sup_norm(), grashof(nu, 1.0, f.sup_norm())};
}

/**
 * Precomputed triad tables for the truncated nonlinearity. Two evaluation
 * routes are provided: the production route convolves in vorticity form,
 * the reference route convolves (u . grad) u directly and applies the Leray
 * projector I - k k^T / |k|^2.
 */
class GalerkinSystem {
public:
    explicit GalerkinSystem(int kmax) : modes_(kmax) {
        const int K = kmax;
        const std::size_t n = modes_.size();
        start_.push_back(0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& k = modes_[i];
            // p ranges over the full set in sorted (py, px) order; q = k - p.
            for (int py = -K; py <= K; ++py)
                for (int px = -K; px <= K; ++px) {
                    const auto lp = modes_.locate(px, py);
                    const auto lq = modes_.locate(k.kx - px, k.ky - py);
                    if (!lp || !lq) continue;
                    triads_.push_back({full_index(*lp), full_index(*lq), static_cast<double>(k.kx - px),
                                       static_cast<double>(k.ky - py)});
                }
            start_.push_back(triads_.size());
        }
        inv_norm_.resize(n);
        for (std::size_t i = 0; i < n; ++i) inv_norm_[i] = 1.0 / std::sqrt(modes_[i].norm2());
    }

    const ModeSet& modes() const noexcept { return modes_; }
    std::size_t state_dim() const noexcept { return modes_.state_dim(); }
    std::size_t triad_count() const noexcept { return triads_.size(); }

    /// Nonlinear contribution to da_k/dt, i.e. -e_k . P B(u, u)_hat(k), vorticity-form convolution.
    void nonlinear(std::span<const cplx> a, std::span<cplx> out) const {
        const std::size_t n = modes_.size();
        thread_local std::vector<cplx> u1, u2, w;
        u1.resize(2 * n);
        u2.resize(2 * n);
        w.resize(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& k = modes_[i];
            const auto v = velocity(k, a[i]);
            const cplx om = cplx(0.0, 1.0) * a[i] * std::sqrt(k.norm2());
            u1[i] = v[0];
            u2[i] = v[1];
            w[i] = om;
            u1[n + i] = std::conj(v[0]);
            u2[n + i] = std::conj(v[1]);
            w[n + i] = std::conj(om);
        }
        for (std::size_t i = 0; i < n; ++i) {
            cplx acc(0.0, 0.0);
            for (std::size_t j = start_[i]; j < start_[i + 1]; ++j) {
                const auto& tr = triads_[j];
                acc += (u1[tr.p] * tr.qx + u2[tr.p] * tr.qy) * w[tr.q];
            }
            // N_hat(k) = i * acc; da = i N_hat / |k| = -acc / |k|.
            out[i] = -acc * inv_norm_[i];
        }
    }

    /**
     * Reference route: B_hat(k) = sum_{p+q=k} (u_hat(p) . i q) u_hat(q), Leray
     * projected. Returns the projected vectors for the stored modes, and writes
     * -e_k . P B_hat(k) into out when given.
     */
    std::vector<std::array<cplx, 2>> nonlinear_reference(std::span<const cplx> a,
                                                         std::span<cplx> out = {}) const {
        const std::size_t n = modes_.size();
        std::vector<cplx> u1(2 * n), u2(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = velocity(modes_[i], a[i]);
            u1[i] = v[0];
            u2[i] = v[1];
            u1[n + i] = std::conj(v[0]);
            u2[n + i] = std::conj(v[1]);
        }
        std::vector<std::array<cplx, 2>> proj(n);
        const cplx I(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& k = modes_[i];
            cplx b1(0.0, 0.0), b2(0.0, 0.0);
            for (std::size_t j = start_[i]; j < start_[i + 1]; ++j) {
                const auto& tr = triads_[j];
                const cplx adv = I * (u1[tr.p] * tr.qx + u2[tr.p] * tr.qy);
                b1 += adv * u1[tr.q];
                b2 += adv * u2[tr.q];
            }
            const double kk = k.norm2();
            const cplx kb = (static_cast<double>(k.kx) * b1 + static_cast<double>(k.ky) * b2) / kk;
            proj[i] = {b1 - kb * static_cast<double>(k.kx), b2 - kb * static_cast<double>(k.ky)};
            if (!out.empty()) {
                const double nrm = std::sqrt(kk);
                out[i] = -(proj[i][0] * (-k.ky / nrm) + proj[i][1] * (k.kx / nrm));
            }
        }
        return proj;
    }

    /**
     * Amplitude derivative: -nu |k|^2 a_k + nonlinear + forcing_scale f_k(t * time_scale).
     * time_scale != 1 realises the rescaled system, whose forcing is read at tau / nu.
     */
    void amplitude_rate(double nu, const Forcing& f, double forcing_scale, double time_scale, double t,
                        std::span<const cplx> a, std::span<cplx> out) const {
        nonlinear(a, out);
        for (std::size_t i = 0; i < modes_.size(); ++i) out[i] -= nu * modes_[i].norm2() * a[i];
        if (!f.empty()) f.accumulate(t * time_scale, forcing_scale, out);
    }

    /// The same derivative on real state vectors.
    void state_rate(double nu, const Forcing& f, double forcing_scale, double time_scale, double t,
                    std::span<const double> x, std::span<double> dx) const {
        const std::size_t n = modes_.size();
        thread_local std::vector<cplx> a, da;
        a.resize(n);
        da.resize(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = cplx(x[2 * i], x[2 * i + 1]) / kSqrt2;
        amplitude_rate(nu, f, forcing_scale, time_scale, t, a, da);
        for (std::size_t i = 0; i < n; ++i) {
            dx[2 * i] = kSqrt2 * da[i].real();
            dx[2 * i + 1] = kSqrt2 * da[i].imag();
        }
    }

private:
    struct Triad {
        std::size_t p;
        std::size_t q;
        double qx;
        double qy;
    };

    std::size_t full_index(const std::pair<std::size_t, bool>& loc) const {
        return loc.second ? modes_.size() + loc.first : loc.first;
    }

    ModeSet modes_;
    std::vector<Triad> triads_;
    std::vector<std::size_t> start_;
    std::vector<double> inv_norm_;
};

/// <B(u, u), u> over all modes (real part; the imaginary part vanishes by symmetry).
inline double nonlinear_energy_transfer(const GalerkinSystem& sys, std::span<const double> x) {
    const auto a = amplitudes(x);
    std::vector<cplx> nl(a.size());
    sys.nonlinear(a, nl);
    // <B, u> = -2 Re sum_half conj(a_k) * (da_k)_NL
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += -2.0 * (std::conj(a[i]) * nl[i]).real();
    return s;
}

/// Process over parameters "nu" (viscosity) and optional "forcing_scale" (default 1).
inline ProcessDef galerkin_process(std::shared_ptr<const GalerkinSystem> sys, Forcing forcing) {
    ProcessDef p;
    p.name = "nse_galerkin";
    p.dim = sys->state_dim();
    p.bind = [sys, forcing](const ParameterPoint& lam) -> VectorField {
        const double nu = lam.get("nu");
        if (!(nu > 0.0)) throw ConfigError("params.nu", "must be positive");
        const double scale = lam.get_or("forcing_scale", 1.0);
        return [sys, forcing, nu, scale](double t, std::span<const double> x, std::span<double> dx) {
            sys->state_rate(nu, forcing, scale, 1.0, t, x, dx);
        };
    };
    return p;
}

/**
 * Enstrophy-ball constant rho(G) = (m1 + m2) e^{m3} with a caller-supplied c0.
 * c0 is not known numerically, so this is an evaluation aid, not a checked bound.
 */
struct VBound {
    double rho0, rho0p, m1, m2, m3, rho;
    /// Entry time t1(R) for initial data with ||u0|| <= R (R > rho0 + 1).
    double entry_time(double R, double nu, double lambda1) const {
        if (!(R > rho0p)) throw Error("VBound::entry_time: R must exceed rho0 + 1");
        return 1.0 + std::log(R * R / (2.0 * rho0 + 1.0)) / (nu * lambda1);
    }
};

inline VBound v_bound(double nu, double lambda1, double G, double c0) {
    if (!(c0 > 0.0)) throw ConfigError("bounds.c0", "must be positive");
    VBound v{};
    v.rho0 = nu * G;
    v.rho0p = v.rho0 + 1.0;
    v.m1 = lambda1 * v.rho0 * v.rho0 + v.rho0p * v.rho0p / nu;
    v.m2 = 2.0 * nu * lambda1 * lambda1 * v.rho0 * v.rho0;
    v.m3 = 2.0 * c0 / (nu * nu * nu) * v.rho0p * v.rho0p * v.m1;
    v.rho = (v.m1 + v.m2) * std::exp(v.m3);
    return v;
}

using lorenz::InequalityTally;
using lorenz::tolerance_margin;

struct EnergyReport {
    NseParams params;
    double rho0 = 0.0;
    double u0_energy = 0.0;
    InequalityTally differential;  ///< d/dt||u||^2 + nu||grad u||^2 <= ||f(t)||^2 / (nu lambda1)
    InequalityTally gronwall;      ///< ||u||^2 <= ||u0||^2 e^{-nu lambda1 t} + rho0^2 (1 - e^{-nu lambda1 t})
    InequalityTally dissipation;   ///< nu int_0^t ||grad u||^2 <= ||u0||^2 + t nu^3 lambda1 G^2
    std::optional<double> entry_time;  ///< first sample with ||u||^2 <= 2 rho0^2
    bool stays_in_ball = true;         ///< no exit from that ball after entry
    bool holds() const { return differential.holds() && gronwall.holds() && dissipation.holds() && stays_in_ball; }
};

/**
 * Integrates from u0 at s = 0 over [0, horizon] and checks the energy
 * estimates at every sample. The dissipation integral is carried as an extra
 * ODE component, so its quadrature error is controlled by the integrator.
 */
inline EnergyReport verify_energy_estimates(const GalerkinSystem& sys, double nu, const Forcing& f,
                                            std::span<const double> u0, double horizon,
                                            const IntegratorConfig& cfg = {}, double stride = 0.05) {
    if (u0.size() != sys.state_dim()) throw Error("verify_energy_estimates: state dimension mismatch");
    EnergyReport rep;
    rep.params = make_params(nu, f);
    const double l1 = rep.params.lambda1;
    const double G = rep.params.G;
    rep.rho0 = nu * G;
    rep.u0_energy = energy(u0);
    const std::size_t n = sys.state_dim();

    VectorField aug = [&sys, &f, nu](double t, std::span<const double> x, std::span<double> dx) {
        const std::size_t m = x.size() - 1;
        sys.state_rate(nu, f, 1.0, 1.0, t, x.subspan(0, m), dx.subspan(0, m));
        dx[m] = nu * enstrophy(sys.modes(), x.subspan(0, m));
    };
    std::vector<double> x0(u0.begin(), u0.end());
    x0.push_back(0.0);
    std::vector<double> rate(n);
    const double ball = 2.0 * rep.rho0 * rep.rho0;
    sample_trajectory(aug, n + 1, std::numeric_limits<double>::infinity(), cfg, 0.0, x0, horizon, stride,
                      [&](double t, std::span<const double> x) {
                          const auto u = x.subspan(0, n);
                          const double E = energy(u);
                          const double Z = enstrophy(sys.modes(), u);
                          sys.state_rate(nu, f, 1.0, 1.0, t, u, rate);
                          double dE = 0.0;
                          for (std::size_t i = 0; i < n; ++i) dE += 2.0 * u[i] * rate[i];
                          const double fn = f.empty() ? 0.0 : f.norm_at(t);
                          const double lhs = dE + nu * Z;
                          const double rhs = fn * fn / (nu * l1);
                          rep.differential.record(t, lhs, rhs, tolerance_margin(cfg, std::max({std::abs(dE), nu * Z, rhs})));

                          const double decay = std::exp(-nu * l1 * t);
                          const double env = rep.u0_energy * decay + rep.rho0 * rep.rho0 * (1.0 - decay);
                          rep.gronwall.record(t, E, env, tolerance_margin(cfg, std::max(env, E)));

                          const double diss = x[n];
                          const double cap = rep.u0_energy + t * nu * nu * nu * l1 * G * G;
                          rep.dissipation.record(t, diss, cap, tolerance_margin(cfg, std::max(cap, diss)));

                          const bool inside = E <= ball + tolerance_margin(cfg, ball);
                          if (!rep.entry_time && inside) rep.entry_time = t;
                          else if (rep.entry_time && !inside) rep.stays_in_ball = false;
                      });
    return rep;
}

struct RescaleReport {
    double nu = 0.0;
    std::size_t samples = 0;
    double max_residual = 0.0;  ///< max ||u(t) - nu v(nu t)||
    double max_ratio = 0.0;     ///< max residual / (10 (rel_tol ||u(t)|| + abs_tol))
    bool holds() const { return max_ratio <= 1.0; }
};

/**
 * Compares u under viscosity nu with nu v(nu t), where v solves the unit
 * viscosity system with forcing nu^{-2} f(tau / nu) from v(0) = u0 / nu.
 */
inline RescaleReport viscosity_rescale_check(const GalerkinSystem& sys, double nu, const Forcing& f,
                                             std::span<const double> u0, double horizon,
                                             const IntegratorConfig& cfg = {}, double stride = 0.1) {
    if (!(nu > 0.0)) throw Error("viscosity_rescale_check: nu must be positive");
    const std::size_t n = sys.state_dim();
    VectorField fu = [&sys, &f, nu](double t, std::span<const double> x, std::span<double> dx) {
        sys.state_rate(nu, f, 1.0, 1.0, t, x, dx);
    };
    VectorField fv = [&sys, &f, nu](double tau, std::span<const double> x, std::span<double> dx) {
        sys.state_rate(1.0, f, 1.0 / (nu * nu), 1.0 / nu, tau, x, dx);
    };
    std::vector<std::vector<double>> us;
    const double inf = std::numeric_limits<double>::infinity();
    sample_trajectory(fu, n, inf, cfg, 0.0, u0, horizon, stride,
                      [&](double, std::span<const double> x) { us.emplace_back(x.begin(), x.end()); });
    std::vector<double> v0(u0.begin(), u0.end());
    for (auto& v : v0) v /= nu;
    RescaleReport rep;
    rep.nu = nu;
    std::size_t k = 0;
    sample_trajectory(fv, n, inf, cfg, 0.0, v0, nu * horizon, nu * stride,
                      [&](double, std::span<const double> v) {
                          if (k >= us.size()) return;
                          const auto& u = us[k++];
                          double r2 = 0.0;
                          for (std::size_t i = 0; i < n; ++i) {
                              const double d = u[i] - nu * v[i];
                              r2 += d * d;
                          }
                          const double r = std::sqrt(r2);
                          const double allowed = 10.0 * (cfg.rel_tol * std::sqrt(energy(u)) + cfg.abs_tol);
                          rep.max_residual = std::max(rep.max_residual, r);
                          rep.max_ratio = std::max(rep.max_ratio, r / allowed);
                          ++rep.samples;
                      });
    return rep;
}

/// Delta_H(A(t2), A(t1)) / sqrt(t2 - t1), for sections at one parameter with 0 < t2 - t1 < 1.
inline double section_time_holder(const AttractorSection& a1, const AttractorSection& a2) {
    if (!(a1.lambda == a2.lambda)) throw Error("section_time_holder: sections belong to different parameters");
    const double dt = a2.t - a1.t;
    if (!(dt > 0.0)) throw Error("section_time_holder: requires t1 < t2");
    if (!(dt < 1.0)) throw Error("section_time_holder: requires t2 - t1 < 1");
    return hausdorff_distance(a2.cloud, a1.cloud) / std::sqrt(dt);
}

/// Snapshot rows (kx, ky, Re u1, Im u1, Re u2, Im u2) for the stored modes.
struct SnapshotRow {
    int kx, ky;
    cplx u1, u2;
};

inline std::vector<SnapshotRow> snapshot(const ModeSet& modes, std::span<const double> x) {
    const auto a = amplitudes(x);
    std::vector<SnapshotRow> rows;
    rows.reserve(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto v = velocity(modes[i], a[i]);
        rows.push_back({modes[i].kx, modes[i].ky, v[0], v[1]});
    }
    return rows;
}

/// Inverse of snapshot; rejects velocity coefficients that are not divergence free.
inline std::vector<double> from_snapshot(const ModeSet& modes, const std::vector<SnapshotRow>& rows) {
    std::vector<cplx> a(modes.size(), cplx(0.0, 0.0));
    for (const auto& r : rows) {
        const auto loc = modes.locate(r.kx, r.ky);
        if (!loc) throw Error("snapshot: wavevector outside the mode set");
        const Wavevector k{r.kx, r.ky};
        const double nrm = std::sqrt(k.norm2());
        const cplx div = static_cast<double>(r.kx) * r.u1 + static_cast<double>(r.ky) * r.u2;
        const double mag = std::sqrt(std::norm(r.u1) + std::norm(r.u2));
        if (std::abs(div) > 1e-12 * std::max(mag, 1e-300) * nrm && mag > 0.0)
            throw Error("snapshot: coefficient at (" + std::to_string(r.kx) + ", " + std::to_string(r.ky) +
                        ") is not divergence free");
        cplx along = (r.u1 * (-r.ky / nrm) + r.u2 * (r.kx / nrm));
        if (loc->second) along = -std::conj(along);
        a[loc->first] = along;
    }
    return to_state(a);
}

}  // namespace pullback::nse
