// semiclassical.hpp — closed-form saturation and pump formulas, Stokes
// cooperativity figures, transducer susceptibility, and the mean-field
// steady state with explicit multi-root (bistability) reporting

#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "vibronic/core.hpp"
#include "vibronic/integrate.hpp"
#include "vibronic/model.hpp"

namespace vibronic::semiclassical {

// ------------------------------ saturation curves ----------------------------

struct SaturationResult {
    double saturation_number = 0.0;  // n_zpl
    double population = 0.0;         // <s+s>
    double rate_kcps = 0.0;          // p_click * gamma0 * eta^2 * population, in kcps
};

// Resonantly driven two-level steady state: <s+s> = (1/2) / (1 + n_zpl) with
// n_zpl = (4 d0^2 + g0^2) / (2 Omega^2); the Omega -> 0 limit is population 0.
inline SaturationResult resonant_saturation(double omega_zpl_rabi, double delta0, double gamma0,
                                            double p_click = 0.0, double eta = 0.0) {
    if (gamma0 <= 0) throw std::invalid_argument("resonant_saturation: gamma0 must be > 0");
    SaturationResult r;
    if (omega_zpl_rabi == 0.0) {
        r.saturation_number = std::numeric_limits<double>::infinity();
        r.population = 0.0;
    } else {
        r.saturation_number =
            (4 * delta0 * delta0 + gamma0 * gamma0) / (2 * omega_zpl_rabi * omega_zpl_rabi);
        r.population = 0.5 / (1.0 + r.saturation_number);
    }
    r.rate_kcps = p_click * gamma0 * eta * eta * r.population * 1e6;
    return r;
}

// Effective pump rate of the adiabatically eliminated anti-Stokes scheme:
// Gamma+ = (g_as^2/gamma_v) * gamma_v^2 / (4 d0^2 + gamma_v^2)
inline double incoherent_pump_rate(double g_as, double delta0, double gamma_v) {
    if (gamma_v <= 0) throw std::invalid_argument("incoherent_pump_rate: gamma_v must be > 0");
    return (g_as * g_as / gamma_v) * gamma_v * gamma_v / (4 * delta0 * delta0 + gamma_v * gamma_v);
}

inline double incoherent_population(double pump_rate, double gamma0) {
    if (pump_rate < 0 || gamma0 < 0) throw std::invalid_argument("incoherent_population: negative rate");
    if (pump_rate == 0.0 && gamma0 == 0.0) return 0.0;
    return pump_rate / (pump_rate + gamma0);
}

// ------------------------------ Stokes figures of merit ----------------------

struct StokesFigures {
    double cooperativity = 0.0;      // C_S = g_s^2/(gamma_v gamma0)
    double saturation_number = 0.0;  // n_S = (4 d0^2 + g0^2)/(2 g_s^2)
    bool saturation_infinite = false;
};

inline StokesFigures stokes_figures(double g_s, double delta0, double gamma0, double gamma_v) {
    if (gamma0 <= 0 || gamma_v <= 0) throw std::invalid_argument("stokes_figures: rates must be > 0");
    StokesFigures f;
    f.cooperativity = g_s * g_s / (gamma_v * gamma0);
    if (g_s == 0.0) {
        f.saturation_number = std::numeric_limits<double>::infinity();
        f.saturation_infinite = true;
    } else {
        f.saturation_number = (4 * delta0 * delta0 + gamma0 * gamma0) / (2 * g_s * g_s);
    }
    return f;
}

// chi = 2 n_S C^2/(1+C)^2, valid at vibrational resonance (delta_v = 0)
inline double transducer_susceptibility(const StokesFigures& f) {
    if (f.cooperativity == 0.0) return 0.0;
    const double c = f.cooperativity;
    return 2.0 * f.saturation_number * c * c / ((1.0 + c) * (1.0 + c));
}

// Gamma_trans = chi * Omega_thz^2 / gamma0 (same units in as out)
inline double transduction_rate(double chi, double omega_thz_rabi, double gamma0) {
    if (gamma0 <= 0) throw std::invalid_argument("transduction_rate: gamma0 must be > 0");
    return chi * omega_thz_rabi * omega_thz_rabi / gamma0;
}

// ------------------------------ mean-field steady state ----------------------

struct MeanFieldState {
    Complex b;        // <b>
    Complex sigma;    // <sigma>
    double s_z;       // <s+s> - 1/2
    Complex b_zpl;    // Omega_zpl/g_s
    Complex b_in;     // total input amplitude
    double population = 0.0;
};

struct MeanFieldResult {
    MeanFieldState state;                  // low-amplitude branch (default)
    std::vector<double> root_amplitudes;   // all real |b_ss|^2 roots, ascending
    int selected_root = 0;
    double residual = 0.0;
    int iterations = 0;
};

namespace detail {

inline std::vector<double> real_cubic_roots(double a3, double a2, double a1, double a0) {
    // companion-matrix eigenvalues; returns real roots only
    std::vector<double> roots;
    if (std::abs(a3) < 1e-300) {  // quadratic fallback
        if (std::abs(a2) < 1e-300) {
            if (std::abs(a1) > 0) roots.push_back(-a0 / a1);
            return roots;
        }
        const double disc = a1 * a1 - 4 * a2 * a0;
        if (disc >= 0) {
            roots.push_back((-a1 + std::sqrt(disc)) / (2 * a2));
            roots.push_back((-a1 - std::sqrt(disc)) / (2 * a2));
        }
        return roots;
    }
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    comp(0, 2) = -a0 / a3;
    comp(1, 2) -= a1 / a3;
    comp(2, 2) -= a2 / a3;
    Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
    for (int i = 0; i < 3; ++i) {
        const auto ev = es.eigenvalues()(i);
        if (std::abs(ev.imag()) < 1e-9 * (1.0 + std::abs(ev.real()))) roots.push_back(ev.real());
    }
    return roots;
}

}  // namespace detail

// Solve [1 + 2i dv/gv + C/((1+2i d0/g0)(1+|b|^2/n_S))] b_ss = b_in for the
// stationary amplitude.  All real roots of the equivalent cubic in |b_ss|^2
// are reported (the equation is bistable in general); the low-amplitude
// branch is the default.  A damped fixed-point iteration from b_in serves as
// an independent consistency check on the selected root.
inline MeanFieldResult meanfield_steady_state(const model::ModelParams& p) {
    if (p.gamma0 <= 0 || p.gamma_v <= 0) {
        throw std::invalid_argument("meanfield_steady_state: rates must be > 0");
    }
    if (p.g_s == 0.0 && p.omega_zpl_rabi != 0.0) {
        throw std::invalid_argument(
            "meanfield_steady_state: the ZPL drive enters as b_zpl = omega_zpl/g_s; needs g_s > 0");
    }

    const double dv = 2.0 * p.delta_v / p.gamma_v;
    const double d0 = 2.0 * p.delta0 / p.gamma0;
    const StokesFigures figs = stokes_figures(p.g_s, p.delta0, p.gamma0, p.gamma_v);
    const double c_total = figs.cooperativity;
    const Complex b_zpl = (p.g_s > 0.0) ? Complex(p.omega_zpl_rabi / p.g_s, 0.0) : Complex(0.0);
    const Complex b_in = Complex(0.0, -p.omega_thz_rabi / p.gamma_v) + (1.0 + Complex(0.0, dv)) * b_zpl;

    MeanFieldResult out;
    auto drive_response = [&](double x) {
        // A(x) with x = |b_ss|^2
        const Complex denom = (1.0 + Complex(0.0, d0)) * (1.0 + x / figs.saturation_number);
        return 1.0 + Complex(0.0, dv) + c_total / denom;
    };

    if (c_total == 0.0) {
        const Complex a = 1.0 + Complex(0.0, dv);
        const Complex b_ss = b_in / a;
        out.root_amplitudes = {std::norm(b_ss)};
    } else {
        const double ns = figs.saturation_number;
        const double cr = c_total / (1.0 + d0 * d0);
        const double ci = -c_total * d0 / (1.0 + d0 * d0);
        const double a3 = ns * (1.0 + dv * dv);
        const double a2 = ns * (2.0 * (cr + dv * ci) - (1.0 + dv * dv)) - std::norm(b_in);
        const double a1 = ns * ((cr * cr + ci * ci) - 2.0 * (cr + dv * ci));
        const double a0 = -ns * (cr * cr + ci * ci);
        for (double u : detail::real_cubic_roots(a3, a2, a1, a0)) {
            if (u >= 1.0 - 1e-12) out.root_amplitudes.push_back(std::max(0.0, ns * (u - 1.0)));
        }
        std::sort(out.root_amplitudes.begin(), out.root_amplitudes.end());
        if (out.root_amplitudes.empty()) {
            throw NumericalError("meanfield_steady_state: no physical root of the cubic");
        }
    }

    const double x_sel = out.root_amplitudes.front();
    const Complex b_ss = b_in / drive_response(x_sel);
    out.residual = std::abs(drive_response(std::norm(b_ss)) * b_ss - b_in);

    // damped fixed-point iteration from b_in; diagnostic only
    Complex b_it = b_in;
    const double tol = 1e-12 * (1.0 + std::abs(b_in));
    for (out.iterations = 0; out.iterations < 500; ++out.iterations) {
        const Complex next = b_in / drive_response(std::norm(b_it));
        if (std::abs(next - b_it) < tol) break;
        b_it = 0.5 * b_it + 0.5 * next;
    }

    MeanFieldState& s = out.state;
    s.b_zpl = b_zpl;
    s.b_in = b_in;
    s.b = b_ss - b_zpl;
    const double xn = (figs.saturation_infinite) ? 0.0 : x_sel / figs.saturation_number;
    s.population = 0.5 * xn / (1.0 + xn);
    s.s_z = s.population - 0.5;
    const Complex el_denom(p.delta0, -0.5 * p.gamma0);
    s.sigma = (std::abs(el_denom) > 0) ? Complex(p.g_s * s.s_z) * b_ss / el_denom : Complex(0.0);
    return out;
}

// Time-dependent mean-field equations (transient studies); y = (b, sigma, s_z)
inline std::vector<MeanFieldState> meanfield_evolve(const model::ModelParams& p,
                                                    const MeanFieldState& init,
                                                    const std::vector<double>& t_grid) {
    const double gv = two_pi * p.gamma_v, g0 = two_pi * p.gamma0;
    const double dv = two_pi * p.delta_v, d0 = two_pi * p.delta0;
    const double gs = two_pi * p.g_s, om_thz = two_pi * p.omega_thz_rabi;
    const Complex b_zpl = (p.g_s > 0.0) ? Complex(p.omega_zpl_rabi / p.g_s) : Complex(0.0);
    const Complex mi(0.0, -1.0);

    auto rhs = [&](const StateVector& y) {
        StateVector dy(3);
        const Complex b = y(0), sg = y(1);
        const double sz = y(2).real();
        const Complex b_tot = b + b_zpl;
        dy(0) = mi * (Complex(dv, -0.5 * gv) * b + 0.5 * gs * sg + 0.5 * om_thz);
        dy(1) = mi * (Complex(d0, -0.5 * g0) * sg - gs * sz * b_tot);
        const Complex cross = sg * std::conj(b_tot);
        dy(2) = Complex(0.5 * gs * (Complex(0, 1) * (cross - std::conj(cross))).real() - 0.5 * g0 -
                        g0 * sz);
        return dy;
    };

    std::vector<MeanFieldState> out;
    StateVector y(3);
    y << init.b, init.sigma, Complex(init.s_z);
    double t = t_grid.empty() ? 0.0 : t_grid.front();
    double dt = 1e-4;
    StepControl ctrl;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0) advance(rhs, y, t, t_grid[i], dt, ctrl);
        MeanFieldState s;
        s.b = y(0);
        s.sigma = y(1);
        s.s_z = y(2).real();
        s.b_zpl = b_zpl;
        s.population = s.s_z + 0.5;
        out.push_back(s);
    }
    return out;
}

}  // namespace vibronic::semiclassical
