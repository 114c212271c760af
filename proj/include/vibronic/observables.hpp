// observables.hpp — filtered photon-number operators and count rates, partial
// traces, displaced-parity Wigner functions, analytic emission spectra and
// Franck-Condon extraction

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "vibronic/core.hpp"
#include "vibronic/fock.hpp"

namespace vibronic::observables {

using fock::HilbertSpec;

// ------------------------------ filtered photon numbers ---------------------

enum class Branch { zpl, stokes, anti_stokes };

inline const char* branch_name(Branch b) {
    switch (b) {
        case Branch::zpl: return "zpl";
        case Branch::stokes: return "stokes";
        default: return "anti_stokes";
    }
}

// N_zpl = s+s,  N_S = eta^2 s+s (1 + b+b),  N_AS = eta^2 s+s b+b
inline SparseOp photon_number_operator(const HilbertSpec& spec, double eta, Branch branch) {
    const SparseOp ne = fock::number_electronic(spec);
    if (branch == Branch::zpl) return ne;
    const SparseOp nv = fock::number_vibrational(spec);
    if (branch == Branch::stokes) {
        return SparseOp(eta * eta * op_mul(ne, SparseOp(fock::identity(spec) + nv)));
    }
    return SparseOp(eta * eta * op_mul(ne, nv));
}

// Narrow-filter detection window; selects which branch operator feeds the rate
struct FilterWindow {
    double center = 0.0;     // [GHz offset from the electronic line]
    double bandwidth = 1.0;  // [GHz]
    Branch branch = Branch::zpl;

    void validate() const {
        if (bandwidth <= 0) throw std::invalid_argument("FilterWindow: bandwidth must be > 0");
    }
};

struct FluorescenceRate {
    double counts_per_ns = 0.0;
    double kcps = 0.0;  // paper-style Gamma/(2pi) reading of the same number
};

// Gamma_F = p_click * (2pi gamma0) * Tr[rho N_F]
inline FluorescenceRate fluorescence_rate(const DenseOp& rho, const SparseOp& op, double gamma0,
                                          double p_click) {
    if (p_click < 0.0 || p_click > 1.0) {
        throw std::invalid_argument("fluorescence_rate: p_click must be in [0,1]");
    }
    const double mean = expectation(rho, op).real();
    FluorescenceRate r;
    r.counts_per_ns = p_click * two_pi * gamma0 * mean;
    r.kcps = r.counts_per_ns / two_pi * 1e6;
    return r;
}

// ------------------------------ partial traces -------------------------------

inline DenseOp reduce_vibrational(const DenseOp& rho) {
    const auto d = rho.rows();
    if (d % 2 != 0 || rho.cols() != d) {
        throw std::invalid_argument("reduce_vibrational: expected the full electron*vibration space");
    }
    const auto half = d / 2;
    return rho.topLeftCorner(half, half) + rho.bottomRightCorner(half, half);
}

inline DenseOp reduce_electronic(const DenseOp& rho) {
    const auto d = rho.rows();
    if (d % 2 != 0 || rho.cols() != d) {
        throw std::invalid_argument("reduce_electronic: expected the full electron*vibration space");
    }
    const auto half = d / 2;
    DenseOp out(2, 2);
    out(0, 0) = rho.topLeftCorner(half, half).trace();
    out(0, 1) = rho.topRightCorner(half, half).trace();
    out(1, 0) = rho.bottomLeftCorner(half, half).trace();
    out(1, 1) = rho.bottomRightCorner(half, half).trace();
    return out;
}

// ------------------------------ Wigner function ------------------------------

struct WignerGridSpec {
    double q_min = -4.0, q_max = 4.0;
    int nq = 81;
    double p_min = -4.0, p_max = 4.0;
    int np = 81;
    int workers = 1;
};

// Convention (pinned): alpha = q + i p and
//   W(q,p) = (2/pi) Tr[rho_v D(alpha) P_v D(-alpha)],
// under which integral(W dq dp) = Tr rho_v and |W| <= 2/pi.
struct WignerGrid {
    Eigen::VectorXd q_axis;
    Eigen::VectorXd p_axis;
    Eigen::MatrixXd values;  // indexed (iq, ip)
    double boundary_leak = 0.0;
    bool boundary_warning = false;
};

namespace detail {

// Exact elements <m|D(alpha)|k> for m < n_rows, k < n_cols of the untruncated
// displacement operator (diagonal-by-diagonal Laguerre recurrences).
inline DenseOp displacement_block(int n_rows, int n_cols, Complex alpha) {
    DenseOp d = DenseOp::Zero(n_rows, n_cols);
    const double x = std::norm(alpha);
    const double pref = std::exp(-0.5 * x);
    for (int diag = 0; diag < n_cols; ++diag) {
        const Complex upper = std::pow(alpha, diag);
        const Complex lower = std::pow(-std::conj(alpha), diag);
        double ratio = 1.0;
        for (int j = 1; j <= diag; ++j) ratio /= std::sqrt(static_cast<double>(j));
        double lag_prev = 0.0;
        double lag = 1.0;
        const int m_max = std::min(n_rows, n_cols - diag);  // rows needed in either triangle
        for (int m = 0; m < m_max; ++m) {
            if (m > 0) {
                const double lag_next =
                    ((2.0 * (m - 1) + diag + 1 - x) * lag - (m - 1.0 + diag) * lag_prev) / m;
                lag_prev = lag;
                lag = lag_next;
                ratio *= std::sqrt(static_cast<double>(m) / (m + diag));
            }
            const double val = pref * ratio * lag;
            if (m + diag < n_rows) d(m + diag, m) = val * upper;  // lower triangle
            d(m, m + diag) = val * lower;                         // upper triangle
        }
    }
    return d;
}

}  // namespace detail

inline WignerGrid wigner(const DenseOp& rho_v, const WignerGridSpec& grid) {
    const auto n = rho_v.rows();
    if (rho_v.cols() != n || n < 2) throw std::invalid_argument("wigner: bad vibrational density matrix");
    if (grid.nq < 2 || grid.np < 2 || grid.q_max <= grid.q_min || grid.p_max <= grid.p_min) {
        throw std::invalid_argument("wigner: bad grid");
    }

    WignerGrid out;
    out.q_axis = Eigen::VectorXd::LinSpaced(grid.nq, grid.q_min, grid.q_max);
    out.p_axis = Eigen::VectorXd::LinSpaced(grid.np, grid.p_min, grid.p_max);
    out.values.resize(grid.nq, grid.np);

    // actual Fock support of the state; padding rows carry no weight
    int support = 1;
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            if (std::abs(rho_v(r, c)) > 1e-14) support = std::max<int>(support, int(std::max(r, c)) + 1);
        }
    }
    const DenseOp rho_s = rho_v.topLeftCorner(support, support);

    // the displaced columns D|k> overlap the support up to k ~ (sqrt(n_s)+|alpha|)^2
    const double amax = std::max({std::abs(grid.q_min), std::abs(grid.q_max)}) +
                        std::max({std::abs(grid.p_min), std::abs(grid.p_max)});
    const int n_cols = static_cast<int>(std::ceil(std::pow(std::sqrt(double(support)) + amax, 2))) + 12;

    parallel_for_index(static_cast<std::size_t>(grid.nq), grid.workers, [&](std::size_t iq) {
        for (int ip = 0; ip < grid.np; ++ip) {
            const Complex alpha(out.q_axis(static_cast<Eigen::Index>(iq)), out.p_axis(ip));
            const DenseOp d = detail::displacement_block(support, n_cols, alpha);
            // W = (2/pi) sum_k (-1)^k d_k^dag rho d_k with d_k the k-th column
            const DenseOp rd = rho_s * d;
            double sum = 0.0;
            for (int k = 0; k < n_cols; ++k) {
                const double term = (d.col(k).adjoint() * rd.col(k))(0).real();
                sum += (k % 2 == 0) ? term : -term;
            }
            out.values(static_cast<Eigen::Index>(iq), ip) = 2.0 / M_PI * sum;
        }
    });

    const double peak = out.values.cwiseAbs().maxCoeff();
    double edge = 0.0;
    for (int ip = 0; ip < grid.np; ++ip) {
        edge = std::max({edge, std::abs(out.values(0, ip)), std::abs(out.values(grid.nq - 1, ip))});
    }
    for (int iq = 0; iq < grid.nq; ++iq) {
        edge = std::max({edge, std::abs(out.values(iq, 0)), std::abs(out.values(iq, grid.np - 1))});
    }
    out.boundary_leak = (peak > 0) ? edge / peak : 0.0;
    out.boundary_warning = out.boundary_leak > 1e-3;
    return out;
}

inline double wigner_integral(const WignerGrid& g) {
    const double dq = g.q_axis(1) - g.q_axis(0);
    const double dp = g.p_axis(1) - g.p_axis(0);
    // trapezoidal weights on both axes
    double sum = 0.0;
    for (Eigen::Index iq = 0; iq < g.q_axis.size(); ++iq) {
        const double wq = (iq == 0 || iq == g.q_axis.size() - 1) ? 0.5 : 1.0;
        for (Eigen::Index ip = 0; ip < g.p_axis.size(); ++ip) {
            const double wp = (ip == 0 || ip == g.p_axis.size() - 1) ? 0.5 : 1.0;
            sum += wq * wp * g.values(iq, ip);
        }
    }
    return sum * dq * dp;
}

// ------------------------------ analytic spectra -----------------------------

// Normalized Lorentzian, unit area, full width at half maximum fwhm
inline double lorentzian(double x, double fwhm) {
    return (fwhm / two_pi) / (x * x + 0.25 * fwhm * fwhm);
}

struct SpectrumLine {
    double center;  // [GHz offset from the electronic line]
    double fwhm;    // [GHz]
    double weight;  // area
};

struct VibrationalMode {
    double eta;      // Lamb-Dicke parameter of the mode
    double omega;    // mode frequency [GHz]
    double gamma;    // mode linewidth [GHz]
    double n_occ;    // steady-state occupation
};

// One ZPL line plus Stokes/anti-Stokes doublets per mode:
//   S(w) = L(w, g0) + sum_k eta_k^2 n_k L(w - w_k, g_k+g0)
//                   + sum_k eta_k^2 (1+n_k) L(w + w_k, g_k+g0)
inline std::vector<SpectrumLine> analytic_spectrum(double gamma0,
                                                   const std::vector<VibrationalMode>& modes) {
    if (gamma0 <= 0) throw std::invalid_argument("analytic_spectrum: gamma0 must be > 0");
    std::vector<SpectrumLine> lines;
    lines.push_back({0.0, gamma0, 1.0});
    for (const auto& m : modes) {
        if (m.n_occ < 0) throw std::invalid_argument("analytic_spectrum: occupation must be >= 0");
        if (m.gamma <= 0 || m.omega <= 0) {
            throw std::invalid_argument("analytic_spectrum: mode frequency and width must be > 0");
        }
        lines.push_back({+m.omega, m.gamma + gamma0, m.eta * m.eta * m.n_occ});         // anti-Stokes
        lines.push_back({-m.omega, m.gamma + gamma0, m.eta * m.eta * (1.0 + m.n_occ)});  // Stokes
    }
    return lines;
}

inline std::vector<SpectrumLine> analytic_spectrum(double eta, double gamma0, double gamma_v,
                                                   double n_v, double omega_v) {
    return analytic_spectrum(gamma0, {VibrationalMode{eta, omega_v, gamma_v, n_v}});
}

inline Eigen::VectorXd sample_spectrum(const std::vector<SpectrumLine>& lines,
                                       const Eigen::VectorXd& freq) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(freq.size());
    for (const auto& line : lines) {
        for (Eigen::Index i = 0; i < freq.size(); ++i) {
            out(i) += line.weight * lorentzian(freq(i) - line.center, line.fwhm);
        }
    }
    return out;
}

// ------------------------------ Franck-Condon extraction ---------------------

// Area ratio A_stokes/A_zpl from a sampled spectrum; returns the eta^2 estimate.
inline double franck_condon_extract(const Eigen::VectorXd& freq, const Eigen::VectorXd& intensity,
                                    std::pair<double, double> zpl_window,
                                    std::pair<double, double> stokes_window) {
    if (freq.size() != intensity.size() || freq.size() < 3) {
        throw std::invalid_argument("franck_condon_extract: bad sampled spectrum");
    }
    if (zpl_window.first >= zpl_window.second || stokes_window.first >= stokes_window.second) {
        throw std::invalid_argument("franck_condon_extract: empty window");
    }
    const bool disjoint =
        zpl_window.second <= stokes_window.first || stokes_window.second <= zpl_window.first;
    if (!disjoint) throw std::invalid_argument("franck_condon_extract: windows must be disjoint");

    auto integrate = [&](std::pair<double, double> w) {
        double area = 0.0;
        for (Eigen::Index i = 0; i + 1 < freq.size(); ++i) {
            const double a = freq(i), b = freq(i + 1);
            if (b <= w.first || a >= w.second) continue;
            area += 0.5 * (intensity(i) + intensity(i + 1)) * (b - a);
        }
        return area;
    };
    const double a_zpl = integrate(zpl_window);
    if (a_zpl <= 0) throw std::invalid_argument("franck_condon_extract: empty ZPL window");
    return integrate(stokes_window) / a_zpl;
}

}  // namespace vibronic::observables
