#include <catch2/catch_amalgamated.hpp>

#include "vibronic/liouville.hpp"
#include "vibronic/observables.hpp"

using namespace vibronic;
using fock::HilbertSpec;
using observables::Branch;

TEST_CASE("photon_number_operator_elements") {
    HilbertSpec spec(5);
    const double eta = 0.3;
    const SparseOp nzpl = observables::photon_number_operator(spec, eta, Branch::zpl);
    const SparseOp ns = observables::photon_number_operator(spec, eta, Branch::stokes);
    const SparseOp nas = observables::photon_number_operator(spec, eta, Branch::anti_stokes);

    const StateVector e0 = fock::basis_state(spec, 1, 0);
    CHECK(expectation(e0, nas).real() == 0.0);
    CHECK(expectation(e0, ns).real() == Catch::Approx(0.09));
    CHECK(expectation(e0, nzpl).real() == 1.0);

    // N_S - N_AS = eta^2 s+s as sparse matrices
    const SparseOp diff = SparseOp(ns - nas);
    const SparseOp target = SparseOp(eta * eta * fock::number_electronic(spec));
    CHECK(max_abs(SparseOp(diff - target)) < 1e-15);
}

TEST_CASE("fluorescence_rates") {
    HilbertSpec spec(4);
    DenseOp ground = DenseOp::Zero(8, 8);
    ground(0, 0) = 1.0;
    for (Branch b : {Branch::zpl, Branch::stokes, Branch::anti_stokes}) {
        const auto r = observables::fluorescence_rate(
            ground, observables::photon_number_operator(spec, 0.3, b), 0.04, 0.05);
        CHECK(r.counts_per_ns == 0.0);
        CHECK(r.kcps == 0.0);
    }

    // saturated two-level state: rho_ee = 1/2, vibration in vacuum
    DenseOp sat = DenseOp::Zero(8, 8);
    sat(spec.index(0, 0), spec.index(0, 0)) = 0.5;
    sat(spec.index(1, 0), spec.index(1, 0)) = 0.5;
    const auto zpl = observables::fluorescence_rate(
        sat, observables::photon_number_operator(spec, 0.3, Branch::zpl), 0.04, 0.05);
    CHECK(zpl.counts_per_ns == Catch::Approx(0.05 * two_pi * 0.04 * 0.5));
    CHECK(zpl.kcps == Catch::Approx(1000.0));
    const auto stokes = observables::fluorescence_rate(
        sat, observables::photon_number_operator(spec, 0.3, Branch::stokes), 0.04, 0.05);
    CHECK(stokes.kcps == Catch::Approx(0.09 * 1000.0));

    CHECK_THROWS_AS(observables::fluorescence_rate(sat, fock::number_electronic(spec), 0.04, 1.5),
                    std::invalid_argument);
}

TEST_CASE("partial_traces") {
    HilbertSpec spec(6);
    // product state |e><e| ⊗ |coh><coh|
    Eigen::Vector2cd el;
    el << 0.0, 1.0;
    const Eigen::VectorXcd vib = fock::coherent_amplitudes(6, Complex(0.7, -0.2)).normalized();
    StateVector psi = StateVector::Zero(12);
    psi.tail(6) = vib;
    const DenseOp rho = psi * psi.adjoint();

    const DenseOp rv = observables::reduce_vibrational(rho);
    const DenseOp re = observables::reduce_electronic(rho);
    CHECK(max_abs(DenseOp(rv - vib * vib.adjoint())) < 1e-14);
    CHECK(max_abs(DenseOp(re - el * el.adjoint())) < 1e-14);
    CHECK(std::abs(rv.trace().real() - 1.0) < 1e-10);
    CHECK(std::abs(re.trace().real() - 1.0) < 1e-10);

    // Bell-like (|g,0> + |e,1>)/sqrt(2) reduces to (|0><0| + |1><1|)/2
    StateVector bell = StateVector::Zero(12);
    bell(spec.index(0, 0)) = 1.0 / std::sqrt(2.0);
    bell(spec.index(1, 1)) = 1.0 / std::sqrt(2.0);
    const DenseOp rbell = observables::reduce_vibrational(bell * bell.adjoint());
    DenseOp expected = DenseOp::Zero(6, 6);
    expected(0, 0) = 0.5;
    expected(1, 1) = 0.5;
    CHECK(max_abs(DenseOp(rbell - expected)) < 1e-14);
}

TEST_CASE("wigner_vacuum_and_cat") {
    const int n = 40;
    DenseOp vac = DenseOp::Zero(n, n);
    vac(0, 0) = 1.0;
    observables::WignerGridSpec grid;
    grid.q_min = -3.5;
    grid.q_max = 3.5;
    grid.p_min = -3.5;
    grid.p_max = 3.5;
    grid.nq = 71;
    grid.np = 71;
    const auto w = observables::wigner(vac, grid);
    // peak 2/pi at the origin, unit integral, no boundary leak
    CHECK(w.values(35, 35) == Catch::Approx(2.0 / M_PI).epsilon(1e-9));
    CHECK(w.values.maxCoeff() == Catch::Approx(2.0 / M_PI).epsilon(1e-9));
    CHECK(observables::wigner_integral(w) == Catch::Approx(1.0).margin(1e-3));
    CHECK_FALSE(w.boundary_warning);
    CHECK(w.values.cwiseAbs().maxCoeff() <= 2.0 / M_PI + 1e-6);

    // odd cat at beta=2: maximal negativity at the origin; the fast
    // interference fringes need a fine grid before the quadrature settles
    HilbertSpec spec(n);
    const StateVector cat = fock::cat_state(spec, 2.0, -1);
    const Eigen::VectorXcd cv = cat.head(n);
    observables::WignerGridSpec fine;
    fine.q_min = -4.5;
    fine.q_max = 4.5;
    fine.p_min = -4.5;
    fine.p_max = 4.5;
    fine.nq = 181;
    fine.np = 181;
    fine.workers = 2;
    const auto wc = observables::wigner(DenseOp(cv * cv.adjoint()), fine);
    CHECK(wc.values(90, 90) == Catch::Approx(-2.0 / M_PI).epsilon(1e-9));
    CHECK(observables::wigner_integral(wc) == Catch::Approx(1.0).margin(1e-3));

    // coherent state parked outside a tiny grid trips the boundary warning
    observables::WignerGridSpec tiny;
    tiny.q_min = -0.5;
    tiny.q_max = 0.5;
    tiny.p_min = -0.5;
    tiny.p_max = 0.5;
    tiny.nq = 11;
    tiny.np = 11;
    const StateVector coh = fock::coherent_state(spec, 2.0);
    const Eigen::VectorXcd cohv = coh.head(n);
    CHECK(observables::wigner(DenseOp(cohv * cohv.adjoint()), tiny).boundary_warning);
}

TEST_CASE("wigner_matches_parity_expectation_at_origin") {
    // W(0,0) = (2/pi) <P_v> for any state
    const int n = 25;
    const Eigen::VectorXcd amps = fock::coherent_amplitudes(n, Complex(0.9, 0.5)).normalized();
    const DenseOp rho = amps * amps.adjoint();
    observables::WignerGridSpec g;
    g.q_min = -1e-9;
    g.q_max = 1e-9;
    g.p_min = -1e-9;
    g.p_max = 1e-9;
    g.nq = 2;
    g.np = 2;
    const auto w = observables::wigner(rho, g);
    double par = 0.0;
    for (int k = 0; k < n; ++k) par += ((k % 2 == 0) ? 1.0 : -1.0) * rho(k, k).real();
    CHECK(w.values(0, 0) == Catch::Approx(2.0 / M_PI * par).margin(1e-9));
}

TEST_CASE("analytic_spectrum_line_table") {
    // vacuum vibration: no anti-Stokes weight, Stokes weight eta^2
    const auto lines0 = observables::analytic_spectrum(0.3, 0.04, 10.0, 0.0, 1000.0);
    REQUIRE(lines0.size() == 3);
    CHECK(lines0[0].center == 0.0);
    CHECK(lines0[0].fwhm == Catch::Approx(0.04));
    CHECK(lines0[0].weight == 1.0);
    CHECK(lines0[1].center == Catch::Approx(1000.0));
    CHECK(lines0[1].weight == 0.0);
    CHECK(lines0[2].center == Catch::Approx(-1000.0));
    CHECK(lines0[2].fwhm == Catch::Approx(10.04));
    CHECK(lines0[2].weight == Catch::Approx(0.09));

    // Stokes/anti-Stokes weight ratio (1+n)/n
    const auto lines = observables::analytic_spectrum(0.3, 0.04, 10.0, 0.5, 1000.0);
    CHECK(lines[2].weight / lines[1].weight == Catch::Approx(3.0));

    // per-mode Stokes minus anti-Stokes weight equals eta_k^2; weights nonnegative
    const auto multi = observables::analytic_spectrum(
        0.04, {observables::VibrationalMode{0.2, 800.0, 8.0, 0.3},
               observables::VibrationalMode{0.35, 2500.0, 20.0, 1.2}});
    REQUIRE(multi.size() == 5);
    for (const auto& l : multi) CHECK(l.weight >= 0.0);
    CHECK(multi[2].weight - multi[1].weight == Catch::Approx(0.04));
    CHECK(multi[4].weight - multi[3].weight == Catch::Approx(0.1225));
}

TEST_CASE("franck_condon_round_trip") {
    const double omega_v = 1000.0;
    for (double eta : {0.1, 0.3}) {
        const auto lines = observables::analytic_spectrum(eta, 0.04, 10.0, 0.0, omega_v);
        const Eigen::VectorXd freq = Eigen::VectorXd::LinSpaced(200001, -1500.0, 500.0);
        const Eigen::VectorXd curve = observables::sample_spectrum(lines, freq);
        const double est = observables::franck_condon_extract(freq, curve, {-400.0, 400.0},
                                                              {-1400.0, -600.0});
        CHECK(est == Catch::Approx(eta * eta).epsilon(0.02));
    }

    // eta = 0 leaves no sideband area beyond the ZPL Lorentzian tail leaking
    // into the Stokes window (~ gamma0/(pi * offset) ~ 1e-5 here)
    const auto bare = observables::analytic_spectrum(0.0, 0.04, 10.0, 0.0, omega_v);
    const Eigen::VectorXd freq = Eigen::VectorXd::LinSpaced(100001, -1500.0, 500.0);
    const Eigen::VectorXd curve = observables::sample_spectrum(bare, freq);
    CHECK(observables::franck_condon_extract(freq, curve, {-400.0, 400.0}, {-1400.0, -600.0}) ==
          Catch::Approx(0.0).margin(1e-4));

    CHECK_THROWS_AS(observables::franck_condon_extract(freq, curve, {-400.0, 400.0}, {0.0, 600.0}),
                    std::invalid_argument);
}

TEST_CASE("franck_condon_two_mode_recovery") {
    const auto lines = observables::analytic_spectrum(
        0.04, {observables::VibrationalMode{0.1, 800.0, 8.0, 0.0},
               observables::VibrationalMode{0.3, 2500.0, 10.0, 0.0}});
    const Eigen::VectorXd freq = Eigen::VectorXd::LinSpaced(400001, -3400.0, 600.0);
    const Eigen::VectorXd curve = observables::sample_spectrum(lines, freq);
    const double eta1 = observables::franck_condon_extract(freq, curve, {-300.0, 300.0},
                                                           {-1100.0, -500.0});
    const double eta2 = observables::franck_condon_extract(freq, curve, {-300.0, 300.0},
                                                           {-3150.0, -1850.0});
    CHECK(eta1 == Catch::Approx(0.01).epsilon(0.02));
    CHECK(eta2 == Catch::Approx(0.09).epsilon(0.02));
}
