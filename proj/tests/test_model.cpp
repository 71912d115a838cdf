#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "pnr/model.hpp"

using namespace pnr;

namespace {

std::vector<double> eigenvalues(const ComplexMatrix& H) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(H.to_dense(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& v = eig.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

MechanicalSpec membrane_10mhz() {
  MechanicalSpec m;
  m.mass = 1e-13;
  const double w = 2.0 * constants::pi * 10e6;
  m.spring_constant = m.mass * w * w;
  m.plate_area = constants::pi * 7.5e-6 * 7.5e-6;
  m.gap = 50e-9;
  return m;
}

TwoBodySystem fig_s2_system() {
  // transmon: omega (g-e) = 1, A = 0.05 -> bare omega' = 1.05
  return {{1.05, 0.05, 1e-4, 1.2, 4}, {1.0, 0.0, 1e-7, 1.2, 6}, 0.005};
}

}  // namespace

TEST(Quantize, ZeroBiasDecouples) {
  const EquivalentCircuit e = equivalent_circuit(membrane_10mhz(), 0.0);
  const TwoBodyParams p = quantize_two_body(e, 1e-12, 1e-6);
  EXPECT_TRUE(p.decoupled);
  EXPECT_EQ(p.g, 0.0);
  EXPECT_DOUBLE_EQ(p.omega_m_prime, e.omega_m_0);
}

TEST(Quantize, CouplingAtTenPercentSoftening) {
  const MechanicalSpec m = membrane_10mhz();
  const EquivalentCircuit e = equivalent_circuit(m, bias_for_softening(m, 0.9));
  const double C_J = 1234.0 * e.C_d;
  const double C_t = C_J + e.C_d;
  // Choose L_J so that the transmon is resonant with the renormalized mechanics.
  const double w_m = e.omega_m_V0 * std::sqrt((e.C_m + C_t) / C_t);
  const TwoBodyParams p = quantize_two_body(e, C_J, 1.0 / (w_m * w_m * C_t));
  EXPECT_NEAR(p.omega_t_prime, p.omega_m_prime, 1e-9 * p.omega_m_prime);
  EXPECT_NEAR(p.g / p.omega_t_prime, 0.0069, 0.0002);
  EXPECT_DOUBLE_EQ(p.C_t, C_J + e.C_d);
  EXPECT_FALSE(p.decoupled);
}

TEST(Quantize, ChargingEnergyAtTransmonLimit) {
  EquivalentCircuit e = equivalent_circuit(membrane_10mhz(), 0.0);
  const double C_t = 38.7e-12;
  const double w = 2.0 * constants::pi * 10e6;
  const TwoBodyParams p = quantize_two_body(e, C_t - e.C_d, 1.0 / (w * w * C_t));
  EXPECT_NEAR(p.A.hertz(), 0.5e6, 0.01e6);
  EXPECT_NEAR(p.transmon_limit_ratio(), 1.0 / 20.0, 0.001);
  EXPECT_NEAR(p.omega_t(), p.omega_t_prime - p.A.angular(), 1e-6);
}

TEST(Quantize, RejectsNonPositiveCircuit) {
  const EquivalentCircuit e = equivalent_circuit(membrane_10mhz(), 0.0);
  EXPECT_THROW(quantize_two_body(e, 0.0, 1e-6), DomainError);
  EXPECT_THROW(quantize_two_body(e, 1e-12, -1.0), DomainError);
}

TEST(Quantize, CouplingBound) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const MechanicalSpec m = membrane_10mhz();
  for (int i = 0; i < 2000; ++i) {
    const double V = (0.001 + 0.998 * u(rng)) * pull_in_voltage(m);
    const EquivalentCircuit e = equivalent_circuit(m, V);
    const double C_J = e.C_d * std::pow(10.0, -2 + 6 * u(rng));
    const double L_J = std::pow(10.0, -9 + 4 * u(rng));
    const TwoBodyParams p = quantize_two_body(e, C_J, L_J);
    EXPECT_LE(p.g, 0.5 * std::sqrt(p.omega_m_prime * p.omega_t_prime) * (1.0 + 1e-12));
    EXPECT_GE(p.g, 0.0);
  }
}

TEST(TwoBodyHamiltonian, UncoupledHarmonicSpectrum) {
  const TwoBodyCoefficients c{1.3, 0.0, 0.4, 0.0};
  const HilbertDims d{4, 5};
  auto ev = eigenvalues(build_two_body_hamiltonian(c, d));
  std::vector<double> expected;
  for (int n = 0; n < 4; ++n) {
    for (int m = 0; m < 5; ++m) expected.push_back(n * 1.3 + m * 0.4);
  }
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], expected[i], 1e-13);
}

TEST(TwoBodyHamiltonian, HermitianForFigS2) {
  const ComplexMatrix H = build_two_body_hamiltonian(fig_s2_system());
  EXPECT_LE((H - H.adjoint()).frobenius_norm(), 1e-12 * H.frobenius_norm());
  EXPECT_EQ(H.rows(), 24u);
}

TEST(TwoBodyHamiltonian, QuarticIsNotNormalOrdered) {
  // <n|(a + a^dag)^4|n> = 6n^2 + 6n + 3 on every kept level, including the top one.
  const ComplexMatrix x4 = detail::quartic_position(5);
  for (std::size_t n = 0; n < 5; ++n) {
    EXPECT_NEAR(x4(n, n).real(), 6.0 * n * n + 6.0 * n + 3.0, 1e-12);
  }
  EXPECT_NEAR(x4(0, 4).real(), std::sqrt(24.0), 1e-12);
  EXPECT_NEAR(x4(0, 2).real(), (3.0 + 3.0) * std::sqrt(2.0), 1e-12);
}

TEST(TwoBodyHamiltonian, TransmonLadderUnderSecularProjection) {
  // With the counter-rotating part of the quartic dropped, level n sits at
  // n w' - (A/2) n (n + 1) above a constant; the g-e line is w' - A.
  const TwoBodyCoefficients c{1.05, 0.05, 1.0, 0.0};
  const HilbertDims d{5, 2};
  const ComplexMatrix H = build_two_body_hamiltonian(c, d);
  const std::vector<std::size_t> rot{0, 1};
  const ComplexMatrix Hs = rotating_frame(H, DriveSpec{0, 0.0, 0.0}, d, rot);
  const double e0 = Hs(0, 0).real();
  for (std::size_t n = 1; n < 5; ++n) {
    const double En = Hs(n * 2, n * 2).real() - e0;
    EXPECT_NEAR(En, n * 1.05 - 0.025 * n * (n + 1), 1e-12);
  }
}

TEST(TwoBodyHamiltonian, NormalModeSplittingNearTwoG) {
  // Resonant row with g = 0.75: the two lowest excitations split by about 2g.
  const TwoBodySystem s{{1.005, 0.005, 4e-5, 1.2, 6}, {1.0, 0.0, 1e-7, 1.2, 6}, 0.75};
  const auto levels = ground_referenced_spectrum(build_two_body_hamiltonian(s));
  EXPECT_EQ(levels[0], 0.0);
  EXPECT_NEAR(levels[2] - levels[1], 1.5, 0.1 * 1.5);
}

TEST(TwoBodyHamiltonian, RwaBeamSplitter) {
  const double w = 1.0, g = 0.02;
  const HilbertDims d{2, 2};
  const ComplexMatrix H = build_two_body_hamiltonian(TwoBodyCoefficients{w, 0.0, w, g}, d);
  const std::vector<std::size_t> rot{0, 1};
  auto ev = eigenvalues(rotating_frame(H, DriveSpec{0, 0.0, 0.0}, d, rot));
  EXPECT_NEAR(ev[0], 0.0, 1e-14);
  EXPECT_NEAR(ev[1], w - g, 1e-14);
  EXPECT_NEAR(ev[2], w + g, 1e-14);
  EXPECT_NEAR(ev[3], 2.0 * w, 1e-14);
}

TEST(TwoBodyHamiltonian, WrongModeCount) {
  EXPECT_THROW(build_two_body_hamiltonian(TwoBodyCoefficients{1, 0, 1, 0}, HilbertDims{2, 2, 2}), DimensionError);
}

TEST(ThreeBodyHamiltonian, UncoupledLadders) {
  const ThreeBodyParams p{{5.0, 0.2, 0, 0, 3}, {1.0, 0.05, 0, 0, 4}, {0.9, 0, 0, 0, 3}, 0.0, 0.0};
  auto ev = eigenvalues(build_three_body_hamiltonian(p));
  std::vector<double> expected;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 3; ++c) expected.push_back(5.0 * a - 0.2 * a * (a - 1) + 1.0 * b - 0.05 * b * (b - 1) + 0.9 * c);
    }
  }
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], expected[i], 1e-12);
}

TEST(ThreeBodyHamiltonian, HermitianAndGroundShifted) {
  // hybridized-regime row: mech 1.2, LF 1 (A 0.001), HF 50 (A 0.025), g 0.1, chi 0.01
  const ThreeBodyParams p{{50, 0.025, 1e-4, 0, 3}, {1, 0.001, 1e-5, 0.5, 4}, {1.2, 0, 1e-5, 0.5, 4}, 0.1, 0.01};
  const ComplexMatrix H = build_three_body_hamiltonian(p);
  EXPECT_LE((H - H.adjoint()).frobenius_norm(), 1e-12 * H.frobenius_norm());
  const auto levels = ground_referenced_spectrum(H);
  EXPECT_EQ(levels.front(), 0.0);
  EXPECT_TRUE(std::is_sorted(levels.begin(), levels.end()));
}

TEST(ThreeBodyHamiltonian, CrossKerrShiftsLfLine) {
  const double chi = 0.03;
  const ThreeBodyParams p{{5.0, 0.2, 0, 0, 3}, {1.0, 0.05, 0, 0, 4}, {0.9, 0, 0, 0, 2}, 0.0, chi};
  const HilbertDims d = p.dims();
  const ComplexMatrix H = build_three_body_hamiltonian(p);
  auto idx = [&](std::size_t a, std::size_t b, std::size_t c) { return (a * 4 + b) * 2 + c; };
  const double lf_g = H(idx(0, 1, 0), idx(0, 1, 0)).real() - H(idx(0, 0, 0), idx(0, 0, 0)).real();
  const double lf_e = H(idx(1, 1, 0), idx(1, 1, 0)).real() - H(idx(1, 0, 0), idx(1, 0, 0)).real();
  EXPECT_NEAR(lf_e - lf_g, -chi, 1e-14);
  (void)d;
}

TEST(ThreeBodyHamiltonian, ConsistencyWarning) {
  std::vector<std::string> seen;
  ScopedWarningHandler guard([&](std::string_view m) { seen.emplace_back(m); });
  ThreeBodyParams p{{50, 2.5, 0, 0, 3}, {1, 0.05, 0, 0, 4}, {1, 0, 0, 0, 4}, 0.005, 5e-4};
  EXPECT_FALSE(p.check_crosskerr_consistency());
  EXPECT_EQ(seen.size(), 1u);
  p.chi_LH = 2.0 * std::sqrt(2.5 * 0.05);
  EXPECT_TRUE(p.check_crosskerr_consistency());
  p.lf.anharmonicity = 0.0;
  EXPECT_FALSE(p.crosskerr_consistency().has_value());
  EXPECT_EQ(seen.size(), 1u);
}

TEST(RotatingFrame, NoDriveLeavesNumberConservingHamiltonian) {
  const ThreeBodyParams p{{5.0, 0.2, 0, 0, 3}, {1.0, 0.05, 0, 0, 3}, {0.9, 0, 0, 0, 3}, 0.0, 0.01};
  const ComplexMatrix H = build_three_body_hamiltonian(p);
  const std::vector<std::size_t> rot{0};
  EXPECT_EQ((rotating_frame(H, DriveSpec{0, 0.0, 0.0}, p.dims(), rot) - H).max_abs(), 0.0);
}

TEST(RotatingFrame, NoDriveNonSecularIsIdentityMap) {
  const TwoBodySystem s = fig_s2_system();
  const ComplexMatrix H = build_two_body_hamiltonian(s);
  const std::vector<std::size_t> rot{0, 1};
  const ComplexMatrix out = rotating_frame(H, DriveSpec{0, 0.0, 0.0}, s.dims(), rot, FrameOptions{false});
  EXPECT_EQ((out - H).max_abs(), 0.0);
}

TEST(RotatingFrame, SecularCouplingKeepsCoRotatingPair) {
  // At N = 2 x 2: [n_a + n_c, a c^dag + a^dag c] = 0 while a c and a^dag c^dag change the count by -+2.
  const HilbertDims d{2, 2};
  const ComplexMatrix a = embed(destroy(2), 0, d), c = embed(destroy(2), 1, d);
  const ComplexMatrix N = embed(number(2), 0, d) + embed(number(2), 1, d);
  const ComplexMatrix co = a * c.adjoint() + a.adjoint() * c;
  const ComplexMatrix counter = a * c + a.adjoint() * c.adjoint();
  EXPECT_EQ((N * co - co * N).max_abs(), 0.0);
  EXPECT_GT((N * counter - counter * N).max_abs(), 1.0);

  const double g = 0.1;
  const ComplexMatrix H = build_two_body_hamiltonian(TwoBodyCoefficients{0.0, 0.0, 0.0, g}, d);
  const std::vector<std::size_t> rot{0, 1};
  const ComplexMatrix Hs = rotating_frame(H, DriveSpec{0, 0.0, 0.0}, d, rot);
  EXPECT_LT((Hs - g * co).max_abs(), 1e-15);
}

TEST(RotatingFrame, HfDiagonalShiftsPerPhoton) {
  const ThreeBodyParams p{{50, 2.5, 1e-4, 0, 3}, {1, 0.05, 1e-6, 0.5, 3}, {1, 0, 1e-6, 0.5, 3}, 0.005, 5e-4};
  const ComplexMatrix H = build_three_body_hamiltonian(p);
  const std::vector<std::size_t> rot{0};
  const double wd = 49.9;
  const ComplexMatrix R = rotating_frame(H, DriveSpec{0, wd, 0.0}, p.dims(), rot);
  for (std::size_t i = 0; i < p.dims().total(); ++i) {
    const double n = static_cast<double>(p.dims().occupation(i, 0));
    EXPECT_NEAR((R(i, i) - H(i, i)).real(), -wd * n, 1e-12);
  }
}

TEST(RotatingFrame, DriveTerm) {
  const HilbertDims d{3, 2};
  const ComplexMatrix H = ComplexMatrix::zeros(6, 6);
  const std::vector<std::size_t> rot{0, 1};
  const ComplexMatrix R = rotating_frame(H, DriveSpec{0, 0.0, 0.01}, d, rot);
  const ComplexMatrix a = embed(destroy(3), 0, d);
  EXPECT_LT((R - Complex(0, -0.01) * (a - a.adjoint())).max_abs(), 1e-16);
  EXPECT_TRUE(R.is_hermitian());
}

TEST(RotatingFrame, DrivenModeMustRotate) {
  const HilbertDims d{3, 3, 2};
  const ComplexMatrix H = ComplexMatrix::identity(18);
  const std::vector<std::size_t> rot{0};
  EXPECT_THROW(rotating_frame(H, DriveSpec{1, 1.0, 0.1}, d, rot), ContractViolation);
  EXPECT_THROW(rotating_frame(ComplexMatrix::identity(4), DriveSpec{0, 1.0, 0.1}, d, rot), DimensionError);
}

TEST(DriveSpec, WeakProbeDefault) {
  const ModeSpec m{1.0, 0.05, 1e-4, 1.2, 4};
  EXPECT_DOUBLE_EQ(DriveSpec::weak_probe(0, m).amplitude, 1e-7);
}

TEST(ModeSpec, Validation) {
  EXPECT_THROW((ModeSpec{1, 0, -1, 0, 3}.validate()), DomainError);
  EXPECT_THROW((ModeSpec{1, 0, 1, -0.1, 3}.validate()), DomainError);
  EXPECT_THROW((ModeSpec{1, 0, 1, 0, 1}.validate()), DomainError);
}
