#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "bifurc/alpha_system.hpp"
#include "bifurc/errors.hpp"

using namespace bifurc;
namespace {
constexpr double kPi = std::numbers::pi;

BoxDomain pi_square() { return BoxDomain::create({Rational(1), Rational(1)}, true); }

std::shared_ptr<GroupMomentEvaluator> square_moments(double sigma = 2.0) {
  static const BoxDomain box = pi_square();
  const auto groups = enumerate_groups(box, 6.0);
  return std::make_shared<GroupMomentEvaluator>(groups[1], box, sigma);
}

Eigen::VectorXcd alpha1(cdouble v) {
  Eigen::VectorXcd a(1);
  a << v;
  return a;
}
}  // namespace

TEST_CASE("reduced system vanishes at the square roots") {
  auto moments = square_moments();
  GroupReducedSystem system(*moments, 0);
  for (cdouble root : {cdouble(0, 0), cdouble(1, 0), cdouble(-1, 0), cdouble(0, 1), cdouble(0, -1)})
    CHECK(system.eval(alpha1(root)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reduced system value at alpha = 1/2") {
  auto moments = square_moments();
  GroupReducedSystem system(*moments, 0);
  const cdouble v = system.eval(alpha1(0.5))[0];
  // (A - 3B) * 0.5 * (1 - 0.25) with normalized A, B on the pi-square
  CHECK(v.real() == doctest::Approx(-9.0 / (32 * kPi * kPi)).epsilon(1e-9));
  CHECK(std::abs(v.imag()) < 1e-13);
}

TEST_CASE("closed form matches the explicit second-eigenvalue polynomial") {
  // unnormalized table of the pi-square: A = 9 pi^2/64, B = pi^2/16
  QuarticTable table;
  table.A = 9 * kPi * kPi / 64;
  table.B = kPi * kPi / 16;
  auto remark_formula = [](cdouble a) {
    return kPi * kPi / 8 * (a * a - 1.0) * a.real() -
           5 * kPi * kPi / 64 * (std::norm(a) - 1.0) * a;
  };
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    AlphaVector a;
    a.alpha = alpha1(cdouble(uni(rng), uni(rng)));
    const cdouble lhs = closed_form_P_sigma2(a, table)[0];
    CHECK(std::abs(lhs - remark_formula(a.alpha[0])) < 1e-12);
  }
}

TEST_CASE("closed form at 1 + i reproduces the derived value") {
  QuarticTable table;
  table.A = 9 * kPi * kPi / 64;
  table.B = kPi * kPi / 16;
  AlphaVector a;
  a.alpha = alpha1(cdouble(1, 1));
  const cdouble v = closed_form_P_sigma2(a, table)[0];
  CHECK(v.real() == doctest::Approx(kPi * kPi / 64 * -13.0).epsilon(1e-13));
  CHECK(v.imag() == doctest::Approx(kPi * kPi / 64 * 11.0).epsilon(1e-13));
  // vanishes at +-1 for any table
  AlphaVector unit;
  unit.alpha = alpha1(1.0);
  CHECK(std::abs(closed_form_P_sigma2(unit, table)[0]) < 1e-15);
  unit.alpha = alpha1(-1.0);
  CHECK(std::abs(closed_form_P_sigma2(unit, table)[0]) < 1e-15);
}

TEST_CASE("closed form agrees with quadrature for the normalized square basis") {
  auto moments = square_moments();
  GroupReducedSystem system(*moments, 0);
  const QuarticTable table = make_quartic_table(moments->group(), moments->box());
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(-1.5, 1.5);
  for (int trial = 0; trial < 40; ++trial) {
    AlphaVector a;
    a.alpha = alpha1(cdouble(uni(rng), uni(rng)));
    const cdouble quad = system.eval(a.alpha)[0];
    const cdouble closed = closed_form_P_sigma2(a, table)[0];
    CHECK(std::abs(quad - closed) < 1e-9 * (1 + std::abs(closed)));
  }
}

TEST_CASE("closed form refuses groups with surviving cross terms") {
  QuarticTable bad;
  bad.A = 1.0;
  bad.B = 0.5;
  bad.cross_ok = false;
  AlphaVector a;
  a.alpha = alpha1(0.3);
  CHECK_THROWS_AS(closed_form_P_sigma2(a, bad), ConfigError);
}

TEST_CASE("analytic Jacobian matches central differences") {
  auto moments = square_moments();
  GroupReducedSystem system(*moments, 0);
  CHECK(jacobian_fd_error(system, alpha1(cdouble(0, 0))) < 1e-6);
  CHECK(jacobian_fd_error(system, alpha1(cdouble(0, 1))) < 1e-6);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uni(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial)
    CHECK(jacobian_fd_error(system, alpha1(cdouble(uni(rng), uni(rng)))) < 1e-6);
}

TEST_CASE("Jacobian determinants at the isolated roots are nonzero") {
  auto moments = square_moments();
  GroupReducedSystem system(*moments, 0);
  for (cdouble root : {cdouble(0, 0), cdouble(0, 1)}) {
    const Eigen::MatrixXd jac = system.real_jacobian(alpha1(root));
    CHECK(std::abs(jac.determinant()) > 1e-6);
  }
}

TEST_CASE("multistart on the square finds exactly the five roots") {
  auto moments = square_moments();
  GroupReducedSystem system(*moments, 0);
  MultistartOptions options;
  const MultistartSummary summary = multistart_solve(system, 0, options);
  REQUIRE(summary.seeds.size() == 5);
  const std::vector<cdouble> expect = {cdouble(-1, 0), cdouble(0, -1), cdouble(0, 0),
                                       cdouble(0, 1), cdouble(1, 0)};
  for (size_t i = 0; i < expect.size(); ++i) {
    CHECK(std::abs(summary.seeds[i].alpha.alpha[0] - expect[i]) < 1e-6);
    CHECK(summary.seeds[i].residual < 1e-10);
    CHECK(summary.seeds[i].nondegenerate);
  }
  CHECK_FALSE(summary.continuum_suspected);
}

TEST_CASE("roots come in conjugate pairs") {
  auto moments = square_moments();
  GroupReducedSystem system(*moments, 0);
  MultistartOptions options;
  const MultistartSummary summary = multistart_solve(system, 0, options);
  for (const auto& seed : summary.seeds) {
    const Eigen::VectorXcd conj = seed.alpha.alpha.conjugate();
    CHECK(system.eval(conj).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("re-leading a root keeps it a root") {
  auto moments = square_moments();
  // root alpha = i in the lead-0 chart -> coefficients (1, i); in the lead-1
  // chart the coefficient vector rescales to (1/i, 1) = (-i, 1)
  GroupReducedSystem relead(*moments, 1);
  CHECK(relead.eval(alpha1(cdouble(0, -1))).cwiseAbs().maxCoeff() < 1e-12);
  GroupReducedSystem lead0(*moments, 0);
  CHECK(lead0.eval(alpha1(cdouble(1, 0))).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(relead.eval(alpha1(cdouble(1, 0))).cwiseAbs().maxCoeff() < 1e-12);

  // every nondegenerate root with a nonzero second coefficient maps over
  const MultistartSummary summary = multistart_solve(lead0, 0, MultistartOptions{});
  for (const auto& seed : summary.seeds) {
    const cdouble a = seed.alpha.alpha[0];
    if (!seed.nondegenerate || std::abs(a) < 1e-8) continue;
    CHECK(relead.eval(alpha1(1.0 / a)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("real starts on the cube give the nine lattice roots") {
  const BoxDomain cube = BoxDomain::create({Rational(1), Rational(1), Rational(1)}, true);
  const auto groups = enumerate_groups(cube, 7.0);
  auto moments = std::make_shared<GroupMomentEvaluator>(groups[1], cube, 2.0, 16);
  GroupReducedSystem system(*moments, 0);
  MultistartOptions options;
  options.grid.real_only = true;
  const MultistartSummary summary = multistart_solve(system, 0, options);
  REQUIRE(summary.seeds.size() == 9);
  for (const auto& seed : summary.seeds) {
    CHECK(seed.is_real);
    CHECK(seed.nondegenerate);
    for (int j = 0; j < 2; ++j) {
      const double re = seed.alpha.alpha[j].real();
      CHECK(std::min({std::abs(re + 1), std::abs(re), std::abs(re - 1)}) < 1e-8);
    }
  }
}

TEST_CASE("branch enumeration counts on square and cube") {
  {
    auto moments = square_moments();
    MultistartOptions options;
    const BranchEnumeration result = enumerate_branches(*moments, options);
    CHECK(result.real_count == 4);  // (3^2 - 1)/2
    int complex_seeds = 0;
    for (const auto& seed : result.seeds)
      if (!seed.is_real) ++complex_seeds;
    CHECK(complex_seeds == 2);  // +-i
    CHECK_FALSE(result.continuum_suspected);
  }
  {
    const BoxDomain cube = BoxDomain::create({Rational(1), Rational(1), Rational(1)}, true);
    const auto groups = enumerate_groups(cube, 7.0);
    auto moments = std::make_shared<GroupMomentEvaluator>(groups[1], cube, 2.0, 16);
    MultistartOptions options;
    options.grid.real_only = true;
    const BranchEnumeration result = enumerate_branches(*moments, options);
    CHECK(result.real_count == 13);  // (3^3 - 1)/2
    REQUIRE(result.real_by_nonzero.size() == 3);
    CHECK(result.real_by_nonzero.at(1) == 3);
    CHECK(result.real_by_nonzero.at(2) == 6);
    CHECK(result.real_by_nonzero.at(3) == 4);
  }
}

TEST_CASE("jittered starts find the same root set deterministically") {
  auto moments = square_moments();
  GroupReducedSystem system(*moments, 0);
  MultistartOptions options;
  options.grid.jitter = 0.2;
  options.grid.rng_seed = 99;
  const MultistartSummary first = multistart_solve(system, 0, options);
  const MultistartSummary second = multistart_solve(system, 0, options);
  REQUIRE(first.seeds.size() == 5);
  REQUIRE(second.seeds.size() == 5);
  for (size_t i = 0; i < first.seeds.size(); ++i)
    CHECK(first.seeds[i].alpha.alpha[0] == second.seeds[i].alpha.alpha[0]);
}

TEST_CASE("brute force: the real roots on the square line are exactly {-1, 0, 1}") {
  auto moments = square_moments();
  const QuarticTable table = make_quartic_table(moments->group(), moments->box());
  // dense scan of the real line against the closed form
  const double small = 1e-4;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -2.0 + 4.0 * i / 4000.0;
    AlphaVector a;
    a.alpha = alpha1(x);
    const double value = std::abs(closed_form_P_sigma2(a, table)[0]);
    const double lattice_dist = std::min({std::abs(x + 1), std::abs(x), std::abs(x - 1)});
    if (value < small * table.A) CHECK(lattice_dist < 0.05);
    if (lattice_dist > 0.25 && std::abs(x) < 1.75) CHECK(value > small * table.A);
  }
}

TEST_CASE("free-function wrappers for the reduced-system operations") {
  const auto groups = enumerate_groups(pi_square(), 6.0);
  AlphaVector a;
  a.lead = 0;
  a.alpha = alpha1(cdouble(0, 1));
  CHECK(eval_P(a, 2.0, groups[1], pi_square()).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXd jac = eval_real_jacobian(a, 2.0, groups[1], pi_square());
  CHECK(jac.rows() == 2);
  CHECK(std::abs(jac.determinant()) > 1e-6);
}
