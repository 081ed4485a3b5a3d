// Acceptance suite: one test case per release criterion, each printing a
// PASS/FAIL line with its measured numbers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "bifurc/cgl.hpp"
#include "bifurc/commands.hpp"
#include "bifurc/contour.hpp"
#include "bifurc/disk.hpp"
#include "bifurc/reduction.hpp"

using namespace bifurc;
namespace {
constexpr double kPi = std::numbers::pi;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("[acceptance] criterion %2d (%s): %s  %s\n", criterion, name,
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  CHECK(pass);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

BoxDomain pi_box(int dim) {
  return BoxDomain::create(std::vector<Rational>(dim, Rational(1)), true);
}

EigenGroup group_at(const BoxDomain& box, const Rational& rational, double bound) {
  for (const auto& g : enumerate_groups(box, bound))
    if (g.rational_part == rational) return g;
  throw std::runtime_error("acceptance: group not found");
}

AlphaVector alpha_seed(std::initializer_list<cdouble> values, int lead = 0) {
  AlphaVector a;
  a.lead = lead;
  a.alpha.resize(static_cast<int>(values.size()));
  int i = 0;
  for (cdouble v : values) a.alpha[i++] = v;
  return a;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag)
      : path(std::filesystem::temp_directory_path() / ("bifurc_acceptance_" + tag)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("criterion 1: square root set") {
  Stopwatch watch;
  const BoxDomain box = pi_box(2);
  const EigenGroup group = group_at(box, Rational(5), 6.0);
  const GroupMomentEvaluator moments(group, box, 2.0);
  const GroupReducedSystem system(moments, 0);
  const MultistartSummary summary = multistart_solve(system, 0, MultistartOptions{});
  const double elapsed = watch.seconds();

  const std::vector<cdouble> expect = {cdouble(-1, 0), cdouble(0, -1), cdouble(0, 0),
                                       cdouble(0, 1), cdouble(1, 0)};
  bool pass = summary.seeds.size() == 5 && elapsed < 10.0;
  double max_residual = 0;
  for (size_t i = 0; pass && i < expect.size(); ++i) {
    const SeedSolution& seed = summary.seeds[i];
    pass = std::abs(seed.alpha.alpha[0] - expect[i]) < 1e-6 && seed.residual < 1e-10 &&
           seed.nondegenerate;
    max_residual = std::max(max_residual, seed.residual);
  }
  report(1, "square root set", pass,
         fmt("roots=%zu max_residual=%.2e elapsed=%.2fs", summary.seeds.size(), max_residual,
             elapsed));
}

TEST_CASE("criterion 2: branch counting on square and cube") {
  Stopwatch watch;
  const BoxDomain square = pi_box(2);
  const GroupMomentEvaluator square_moments(group_at(square, Rational(5), 6.0), square, 2.0);
  const BranchEnumeration square_count = enumerate_branches(square_moments, MultistartOptions{});

  const BoxDomain cube = pi_box(3);
  const GroupMomentEvaluator cube_moments(group_at(cube, Rational(6), 7.0), cube, 2.0, 16);
  MultistartOptions cube_options;
  cube_options.grid.real_only = true;
  const BranchEnumeration cube_count = enumerate_branches(cube_moments, cube_options);
  const double elapsed = watch.seconds();

  const bool partition_ok = cube_count.real_by_nonzero.size() == 3 &&
                            cube_count.real_by_nonzero.at(1) == 3 &&
                            cube_count.real_by_nonzero.at(2) == 6 &&
                            cube_count.real_by_nonzero.at(3) == 4;
  const bool pass =
      square_count.real_count == 4 && cube_count.real_count == 13 && partition_ok &&
      elapsed < 60.0;
  report(2, "branch counting", pass,
         fmt("square=%d cube=%d partition=%d/%d/%d elapsed=%.1fs", square_count.real_count,
             cube_count.real_count,
             partition_ok ? cube_count.real_by_nonzero.at(1) : -1,
             partition_ok ? cube_count.real_by_nonzero.at(2) : -1,
             partition_ok ? cube_count.real_by_nonzero.at(3) : -1, elapsed));
}

TEST_CASE("criterion 3: quartic counterexample on the 4-cube") {
  const BoxDomain box4 = pi_box(4);
  const EigenGroup group = group_at(box4, Rational(30), 31.0);

  // the cyclic-shift quadruple of (1,2,3,4)
  auto find_mode = [&](std::initializer_list<int> k) {
    Mode target{k};
    for (size_t i = 0; i < group.modes.size(); ++i)
      if (group.modes[i].k == target.k) return static_cast<int>(i);
    return -1;
  };
  const int i0 = find_mode({1, 2, 3, 4}), i1 = find_mode({2, 3, 4, 1}),
            i2 = find_mode({3, 4, 1, 2}), i3 = find_mode({4, 1, 2, 3});
  bool pass = i0 >= 0 && i1 >= 0 && i2 >= 0 && i3 >= 0;

  double closed = 0, quad = 0;
  if (pass) {
    const std::array<Mode, 4> tuple = {group.modes[i0], group.modes[i1], group.modes[i2],
                                       group.modes[i3]};
    closed = quartic_product(tuple, box4, /*normalized=*/false);
    quad = quartic_product_quadrature(tuple, box4, 24, /*normalized=*/false);
    const double target = std::pow(kPi / 8.0, 4);
    pass = std::abs(closed - target) < 1e-14 && std::abs(closed - quad) < 1e-10;
  }

  // the command flags the group
  TempDir dir("h4");
  Json doc = {{"domain", Json{{"type", "box"},
                              {"lengths_sq", Json::array({"1", "1", "1", "1"})},
                              {"unit", "pi"}}},
              {"group", Json{{"eigenvalue", "30"}}},
              {"solver", Json{{"spectrum_bound", 31.0}}}};
  const Json h4 = run_h4(RunConfig::parse(doc), dir.path);
  pass = pass && h4.at("holds").get<bool>() == false && !h4.at("violations").empty();

  report(3, "quartic counterexample", pass,
         fmt("closed=%.10f (pi/8)^4=%.10f |closed-quad|=%.1e flagged=%s", closed,
             std::pow(kPi / 8.0, 4), std::abs(closed - quad),
             h4.at("holds").get<bool>() ? "no" : "yes"));
}

TEST_CASE("criterion 4: lambda expansion rate on the interval") {
  const BoxDomain interval = pi_box(1);
  const EigenGroup group = group_at(interval, Rational(1), 2.0);
  const GalerkinSpace space(interval, group, 24);
  const GroupMomentEvaluator moments(group, interval, 2.0);
  const double target = 3.0 / (2 * kPi);

  bool pass = true;
  double prev_err = 1e99;
  std::string detail;
  for (double eps : {0.05, 0.025, 0.0125}) {
    const ReducedState state =
        solve_reduced(eps, AlphaVector{}, 1.0, space, moments, 1.0, 2.0);
    const double slope = (state.lambda.real() - 1.0) / (eps * eps);
    const double err = std::abs(slope - target);
    pass = pass && err < 0.05 * target && err < prev_err;
    prev_err = err;
    detail += fmt("eps=%.4f rel_err=%.2e  ", eps, err / target);
  }
  report(4, "lambda expansion", pass, detail + fmt("target=%.6f", target));
}

TEST_CASE("criterion 5: y-scaling exponent") {
  const BoxDomain interval = pi_box(1);
  const EigenGroup group = group_at(interval, Rational(1), 2.0);
  const GalerkinSpace space(interval, group, 24);
  std::vector<double> log_eps, log_norm;
  for (double eps = 1e-3; eps <= 0.1 * (1 + 1e-9); eps *= std::pow(10.0, 0.25)) {
    Eigen::VectorXcd e(1);
    e << eps;
    const Eigen::VectorXcd y = solve_y(e, space.group_eigenvalue(), space, 1.0, 2.0);
    log_eps.push_back(std::log(eps));
    log_norm.push_back(std::log(space.h1_norm(y)));
  }
  const double slope = fit_slope(log_eps, log_norm);
  const bool pass = slope >= 2.0 + 0.8;
  report(5, "y-scaling", pass, fmt("slope=%.3f threshold=2.8 points=%zu", slope, log_eps.size()));
}

TEST_CASE("criterion 6: branch limits recover their seeds") {
  bool pass = true;
  std::string detail;
  {  // simple interval eigenvalue
    const BoxDomain interval = pi_box(1);
    const EigenGroup group = group_at(interval, Rational(1), 2.0);
    const GalerkinSpace space(interval, group, 24);
    const GroupMomentEvaluator moments(group, interval, 2.0);
    const BranchTrace trace = trace_branch(AlphaVector{}, 0.05, 5, space, moments, 1.0, 2.0);
    pass = pass && trace.completed;
    const BranchLimitReport limit = verify_branch_limit(trace.samples, space, moments);
    pass = pass && limit.alpha.alpha.size() == 0 && limit.lead_scale > 0;
    detail += "interval:ok  ";
  }
  const BoxDomain square = pi_box(2);
  const EigenGroup group = group_at(square, Rational(5), 6.0);
  const GalerkinSpace space(square, group, 16);
  const GroupMomentEvaluator moments(group, square, 2.0);
  for (cdouble seed : {cdouble(1, 0), cdouble(0, 1)}) {
    const BranchTrace trace =
        trace_branch(alpha_seed({seed}), 0.06, 6, space, moments, 1.0, 2.0);
    pass = pass && trace.completed;
    if (!trace.completed) break;
    const BranchLimitReport limit = verify_branch_limit(trace.samples, space, moments);
    const double alpha_err = std::abs(limit.alpha.alpha[0] - seed);
    pass = pass && alpha_err < 1e-4 && limit.p_norm < 1e-8;
    detail += fmt("seed=(%g,%g): alpha_err=%.1e P=%.1e  ", seed.real(), seed.imag(), alpha_err,
                  limit.p_norm);
  }
  report(6, "branch-limit consistency", pass, detail);
}

TEST_CASE("criterion 7: Floquet instability on the interval") {
  const BoxDomain interval = pi_box(1);
  const double theta = 0.3;
  bool pass = true;
  std::string detail;
  {
    const EigenGroup group = group_at(interval, Rational(4), 5.0);
    const GalerkinSpace space(interval, group, 16);
    const GroupMomentEvaluator moments(group, interval, 2.0);
    const double eps = 0.02;
    const ReducedState state =
        solve_reduced(eps, AlphaVector{}, 4.0, space, moments, -1.0, 2.0);
    const InstabilityReport verdict = instability_verdict(
        state.field(space), state.lambda, state.eta, theta, 2.0, space);

    const BranchParams bp = params_from_branch(state.lambda, state.eta, theta, 2.0);
    const double predicted = std::exp(bp.params.period() * std::cos(theta) * (4.0 - 1.0));
    const double rel = std::abs(verdict.max_multiplier - predicted) / predicted;
    const double rate_rel =
        std::abs(verdict.measured_rate - verdict.floquet_rate) / verdict.floquet_rate;
    pass = verdict.max_multiplier > 1.0 && rel < 0.10 && rate_rel < 0.25 &&
           verdict.verdict == "unstable";
    detail = fmt("max_mu=%.4g predicted=%.4g rel=%.2e rate_rel=%.2e verdict=%s ",
                 verdict.max_multiplier, predicted, rel, rate_rel, verdict.verdict.c_str());
  }
  {
    const EigenGroup group = group_at(interval, Rational(1), 2.0);
    const GalerkinSpace space(interval, group, 16);
    const GroupMomentEvaluator moments(group, interval, 2.0);
    const ReducedState state =
        solve_reduced(0.02, AlphaVector{}, 1.0, space, moments, -1.0, 2.0);
    const InstabilityReport verdict = instability_verdict(
        state.field(space), state.lambda, state.eta, theta, 2.0, space);
    pass = pass && verdict.verdict == "first_eigenvalue_not_covered";
    detail += fmt("first_eigenvalue=%s", verdict.verdict.c_str());
  }
  report(7, "Floquet instability", pass, detail);
}

TEST_CASE("criterion 8: period-map deviation scaling") {
  const BoxDomain interval = pi_box(1);
  const EigenGroup group = group_at(interval, Rational(4), 5.0);
  const GalerkinSpace space(interval, group, 12);
  const GroupMomentEvaluator moments(group, interval, 2.0);
  MonodromyOptions options;
  options.steps_per_period = 1024;
  options.guard = false;
  std::vector<double> log_eps, log_k;
  for (double eps : {0.01, 0.02, 0.04}) {
    const ReducedState state =
        solve_reduced(eps, AlphaVector{}, 4.0, space, moments, -1.0, 2.0);
    const BranchParams bp = params_from_branch(state.lambda, state.eta, 0.3, 2.0);
    const MonodromyResult mono =
        monodromy(bp.rescale * state.field(space), bp.params, space, options);
    const double knorm = (mono.matrix - linear_period_matrix(bp.params, space)).operatorNorm();
    log_eps.push_back(std::log(eps));
    log_k.push_back(std::log(knorm));
  }
  const double slope = fit_slope(log_eps, log_k);
  const bool pass = slope >= 2.0 - 0.2;
  report(8, "period-map deviation scaling", pass, fmt("slope=%.3f threshold=1.8", slope));
}

TEST_CASE("criterion 9: disk degeneracy") {
  const DiskSecondEigenpair pair;
  double max_real = 0;
  for (int i = 0; i <= 100; ++i)
    max_real = std::max(max_real, std::abs(pair.eval_P2(-2.0 + 4.0 * i / 100.0)));
  const ContinuumReport cont = detect_continuum(pair);
  const bool pass =
      max_real < 1e-10 && cont.max_structural_residual < 1e-6 && cont.continuum_detected;
  report(9, "disk degeneracy", pass,
         fmt("max|P2|_real=%.1e structural_residual=%.1e continuum=%s C=%.4f", max_real,
             cont.max_structural_residual, cont.continuum_detected ? "yes" : "no",
             cont.C.real()));
}

namespace {

// Independent oracle for criterion 10: for sigma = 4 and real coefficients the
// components of P are degree-6 polynomials whose coefficients are products of
// closed-form sine integrals. Their zero curves are extracted by marching
// squares and intersected segment by segment.
struct QuinticSystem {
  // terms: coefficient and exponents (a, b) of the two free coordinates
  struct Term {
    double coeff;
    int a, b;
  };
  std::array<std::vector<Term>, 2> components;

  static QuinticSystem build(const EigenGroup& group, const BoxDomain& box, int lead) {
    std::vector<int> free;
    for (int m = 0; m < group.multiplicity(); ++m)
      if (m != lead) free.push_back(m);
    QuinticSystem sys;
    auto sextic = [&](int ia, int a, int ib, int b, int c, int test) {
      double value = 1.0;
      for (int axis = 0; axis < box.dim; ++axis) {
        std::vector<int> freqs;
        for (int r = 0; r < a; ++r) freqs.push_back(group.modes[ia].k[axis]);
        for (int r = 0; r < b; ++r) freqs.push_back(group.modes[ib].k[axis]);
        for (int r = 0; r < c; ++r) freqs.push_back(group.modes[lead].k[axis]);
        freqs.push_back(group.modes[test].k[axis]);
        value *= sine_product_integral(freqs, box.lengths[axis]);
        if (value == 0) return 0.0;
      }
      return value;
    };
    auto multinomial = [](int a, int b, int c) {
      auto fact = [](int n) {
        double f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
      };
      return fact(a + b + c) / (fact(a) * fact(b) * fact(c));
    };
    for (int comp = 0; comp < 2; ++comp) {
      const int m = free[comp];
      for (int a = 0; a <= 5; ++a)
        for (int b = 0; a + b <= 5; ++b) {
          const int c = 5 - a - b;
          const double mult = multinomial(a, b, c);
          // alpha_m * integral(u^5 u_lead): exponent bump on the m-th coordinate
          const double lead_term = mult * sextic(free[0], a, free[1], b, c, lead);
          if (lead_term != 0) {
            QuinticSystem::Term t{lead_term, a + (comp == 0 ? 1 : 0), b + (comp == 1 ? 1 : 0)};
            sys.components[comp].push_back(t);
          }
          const double direct = mult * sextic(free[0], a, free[1], b, c, m);
          if (direct != 0) sys.components[comp].push_back({-direct, a, b});
        }
    }
    return sys;
  }

  double eval(int comp, double x, double y) const {
    double acc = 0;
    for (const Term& t : components[comp])
      acc += t.coeff * std::pow(x, t.a) * std::pow(y, t.b);
    return acc;
  }
};

std::vector<Eigen::Vector2d> curve_intersections(const std::vector<Polyline>& a,
                                                 const std::vector<Polyline>& b) {
  std::vector<Eigen::Vector2d> points;
  auto segments = [](const std::vector<Polyline>& curves) {
    std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> out;
    for (const auto& poly : curves)
      for (size_t i = 0; i + 1 < poly.size(); ++i) out.emplace_back(poly[i], poly[i + 1]);
    return out;
  };
  const auto sa = segments(a);
  const auto sb = segments(b);
  for (const auto& [p, p2] : sa) {
    const Eigen::Vector2d r = p2 - p;
    for (const auto& [q, q2] : sb) {
      const Eigen::Vector2d w = q2 - q;
      const double den = r.x() * w.y() - r.y() * w.x();
      if (std::abs(den) < 1e-14) continue;
      const Eigen::Vector2d d = q - p;
      const double t = (d.x() * w.y() - d.y() * w.x()) / den;
      const double s = (d.x() * r.y() - d.y() * r.x()) / den;
      if (t < -1e-9 || t > 1 + 1e-9 || s < -1e-9 || s > 1 + 1e-9) continue;
      points.push_back(p + t * r);
    }
  }
  return points;
}

std::vector<Eigen::Vector2d> cluster(const std::vector<Eigen::Vector2d>& points, double radius) {
  std::vector<Eigen::Vector2d> centers;
  std::vector<int> counts;
  for (const auto& p : points) {
    bool merged = false;
    for (size_t c = 0; c < centers.size(); ++c) {
      if ((centers[c] - p).norm() < radius) {
        centers[c] = (centers[c] * counts[c] + p) / (counts[c] + 1);
        ++counts[c];
        merged = true;
        break;
      }
    }
    if (!merged) {
      centers.push_back(p);
      counts.push_back(1);
    }
  }
  return centers;
}

}  // namespace

TEST_CASE("criterion 10: nine real roots for the quintic nonlinearity") {
  const BoxDomain box = BoxDomain::create({Rational(1), Rational(1)}, false);  // (0,1)^2
  const EigenGroup group = group_at(box, Rational(50), 51.0 * kPi * kPi);
  REQUIRE(group.multiplicity() == 3);
  // basis sorted lexicographically: (1,7), (5,5), (7,1); lead on the symmetric mode
  const int lead = 1;
  REQUIRE(group.modes[lead].k == Eigen::Vector2i(5, 5));

  const GroupMomentEvaluator moments(group, box, 4.0);
  const GroupReducedSystem system(moments, lead);
  MultistartOptions options;
  options.grid.real_only = true;
  options.grid.step = 0.25;
  const MultistartSummary summary = multistart_solve(system, 0, options);

  std::vector<Eigen::Vector2d> roots;
  for (const auto& seed : summary.seeds)
    if (seed.is_real)
      roots.emplace_back(seed.alpha.alpha[0].real(), seed.alpha.alpha[1].real());

  // independent sign-change scan of the two nodal curves
  const QuinticSystem quintic = QuinticSystem::build(group, box, lead);
  const int n = 441;
  ContourGrid grid_p2, grid_p3;
  grid_p2.xs = grid_p3.xs = Eigen::VectorXd::LinSpaced(n, -2.2, 2.2);
  grid_p2.ys = grid_p3.ys = grid_p2.xs;
  grid_p2.values.resize(n, n);
  grid_p3.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      grid_p2.values(i, j) = quintic.eval(0, grid_p2.xs[i], grid_p2.ys[j]);
      grid_p3.values(i, j) = quintic.eval(1, grid_p3.xs[i], grid_p3.ys[j]);
    }
  const auto curves_p2 = marching_squares(grid_p2);
  const auto curves_p3 = marching_squares(grid_p3);
  const auto centers = cluster(curve_intersections(curves_p2, curves_p3), 0.05);

  bool matched = roots.size() == centers.size();
  double worst_match = 0;
  for (const auto& root : roots) {
    double best = 1e99;
    for (const auto& c : centers) best = std::min(best, (c - root).norm());
    worst_match = std::max(worst_match, best);
    matched = matched && best < 0.02;
  }
  const bool pass = roots.size() == 9 && centers.size() == 9 && matched;
  report(10, "nine quintic roots", pass,
         fmt("multistart=%zu scan=%zu worst_match=%.3g", roots.size(), centers.size(),
             worst_match));
}

TEST_CASE("criterion 11: oracle equivalence") {
  const BoxDomain square = pi_box(2);
  const EigenGroup group = group_at(square, Rational(5), 6.0);
  const GroupMomentEvaluator moments(group, square, 2.0);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);

  double worst_moment = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXcd c(2);
    c << cdouble(uni(rng), uni(rng)), cdouble(uni(rng), uni(rng));
    const Eigen::VectorXcd quad = moments.group_moments(c);
    const Eigen::VectorXcd closed = moments.group_moments_closed2(c);
    worst_moment = std::max(
        worst_moment, (quad - closed).cwiseAbs().maxCoeff() /
                          (closed.cwiseAbs().maxCoeff() + 1e-30));
  }

  const GroupReducedSystem system(moments, 0);
  double worst_jacobian = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXcd a(1);
    a << cdouble(uni(rng), uni(rng));
    worst_jacobian = std::max(worst_jacobian, jacobian_fd_error(system, a));
  }
  const bool pass = worst_moment < 1e-9 && worst_jacobian < 1e-6;
  report(11, "oracle equivalence", pass,
         fmt("moment_rel=%.2e (tol 1e-9) jacobian=%.2e (tol 1e-6)", worst_moment,
             worst_jacobian));
}
