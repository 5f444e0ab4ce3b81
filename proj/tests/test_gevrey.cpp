#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "zdiheat/gevrey.hpp"
#include "zdiheat/taylor.hpp"

using namespace zdiheat;

namespace {

oracle::Bump oracle_bump(const GevreySpec& spec) {
  return spec.form() == BumpForm::kStandard ? oracle::Bump::standard(spec.sigma())
                                            : oracle::Bump::printed(spec.sigma());
}

}  // namespace

TEST_CASE("spec invariants") {
  CHECK(ZDH_ERROR_KIND(GevreySpec(1.0, 1.0)) == ErrorKind::kInvalidArgument);
  CHECK(ZDH_ERROR_KIND(GevreySpec(1.5, 0.0)) == ErrorKind::kInvalidArgument);
  CHECK(ZDH_ERROR_KIND(GevreySpec(2.5, 1.0)) == ErrorKind::kDivergentSeries);
  CHECK(ZDH_ERROR_KIND(BoundaryParams(0.0, 0.0)) == ErrorKind::kInvalidArgument);
  CHECK(ZDH_ERROR_KIND(BoundaryParams(-1.0, 2.0)) == ErrorKind::kInvalidArgument);
  CHECK(ZDH_ERROR_KIND(ActuatorLayout({0.2, 0.2})) == ErrorKind::kInvalidArgument);
  CHECK(ZDH_ERROR_KIND(ActuatorLayout({0.0, 0.5})) == ErrorKind::kInvalidArgument);
  CHECK(ZDH_ERROR_KIND(ActuatorLayout(std::vector<double>{})) == ErrorKind::kInvalidArgument);
  const auto uniform = ActuatorLayout::uniform(12);
  REQUIRE(uniform.size() == 12);
  CHECK(uniform[0] == doctest::Approx(1.0 / 13));
  CHECK(uniform[11] == doctest::Approx(12.0 / 13));
}

TEST_CASE("phi constant branches and midpoint") {
  for (auto form : {BumpForm::kStandard, BumpForm::kPrinted}) {
    for (double sigma : {1.1, 1.5, 1.9}) {
      const GevreySpec spec(sigma, 2.0, form);
      CHECK(phi(-1.0, spec) == 0.0);
      CHECK(phi(2.0, spec) == 1.0);
      CHECK(phi(1.0, spec) == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
}

TEST_CASE("phi matches tanh-sinh quadrature") {
  for (auto form : {BumpForm::kStandard, BumpForm::kPrinted}) {
    for (double sigma : {1.1, 1.3, 1.5, 1.9}) {
      const GevreySpec spec(sigma, 1.0, form);
      const GevreyFunction fn(spec);
      const auto bump = oracle_bump(spec);
      for (double t : {0.05, 0.2, 0.37, 0.5, 0.61, 0.9}) {
        CAPTURE(sigma);
        CAPTURE(t);
        CHECK(std::abs(fn.phi(t) - oracle::phi(t, bump, 1.0)) < 1e-11);
      }
    }
  }
}

TEST_CASE("phi tails are accurate in relative terms") {
  for (auto form : {BumpForm::kStandard, BumpForm::kPrinted}) {
    const GevreySpec spec(1.3, 1.0, form);
    const GevreyFunction fn(spec);
    const auto bump = oracle_bump(spec);
    for (double t : {0.02, 0.05, 0.1}) {
      const double ref = oracle::phi(t, bump, 1.0);
      if (ref == 0.0) continue;
      CAPTURE(t);
      CHECK(std::abs(fn.phi(t) - ref) <= 1e-10 * ref);
    }
  }
}

TEST_CASE("phi is monotone") {
  const GevreyFunction fn(GevreySpec(1.1, 1.0, BumpForm::kPrinted));
  double prev = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double v = fn.phi(i / 400.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("jet outside the transition") {
  const GevreySpec spec(1.5, 1.0);
  const auto before = phi_jet(-0.1, spec, 5);
  const auto after = phi_jet(1.1, spec, 5);
  REQUIRE(before.order() == 5);
  for (std::size_t n = 0; n <= 5; ++n) {
    CHECK(before[n] == 0.0);
    CHECK(after[n] == (n == 0 ? 1.0 : 0.0));
  }
}

TEST_CASE("jet orders 1-3 against finite differences") {
  const GevreySpec spec(1.5, 1.0, BumpForm::kStandard);
  const GevreyFunction fn(spec);
  const auto f = [&](double t) { return fn.phi(t); };
  const auto jet = fn.jet(0.3, 3);
  for (int n = 1; n <= 3; ++n) {
    const double fd = oracle::fd_sweep(f, 0.3, n, 0.02);
    CAPTURE(n);
    CHECK(std::abs(jet[n] - fd) <= 1e-6 * std::abs(fd));
  }
}

TEST_CASE("high-order jets against Cauchy integrals") {
  for (auto form : {BumpForm::kStandard, BumpForm::kPrinted}) {
    for (double sigma : {1.3, 1.5, 1.9}) {
      const GevreySpec spec(sigma, 1.0, form);
      const GevreyFunction fn(spec);
      const auto bump = oracle_bump(spec);
      for (double t : {0.25, 0.5, 0.7}) {
        const auto jet = fn.jet(t, 12);
        for (int n = 1; n <= 12; ++n) {
          const auto ref = oracle::phi_derivative_cauchy(t, bump, 1.0, n);
          CAPTURE(sigma);
          CAPTURE(t);
          CAPTURE(n);
          CHECK(std::abs(jet[n] - ref.value) <= 1e-8 * std::abs(ref.value) + ref.error);
        }
      }
    }
  }
}

TEST_CASE("jet order cap") {
  const GevreyFunction fn(GevreySpec(1.5, 1.0));
  Error caught(ErrorKind::kInvalidArgument, "");
  try {
    fn.jet(0.5, kMaxJetOrder + 1);
  } catch (const Error& e) {
    caught = e;
  }
  CHECK(caught.kind() == ErrorKind::kOverflowAtOrder);
  CHECK(caught.order() == static_cast<int>(kMaxJetOrder + 1));
  CHECK(fn.jet(0.5, kMaxJetOrder).order() == kMaxJetOrder);
}

TEST_CASE("bound fit") {
  SUBCASE("zero jets") {
    std::vector<DerivativeJet> jets{DerivativeJet(std::vector<double>(6, 0.0))};
    const auto b = gevrey_bound_fit(jets, GevreySpec(1.5, 1.0));
    CHECK(b.m == 0.0);
    CHECK(b.k == 1.0);
  }
  SUBCASE("too few orders") {
    std::vector<DerivativeJet> jets{DerivativeJet({0.0, 1.0})};
    CHECK(ZDH_ERROR_KIND(gevrey_bound_fit(jets, GevreySpec(1.5, 1.0))) ==
          ErrorKind::kInsufficientData);
  }
  SUBCASE("bound holds with equality somewhere") {
    const GevreyFunction fn(GevreySpec(1.1, 1.0, BumpForm::kPrinted));
    std::vector<DerivativeJet> jets;
    for (double t : fn.sample_times()) jets.push_back(fn.jet(t, 20));
    const auto b = gevrey_bound_fit(jets, fn.spec());
    double worst = 0.0;
    for (const auto& jet : jets) {
      for (std::size_t k = 0; k < 20; ++k) {
        const double kd = static_cast<double>(k);
        const double allowed = b.m * std::exp(b.order * std::lgamma(kd + 1.0)) / std::pow(b.k, kd);
        worst = std::max(worst, std::abs(jet[k + 1]) / allowed);
      }
    }
    CHECK(worst <= 1.0 + 1e-12);
    CHECK(worst >= 1.0 - 1e-12);
  }
  SUBCASE("time scaling") {
    const auto b1 = fit_bound(GevreyFunction(GevreySpec(1.5, 1.0)), 30);
    const auto b2 = fit_bound(GevreyFunction(GevreySpec(1.5, 2.0)), 30);
    CHECK(b2.k / b1.k == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("taylor arithmetic against closed forms") {
  // (1 + u)^(-1/2), exp(u), 1/(1 - u)
  const auto a = TaylorSeries<double>::variable(1.0, 1.0, 10);
  const auto p = power(a, -0.5);
  double binom = 1.0;
  for (std::size_t n = 0; n <= 10; ++n) {
    CHECK(p[n] == doctest::Approx(binom).epsilon(1e-14));
    binom *= (-0.5 - static_cast<double>(n)) / static_cast<double>(n + 1);
  }
  const auto e = exponential(TaylorSeries<double>::variable(0.0, 1.0, 10));
  double fact = 1.0;
  for (std::size_t n = 0; n <= 10; ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    CHECK(e[n] == doctest::Approx(1.0 / fact).epsilon(1e-14));
  }
  const auto r = reciprocal(TaylorSeries<double>::variable(1.0, -1.0, 10));
  for (std::size_t n = 0; n <= 10; ++n) CHECK(r[n] == doctest::Approx(1.0));
}
