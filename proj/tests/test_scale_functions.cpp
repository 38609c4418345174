#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "levystop/errors.hpp"
#include "levystop/levy_model.hpp"
#include "levystop/scale_functions.hpp"

using namespace levystop;
using namespace levystop::scale;

TEST_CASE("closed form matches the hyperbolic pair for pure diffusion") {
  const auto bm = LevyModel::brownian_drift(0.0, 1.0);
  const auto w = ScaleFunction::build(bm, 1.0);
  const double s2 = std::sqrt(2.0);
  for (double x : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    CHECK(w.W(x) == doctest::Approx(s2 * std::sinh(s2 * x)).epsilon(1e-12));
    CHECK(w.Z(x) == doctest::Approx(std::cosh(s2 * x)).epsilon(1e-12));
    CHECK(w.Wp(x) == doctest::Approx(2.0 * std::cosh(s2 * x)).epsilon(1e-12));
  }
  CHECK(w.phi() == doctest::Approx(s2).epsilon(1e-12));
  CHECK(w.transform_residual() < 1e-10);
}

TEST_CASE("scale functions vanish on the negative axis") {
  const auto cl = LevyModel::spectrally_negative_cl(0.2, 1.0, 1.0, 2.0);
  const auto w = ScaleFunction::build(cl, 1.0);
  CHECK(w.W(-0.5) == 0.0);
  CHECK(w.Z(-0.5) == 1.0);
  CHECK(w.W(-1e-12) == 0.0);
}

TEST_CASE("value at zero reflects the path variation") {
  // unbounded variation: W(0) = 0; bounded variation: W(0) = 1/d
  const auto cl = LevyModel::spectrally_negative_cl(0.2, 1.0, 1.0, 2.0);
  CHECK(ScaleFunction::build(cl, 1.0).W(0.0) ==
        doctest::Approx(0.0).epsilon(1e-10));
  const auto bv = LevyModel::bounded_variation_sn(1.5, 2.0, 2.0);
  CHECK(ScaleFunction::build(bv, 1.0).W(0.0) ==
        doctest::Approx(1.0 / 1.5).epsilon(1e-10));
}

TEST_CASE("defining identities hold across the catalog") {
  const auto models = {
      LevyModel::brownian_drift(-0.2, 1.3),
      LevyModel::spectrally_negative_cl(0.2, 1.0, 1.0, 2.0),
      LevyModel::bounded_variation_sn(1.5, 2.0, 2.0),
  };
  for (const auto& m : models) {
    const auto w = ScaleFunction::build(m, 1.0);
    CHECK(laplace_exponent(m, w.phi()) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w.transform_residual() < 1e-8);
    for (double x : {0.3, 1.0, 2.5}) {
      // Z' = q W and W' matches a centered difference
      const double h = 1e-5;
      CHECK((w.Z(x + h) - w.Z(x - h)) / (2.0 * h) ==
            doctest::Approx(1.0 * w.W(x)).epsilon(1e-7));
      CHECK((w.W(x + h) - w.W(x - h)) / (2.0 * h) ==
            doctest::Approx(w.Wp(x)).epsilon(1e-6));
      CHECK(w.W(x) > 0.0);
      CHECK(w.Wp(x) > 0.0);
    }
  }
}

TEST_CASE("numeric inversion agrees with the closed form") {
  const auto models = {
      LevyModel::brownian_drift(0.0, 1.0),
      LevyModel::spectrally_negative_cl(0.2, 1.0, 1.0, 2.0),
      LevyModel::bounded_variation_sn(1.5, 2.0, 2.0),
  };
  for (const auto& m : models) {
    const auto closed = ScaleFunction::build(m, 1.0, ScaleMethod::ClosedForm);
    const auto numeric =
        ScaleFunction::build(m, 1.0, ScaleMethod::NumericInversion);
    for (double x : {0.01, 0.1, 0.7, 2.0, 5.0, 10.0}) {
      CHECK(numeric.W(x) == doctest::Approx(closed.W(x)).epsilon(1e-7));
      CHECK(numeric.Z(x) == doctest::Approx(closed.Z(x)).epsilon(1e-7));
    }
  }
}

TEST_CASE("second derivative is consistent with the generator identity") {
  // driftless diffusion at q = 1: W'' = 2 W
  const auto bm = LevyModel::brownian_drift(0.0, 1.0);
  const auto w = ScaleFunction::build(bm, 1.0);
  for (double x : {0.5, 1.0, 2.0})
    CHECK(w.Wpp(x) == doctest::Approx(2.0 * w.W(x)).epsilon(1e-4));
}

TEST_CASE("two-sided jumps are rejected") {
  const auto jd = LevyModel::jump_diffusion_exp(0.0, 1.0, 1.0, 0.5, 3.0, 3.0);
  CHECK_THROWS_AS(ScaleFunction::build(jd, 1.0), PreconditionError);
}
