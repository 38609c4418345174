#pragma once

#include <utility>
#include <vector>

#include "levystop/levy_model.hpp"

namespace levystop::scale {

// How W^{(q)} and Z^{(q)} are represented.
//   ClosedForm: sum of exponentials from the partial-fraction expansion of
//     1/(psi - q); exact for every spectrally negative model in the catalog
//     (the Laplace transform is rational).
//   NumericInversion: fixed-Talbot inversion of the transform, shifted by
//     Phi(q) so the contour encloses the dominant singularity.  Exists for
//     cross-checking the closed forms and as the template for models whose
//     transform is not rational.
enum class ScaleMethod { Auto, ClosedForm, NumericInversion };

// q-scale function pair (W^{(q)}, Z^{(q)}) of a spectrally negative model:
//   integral_0^inf e^{-l x} W(x) dx = 1/(psi(l) - q),  l > Phi(q)
//   Z(x) = 1 + q * integral_0^x W(y) dy
// W vanishes on x < 0 and Z is 1 there.
class ScaleFunction {
 public:
  static ScaleFunction build(const LevyModel& m, double q,
                             ScaleMethod method = ScaleMethod::Auto);

  double W(double x) const;
  double Wp(double x) const;   // dW/dx (right derivative at 0)
  double Wpp(double x) const;  // d2W/dx2
  double Z(double x) const;

  double q() const noexcept { return q_; }
  double phi() const noexcept { return phi_; }  // Phi(q)
  ScaleMethod method() const noexcept { return method_; }

  // Largest relative residual of the defining transform identity
  // integral e^{-l x} W dx * (psi(l) - q) = 1 over a probe set of l; a
  // self-test of whichever representation was built.
  double transform_residual() const;

 private:
  ScaleFunction() = default;

  const LevyModel* model() const { return &*model_; }

  std::optional<LevyModel> model_;
  double q_ = 0.0;
  double phi_ = 0.0;
  ScaleMethod method_ = ScaleMethod::ClosedForm;
  // ClosedForm: W(x) = sum w_i exp(l_i x)
  std::vector<std::pair<double, double>> terms_;  // (w_i, l_i)

  double numeric_W(double x) const;
  double numeric_Z(double x) const;
};

}  // namespace levystop::scale
