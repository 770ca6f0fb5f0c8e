#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "accrete/errors.hpp"
#include "accrete/tensor.hpp"

namespace accrete {

enum class MaterialKind { neoHookean, generalIncompressible };

/// Incompressible isotropic hyperelastic solid described through the
/// derivatives of its stored energy W(I1, I2).
class MaterialModel {
 public:
  using Derivative = std::function<double(double I1, double I2)>;

  static MaterialModel neo_hookean(double G) {
    require_modulus(G);
    const double half = 0.5 * G;
    return MaterialModel(MaterialKind::neoHookean, G,
                         [half](double, double) { return half; },
                         [](double, double) { return 0.0; });
  }

  /// W = c1 (I1 - 3) + c2 (I2 - 3); shear modulus 2 (c1 + c2).
  static MaterialModel mooney_rivlin(double c1, double c2) {
    const double G = 2.0 * (c1 + c2);
    require_modulus(G);
    return MaterialModel(MaterialKind::generalIncompressible, G,
                         [c1](double, double) { return c1; },
                         [c2](double, double) { return c2; });
  }

  /// Arbitrary energy given by its derivatives; G is the small-strain
  /// shear modulus 2 (W1 + W2) at the identity.
  static MaterialModel general(Derivative dW_dI1, Derivative dW_dI2) {
    const double G = 2.0 * (dW_dI1(3.0, 3.0) + dW_dI2(3.0, 3.0));
    require_modulus(G);
    return MaterialModel(MaterialKind::generalIncompressible, G,
                         std::move(dW_dI1), std::move(dW_dI2));
  }

  MaterialKind kind() const noexcept { return kind_; }
  double shear_modulus() const noexcept { return G_; }
  double dW_dI1(double I1, double I2) const { return dW1_(I1, I2); }
  double dW_dI2(double I1, double I2) const { return dW2_(I1, I2); }

 private:
  MaterialModel(MaterialKind kind, double G, Derivative d1, Derivative d2)
      : kind_(kind), G_(G), dW1_(std::move(d1)), dW2_(std::move(d2)) {}

  static void require_modulus(double G) {
    if (!(G > 0.0) || !std::isfinite(G))
      throw DomainError("material: shear modulus must be positive");
  }

  MaterialKind kind_;
  double G_;
  Derivative dW1_;
  Derivative dW2_;
};

/// Cauchy stress of an incompressible body for the elastic deformation F_e
/// and hydrostatic Lagrange multiplier p:
///   sigma = (-p + 2 I2 W2) I + 2 W1 B - 2 W2 B^-1,  B = F_e F_e^T.
/// The output frame equals the input frame.
inline DiagTensor cauchy_stress(const DiagTensor& Fe, double p,
                                const MaterialModel& mat) {
  Fe.require_positive("cauchy_stress");
  const DiagTensor B = left_cauchy_green(Fe);
  if (mat.kind() == MaterialKind::neoHookean) {
    const double G = mat.shear_modulus();
    DiagTensor s = B;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = -p + G * B[i];
    return s;
  }
  const auto [I1, I2] = invariants(B);
  const double W1 = mat.dW_dI1(I1, I2);
  const double W2 = mat.dW_dI2(I1, I2);
  const double iso = -p + 2.0 * I2 * W2;
  DiagTensor s = B;
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = iso + 2.0 * W1 * B[i] - 2.0 * W2 / B[i];
  return s;
}

/// Full Cauchy stress together with the pressure field value that
/// produced it.
struct StressState {
  DiagTensor sigma;
  double p;
};

/// sigma_tt - sigma_rr for a radial state. Independent of p.
inline double hoop_minus_radial(const DiagTensor& Fe, const MaterialModel& mat) {
  const DiagTensor s = cauchy_stress(Fe, 0.0, mat);
  return s.tt() - s.rr();
}

/// Mass and momentum supplied per unit area at a growing surface.
struct GrowthFlux {
  double M;    // kg m^-2 s^-1; > 0 accretion, < 0 ablation
  double v_a;  // attachment velocity, radial component
  double rho;  // density of the added material

  enum class Kind { accretion, ablation, inert };

  Kind kind() const noexcept {
    if (M > 0.0) return Kind::accretion;
    if (M < 0.0) return Kind::ablation;
    return Kind::inert;
  }
  /// P = M v_a.
  double momentum_supply() const noexcept { return M * v_a; }
  /// Normal boundary speed from the mass balance V_b.n = v.n + M / rho.
  double boundary_normal_speed(double v_dot_n) const noexcept {
    return v_dot_n + M / rho;
  }
};

enum class Surface { inner, outer };

/// External radial traction t_b at a cylindrical or spherical surface.
struct BoundaryTraction {
  double t_b;
  Surface location;

  /// sigma_rr implied by sigma n = t_b e_r with n = -e_r on the inner
  /// surface and n = +e_r on the outer one. An internal pressure p_i acting
  /// on the inner wall (t_b = p_i) therefore gives sigma_rr = -p_i.
  double radial_stress() const noexcept {
    return location == Surface::outer ? t_b : -t_b;
  }
};

}  // namespace accrete
