#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "accrete/errors.hpp"

namespace accrete {

/// Orthonormal physical frame of a diagonal tensor.
/// polar2D carries (rr, tt); spherical3D carries (rr, tt, pp).
enum class Frame { polar2D, spherical3D };

inline constexpr std::size_t dimension(Frame f) noexcept {
  return f == Frame::polar2D ? 2 : 3;
}

/// Diagonal second-order tensor in a radial frame. Used for F_e, B_e and
/// the Cauchy stress; off-diagonal components never arise for the radially
/// symmetric problems handled here.
class DiagTensor {
 public:
  static DiagTensor polar(double rr, double tt) {
    return DiagTensor(Frame::polar2D, {rr, tt, 0.0});
  }
  static DiagTensor spherical(double rr, double tt, double pp) {
    return DiagTensor(Frame::spherical3D, {rr, tt, pp});
  }
  static DiagTensor identity(Frame f) {
    return DiagTensor(f, {1.0, 1.0, f == Frame::polar2D ? 0.0 : 1.0});
  }
  static DiagTensor filled(Frame f, double v) {
    return DiagTensor(f, {v, v, f == Frame::polar2D ? 0.0 : v});
  }

  Frame frame() const noexcept { return frame_; }
  std::size_t size() const noexcept { return dimension(frame_); }

  double operator[](std::size_t i) const noexcept { return c_[i]; }
  double& operator[](std::size_t i) noexcept { return c_[i]; }

  double rr() const noexcept { return c_[0]; }
  double tt() const noexcept { return c_[1]; }
  /// Third component; only meaningful for spherical3D.
  double pp() const noexcept { return c_[2]; }

  std::span<const double> components() const noexcept {
    return {c_.data(), size()};
  }

  bool is_positive() const noexcept {
    for (double v : components())
      if (!(v > 0.0) || !std::isfinite(v)) return false;
    return true;
  }

  /// Throws DomainError unless every component is finite and > 0.
  void require_positive(const char* what) const {
    if (!is_positive())
      throw DomainError(std::string(what) +
                        ": deformation-valued tensor needs positive components");
  }

  /// Component-wise product (diagonal matrix product).
  friend DiagTensor operator*(const DiagTensor& a, const DiagTensor& b) {
    check_same_frame(a, b);
    DiagTensor out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out.c_[i] = a.c_[i] * b.c_[i];
    return out;
  }
  friend DiagTensor operator+(const DiagTensor& a, const DiagTensor& b) {
    check_same_frame(a, b);
    DiagTensor out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out.c_[i] = a.c_[i] + b.c_[i];
    return out;
  }
  friend DiagTensor operator-(const DiagTensor& a, const DiagTensor& b) {
    check_same_frame(a, b);
    DiagTensor out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out.c_[i] = a.c_[i] - b.c_[i];
    return out;
  }
  friend DiagTensor operator*(double s, const DiagTensor& a) {
    DiagTensor out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out.c_[i] = s * a.c_[i];
    return out;
  }

  friend bool operator==(const DiagTensor& a, const DiagTensor& b) noexcept {
    if (a.frame_ != b.frame_) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  DiagTensor(Frame f, std::array<double, 3> c) : frame_(f), c_(c) {
    for (double v : components())
      if (!std::isfinite(v)) throw DomainError("DiagTensor: non-finite component");
  }

  static void check_same_frame(const DiagTensor& a, const DiagTensor& b) {
    if (a.frame_ != b.frame_) throw DomainError("DiagTensor: frame mismatch");
  }

  Frame frame_;
  std::array<double, 3> c_;
};

/// Left Cauchy-Green tensor B = F F^T.
inline DiagTensor left_cauchy_green(const DiagTensor& F) { return F * F; }

inline DiagTensor inverse(const DiagTensor& A) {
  A.require_positive("inverse");
  DiagTensor out = A;
  for (std::size_t i = 0; i < A.size(); ++i) out[i] = 1.0 / A[i];
  return out;
}

/// Product of the diagonal. For polar2D this is the in-plane determinant,
/// which equals det F for plane strain with unit out-of-plane stretch.
inline double det(const DiagTensor& F) noexcept {
  double d = 1.0;
  for (double v : F.components()) d *= v;
  return d;
}

struct Invariants {
  double I1;
  double I2;
};

/// Principal invariants of B. Plane-strain tensors are embedded as
/// (B_rr, B_tt, 1) before evaluation.
inline Invariants invariants(const DiagTensor& B) {
  B.require_positive("invariants");
  const double b0 = B.rr();
  const double b1 = B.tt();
  const double b2 = B.frame() == Frame::polar2D ? 1.0 : B.pp();
  return {b0 + b1 + b2, b0 * b1 + b1 * b2 + b2 * b0};
}

}  // namespace accrete
