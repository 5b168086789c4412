#pragma once

// Minimal RAII wrapper over mpfr_t plus complex polynomial evaluation, used by
// the root polisher. Precision is fixed per object at construction.

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <mpfr.h>

namespace heightkit::detail {

class MpFloat {
 public:
  explicit MpFloat(mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  MpFloat(mpfr_prec_t prec, double x) : MpFloat(prec) { mpfr_set_d(v_, x, MPFR_RNDN); }
  MpFloat(const MpFloat& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  MpFloat(MpFloat&& other) noexcept : MpFloat(mpfr_get_prec(other.v_)) { mpfr_swap(v_, other.v_); }
  MpFloat& operator=(const MpFloat& other) {
    if (this != &other) mpfr_set(v_, other.v_, MPFR_RNDN);
    return *this;
  }
  MpFloat& operator=(MpFloat&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~MpFloat() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

struct MpComplex {
  explicit MpComplex(mpfr_prec_t prec) : re(prec), im(prec) {}
  MpComplex(mpfr_prec_t prec, std::complex<double> z) : re(prec, z.real()), im(prec, z.imag()) {}
  MpFloat re;
  MpFloat im;

  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
};

/// Evaluates P, P' and Σ|a_i||z|^i at a complex point in MPFR arithmetic.
class MpPolyEvaluator {
 public:
  MpPolyEvaluator(const std::vector<mpz_class>& coeffs, mpfr_prec_t prec)
      : prec_(prec), p_(prec), dp_(prec), tr_(prec), ti_(prec), scale_(prec), absz_(prec) {
    coeffs_.reserve(coeffs.size());
    for (const auto& c : coeffs) {
      MpFloat v(prec);
      mpfr_set_z(v.get(), c.get_mpz_t(), MPFR_RNDN);
      coeffs_.push_back(std::move(v));
    }
  }

  mpfr_prec_t precision() const { return prec_; }

  /// After the call, value(), derivative() and scale() hold P(z), P'(z), Σ|a_i||z|^i.
  void evaluate(const MpComplex& z) {
    mpfr_set_zero(p_.re.get(), 1);
    mpfr_set_zero(p_.im.get(), 1);
    mpfr_set_zero(dp_.re.get(), 1);
    mpfr_set_zero(dp_.im.get(), 1);
    mpfr_set_zero(scale_.get(), 1);
    mpfr_hypot(absz_.get(), z.re.get(), z.im.get(), MPFR_RNDN);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      mul_into(dp_, z);
      mpfr_add(dp_.re.get(), dp_.re.get(), p_.re.get(), MPFR_RNDN);
      mpfr_add(dp_.im.get(), dp_.im.get(), p_.im.get(), MPFR_RNDN);
      mul_into(p_, z);
      mpfr_add(p_.re.get(), p_.re.get(), it->get(), MPFR_RNDN);
      mpfr_mul(scale_.get(), scale_.get(), absz_.get(), MPFR_RNDN);
      mpfr_abs(tr_.get(), it->get(), MPFR_RNDN);
      mpfr_add(scale_.get(), scale_.get(), tr_.get(), MPFR_RNDN);
    }
  }

  const MpComplex& value() const { return p_; }
  const MpComplex& derivative() const { return dp_; }
  const MpFloat& scale() const { return scale_; }

  /// |P(z)| and |P'(z)| as doubles (may underflow to 0 only when exactly 0 in practice).
  double abs_value() const { return hypot_d(p_); }
  double abs_derivative() const { return hypot_d(dp_); }

  /// z <- z - P(z)/P'(z) using the last evaluation; returns |correction| as a double.
  double newton_update(MpComplex& z) {
    // correction = p / dp = p * conj(dp) / |dp|^2
    MpFloat den(prec_);
    mpfr_sqr(den.get(), dp_.re.get(), MPFR_RNDN);
    mpfr_fma(den.get(), dp_.im.get(), dp_.im.get(), den.get(), MPFR_RNDN);
    MpFloat cr(prec_);
    MpFloat ci(prec_);
    mpfr_fmma(cr.get(), p_.re.get(), dp_.re.get(), p_.im.get(), dp_.im.get(), MPFR_RNDN);
    mpfr_fmms(ci.get(), p_.im.get(), dp_.re.get(), p_.re.get(), dp_.im.get(), MPFR_RNDN);
    mpfr_div(cr.get(), cr.get(), den.get(), MPFR_RNDN);
    mpfr_div(ci.get(), ci.get(), den.get(), MPFR_RNDN);
    mpfr_sub(z.re.get(), z.re.get(), cr.get(), MPFR_RNDN);
    mpfr_sub(z.im.get(), z.im.get(), ci.get(), MPFR_RNDN);
    MpFloat mag(prec_);
    mpfr_hypot(mag.get(), cr.get(), ci.get(), MPFR_RNDN);
    return mag.to_double();
  }

  /// |P(z)| / |P'(z)|, rounded up; +inf when P'(z) = 0 != P(z).
  double newton_ratio() const {
    MpFloat a(prec_);
    MpFloat b(prec_);
    mpfr_hypot(a.get(), p_.re.get(), p_.im.get(), MPFR_RNDN);
    mpfr_hypot(b.get(), dp_.re.get(), dp_.im.get(), MPFR_RNDN);
    if (mpfr_zero_p(b.get())) return mpfr_zero_p(a.get()) ? 0.0 : HUGE_VAL;
    mpfr_div(a.get(), a.get(), b.get(), MPFR_RNDU);
    return mpfr_get_d(a.get(), MPFR_RNDU);
  }

  /// |P(z)| / Σ|a_i||z|^i.
  double relative_residual() const {
    MpFloat a(prec_);
    mpfr_hypot(a.get(), p_.re.get(), p_.im.get(), MPFR_RNDN);
    if (mpfr_zero_p(scale_.get())) return 0.0;
    mpfr_div(a.get(), a.get(), scale_.get(), MPFR_RNDU);
    return mpfr_get_d(a.get(), MPFR_RNDU);
  }

 private:
  // x <- x * z
  void mul_into(MpComplex& x, const MpComplex& z) {
    mpfr_fmms(tr_.get(), x.re.get(), z.re.get(), x.im.get(), z.im.get(), MPFR_RNDN);
    mpfr_fmma(ti_.get(), x.re.get(), z.im.get(), x.im.get(), z.re.get(), MPFR_RNDN);
    mpfr_swap(x.re.get(), tr_.get());
    mpfr_swap(x.im.get(), ti_.get());
  }

  static double hypot_d(const MpComplex& x) {
    MpFloat a(mpfr_get_prec(x.re.get()));
    mpfr_hypot(a.get(), x.re.get(), x.im.get(), MPFR_RNDN);
    return a.to_double();
  }

  mpfr_prec_t prec_;
  std::vector<MpFloat> coeffs_;
  MpComplex p_;
  MpComplex dp_;
  MpFloat tr_;
  MpFloat ti_;
  MpFloat scale_;
  MpFloat absz_;
};

}  // namespace heightkit::detail
