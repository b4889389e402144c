#pragma once

// Scalar types and small numerical helpers shared by every module.
//
// Everything that has to resolve gluing parameters of size e^{-40} against
// O(1) moduli coordinates runs in `mp_real`, a fixed-precision MPFR type.
// Plain `double` is used for the public coordinate API and for maps whose
// evaluation is well conditioned.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>
#include <type_traits>

namespace cornerlog {

inline constexpr unsigned kWorkingDigits = 100;

namespace bmp = boost::multiprecision;
using mp_real = bmp::number<bmp::mpfr_float_backend<kWorkingDigits, bmp::allocate_stack>, bmp::et_off>;

template <class R>
using cplx = std::complex<R>;

template <class R>
inline constexpr bool is_multiprecision_v = !std::is_floating_point_v<R>;

template <class R>
R pi() {
    return boost::math::constants::pi<R>();
}

template <class R>
R two_pi() {
    return 2 * boost::math::constants::pi<R>();
}

template <class R>
R infinity() {
    return std::numeric_limits<R>::infinity();
}

template <class R>
bool is_inf(const R& x) {
    using std::isinf;
    using boost::multiprecision::isinf;
    return isinf(x);
}

template <class R>
bool is_finite(const R& x) {
    using std::isfinite;
    using boost::multiprecision::isfinite;
    return isfinite(x);
}

template <class R>
double to_double(const R& x) {
    if constexpr (std::is_floating_point_v<R>) {
        return static_cast<double>(x);
    } else {
        return x.template convert_to<double>();
    }
}

template <class R>
cplx<double> to_double(const cplx<R>& z) {
    return {to_double(z.real()), to_double(z.imag())};
}

template <class R>
cplx<R> lift(const cplx<double>& z) {
    return {R(z.real()), R(z.imag())};
}

/// Machine epsilon of the working type.
template <class R>
R epsilon() {
    return std::numeric_limits<R>::epsilon();
}

/// Reduce an angle into [0, 2pi).
template <class R>
R wrap_angle(R a) {
    using std::floor;
    const R period = two_pi<R>();
    a -= period * floor(a / period);
    if (a >= period) a -= period;
    if (a < 0) a = 0;
    return a;
}

/// Reduce an angle difference into (-pi, pi].
template <class R>
R wrap_difference(R a) {
    using std::floor;
    const R period = two_pi<R>();
    a -= period * floor((a + pi<R>()) / period);
    if (a <= -pi<R>()) a += period;
    return a;
}

/// log(1 + z) for complex z, accurate when |z| is small.
template <class R>
cplx<R> log1p(const cplx<R>& z) {
    using std::atan2;
    using std::log1p;
    const R x = z.real();
    const R y = z.imag();
    const R mod2m1 = 2 * x + x * x + y * y;  // |1+z|^2 - 1
    return {log1p(mod2m1) / 2, atan2(y, 1 + x)};
}

/// Format with 17 significant digits (round-trippable doubles).
inline std::string format_real(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace cornerlog
