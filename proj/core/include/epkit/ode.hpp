#ifndef EPKIT_ODE_HPP
#define EPKIT_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

namespace epkit {

template <std::size_t N>
using CVec = std::array<std::complex<double>, N>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 0.0;   // 0: no cap
    double h_init = 0.0;  // 0: automatic
    long max_steps = 4000000;
};

namespace ode_detail {

template <std::size_t N>
double error_norm(const CVec<N>& e, const CVec<N>& y0, const CVec<N>& y1, double atol,
                  double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double q = std::abs(e[i]) / sc;
        acc += q * q;
    }
    return std::sqrt(acc / N);
}

}  // namespace ode_detail

/// One Dormand-Prince 5(4) step; returns the 5th-order solution, the
/// embedded error estimate, and the derivative at the step end.
template <std::size_t N, class Rhs>
void dopri_step(Rhs&& f, double t, const CVec<N>& y, double h, CVec<N>& y5, CVec<N>& err,
                CVec<N>& f_end) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    CVec<N> k1, k2, k3, k4, k5, k6, k7, tmp;
    f(t, y, k1);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a21 * k1[i]);
    f(t + h / 5, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + 3 * h / 10, tmp, k3);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + 4 * h / 5, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + 8 * h / 9, tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                             a65 * k5[i]);
    f(t + h, tmp, k6);
    for (std::size_t i = 0; i < N; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + h, y5, k7);
    f_end = k7;
    for (std::size_t i = 0; i < N; ++i)
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                      e7 * k7[i]);
}

/// Adaptive integration from t0 to t1 (t1 > t0).  on_step(t, y, dy) is called
/// at t0 and after each accepted step; returning false stops early.
template <std::size_t N, class Rhs, class Cb>
void integrate_ode(Rhs&& f, double t0, double t1, const CVec<N>& y0, const OdeOptions& opt,
                   Cb&& on_step) {
    const double span = t1 - t0;
    if (!(span > 0.0)) throw std::invalid_argument("integrate_ode needs t1 > t0");

    CVec<N> y = y0, dy;
    f(t0, y, dy);
    if (!on_step(t0, y, dy)) return;

    double h = opt.h_init > 0.0 ? opt.h_init : span / 1024.0;
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
    double t = t0;
    const double h_floor = std::max(1e-14 * span, 1e-300);

    for (long step = 0; step < opt.max_steps; ++step) {
        if (t >= t1) return;
        h = std::min(h, t1 - t);
        CVec<N> y5, err, f_end;
        dopri_step(f, t, y, h, y5, err, f_end);
        double en = ode_detail::error_norm(err, y, y5, opt.atol, opt.rtol);
        if (!(en == en)) {  // NaN: retry smaller
            h *= 0.25;
            if (h < h_floor) throw std::runtime_error("step size collapse");
            continue;
        }
        if (en <= 1.0) {
            t += h;
            y = y5;
            if (!on_step(t, y, f_end)) return;
            double grow = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
            if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            if (h < h_floor) throw std::runtime_error("step size collapse");
        }
    }
    throw std::runtime_error("integrate_ode exceeded max step count");
}

}  // namespace epkit

#endif
