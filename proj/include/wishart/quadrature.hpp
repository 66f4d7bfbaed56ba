// Adaptive Gauss-Kronrod 15-point quadrature for complex-valued integrands.
//
// Bisection-based refinement driven by the classic QUADPACK error estimate,
// applied to the real and imaginary parts separately: the routine returns
// only once both parts meet the requested absolute tolerance.

#pragma once

#include <cmath>
#include <complex>
#include <queue>
#include <stdexcept>
#include <vector>

namespace wishart {

struct QuadBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadOutcome {
    std::complex<double> integral;
    double err_re = 0.0;
    double err_im = 0.0;
    int segments = 0;
};

namespace detail {

// 15-point Kronrod nodes (positive half; index 7 is the centre) and weights,
// QUADPACK dqk15 constants. Even-indexed nodes carry the embedded 7-point
// Gauss rule with weights gauss_w.
inline constexpr double kronrod_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    std::complex<double> integral;
    double err_re, err_im;
};

inline double scaled_error(double raw, double resasc) {
    if (resasc != 0.0 && raw != 0.0)
        return resasc * std::min(1.0, std::pow(200.0 * raw / resasc, 1.5));
    return raw;
}

template <typename F>
Segment gk15(F&& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::complex<double> fv[15];
    fv[7] = f(centre);
    for (int j = 0; j < 7; ++j) {
        const double off = half * kronrod_x[j];
        fv[j] = f(centre - off);       // left of centre
        fv[14 - j] = f(centre + off);  // right of centre
    }

    std::complex<double> resk = kronrod_w[7] * fv[7];
    std::complex<double> resg = gauss_w[3] * fv[7];
    for (int j = 0; j < 7; ++j) {
        const std::complex<double> pair = fv[j] + fv[14 - j];
        resk += kronrod_w[j] * pair;
        if (j % 2 == 1) resg += gauss_w[j / 2] * pair;
    }

    const std::complex<double> reskh = 0.5 * resk;
    double resasc_re = kronrod_w[7] * std::abs(fv[7].real() - reskh.real());
    double resasc_im = kronrod_w[7] * std::abs(fv[7].imag() - reskh.imag());
    for (int j = 0; j < 7; ++j) {
        resasc_re += kronrod_w[j] * (std::abs(fv[j].real() - reskh.real()) +
                                     std::abs(fv[14 - j].real() - reskh.real()));
        resasc_im += kronrod_w[j] * (std::abs(fv[j].imag() - reskh.imag()) +
                                     std::abs(fv[14 - j].imag() - reskh.imag()));
    }

    Segment s;
    s.a = a;
    s.b = b;
    s.integral = resk * half;
    const double raw_re = std::abs((resk.real() - resg.real()) * half);
    const double raw_im = std::abs((resk.imag() - resg.imag()) * half);
    s.err_re = scaled_error(raw_re, resasc_re * half);
    s.err_im = scaled_error(raw_im, resasc_im * half);
    return s;
}

}  // namespace detail

/// Integrates f over [a, b] until the summed error estimates of both the real
/// and imaginary parts are at or below tol_abs. Throws QuadBudgetError when
/// the subdivision budget is exhausted first.
template <typename F>
QuadOutcome adaptive_gk15(F&& f, double a, double b, double tol_abs,
                          int max_segments = 10000) {
    auto worse = [](const detail::Segment& l, const detail::Segment& r) {
        return std::max(l.err_re, l.err_im) < std::max(r.err_re, r.err_im);
    };
    std::priority_queue<detail::Segment, std::vector<detail::Segment>, decltype(worse)>
        queue(worse);

    detail::Segment whole = detail::gk15(f, a, b);
    double total_err_re = whole.err_re;
    double total_err_im = whole.err_im;
    std::complex<double> total = whole.integral;
    queue.push(whole);
    int segments = 1;

    while (total_err_re > tol_abs || total_err_im > tol_abs) {
        if (segments >= max_segments)
            throw QuadBudgetError("adaptive_gk15: subdivision budget exhausted before tolerance");
        const detail::Segment seg = queue.top();
        queue.pop();
        const double mid = 0.5 * (seg.a + seg.b);
        const detail::Segment left = detail::gk15(f, seg.a, mid);
        const detail::Segment right = detail::gk15(f, mid, seg.b);

        total += left.integral + right.integral - seg.integral;
        total_err_re += left.err_re + right.err_re - seg.err_re;
        total_err_im += left.err_im + right.err_im - seg.err_im;
        queue.push(left);
        queue.push(right);
        ++segments;
    }

    return QuadOutcome{total, total_err_re, total_err_im, segments};
}

}  // namespace wishart
