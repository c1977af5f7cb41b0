#include "muskat/test_functions.hpp"

#include <algorithm>
#include <cmath>

namespace muskat {

namespace {

double bump_phi(double u) { return 1.0 - 1.0 / (1.0 - u * u); }
double bump_phi_d(double u) {
    const double q = 1.0 - u * u;
    return -2.0 * u / (q * q);
}

// fill sup norms by dense sampling; second derivative by central differences
// of the analytic first derivative
void fill_norms(TestFunction& tf, double lo, double hi) {
    const std::size_t n = 20001;
    const double h = (hi - lo) / static_cast<double>(n - 1);
    const double fd = 1e-6 * std::max(1.0, hi - lo);
    double sv = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = lo + h * static_cast<double>(i);
        sv = std::max(sv, std::abs(tf.value(x)));
        s1 = std::max(s1, std::abs(tf.deriv(x)));
        s2 = std::max(s2, std::abs((tf.deriv(x + fd) - tf.deriv(x - fd)) / (2.0 * fd)));
    }
    tf.sup_value = sv;
    tf.sup_d1 = s1;
    tf.sup_d2 = s2;
}

// C∞ step: 0 for t <= 0, 1 for t >= 1
double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double smooth_step_d(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    const double ad = a / (t * t);
    const double bd = -b / ((1.0 - t) * (1.0 - t));
    const double s = a + b;
    return (ad * s - a * (ad + bd)) / (s * s);
}

} // namespace

double TestFunction::w2inf_norm() const { return std::max({sup_value, sup_d1, sup_d2}); }

TestFunction bump(double center, double width) {
    TestFunction tf;
    tf.name = "bump(" + std::to_string(center) + "," + std::to_string(width) + ")";
    tf.value = [center, width](double x) {
        const double u = (x - center) / width;
        if (std::abs(u) >= 1.0) return 0.0;
        return std::exp(bump_phi(u));
    };
    tf.deriv = [center, width](double x) {
        const double u = (x - center) / width;
        if (std::abs(u) >= 1.0) return 0.0;
        return std::exp(bump_phi(u)) * bump_phi_d(u) / width;
    };
    fill_norms(tf, center - width, center + width);
    return tf;
}

TestFunction plateau_window(double a, double b, double ramp) {
    TestFunction tf;
    tf.name = "window(" + std::to_string(a) + "," + std::to_string(b) + ")";
    tf.value = [a, b, ramp](double x) {
        if (x < a) return smooth_step((x - (a - ramp)) / ramp);
        if (x > b) return smooth_step(((b + ramp) - x) / ramp);
        return 1.0;
    };
    tf.deriv = [a, b, ramp](double x) {
        if (x < a) return smooth_step_d((x - (a - ramp)) / ramp) / ramp;
        if (x > b) return -smooth_step_d(((b + ramp) - x) / ramp) / ramp;
        return 0.0;
    };
    fill_norms(tf, a - ramp, b + ramp);
    return tf;
}

TestFunction truncated_monomial(int degree, double half_width) {
    TestFunction env = bump(0.0, half_width);
    TestFunction tf;
    tf.name = "x^" + std::to_string(degree) + "*bump";
    tf.value = [degree, env](double x) { return std::pow(x, degree) * env.value(x); };
    tf.deriv = [degree, env](double x) {
        const double p = std::pow(x, degree);
        const double pd = degree == 0 ? 0.0 : degree * std::pow(x, degree - 1);
        return pd * env.value(x) + p * env.deriv(x);
    };
    fill_norms(tf, -half_width, half_width);
    return tf;
}

std::vector<TestFunction> test_dictionary(double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (lo + hi);
    std::vector<TestFunction> dict;
    dict.reserve(12);
    for (int d = 0; d <= 2; ++d) {
        TestFunction tf = truncated_monomial(d, half);
        // shift to the domain midpoint
        TestFunction shifted;
        shifted.name = tf.name;
        shifted.value = [tf, mid](double x) { return tf.value(x - mid); };
        shifted.deriv = [tf, mid](double x) { return tf.deriv(x - mid); };
        shifted.sup_value = tf.sup_value;
        shifted.sup_d1 = tf.sup_d1;
        shifted.sup_d2 = tf.sup_d2;
        dict.push_back(std::move(shifted));
    }
    const double centers[4] = {mid - 0.5 * half, mid - 0.15 * half, mid + 0.15 * half,
                               mid + 0.5 * half};
    const double widths[2] = {0.25 * half, 0.6 * half};
    for (double w : widths)
        for (double c : centers) dict.push_back(bump(c, w));
    dict.push_back(plateau_window(mid - 0.6 * half, mid + 0.6 * half, 0.3 * half));
    return dict;
}

} // namespace muskat
