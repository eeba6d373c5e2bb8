#include "rpe/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rpe/errors.hpp"

namespace rpe {

namespace {

double t_density(double x, double nu, double log_norm) {
    return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(double a, double b, double fa, double fm, double fb, double whole, double nu,
                double log_norm, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = t_density(lm, nu, log_norm), frm = t_density(rm, nu, log_norm);
    double left = simpson(fa, flm, fm, m - a);
    double right = simpson(fm, frm, fb, b - m);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(a, m, fa, flm, fm, left, nu, log_norm, tol * 0.5, depth - 1) +
           adaptive(m, b, fm, frm, fb, right, nu, log_norm, tol * 0.5, depth - 1);
}

} // namespace

double student_t_two_sided_p(double t, size_t df) {
    if (df == 0) throw validation_error("degrees of freedom must be positive");
    double nu = double(df);
    double at = std::fabs(t);
    if (at == 0.0) return 1.0;
    double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                      0.5 * std::log(nu * std::acos(-1.0));
    double fa = t_density(0.0, nu, log_norm);
    double fm = t_density(0.5 * at, nu, log_norm);
    double fb = t_density(at, nu, log_norm);
    double whole = simpson(fa, fm, fb, at);
    double body = adaptive(0.0, at, fa, fm, fb, whole, nu, log_norm, 1e-12, 40);
    return std::clamp(1.0 - 2.0 * body, 0.0, 1.0);
}

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw validation_error("paired series must have equal length");
    if (a.size() < 2) throw validation_error("paired t-test needs at least 2 pairs");

    std::vector<double> d(a.size());
    for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    double m = mean_of(d);
    double sd = sample_std(d);

    TTestResult r;
    r.df = a.size() - 1;
    if (sd == 0.0) {
        r.degenerate = true;
        r.t = 0.0;
        r.p = m == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.t = m / (sd / std::sqrt(double(d.size())));
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

R2Result linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw validation_error("series must have equal length");
    if (x.size() < 2) throw validation_error("regression needs at least 2 points");
    double mx = mean_of(x), my = mean_of(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    R2Result r;
    r.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    r.intercept = my - r.slope * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (r.intercept + r.slope * x[i]);
        ss_res += e * e;
    }
    r.r2_raw = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
    r.r2 = r.slope < 0.0 ? 0.0 : std::clamp(r.r2_raw, 0.0, 1.0);
    return r;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw validation_error("mean of empty series");
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) throw validation_error("std needs at least 2 values");
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1));
}

} // namespace rpe
