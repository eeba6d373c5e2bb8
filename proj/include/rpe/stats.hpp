#pragma once

#include <cstddef>
#include <vector>

namespace rpe {

struct TTestResult {
    double t = 0.0;
    size_t df = 0;
    double p = 1.0;
    bool degenerate = false; // zero-variance differences
};

// Paired two-sided t-test. Conventions: all differences zero -> t=0, p=1,
// degenerate; zero variance with nonzero mean -> p=0, degenerate.
TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b);

// Two-sided tail probability of Student's t at |t| with df degrees of
// freedom, by adaptive Simpson integration of the density.
double student_t_two_sided_p(double t, size_t df);

struct R2Result {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;     // clamped to [0, 1]
    double r2_raw = 0.0; // unclamped 1 - ss_res / ss_tot
};

// Least-squares line y = intercept + slope * x and its coefficient of
// determination.
R2Result linear_r2(const std::vector<double>& x, const std::vector<double>& y);

double mean_of(const std::vector<double>& v);
double sample_std(const std::vector<double>& v); // n-1 denominator

} // namespace rpe
