#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ale::harness {

struct WilsonInterval {
    double lo;
    double hi;
};

// 95% Wilson score interval for k successes out of n.
WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

// Least-squares slope of y against x with the rms residual.
struct LineFit {
    double slope;
    double intercept;
    double rms_residual;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

// Two-sided Kolmogorov-Smirnov statistic of samples against a CDF, and the
// asymptotic p-value of the statistic at sample size n.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_pvalue(double d, std::size_t n);

// Bounded worker pool; fn(i) runs once for each i in [0, n). The first thrown
// exception is rethrown after the pool joins. Results must be written to
// per-index slots so thread count cannot affect output.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace ale::harness
