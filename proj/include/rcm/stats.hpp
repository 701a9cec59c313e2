#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace rcm {

struct MeanError {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

MeanError mean_error(const std::vector<double>& v);

// Delete-one jackknife of a statistic of per-group values.
template <class Stat>
MeanError jackknife(std::size_t groups, Stat&& leave_out) {
    MeanError r;
    r.count = groups;
    if (groups < 2) return r;
    std::vector<double> loo(groups);
    double sum = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
        loo[g] = leave_out(g);
        sum += loo[g];
    }
    double m = sum / double(groups);
    double ss = 0.0;
    for (double v : loo) ss += (v - m) * (v - m);
    r.mean = m;
    r.std_error = std::sqrt(double(groups - 1) / double(groups) * ss);
    return r;
}

struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    double z_score = 0.0;  // (statistic - dof) / sqrt(2 dof)
};

// Pearson test of observed counts against expected probabilities. Cells with
// expected count below min_expected are pooled into their neighbour.
ChiSquare chi_square_test(const std::vector<double>& observed, const std::vector<double>& probabilities,
                          double min_expected = 5.0);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_error = 0.0;
    double intercept_error = 0.0;
    double rms_residual = 0.0;
};

// Least squares y = intercept + slope x; optional weights are inverse variances.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& weights = {});

// Batch means of a correlated series: mean, error from batch spread, and a
// drift flag raised when the first and last thirds of batches disagree by
// more than `drift_sigmas` standard errors.
struct BatchMeans {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t batches = 0;
    bool drift = false;
};

BatchMeans batch_means(const std::vector<double>& series, std::size_t num_batches = 20, double drift_sigmas = 4.0);

}  // namespace rcm
