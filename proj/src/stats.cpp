#include "rcm/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <stdexcept>

namespace rcm {

MeanError mean_error(const std::vector<double>& v) {
    MeanError r;
    r.count = v.size();
    if (v.empty()) return r;
    double s = 0.0;
    for (double x : v) s += x;
    r.mean = s / double(v.size());
    if (v.size() < 2) return r;
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std_error = std::sqrt(ss / double(v.size() - 1) / double(v.size()));
    return r;
}

ChiSquare chi_square_test(const std::vector<double>& observed, const std::vector<double>& probabilities,
                          double min_expected) {
    if (observed.size() != probabilities.size()) throw std::invalid_argument("chi-square: size mismatch");
    double total = 0.0;
    for (double o : observed) total += o;
    std::vector<double> obs, expct;
    double acc_o = 0.0, acc_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        acc_o += observed[i];
        acc_e += probabilities[i] * total;
        if (acc_e >= min_expected) {
            obs.push_back(acc_o);
            expct.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0 || acc_o > 0.0) {
        if (expct.empty()) {
            obs.push_back(acc_o);
            expct.push_back(acc_e);
        } else {
            obs.back() += acc_o;
            expct.back() += acc_e;
        }
    }
    ChiSquare r;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (expct[i] <= 0.0) {
            if (obs[i] > 0.0) r.statistic = INFINITY;
            continue;
        }
        r.statistic += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
    }
    r.dof = int(obs.size()) - 1;
    if (r.dof < 1) {
        r.p_value = 1.0;
        return r;
    }
    if (std::isfinite(r.statistic)) {
        boost::math::chi_squared dist(r.dof);
        r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    } else {
        r.p_value = 0.0;
    }
    r.z_score = (r.statistic - r.dof) / std::sqrt(2.0 * r.dof);
    return r;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weights) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear fit needs at least two points");
    const std::size_t n = x.size();
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = weights.empty() ? 1.0 : weights[i];
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    double det = sw * sxx - sx * sx;
    if (det <= 0.0) throw std::invalid_argument("linear fit: degenerate abscissae");
    LinearFit f;
    f.slope = (sw * sxy - sx * sy) / det;
    f.intercept = (sxx * sy - sx * sxy) / det;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - f.intercept - f.slope * x[i];
        rss += (weights.empty() ? 1.0 : weights[i]) * r * r;
    }
    f.rms_residual = std::sqrt(rss / (weights.empty() ? double(n) : sw));
    if (weights.empty()) {
        double s2 = n > 2 ? rss / double(n - 2) : 0.0;
        f.slope_error = std::sqrt(s2 * sw / det);
        f.intercept_error = std::sqrt(s2 * sxx / det);
    } else {
        f.slope_error = std::sqrt(sw / det);
        f.intercept_error = std::sqrt(sxx / det);
    }
    return f;
}

BatchMeans batch_means(const std::vector<double>& series, std::size_t num_batches, double drift_sigmas) {
    BatchMeans r;
    std::size_t per = series.size() / std::max<std::size_t>(num_batches, 1);
    if (per == 0) {
        auto me = mean_error(series);
        r.mean = me.mean;
        r.std_error = me.std_error;
        r.batches = series.size();
        return r;
    }
    std::vector<double> means(num_batches);
    for (std::size_t b = 0; b < num_batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += series[i];
        means[b] = s / double(per);
    }
    auto me = mean_error(means);
    r.mean = me.mean;
    r.std_error = me.std_error;
    r.batches = num_batches;
    std::size_t third = num_batches / 3;
    if (third >= 2) {
        std::vector<double> first(means.begin(), means.begin() + long(third));
        std::vector<double> last(means.end() - long(third), means.end());
        auto a = mean_error(first), b = mean_error(last);
        double se = std::hypot(a.std_error, b.std_error);
        r.drift = se > 0.0 && std::abs(a.mean - b.mean) > drift_sigmas * se;
    }
    return r;
}

}  // namespace rcm
