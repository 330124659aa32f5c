#include "memsched/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace memsched::stats {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("tv_distance: bucket count mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

double lag1_autocorr(const std::vector<double>& xs) {
    if (xs.size() < 3) return 0.0;
    const double m = mean(xs);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        num += (xs[i] - m) * (xs[i + 1] - m);
    for (double x : xs) den += (x - m) * (x - m);
    return den > 0.0 ? num / den : 0.0;
}

double batch_se(const std::vector<double>& xs, std::size_t n_batches) {
    if (xs.empty()) return 0.0;
    n_batches = std::min(n_batches, xs.size());
    if (n_batches < 2) return 0.0;
    const std::size_t len = xs.size() / n_batches;
    std::vector<double> batch(n_batches, 0.0);
    for (std::size_t b = 0; b < n_batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += xs[i];
        batch[b] = s / static_cast<double>(len);
    }
    return std::sqrt(variance(batch) / static_cast<double>(n_batches));
}

SlopeFit regress_slope(const std::vector<double>& y, double dx) {
    SlopeFit fit;
    const std::size_t n = y.size();
    if (n < 3) return fit;
    const double xbar = dx * static_cast<double>(n - 1) / 2.0;
    const double ybar = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = dx * static_cast<double>(i) - xbar;
        sxx += d * d;
        sxy += d * (y[i] - ybar);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = ybar + fit.slope * (dx * static_cast<double>(i) - xbar);
        rss += (y[i] - pred) * (y[i] - pred);
    }
    fit.se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return fit;
}

double chi2_2x2(std::uint64_t n00, std::uint64_t n01, std::uint64_t n10, std::uint64_t n11) {
    const double r0 = static_cast<double>(n00 + n01);
    const double r1 = static_cast<double>(n10 + n11);
    const double c0 = static_cast<double>(n00 + n10);
    const double c1 = static_cast<double>(n01 + n11);
    const double total = r0 + r1;
    if (total == 0.0 || r0 == 0.0 || r1 == 0.0 || c0 == 0.0 || c1 == 0.0) return 0.0;
    const double obs[2][2] = {{static_cast<double>(n00), static_cast<double>(n01)},
                              {static_cast<double>(n10), static_cast<double>(n11)}};
    const double rows[2] = {r0, r1}, cols[2] = {c0, c1};
    double stat = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double e = rows[i] * cols[j] / total;
            stat += (obs[i][j] - e) * (obs[i][j] - e) / e;
        }
    return stat;
}

StabilityReport assess_stability(const std::vector<double>& series) {
    StabilityReport rep;
    const std::size_t n = series.size();
    if (n < 20) return rep;

    const auto window_mean = [&](double from, double to) {
        const std::size_t a = static_cast<std::size_t>(from * static_cast<double>(n));
        const std::size_t b = std::max(a + 1, static_cast<std::size_t>(to * static_cast<double>(n)));
        double s = 0.0;
        for (std::size_t i = a; i < b && i < n; ++i) s += series[i];
        return s / static_cast<double>(std::min(b, n) - a);
    };
    rep.mid_mean = window_mean(0.45, 0.55);
    rep.last_decile_mean = window_mean(0.90, 1.00);
    // absolute guard keeps the all-zero / near-zero series well defined
    rep.plateaued =
        std::abs(rep.last_decile_mean - rep.mid_mean) <= 0.10 * std::abs(rep.mid_mean) + 1e-9;

    // trend over the second half, batched to tame autocorrelation
    std::vector<double> half(series.begin() + static_cast<std::ptrdiff_t>(n / 2), series.end());
    const std::size_t n_batches = std::min<std::size_t>(100, half.size() / 2);
    std::vector<double> batches;
    if (n_batches >= 3) {
        const std::size_t len = half.size() / n_batches;
        for (std::size_t b = 0; b < n_batches; ++b) {
            double s = 0.0;
            for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += half[i];
            batches.push_back(s / static_cast<double>(len));
        }
    } else {
        batches = half;
    }
    const auto fit = regress_slope(batches, 1.0);
    rep.slope = fit.slope;
    rep.slope_se = fit.se;
    const double z = 2.576; // 99%
    rep.slope_ci_has_zero = std::abs(fit.slope) <= z * fit.se + 1e-12;
    rep.slope_positive = fit.slope - z * fit.se > 0.0;
    rep.stable = rep.plateaued && rep.slope_ci_has_zero;
    return rep;
}

} // namespace memsched::stats
