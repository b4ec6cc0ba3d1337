#include "mq/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mq/errors.hpp"
#include "mq/kernels.hpp"
#include "mq/markov.hpp"

namespace mq {

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

}  // namespace

double participation_ratio(const DiscretizedDistribution& w) {
    return 1.0 / kernels::sum_squares(w.pr.data(), w.size());
}

std::vector<std::size_t> default_pr_grids(std::size_t n) {
    std::vector<std::size_t> grids;
    for (std::size_t k = 1; k <= 6; ++k) {
        std::size_t d = std::size_t{1} << k;
        if (n % d == 0 && n / d >= 1) grids.push_back(n / d);
    }
    if (grids.size() >= 4) return grids;
    grids.clear();
    for (std::size_t g = n / 2; g >= 1 && g * 64 >= n; --g)
        if (n % g == 0) grids.push_back(g);
    return grids;
}

ZetaFit pr_scaling_exponent(const DiscretizedDistribution& w, const std::vector<std::size_t>& grids) {
    if (grids.size() < 4) throw TooFewLevels("PR scaling needs at least 4 grid levels");
    std::vector<double> lx, ly;
    for (auto g : grids) {
        DiscretizedDistribution c = coarse_grain(w, g);
        lx.push_back(std::log(static_cast<double>(g)));
        ly.push_back(std::log(participation_ratio(c)));
    }
    LineFit f = least_squares(lx, ly);
    ZetaFit z;
    z.raw_slope = f.slope;
    z.residual = f.rms;
    z.levels = grids;
    z.clamped = f.slope < -0.05 || f.slope > 1.05;
    z.zeta = std::clamp(f.slope, 0.0, 1.0);
    return z;
}

ZetaFit pr_scaling_exponent(const DiscretizedDistribution& w) {
    return pr_scaling_exponent(w, default_pr_grids(w.size()));
}

double support_fraction(const DiscretizedDistribution& w, double c) {
    if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("support mass must lie in (0, 1]");
    std::vector<double> v = w.pr;
    std::sort(v.begin(), v.end(), std::greater<>());
    // Tolerance absorbs rounding of the running sum.
    const double target = c - 1e-12;
    double acc = 0.0;
    std::size_t count = 0;
    for (double x : v) {
        if (acc >= target) break;
        acc += x;
        ++count;
    }
    return static_cast<double>(count) / static_cast<double>(w.size());
}

HeightResult height_category(const DiscretizedDistribution& w, std::size_t n_h) {
    if (n_h < 1) throw InvalidArgument("height histogram needs at least one bin");
    HeightResult r;
    auto [lo_it, hi_it] = std::minmax_element(w.pr.begin(), w.pr.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) {
        r.degenerate = true;
        r.category = 3;
        r.h_max = r.h_0 = lo;
        return r;
    }
    r.delta_h = (hi - lo) / (2.0 * static_cast<double>(n_h));
    std::vector<std::size_t> hist(n_h, 0);
    for (double x : w.pr) {
        auto b = static_cast<std::size_t>((x - lo) / (2.0 * r.delta_h));
        hist[std::min(b, n_h - 1)]++;
    }
    auto height = [&](std::size_t i) { return lo + (2.0 * static_cast<double>(i) + 1.0) * r.delta_h; };
    std::size_t first = 0;
    while (hist[first] == 0) ++first;
    std::size_t peak = static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    r.h_0 = height(first);
    r.h_max = height(peak);
    if (peak == first)
        r.category = lo < r.delta_h ? 1 : 2;
    else
        r.category = 3;
    return r;
}

double box_count(const DiscretizedDistribution& w, std::size_t m) {
    const std::size_t n = w.size();
    const double peak = *std::max_element(w.pr.begin(), w.pr.end());
    const double scale = peak > 0.0 ? 1.0 / peak : 0.0;
    const double md = static_cast<double>(m);
    std::vector<double> cmin(m, std::numeric_limits<double>::infinity());
    std::vector<double> cmax(m, -std::numeric_limits<double>::infinity());
    auto column = [&](double x) { return std::min(static_cast<std::size_t>(x * md), m - 1); };
    auto touch = [&](std::size_t c, double y) {
        cmin[c] = std::min(cmin[c], y);
        cmax[c] = std::max(cmax[c], y);
    };
    double xprev = 0.0, yprev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        double y = w.pr[i] * scale;
        std::size_t c = column(x);
        touch(c, y);
        if (i > 0) {
            std::size_t cp = column(xprev);
            // Segment crosses column boundaries: add the interpolated heights.
            for (std::size_t b = cp + 1; b <= c; ++b) {
                double xb = static_cast<double>(b) / md;
                double yb = yprev + (y - yprev) * (xb - xprev) / (x - xprev);
                touch(b - 1, yb);
                touch(b, yb);
            }
        }
        xprev = x;
        yprev = y;
    }
    double count = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
        if (cmax[c] < cmin[c]) continue;
        auto row = [&](double y) { return std::min(std::floor(y * md), md - 1.0); };
        count += row(cmax[c]) - row(cmin[c]) + 1.0;
    }
    return count;
}

BoxFit box_counting_dimension(const DiscretizedDistribution& w, std::size_t m_min, std::size_t m_max) {
    if (m_max == 0) m_max = w.size() / 16;
    BoxFit fit;
    std::vector<double> lx, ly;
    for (std::size_t m = m_min; m <= m_max; m *= 2) {
        double c = box_count(w, m);
        fit.m_values.push_back(m);
        fit.counts.push_back(c);
        lx.push_back(std::log(static_cast<double>(m)));
        ly.push_back(std::log(c));
    }
    if (lx.size() < 2) throw TooFewLevels("box counting needs at least two box sizes; N too small");
    LineFit f = least_squares(lx, ly);
    fit.d = f.slope;
    fit.residual = f.rms;
    return fit;
}

double chi2_distance(const DiscretizedDistribution& p, const DiscretizedDistribution& q) {
    if (p.size() != q.size()) throw GridMismatch("chi2 distance needs equal grids");
    return 0.5 * kernels::chi2_sum(p.pr.data(), q.pr.data(), p.size());
}

IndicatorRecord compute_indicators(const DiscretizedDistribution& w, const DiscretizedDistribution* reference) {
    IndicatorRecord r;
    auto guard = [](auto& slot, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            slot.value.reset();
            slot.reason = e.what();
        }
    };
    r.pr.value = participation_ratio(w);
    guard(r.zeta, [&] {
        r.zeta_fit = pr_scaling_exponent(w);
        r.zeta.value = r.zeta_fit->zeta;
    });
    r.support.value = support_fraction(w, kSupportMass);
    HeightResult h = height_category(w);
    r.category.value = h.category;
    r.h_max.value = h.h_max;
    r.h_0.value = h.h_0;
    guard(r.fractal_dim, [&] {
        r.box_fit = box_counting_dimension(w);
        r.fractal_dim.value = r.box_fit->d;
    });
    if (reference) {
        guard(r.chi2, [&] { r.chi2.value = chi2_distance(w, *reference); });
    } else {
        r.chi2.reason = "no reference";
    }
    return r;
}

}  // namespace mq
