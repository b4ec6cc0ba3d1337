#include "mq/special_cases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mq/errors.hpp"

namespace mq {

namespace {

double det_real(const SetupParams& p, Outcome mu) {
    const double q2 = (p.M / p.Y) * (p.M / p.Y) * p.sY * p.sY;
    return mu == Outcome::Minus ? p.cM * p.cM - q2 : -p.sM * p.sM + q2;
}

double nearest_multiple_distance(double x, double period, double offset, int& index) {
    double k = std::round((x - offset) / period);
    if (k < 0) k = 0;
    index = static_cast<int>(k);
    return std::abs(x - offset - k * period);
}

double projective_rank_direction(const GcMap& g) {
    // Range of a rank-one map: image of whichever probe angle has the larger weight.
    double best = 0.0, theta = 0.0;
    for (double probe : {0.0, kPi / 2.0, -kPi / 2.0, -kPi}) {
        double w = gc_probability(g, probe);
        if (w > best) {
            best = w;
            theta = gc_apply(g, probe);
        }
    }
    return theta;
}

template <typename F>
double bisect(F f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw InvalidArgument("root is not bracketed");
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
}

}  // namespace

std::string to_string(SpecialKind k) {
    switch (k) {
        case SpecialKind::GammaZero:
            return "gamma_zero";
        case SpecialKind::Frozen:
            return "frozen";
        case SpecialKind::Shift:
            return "shift";
        case SpecialKind::Period2:
            return "period2";
        case SpecialKind::ProjectiveMinus:
            return "projective_minus";
        case SpecialKind::ProjectivePlus:
            return "projective_plus";
        case SpecialKind::DoubleProjective:
            return "double_projective";
        case SpecialKind::Generic:
            return "generic";
    }
    return "unknown";
}

SpecialDistances special_distances(const SetupParams& p) {
    SpecialDistances d;
    const double yt = p.Y * p.T, mt = p.M * p.T;
    d.frozen = nearest_multiple_distance(yt, kTwoPi, 0.0, d.frozen_q);
    d.shift = nearest_multiple_distance(mt, kPi, 0.0, d.shift_q);
    d.period2 = nearest_multiple_distance(yt, kTwoPi, kPi, d.period2_l);
    d.det_minus = std::abs(det_real(p, Outcome::Minus));
    d.det_plus = std::abs(det_real(p, Outcome::Plus));
    return d;
}

SpecialCaseTag classify(const SetupParams& p, double tol) {
    SpecialCaseTag tag;
    tag.all = special_distances(p);
    const auto& d = tag.all;
    auto set = [&](SpecialKind k, int order, double dist) {
        tag.kind = k;
        tag.order = order;
        tag.distance = dist;
    };
    if (p.gamma == 0.0)
        set(SpecialKind::GammaZero, 0, 0.0);
    else if (d.frozen < tol)
        set(SpecialKind::Frozen, d.frozen_q, d.frozen);
    else if (d.shift < tol)
        set(SpecialKind::Shift, d.shift_q, d.shift);
    else if (d.period2 < tol)
        set(SpecialKind::Period2, d.period2_l, d.period2);
    else if (d.det_minus < tol && d.det_plus < tol)
        set(SpecialKind::DoubleProjective, 0, std::max(d.det_minus, d.det_plus));
    else if (d.det_minus < tol)
        set(SpecialKind::ProjectiveMinus, 0, d.det_minus);
    else if (d.det_plus < tol)
        set(SpecialKind::ProjectivePlus, 0, d.det_plus);
    return tag;
}

double LineDistances::nearest() const {
    return std::min({frozen, shift, period2, projective_minus, projective_plus});
}

SpecialKind LineDistances::nearest_kind() const {
    double n = nearest();
    if (n == frozen) return SpecialKind::Frozen;
    if (n == shift) return SpecialKind::Shift;
    if (n == period2) return SpecialKind::Period2;
    if (n == projective_minus) return SpecialKind::ProjectiveMinus;
    return SpecialKind::ProjectivePlus;
}

LineDistances line_distances(const SetupParams& p) {
    LineDistances d;
    int idx = 0;
    d.frozen = p.Y > 0.0 ? nearest_multiple_distance(p.T, kTwoPi / p.Y, 0.0, idx) : 0.0;
    if (idx == 0) d.frozen = std::abs(p.T - kTwoPi / p.Y);
    d.shift = nearest_multiple_distance(p.T, kPi / p.M, 0.0, idx);
    if (idx == 0) d.shift = std::abs(p.T - kPi / p.M);
    d.period2 = nearest_multiple_distance(p.T, kTwoPi / p.Y, kPi / p.Y, idx);
    const double h = 1e-6;
    for (Outcome mu : {Outcome::Minus, Outcome::Plus}) {
        double f = det_real(p, mu);
        double fp = det_real(build_params(p.M, p.T + h, p.gamma), mu);
        double fm = det_real(build_params(p.M, std::max(0.0, p.T - h), p.gamma), mu);
        double slope = (fp - fm) / (p.T + h - std::max(0.0, p.T - h));
        double dist = std::abs(slope) > 0.0 ? std::abs(f / slope) : std::numeric_limits<double>::infinity();
        (mu == Outcome::Minus ? d.projective_minus : d.projective_plus) = dist;
    }
    return d;
}

DiscretizedDistribution bin_peaks(const AnalyticADF& adf, std::size_t bins) {
    DiscretizedDistribution w(bins);
    for (const auto& pk : adf.peaks) w.pr[bin_index(pk.theta, bins)] += pk.weight;
    return w;
}

AnalyticADF gamma_zero_adf(double theta0, double MT) {
    AnalyticADF adf;
    if (std::abs(std::sin(MT)) < 1e-12) {
        adf.preserves_initial = true;
        adf.peaks = {{wrap_angle(theta0), 1.0}};
        return adf;
    }
    double c = std::cos(theta0 / 2.0), s = std::sin(theta0 / 2.0);
    adf.peaks = {{0.0, c * c}, {-kPi, s * s}};
    return adf;
}

double null_probability(double theta0, double MT, std::uint64_t L) {
    double c = std::cos(theta0 / 2.0), s = std::sin(theta0 / 2.0);
    return c * c * std::pow(std::cos(MT), 2.0 * static_cast<double>(L)) + s * s;
}

AnalyticADF period2_adf() {
    AnalyticADF adf;
    adf.peaks = {{kPi / 2.0, 0.5}, {-kPi / 2.0, 0.5}};
    return adf;
}

DiscretizedDistribution period2_binomial_distribution(std::uint64_t n_t, double theta0, const SetupParams& p,
                                                      std::size_t bins) {
    if (n_t % 2 != 0) throw InvalidArgument("period-2 distribution needs an even step count");
    const KrausPair k = kraus_matrices(p);
    const double nt = static_cast<double>(n_t);
    auto weight = [&](std::uint64_t ones) {
        double logb = std::lgamma(nt + 1.0) - std::lgamma(static_cast<double>(ones) + 1.0) -
                      std::lgamma(nt - static_cast<double>(ones) + 1.0);
        return std::exp(logb - nt * std::log(2.0));
    };
    const std::uint64_t half = n_t / 2;
    // Normalize by the computed row sum so rounding in lgamma cannot leak mass.
    double row = weight(half);
    for (std::uint64_t n = 1; n <= half; ++n) row += 2.0 * weight(half + n);
    DiscretizedDistribution w(bins);
    w.pr[bin_index(theta0, bins)] += weight(half) / row;
    double fwd = theta0, back = theta0;  // (M+ M-)^n psi0 and (M- M+)^n psi0
    for (std::uint64_t n = 1; n <= half; ++n) {
        fwd = gc_apply(k.gc_plus, gc_apply(k.gc_minus, fwd));
        back = gc_apply(k.gc_minus, gc_apply(k.gc_plus, back));
        double b = weight(half + n) / row;
        w.pr[bin_index(fwd, bins)] += b;
        w.pr[bin_index(back, bins)] += b;
    }
    return w;
}

AnalyticADF projective_series(const SetupParams& p, std::size_t n_terms) {
    if (n_terms < 1) throw InvalidArgument("series needs at least one term");
    const KrausPair k = kraus_matrices(p);
    bool pm = std::abs(k.det_minus) < kProjectiveThreshold;
    bool pp = std::abs(k.det_plus) < kProjectiveThreshold;
    if (pm == pp) throw NotProjective(pm ? "both maps project; use the double-projective solution"
                                         : "neither Kraus map is projective");
    const GcMap& proj = pm ? k.gc_minus : k.gc_plus;
    const GcMap& other = pm ? k.gc_plus : k.gc_minus;

    AnalyticADF adf;
    double theta = projective_rank_direction(proj);
    double weight = 1.0, max_p = 0.0;
    adf.peaks.push_back({theta, 1.0});
    for (std::size_t n = 1; n <= n_terms; ++n) {
        double pn = gc_probability(other, theta);
        max_p = std::max(max_p, pn);
        weight *= pn;
        theta = gc_apply(other, theta);
        adf.peaks.push_back({theta, weight});
    }
    double norm = 0.0;
    for (const auto& pk : adf.peaks) norm += pk.weight;
    for (auto& pk : adf.peaks) pk.weight /= norm;
    adf.tail_mass = std::pow(max_p, static_cast<double>(n_terms));
    return adf;
}

DiscretizedDistribution projective_series_adf(const SetupParams& p, std::size_t n_terms, std::size_t bins) {
    return bin_peaks(projective_series(p, n_terms), bins);
}

AnalyticADF double_projective_adf(const SetupParams& p) {
    const KrausPair k = kraus_matrices(p);
    if (!(std::abs(k.det_minus) < kProjectiveThreshold && std::abs(k.det_plus) < kProjectiveThreshold))
        throw NotDoubleProjective("both Kraus maps must be projective");
    AnalyticADF adf;
    adf.peaks = {{projective_rank_direction(k.gc_plus), 0.5}, {projective_rank_direction(k.gc_minus), 0.5}};
    adf.cross_probability = 1.0 - 2.0 * p.cY * p.cY;
    return adf;
}

bool rational_approximation(double x, int max_den, double tol, int& num, int& den) {
    // Convergents h/k of the continued fraction of x.
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        long long ai = static_cast<long long>(a);
        long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        if (std::abs(x - static_cast<double>(h2) / static_cast<double>(k2)) <= tol) {
            num = static_cast<int>(h2);
            den = static_cast<int>(k2);
            return true;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        double frac = r - a;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    return false;
}

ShiftProperties shift_properties(const SetupParams& p) {
    SpecialCaseTag tag = classify(p);
    if (tag.kind != SpecialKind::Shift) throw NotShiftCase("parameters are not on a shift line MT = q pi");
    const KrausPair k = kraus_matrices(p);
    ShiftProperties s;
    s.shifting = tag.order % 2 == 1 ? Outcome::Plus : Outcome::Minus;
    const GcMap& g = k.gc(s.shifting);
    double phi = std::atan2(g.c, g.a);
    phi = std::fmod(phi, kPi);
    if (phi < 0.0) phi += kPi;
    s.phi = phi;
    s.commensurate = rational_approximation(phi / kPi, 64, 1e-9, s.numerator, s.denominator);
    return s;
}

double find_projective_T(double M, Outcome mu, double t_lo, double t_hi, double gamma) {
    return bisect([&](double t) { return det_real(build_params(M, t, gamma), mu); }, t_lo, t_hi);
}

SetupParams find_double_projective(int l, double m_lo, double m_hi, double gamma) {
    const double phase = kPi / 2.0 + kPi * l;
    auto f = [&](double m) {
        SetupParams p = build_params(m, phase / m, gamma);
        return m * std::abs(p.sY) - p.Y / std::sqrt(2.0);
    };
    double m = bisect(f, m_lo, m_hi);
    return build_params(m, phase / m, gamma);
}

}  // namespace mq
