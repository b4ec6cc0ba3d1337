#include <cmath>
#include <map>

#include "doctest.h"
#include "mq/errors.hpp"
#include "mq/indicators.hpp"
#include "mq/special_cases.hpp"
#include "mq/trajectory.hpp"

using namespace mq;

namespace {

double total(const AnalyticADF& a) {
    double s = 0.0;
    for (const auto& pk : a.peaks) s += pk.weight;
    return s;
}

double mass_near(const DiscretizedDistribution& w, double theta, double radius) {
    double m = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (std::abs(wrap_angle(w.center(i) - theta)) <= radius) m += w.pr[i];
    return m;
}

SetupParams projective_point() {
    return build_params(2.92, find_projective_T(2.92, Outcome::Minus, 2.3, 2.7));
}

TrajectoryResult run_mc(const SetupParams& p, std::uint64_t steps, std::size_t bins, double theta0 = 0.3) {
    TrajectoryConfig c;
    c.n_steps = steps;
    c.burn_in = 1000;
    c.bins = bins;
    c.initial_state = BlochState::on_gc(theta0);
    return simulate(c, p);
}

}  // namespace

TEST_CASE("classify examples") {
    SpecialCaseTag f = classify(build_params(2.0, kTwoPi / std::sqrt(8.0)));
    CHECK(f.kind == SpecialKind::Frozen);
    CHECK(f.order == 1);
    SpecialCaseTag s = classify(build_params(1.0, kPi));
    CHECK(s.kind == SpecialKind::Shift);
    CHECK(s.order == 1);
    SpecialCaseTag p2 = classify(build_params(1.0, kPi / std::sqrt(5.0)));
    CHECK(p2.kind == SpecialKind::Period2);
    CHECK(p2.order == 0);
    CHECK(classify(build_params(1.0, 1.0, 0.0)).kind == SpecialKind::GammaZero);
    CHECK(classify(projective_point()).kind == SpecialKind::ProjectiveMinus);
    SpecialCaseTag g = classify(build_params(2.92, 3.1));
    CHECK(g.kind == SpecialKind::Generic);
    CHECK(g.all.frozen >= 0.0);
    CHECK(g.all.det_plus >= 0.0);
    CHECK(to_string(SpecialKind::DoubleProjective) == "double_projective");
}

TEST_CASE("double-projective tag is consistent with both conditions") {
    SetupParams dp = find_double_projective(2, 2.2, 3.0);
    SpecialCaseTag t = classify(dp);
    CHECK(t.kind == SpecialKind::DoubleProjective);
    CHECK(t.all.det_minus < kClassifyTolerance);
    CHECK(t.all.det_plus < kClassifyTolerance);
    CHECK(std::abs(std::cos(dp.M * dp.T)) < 1e-9);
    LineDistances d = line_distances(dp);
    CHECK(d.projective_minus < 1e-9);
    CHECK(d.projective_plus < 1e-9);
}

TEST_CASE("line distances are measured in T") {
    const double M = 2.0, tf = kTwoPi / std::sqrt(8.0);
    LineDistances d = line_distances(build_params(M, tf + 0.01));
    CHECK(d.frozen == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(d.nearest_kind() == SpecialKind::Frozen);
    double tp = find_projective_T(2.92, Outcome::Minus, 2.3, 2.7);
    LineDistances e = line_distances(build_params(2.92, tp + 1e-4));
    CHECK(e.projective_minus == doctest::Approx(1e-4).epsilon(1e-3));
}

TEST_CASE("gamma = 0 distribution") {
    AnalyticADF a = gamma_zero_adf(0.0, 1.0);
    CHECK(a.peaks[0].weight == doctest::Approx(1.0));
    CHECK(a.peaks[1].weight == doctest::Approx(0.0));
    AnalyticADF h = gamma_zero_adf(kPi / 2.0, 1.0);
    CHECK(h.peaks[0].weight == doctest::Approx(0.5));
    CHECK(h.peaks[1].weight == doctest::Approx(0.5));
    CHECK(std::abs(total(gamma_zero_adf(2.1, 0.7)) - 1.0) < 1e-12);
    AnalyticADF keep = gamma_zero_adf(0.8, kPi);
    CHECK(keep.preserves_initial);
    REQUIRE(keep.peaks.size() == 1);
    CHECK(keep.peaks[0].theta == doctest::Approx(0.8));
}

TEST_CASE("null-measurement probability") {
    CHECK(null_probability(1.2, 0.7, 0) == doctest::Approx(1.0));
    CHECK(null_probability(1.2, 0.7, 100000) == doctest::Approx(std::pow(std::sin(0.6), 2.0)));

    // Chain the gamma = 0 no-click map and multiply the per-step probabilities.
    const double M = 1.3, T = 0.6, theta0 = 1.1;
    KrausPair k = kraus_matrices(build_params(M, T, 0.0));
    BlochState s = BlochState::on_gc(theta0);
    double prod = 1.0;
    for (int j = 0; j < 10; ++j) {
        auto [next, prob] = apply_kraus(s, Outcome::Minus, k);
        prod *= prob;
        s = next;
    }
    CHECK(std::abs(prod - null_probability(theta0, M * T, 10)) < 1e-12);
}

TEST_CASE("period-2 peaks and the eigen-check") {
    AnalyticADF a = period2_adf();
    REQUIRE(a.peaks.size() == 2);
    CHECK(a.peaks[0].weight == 0.5);
    CHECK(a.peaks[1].weight == 0.5);

    // YT = pi: both maps swap the poles of the Grand Circle.
    KrausPair k = kraus_matrices(build_params(1.0, kPi / std::sqrt(5.0)));
    for (Outcome mu : {Outcome::Minus, Outcome::Plus})
        for (double s : {kPi / 2.0, -kPi / 2.0}) {
            if (gc_probability(k.gc(mu), s) < 1e-12) continue;
            CHECK(std::abs(wrap_angle(gc_apply(k.gc(mu), s) + s)) < 1e-9);
        }
}

TEST_CASE("period-2 binomial distribution") {
    SetupParams p = build_params(1.0, kPi / std::sqrt(5.0));
    KrausPair k = kraus_matrices(p);
    const double theta0 = 0.3;
    DiscretizedDistribution w = period2_binomial_distribution(2, theta0, p, 100000);
    CHECK(w.pr[bin_index(theta0, 100000)] == doctest::Approx(0.5));
    double fwd = gc_apply(k.gc_plus, gc_apply(k.gc_minus, theta0));
    double back = gc_apply(k.gc_minus, gc_apply(k.gc_plus, theta0));
    CHECK(w.pr[bin_index(fwd, 100000)] == doctest::Approx(0.25));
    CHECK(w.pr[bin_index(back, 100000)] == doctest::Approx(0.25));
    CHECK_THROWS_AS(period2_binomial_distribution(3, theta0, p, 100), InvalidArgument);

    double prev = 1.0;
    for (std::uint64_t n_t : {2, 10, 100, 1000, 10000}) {
        DiscretizedDistribution d = period2_binomial_distribution(n_t, theta0, p, 10000);
        CHECK(std::abs(d.total() - 1.0) < 1e-12);
        double central = 1.0 - mass_near(d, kPi / 2.0, 0.05) - mass_near(d, -kPi / 2.0, 0.05);
        CHECK(central <= prev + 1e-12);
        prev = central;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("period-2 MC agrees with the analytic peaks") {
    TrajectoryResult r = run_mc(build_params(1.0, kPi / std::sqrt(5.0)), 100000, 1000);
    CHECK(std::abs(mass_near(r.histogram, kPi / 2.0, 0.05) - 0.5) < 0.03);
    CHECK(std::abs(mass_near(r.histogram, -kPi / 2.0, 0.05) - 0.5) < 0.03);
}

TEST_CASE("projective series: decay, tail bound and refusals") {
    SetupParams p = projective_point();
    KrausPair k = kraus_matrices(p);
    AnalyticADF a = projective_series(p, 20);
    REQUIRE(a.peaks.size() == 21);
    CHECK(std::abs(total(a) - 1.0) < 1e-12);

    auto e = eigenangles(k.gc_minus);
    REQUIRE(e);
    int nz = std::abs(e->lambda[0]) > std::abs(e->lambda[1]) ? 0 : 1;
    CHECK(std::abs(wrap_angle(a.peaks[0].theta - e->theta[nz])) < 1e-9);

    double max_p = 0.0;
    for (std::size_t n = 0; n + 1 < a.peaks.size(); ++n) {
        double pp = gc_probability(k.gc_plus, a.peaks[n].theta);
        max_p = std::max(max_p, pp);
        CHECK(a.peaks[n + 1].weight == doctest::Approx(a.peaks[n].weight * pp).epsilon(1e-12));
        CHECK(a.peaks[n + 1].weight < a.peaks[n].weight);
        CHECK(std::abs(wrap_angle(a.peaks[n + 1].theta - gc_apply(k.gc_plus, a.peaks[n].theta))) < 1e-12);
    }
    CHECK(a.tail_mass == doctest::Approx(std::pow(max_p, 20.0)));
    CHECK(a.peaks.back().weight < a.tail_mass);

    CHECK_THROWS_AS(projective_series(build_params(2.92, 3.1)), NotProjective);
    CHECK_THROWS_AS(projective_series(find_double_projective(2, 2.2, 3.0)), NotProjective);
    CHECK_THROWS_AS(projective_series(p, 0), InvalidArgument);
}

TEST_CASE("projective series is a fixed point of one step up to the tail") {
    SetupParams p = projective_point();
    KrausPair k = kraus_matrices(p);
    AnalyticADF a = projective_series(p, 20);
    // Push each peak through both maps and compare the measures atom by atom.
    std::map<long long, double> before, after;
    auto key = [](double th) { return std::llround(wrap_angle(th) * 1e8); };
    for (const auto& pk : a.peaks) before[key(pk.theta)] += pk.weight;
    for (const auto& pk : a.peaks)
        for (Outcome mu : {Outcome::Minus, Outcome::Plus}) {
            double pr = gc_probability(k.gc(mu), pk.theta);
            if (pr <= 0.0) continue;
            after[key(gc_apply(k.gc(mu), pk.theta))] += pk.weight * pr;
        }
    double residual = 0.0;
    for (const auto& [th, w] : before) residual += std::abs(w - (after.count(th) ? after[th] : 0.0));
    for (const auto& [th, w] : after)
        if (!before.count(th)) residual += w;
    // Only the last satellite's click branch leaves the truncated set.
    double leak = a.peaks.back().weight * gc_probability(k.gc_plus, a.peaks.back().theta);
    CHECK(residual == doctest::Approx(2.0 * leak).epsilon(1e-6));
    CHECK(residual < a.tail_mass);
}

TEST_CASE("projective series agrees with MC") {
    SetupParams p = projective_point();
    DiscretizedDistribution series = projective_series_adf(p, 20, 1000);
    TrajectoryResult r = run_mc(p, 1000000, 1000);
    CHECK(chi2_distance(series, r.histogram) < 1e-2);
}

TEST_CASE("double-projective distribution") {
    SetupParams dp = find_double_projective(2, 2.2, 3.0);
    KrausPair k = kraus_matrices(dp);
    AnalyticADF a = double_projective_adf(dp);
    REQUIRE(a.peaks.size() == 2);
    CHECK(a.peaks[0].weight == 0.5);
    CHECK(a.peaks[1].weight == 0.5);
    double th_plus = a.peaks[0].theta, th_minus = a.peaks[1].theta;
    // Escape probability from either peak.
    CHECK(std::abs(born_probabilities(BlochState::on_gc(th_minus), k).first - a.cross_probability) < 1e-10);
    CHECK(std::abs(born_probabilities(BlochState::on_gc(th_plus), k).second - a.cross_probability) < 1e-10);
    CHECK_THROWS_AS(double_projective_adf(projective_point()), NotDoubleProjective);

    TrajectoryResult r = run_mc(dp, 100000, 1000);
    CHECK(std::abs(mass_near(r.histogram, th_plus, 0.05) - 0.5) < 0.03);
    CHECK(std::abs(mass_near(r.histogram, th_minus, 0.05) - 0.5) < 0.03);
}

TEST_CASE("rational approximation") {
    int n = 0, d = 0;
    CHECK(rational_approximation(0.5, 64, 1e-9, n, d));
    CHECK((n == 1 && d == 2));
    CHECK(rational_approximation(5.0 / 17.0, 64, 1e-9, n, d));
    CHECK((n == 5 && d == 17));
    CHECK_FALSE(rational_approximation(1.0 / kPi, 64, 1e-9, n, d));
    CHECK_FALSE(rational_approximation(1.0 / 67.0, 64, 1e-9, n, d));
}

TEST_CASE("shift properties") {
    SetupParams p = build_params(1.0, kPi);
    ShiftProperties s = shift_properties(p);
    CHECK(s.phi >= 0.0);
    CHECK(s.phi < kPi);
    KrausPair k = kraus_matrices(p);
    // The shifting map is a rigid rotation by 2 phi.
    const GcMap& g = k.gc(s.shifting);
    for (double th : {-2.5, -0.4, 0.0, 1.7}) {
        double step = std::abs(wrap_angle(gc_apply(g, th) - th));
        CHECK(step == doctest::Approx(std::abs(wrap_angle(2.0 * s.phi))).epsilon(1e-9));
    }
    // State-independent probabilities.
    double q = (p.M / p.Y) * (p.M / p.Y) * p.sY * p.sY;
    for (double th : {-2.5, 0.3, 2.0}) {
        auto [pp, pm] = born_probabilities(BlochState::from_angles(th, 0.4), k);
        CHECK(std::min(std::abs(pp - q), std::abs(pm - q)) < 1e-12);
    }
    CHECK_THROWS_AS(shift_properties(build_params(2.92, 3.1)), NotShiftCase);
}

TEST_CASE("shift orbits: commensurate vs incommensurate") {
    // Bisect M along MT = pi for phi = pi/5, a commensurate rotation.
    auto phi_of = [](double m) { return shift_properties(build_params(m, kPi / m)).phi; };
    double lo = 1.4, hi = 3.0, target = kPi / 5.0;
    double flo = phi_of(lo) - target;
    REQUIRE(flo * (phi_of(hi) - target) < 0.0);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi), fm = phi_of(mid) - target;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    SetupParams c = build_params(lo, kPi / lo);
    ShiftProperties sc = shift_properties(c);
    REQUIRE(sc.commensurate);
    CHECK(sc.denominator == 5);
    DiscretizedDistribution hc = run_mc(c, 200000, 1000).histogram;
    std::size_t occupied = 0;
    for (double x : hc.pr) occupied += x > 0.0;
    CHECK(occupied <= 2 * static_cast<std::size_t>(sc.denominator));

    SetupParams ic = build_params(1.0, kPi);
    REQUIRE_FALSE(shift_properties(ic).commensurate);
    DiscretizedDistribution hi_ = run_mc(ic, 1000000, 100).histogram;
    CHECK(support_fraction(hi_, 1.0) == 1.0);
}

TEST_CASE("bin_peaks conserves mass") {
    AnalyticADF a = projective_series(projective_point(), 20);
    DiscretizedDistribution w = bin_peaks(a, 1000);
    CHECK(std::abs(w.total() - 1.0) < 1e-12);
}
