#include "mq/core_maps.hpp"

#include <cmath>

#include "mq/errors.hpp"

namespace mq {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kTiny = 1e-300;

std::array<cplx, 2> mul(const Mat2& m, cplx x, cplx y) {
    return {m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y};
}

void require_invertible(const KrausPair& k, Outcome mu) {
    if (std::abs(k.determinant(mu)) < kProjectiveThreshold)
        throw NonInvertibleMap(mu == Outcome::Plus ? "click matrix is projective"
                                                   : "no-click matrix is projective");
}

}  // namespace

cplx det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

cplx trace(const Mat2& m) { return m[0][0] + m[1][1]; }

Mat2 matmul(const Mat2& a, const Mat2& b) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

Mat2 adjoint(const Mat2& m) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = std::conj(m[j][i]);
    return r;
}

BlochState BlochState::from_angles(double theta, double phi) {
    return {cplx(std::cos(theta / 2.0), 0.0), std::polar(1.0, phi) * std::sin(theta / 2.0)};
}

BlochState BlochState::on_gc(double theta) {
    return {cplx(std::cos(theta / 2.0), 0.0), cplx(0.0, std::sin(theta / 2.0))};
}

BlochState fix_phase(BlochState s) {
    double a = std::abs(s.alpha);
    if (a > kTiny) {
        cplx g = std::conj(s.alpha) / a;
        s.alpha = cplx(a, 0.0);
        s.beta *= g;
    } else {
        s.alpha = 0.0;
        s.beta = cplx(std::abs(s.beta), 0.0);
    }
    return s;
}

std::pair<double, double> BlochState::angles() const {
    BlochState f = fix_phase(*this);
    double b = std::abs(f.beta);
    double theta = 2.0 * std::atan2(b, f.alpha.real());
    double phi = b > 0.0 ? std::arg(f.beta) : kPi / 2.0;
    if (phi > kPi / 2.0) {
        phi -= kPi;
        theta = -theta;
    } else if (phi < -kPi / 2.0) {
        phi += kPi;
        theta = -theta;
    }
    return {wrap_angle(theta), phi};
}

double BlochState::gc_theta() const {
    BlochState f = fix_phase(*this);
    double b = std::abs(f.beta);
    double s = f.beta.imag() < 0.0 ? -b : b;
    return wrap_angle(2.0 * std::atan2(s, f.alpha.real()));
}

EigenData eigen2(const Mat2& m) {
    cplx tr = trace(m);
    cplx root = std::sqrt(tr * tr - 4.0 * det(m));
    EigenData e;
    e.values = {(tr + root) / 2.0, (tr - root) / 2.0};
    for (int eta = 0; eta < 2; ++eta) {
        cplx lam = e.values[eta];
        std::array<cplx, 2> v1{m[0][1], lam - m[0][0]};
        std::array<cplx, 2> v2{lam - m[1][1], m[1][0]};
        double n1 = std::norm(v1[0]) + std::norm(v1[1]);
        double n2 = std::norm(v2[0]) + std::norm(v2[1]);
        if (std::max(n1, n2) < 1e-28)
            e.vectors[eta] = eta == 0 ? std::array<cplx, 2>{1.0, 0.0} : std::array<cplx, 2>{0.0, 1.0};
        else
            e.vectors[eta] = n1 >= n2 ? v1 : v2;
    }
    return e;
}

GcMap gc_map_of(const Mat2& m) {
    // (cos t/2, i sin t/2) -> (m00 c + i m01 s, m10 c + i m11 s); the second
    // component divided by i gives the real row (-i m10, m11).
    std::array<cplx, 4> e{m[0][0], kI * m[0][1], -kI * m[1][0], m[1][1]};
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(e[i]) > std::abs(e[best])) best = i;
    cplx g = std::abs(e[best]) > 0.0 ? std::conj(e[best]) / std::abs(e[best]) : cplx(1.0);
    return {(e[0] * g).real(), (e[1] * g).real(), (e[2] * g).real(), (e[3] * g).real()};
}

KrausPair kraus_matrices(const SetupParams& p) {
    const double q = p.M / p.Y;
    const double r = 2.0 * p.gamma / p.Y;
    KrausPair k;
    k.m_minus = {{{p.cM * p.cY - q * p.sM * p.sY, -kI * r * p.cM * p.sY},
                  {-kI * r * p.cM * p.sY, p.cM * p.cY + q * p.sM * p.sY}}};
    k.m_plus = {{{-kI * (p.sM * p.cY + q * p.cM * p.sY), -r * p.sM * p.sY},
                 {-r * p.sM * p.sY, -kI * (p.sM * p.cY - q * p.cM * p.sY)}}};
    k.det_minus = det(k.m_minus);
    k.det_plus = det(k.m_plus);
    k.eig_minus = eigen2(k.m_minus);
    k.eig_plus = eigen2(k.m_plus);
    k.gc_minus = gc_map_of(k.m_minus);
    k.gc_plus = gc_map_of(k.m_plus);
    return k;
}

std::pair<double, double> born_probabilities(const BlochState& s, const KrausPair& k) {
    auto vp = mul(k.m_plus, s.alpha, s.beta);
    auto vm = mul(k.m_minus, s.alpha, s.beta);
    return {std::norm(vp[0]) + std::norm(vp[1]), std::norm(vm[0]) + std::norm(vm[1])};
}

std::pair<double, double> born_probabilities(const BlochState& s, const SetupParams& p) {
    return born_probabilities(s, kraus_matrices(p));
}

std::pair<BlochState, double> apply_kraus(const BlochState& s, Outcome mu, const KrausPair& k) {
    auto v = mul(k.matrix(mu), s.alpha, s.beta);
    double prob = std::norm(v[0]) + std::norm(v[1]);
    if (!(prob > kTiny)) throw ZeroProbabilityOutcome("outcome has zero Born probability");
    double n = std::sqrt(prob);
    return {fix_phase({v[0] / n, v[1] / n}), prob};
}

std::pair<BlochState, double> apply_kraus(const BlochState& s, Outcome mu, const SetupParams& p) {
    return apply_kraus(s, mu, kraus_matrices(p));
}

double gc_probability(const GcMap& g, double theta) {
    double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    double x = g.a * c + g.b * s, y = g.c * c + g.d * s;
    return x * x + y * y;
}

double gc_apply(const GcMap& g, double theta) {
    double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    double x = g.a * c + g.b * s, y = g.c * c + g.d * s;
    if (x * x + y * y < kTiny) {
        // theta sits in the kernel of a projector; use the range direction.
        if (g.a * g.a + g.c * g.c >= g.b * g.b + g.d * g.d) {
            x = g.a;
            y = g.c;
        } else {
            x = g.b;
            y = g.d;
        }
        if (x * x + y * y < kTiny) return wrap_angle(theta);
    }
    return wrap_angle(2.0 * std::atan2(y, x));
}

double gc_inverse(const GcMap& g, double theta) {
    double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return wrap_angle(2.0 * std::atan2(-g.c * c + g.a * s, g.d * c - g.b * s));
}

double gc_slope(const GcMap& g, double theta) {
    double p = gc_probability(g, theta);
    return g.det() / p;
}

double theta_map(double theta, Outcome mu, const KrausPair& k) { return gc_apply(k.gc(mu), theta); }

double theta_map(double theta, Outcome mu, const SetupParams& p) {
    return theta_map(theta, mu, kraus_matrices(p));
}

double theta_inverse(double theta, Outcome mu, const KrausPair& k) {
    require_invertible(k, mu);
    return gc_inverse(k.gc(mu), theta);
}

double theta_inverse(double theta, Outcome mu, const SetupParams& p) {
    return theta_inverse(theta, mu, kraus_matrices(p));
}

double theta_map_derivative(double theta, Outcome mu, const KrausPair& k) {
    return gc_slope(k.gc(mu), theta);
}

double theta_map_derivative(double theta, Outcome mu, const SetupParams& p) {
    return theta_map_derivative(theta, mu, kraus_matrices(p));
}

std::optional<Eigenangles> eigenangles(const GcMap& g) {
    double tr = g.trace();
    double disc = tr * tr - 4.0 * g.det();
    if (disc < 0.0) return std::nullopt;
    double root = std::sqrt(disc);
    Eigenangles e;
    e.lambda = {(tr + root) / 2.0, (tr - root) / 2.0};
    for (int eta = 0; eta < 2; ++eta) {
        double lam = e.lambda[eta];
        double x1 = g.b, y1 = lam - g.a;
        double x2 = lam - g.d, y2 = g.c;
        double n1 = x1 * x1 + y1 * y1, n2 = x2 * x2 + y2 * y2;
        double x, y;
        if (std::max(n1, n2) < 1e-28) {
            x = eta == 0 ? 1.0 : 0.0;
            y = eta == 0 ? 0.0 : 1.0;
        } else if (n1 >= n2) {
            x = x1;
            y = y1;
        } else {
            x = x2;
            y = y2;
        }
        e.theta[eta] = wrap_angle(2.0 * std::atan2(y, x));
    }
    return e;
}

std::optional<Eigenangles> eigenangles(const SetupParams& p, Outcome mu) {
    return eigenangles(kraus_matrices(p).gc(mu));
}

int eigenvector_configuration(const SetupParams& p) {
    KrausPair k = kraus_matrices(p);
    bool minus = eigenangles(k.gc_minus).has_value();
    bool plus = eigenangles(k.gc_plus).has_value();
    return (minus ? 1 : 0) + (plus ? 2 : 0);
}

std::array<double, 3> bloch_vector(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace mq
