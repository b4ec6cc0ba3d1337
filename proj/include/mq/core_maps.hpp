#pragma once

#include <array>
#include <complex>
#include <optional>
#include <utility>

#include "mq/params.hpp"

namespace mq {

using cplx = std::complex<double>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;

enum class Outcome { Minus, Plus };  // no-click, click

inline Outcome other(Outcome mu) { return mu == Outcome::Plus ? Outcome::Minus : Outcome::Plus; }
inline int index_of(Outcome mu) { return mu == Outcome::Plus ? 1 : 0; }

cplx det(const Mat2& m);
cplx trace(const Mat2& m);
Mat2 matmul(const Mat2& a, const Mat2& b);
Mat2 adjoint(const Mat2& m);

// Action of a Kraus matrix on Grand Circle states written as a real 2x2
// matrix on (cos(theta/2), sin(theta/2)), after dividing out a constant phase.
struct GcMap {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
};

struct EigenData {
    std::array<cplx, 2> values;                 // eta = +1, -1
    std::array<std::array<cplx, 2>, 2> vectors; // not normalized
};

struct KrausPair {
    Mat2 m_minus{};
    Mat2 m_plus{};
    cplx det_minus, det_plus;
    EigenData eig_minus, eig_plus;
    GcMap gc_minus, gc_plus;

    const Mat2& matrix(Outcome mu) const { return mu == Outcome::Plus ? m_plus : m_minus; }
    const GcMap& gc(Outcome mu) const { return mu == Outcome::Plus ? gc_plus : gc_minus; }
    cplx determinant(Outcome mu) const { return mu == Outcome::Plus ? det_plus : det_minus; }
    const EigenData& eigen(Outcome mu) const { return mu == Outcome::Plus ? eig_plus : eig_minus; }
};

struct BlochState {
    cplx alpha{1.0, 0.0};
    cplx beta{0.0, 0.0};

    static BlochState from_angles(double theta, double phi);
    static BlochState on_gc(double theta);

    double norm2() const { return std::norm(alpha) + std::norm(beta); }
    // theta in [-pi, pi), phi in [-pi/2, pi/2].
    std::pair<double, double> angles() const;
    double theta() const { return angles().first; }
    double phi() const { return angles().second; }
    // Angle on the Grand Circle keeping |alpha| and the sign of Im(beta/alpha).
    double gc_theta() const;
};

// Rotates the global phase so alpha is real and nonnegative (beta real-positive if alpha = 0).
BlochState fix_phase(BlochState s);

KrausPair kraus_matrices(const SetupParams& p);

// Eigenvalues (Tr +- sqrt(Tr^2 - 4 det))/2 and eigenvectors of a 2x2 matrix.
EigenData eigen2(const Mat2& m);
GcMap gc_map_of(const Mat2& m);

// Returns (P+, P-).
std::pair<double, double> born_probabilities(const BlochState& s, const KrausPair& k);
std::pair<double, double> born_probabilities(const BlochState& s, const SetupParams& p);

// Returns the normalized, phase-fixed post-measurement state and the Born probability.
std::pair<BlochState, double> apply_kraus(const BlochState& s, Outcome mu, const KrausPair& k);
std::pair<BlochState, double> apply_kraus(const BlochState& s, Outcome mu, const SetupParams& p);

// Grand Circle maps on the Bloch angle theta in [-pi, pi).
double gc_probability(const GcMap& g, double theta);
double gc_apply(const GcMap& g, double theta);
double gc_inverse(const GcMap& g, double theta);
double gc_slope(const GcMap& g, double theta);

double theta_map(double theta, Outcome mu, const KrausPair& k);
double theta_map(double theta, Outcome mu, const SetupParams& p);
double theta_inverse(double theta, Outcome mu, const KrausPair& k);
double theta_inverse(double theta, Outcome mu, const SetupParams& p);
double theta_map_derivative(double theta, Outcome mu, const KrausPair& k);
double theta_map_derivative(double theta, Outcome mu, const SetupParams& p);

struct Eigenangles {
    std::array<double, 2> theta;   // eta = +1, -1
    std::array<double, 2> lambda;  // eigenvalues of the real GC action
    int dominant() const { return std::abs(lambda[0]) >= std::abs(lambda[1]) ? 0 : 1; }
};

std::optional<Eigenangles> eigenangles(const GcMap& g);
std::optional<Eigenangles> eigenangles(const SetupParams& p, Outcome mu);

// 0: no GC eigenvectors, 1: only M-, 2: only M+, 3: both.
int eigenvector_configuration(const SetupParams& p);

std::array<double, 3> bloch_vector(double theta, double phi);

}  // namespace mq
