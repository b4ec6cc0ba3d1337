#pragma once

namespace mq {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Determinant magnitude below which a Kraus matrix is treated as a projector.
inline constexpr double kProjectiveThreshold = 1e-12;

struct SetupParams {
    double M = 0.0;
    double T = 0.0;
    double gamma = 0.0;
    double Y = 0.0;
    double cM = 1.0, sM = 0.0;  // cos, sin of MT/2
    double cY = 1.0, sY = 0.0;  // cos, sin of YT/2
};

// Throws InvalidArgument unless M > 0, T >= 0, gamma >= 0, all finite.
SetupParams build_params(double M, double T, double gamma = 1.0);

// Wraps an angle into [-pi, pi).
double wrap_angle(double theta);

}  // namespace mq
