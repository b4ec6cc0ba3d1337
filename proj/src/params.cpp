#include "mq/params.hpp"

#include <cmath>
#include <string>

#include "mq/errors.hpp"

namespace mq {

SetupParams build_params(double M, double T, double gamma) {
    if (!std::isfinite(M) || !std::isfinite(T) || !std::isfinite(gamma))
        throw InvalidArgument("parameters must be finite");
    if (!(M > 0.0)) throw InvalidArgument("M must be positive, got " + std::to_string(M));
    if (T < 0.0) throw InvalidArgument("T must be nonnegative, got " + std::to_string(T));
    if (gamma < 0.0) throw InvalidArgument("gamma must be nonnegative, got " + std::to_string(gamma));

    SetupParams p;
    p.M = M;
    p.T = T;
    p.gamma = gamma;
    p.Y = std::sqrt(M * M + 4.0 * gamma * gamma);
    p.cM = std::cos(M * T / 2.0);
    p.sM = std::sin(M * T / 2.0);
    p.cY = std::cos(p.Y * T / 2.0);
    p.sY = std::sin(p.Y * T / 2.0);
    return p;
}

double wrap_angle(double theta) {
    double t = theta - kTwoPi * std::floor((theta + kPi) / kTwoPi);
    if (t >= kPi) t -= kTwoPi;
    if (t < -kPi) t = -kPi;
    return t;
}

}  // namespace mq
