#include "mq/distribution.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "mq/errors.hpp"

namespace mq {

DiscretizedDistribution DiscretizedDistribution::uniform(std::size_t n) {
    DiscretizedDistribution w(n);
    for (auto& x : w.pr) x = 1.0 / static_cast<double>(n);
    return w;
}

DiscretizedDistribution DiscretizedDistribution::delta(std::size_t n, double theta) {
    DiscretizedDistribution w(n);
    w.pr[bin_index(theta, n)] = 1.0;
    return w;
}

double DiscretizedDistribution::total() const { return std::accumulate(pr.begin(), pr.end(), 0.0); }

void DiscretizedDistribution::normalize() {
    double s = total();
    if (s > 0.0)
        for (auto& x : pr) x /= s;
}

std::size_t bin_index(double theta, std::size_t n) {
    double t = wrap_angle(theta);
    auto i = static_cast<long long>(std::floor((t + kPi) / kTwoPi * static_cast<double>(n)));
    if (i < 0) i = 0;
    if (i >= static_cast<long long>(n)) i = static_cast<long long>(n) - 1;
    return static_cast<std::size_t>(i);
}

void write_csv(std::ostream& os, const DiscretizedDistribution& w) {
    os << "theta,weight\n";
    char buf[64];
    for (std::size_t i = 0; i < w.size(); ++i) {
        int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", w.center(i), w.pr[i]);
        os.write(buf, len);
    }
}

void write_csv(const std::string& path, const DiscretizedDistribution& w) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path);
    write_csv(os, w);
}

DiscretizedDistribution read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("theta,weight", 0) != 0)
        throw Error("distribution CSV must start with header theta,weight");
    DiscretizedDistribution w;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw Error("malformed CSV row: " + line);
        w.pr.push_back(std::stod(line.substr(comma + 1)));
    }
    return w;
}

DiscretizedDistribution read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    return read_csv(is);
}

}  // namespace mq
