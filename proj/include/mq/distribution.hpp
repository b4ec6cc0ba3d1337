#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mq/params.hpp"

namespace mq {

// N-cell probability vector over the Grand Circle. Cell i covers
// [-pi + i*dtheta, -pi + (i+1)*dtheta).
struct DiscretizedDistribution {
    std::vector<double> pr;

    DiscretizedDistribution() = default;
    explicit DiscretizedDistribution(std::size_t n) : pr(n, 0.0) {}

    static DiscretizedDistribution uniform(std::size_t n);
    static DiscretizedDistribution delta(std::size_t n, double theta);

    std::size_t size() const { return pr.size(); }
    double delta_theta() const { return kTwoPi / static_cast<double>(pr.size()); }
    double center(std::size_t i) const { return -kPi + (static_cast<double>(i) + 0.5) * delta_theta(); }
    double total() const;
    void normalize();
};

std::size_t bin_index(double theta, std::size_t n);

// CSV with header `theta,weight`, theta at cell centers, 17 significant digits.
void write_csv(std::ostream& os, const DiscretizedDistribution& w);
void write_csv(const std::string& path, const DiscretizedDistribution& w);
DiscretizedDistribution read_csv(std::istream& is);
DiscretizedDistribution read_csv(const std::string& path);

}  // namespace mq
