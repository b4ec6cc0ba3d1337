#include "mq/markov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "mq/errors.hpp"
#include "mq/kernels.hpp"
#include "mq/parallel.hpp"

namespace mq {

namespace {

// Overlaps smaller than this fraction of a cell are dropped.
constexpr double kMinOverlap = 1e-15;

struct Entry {
    std::uint32_t col;
    double val;
};

struct MapTable {
    GcMap g;
    double orientation = 1.0;
    std::vector<double> f_at_boundary;  // F(-pi + j*dtheta), j = 0..N
    std::vector<double> prob_at_center;
};

MapTable tabulate(const GcMap& g, std::size_t n) {
    MapTable t;
    t.g = g;
    t.orientation = g.det() > 0.0 ? 1.0 : -1.0;
    const double dt = kTwoPi / static_cast<double>(n);
    t.f_at_boundary.resize(n + 1);
    t.prob_at_center.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        t.f_at_boundary[j] = gc_inverse(g, -kPi + static_cast<double>(j) * dt);
        t.prob_at_center[j] = gc_probability(g, -kPi + (static_cast<double>(j) + 0.5) * dt);
    }
    t.f_at_boundary[n] = t.f_at_boundary[0];
    return t;
}

double mod_two_pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

// Preimage arc of cell i as (start, length) in radians.
std::pair<double, double> preimage_arc(const MapTable& t, std::size_t i) {
    double f0 = t.f_at_boundary[i], f1 = t.f_at_boundary[i + 1];
    double start = t.orientation > 0.0 ? f0 : f1;
    double len = mod_two_pi(t.orientation > 0.0 ? f1 - f0 : f0 - f1);
    // A tiny arc can round to a full turn.
    if (len > kTwoPi - 1e-9) len = 0.0;
    return {start, len};
}

void check_monotone(const MapTable& t, std::size_t i, std::size_t n) {
    const double dt = kTwoPi / static_cast<double>(n);
    auto [start, len] = preimage_arc(t, i);
    double prev = 0.0;
    for (int s = 1; s <= 8; ++s) {
        double theta = -kPi + (static_cast<double>(i) + s / 9.0) * dt;
        double off = mod_two_pi(gc_inverse(t.g, theta) - start);
        if (t.orientation < 0.0) off = len - off;
        if (off < prev - 1e-12 || off > len + 1e-12)
            throw Error("preimage of cell " + std::to_string(i) + " is not a monotone arc");
        prev = off;
    }
}

void append_arc(const MapTable& t, std::size_t i, std::size_t n, std::vector<Entry>& out) {
    auto [start, len] = preimage_arc(t, i);
    const double cells = static_cast<double>(n);
    double pos = (wrap_angle(start) + kPi) / kTwoPi * cells;
    double remaining = len / kTwoPi * cells;
    while (remaining > 0.0) {
        double base = std::floor(pos);
        double seg = std::min(base + 1.0 - pos, remaining);
        if (seg <= 0.0) {
            pos = base + 1.0;
            continue;
        }
        auto k = static_cast<std::size_t>(base);
        if (k >= n) k %= n;
        if (seg >= kMinOverlap) out.push_back({static_cast<std::uint32_t>(k), t.prob_at_center[k] * seg});
        pos += seg;
        remaining -= seg;
        if (pos >= cells) pos -= cells;
    }
}

}  // namespace

void SparseMarkov::multiply(const double* x, double* y) const {
    kernels::csr_matvec(row_ptr.data(), col.data(), val.data(), x, y, n);
}

std::vector<double> SparseMarkov::column_sums() const {
    std::vector<double> s(n, 0.0);
    for (std::size_t j = 0; j < val.size(); ++j) s[col[j]] += val[j];
    return s;
}

SparseMarkov SparseMarkov::from_dense(const std::vector<std::vector<double>>& dense) {
    SparseMarkov m;
    m.n = dense.size();
    m.row_ptr.push_back(0);
    for (const auto& row : dense) {
        if (row.size() != m.n) throw InvalidArgument("dense matrix must be square");
        for (std::size_t k = 0; k < m.n; ++k)
            if (row[k] != 0.0) {
                m.col.push_back(static_cast<std::uint32_t>(k));
                m.val.push_back(row[k]);
            }
        m.row_ptr.push_back(m.val.size());
    }
    return m;
}

SparseMarkov build_markov(const SetupParams& p, std::size_t n, const BuildOptions& opt) {
    if (n < 2 || n > 100000000) throw InvalidArgument("cell count must be in [2, 1e8]");
    KrausPair k = kraus_matrices(p);
    if (std::abs(k.det_minus) < kProjectiveThreshold || std::abs(k.det_plus) < kProjectiveThreshold)
        throw ProjectiveParameters("a Kraus map is projective; use the analytic series");

    const MapTable tables[2] = {tabulate(k.gc_minus, n), tabulate(k.gc_plus, n)};

    std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, n / 4096));
    std::vector<std::vector<std::uint64_t>> counts(workers);
    std::vector<std::vector<Entry>> chunks(workers);
    parallel_chunks(n, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
        std::vector<Entry> row;
        auto& out = chunks[c];
        auto& cnt = counts[c];
        out.reserve((end - begin) * 5);
        for (std::size_t i = begin; i < end; ++i) {
            row.clear();
            for (const auto& t : tables) {
                if (opt.check_monotone) check_monotone(t, i, n);
                append_arc(t, i, n, row);
            }
            std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
            std::size_t before = out.size();
            for (const auto& e : row) {
                if (out.size() > before && out.back().col == e.col)
                    out.back().val += e.val;
                else
                    out.push_back(e);
            }
            cnt.push_back(out.size() - before);
        }
    });

    SparseMarkov m;
    m.n = n;
    m.row_ptr.reserve(n + 1);
    m.row_ptr.push_back(0);
    std::size_t total = 0;
    for (const auto& c : chunks) total += c.size();
    m.col.reserve(total);
    m.val.reserve(total);
    for (std::size_t c = 0; c < workers; ++c) {
        for (auto len : counts[c]) m.row_ptr.push_back(m.row_ptr.back() + len);
        for (const auto& e : chunks[c]) {
            m.col.push_back(e.col);
            m.val.push_back(e.val);
        }
    }
    return m;
}

SolveResult power_iterate(const SparseMarkov& m, const DiscretizedDistribution& init, std::size_t max_iters,
                          double tol) {
    if (init.size() != m.n) throw GridMismatch("initial distribution size differs from matrix size");
    if (tol <= 0.0) tol = 1e-12 * static_cast<double>(m.n);
    SolveResult res{init, {}};
    std::vector<double> y(m.n);
    auto& x = res.w.pr;
    for (std::size_t it = 0; it < max_iters; ++it) {
        m.multiply(x.data(), y.data());
        kernels::scale(y.data(), m.n, 1.0 / kernels::sum(y.data(), m.n));
        double r = kernels::l1_diff(x.data(), y.data(), m.n);
        x.swap(y);
        res.report.iterations = it + 1;
        res.report.residual = r;
        if (r < tol) {
            res.report.converged = true;
            return res;
        }
    }
    // Check for a two-cycle: M^2 x == x while M x != x.
    std::vector<double> z(m.n);
    m.multiply(x.data(), y.data());
    m.multiply(y.data(), z.data());
    kernels::scale(z.data(), m.n, 1.0 / kernels::sum(z.data(), m.n));
    res.report.cycling = kernels::l1_diff(x.data(), z.data(), m.n) < tol;
    return res;
}

GapEstimate eigen_gap(const SparseMarkov& m, const DiscretizedDistribution& stationary, std::size_t iters) {
    if (stationary.size() != m.n) throw GridMismatch("stationary distribution size differs from matrix size");
    const std::size_t n = m.n;
    const auto& s = stationary.pr;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(n), y(n), zeros(n, 0.0);
    auto l1 = [&](const std::vector<double>& v) { return kernels::l1_diff(v.data(), zeros.data(), n); };
    for (auto& v : x) v = u(rng);
    // Deflated operator B x = M x - s (1^T x); start in the zero-sum subspace.
    auto deflate = [&](std::vector<double>& v) {
        double t = kernels::sum(v.data(), n);
        for (std::size_t i = 0; i < n; ++i) v[i] -= s[i] * t;
    };
    deflate(x);
    double norm = l1(x);
    if (norm == 0.0) return {1.0, 0};
    kernels::scale(x.data(), n, 1.0 / norm);

    GapEstimate est;
    double log_sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t it = 0; it < iters; ++it) {
        m.multiply(x.data(), y.data());
        deflate(y);
        double g = l1(y);
        est.iterations = it + 1;
        if (!(g > 1e-300)) return {1.0, est.iterations};
        kernels::scale(y.data(), n, 1.0 / g);
        x.swap(y);
        if (it >= iters / 2) {
            log_sum += std::log(g);
            ++counted;
        }
    }
    double lambda2 = counted > 0 ? std::exp(log_sum / static_cast<double>(counted)) : 1.0;
    est.gap = std::clamp(1.0 - lambda2, 0.0, 1.0);
    return est;
}

DiscretizedDistribution propagate(const SparseMarkov& m, const DiscretizedDistribution& w0, std::size_t steps) {
    if (w0.size() != m.n) throw GridMismatch("distribution size differs from matrix size");
    DiscretizedDistribution w = w0;
    std::vector<double> y(m.n);
    for (std::size_t j = 0; j < steps; ++j) {
        m.multiply(w.pr.data(), y.data());
        w.pr.swap(y);
    }
    return w;
}

DiscretizedDistribution coarse_grain(const DiscretizedDistribution& w, std::size_t n_g) {
    if (n_g == 0 || w.size() % n_g != 0)
        throw IndivisibleGrid("coarse grid " + std::to_string(n_g) + " does not divide " + std::to_string(w.size()));
    const std::size_t block = w.size() / n_g;
    DiscretizedDistribution out(n_g);
    for (std::size_t g = 0; g < n_g; ++g) out.pr[g] = kernels::sum(w.pr.data() + g * block, block);
    return out;
}

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        std::reverse(b, b + sizeof(T));
        os.write(reinterpret_cast<const char*>(b), sizeof(T));
    } else {
        os.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
}

template <typename T>
T get(std::istream& is) {
    T v;
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error("truncated MQME stream");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

void write_mqme(std::ostream& os, const SparseMarkov& m) {
    os.write("MQME", 4);
    put<std::uint32_t>(os, kMqmeVersion);
    put<std::uint64_t>(os, m.n);
    for (auto v : m.row_ptr) put(os, v);
    for (auto v : m.col) put(os, v);
    for (auto v : m.val) put(os, v);
}

void write_mqme(const std::string& path, const SparseMarkov& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path);
    write_mqme(os, m);
}

SparseMarkov read_mqme(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "MQME", 4) != 0) throw Error("not an MQME stream");
    auto version = get<std::uint32_t>(is);
    if (version != kMqmeVersion) throw Error("unsupported MQME version " + std::to_string(version));
    SparseMarkov m;
    m.n = get<std::uint64_t>(is);
    m.row_ptr.resize(m.n + 1);
    for (auto& v : m.row_ptr) v = get<std::uint64_t>(is);
    std::size_t nnz = m.row_ptr.back();
    m.col.resize(nnz);
    m.val.resize(nnz);
    for (auto& v : m.col) v = get<std::uint32_t>(is);
    for (auto& v : m.val) v = get<double>(is);
    return m;
}

SparseMarkov read_mqme(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    return read_mqme(is);
}

}  // namespace mq
