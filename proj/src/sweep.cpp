#include "mq/sweep.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "mq/errors.hpp"
#include "mq/json_writer.hpp"
#include "mq/parallel.hpp"
#include "mq/trajectory.hpp"

namespace mq {

SweepMode parse_mode(const std::string& s) {
    if (s == "me") return SweepMode::Me;
    if (s == "mc") return SweepMode::Mc;
    if (s == "both") return SweepMode::Both;
    throw InvalidArgument("mode must be one of me, mc, both; got " + s);
}

std::string to_string(SweepMode m) {
    switch (m) {
        case SweepMode::Me:
            return "me";
        case SweepMode::Mc:
            return "mc";
        case SweepMode::Both:
            return "both";
    }
    return "me";
}

void SweepConfig::validate() const {
    if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be nonnegative");
    if (m_count < 1 || t_count < 1) throw InvalidArgument("grid counts must be at least 1");
    if (!(m_lo > 0.0) || m_hi < m_lo) throw InvalidArgument("M range must be positive and ordered");
    if (!(t_lo >= 0.0) || t_hi < t_lo) throw InvalidArgument("T range must be nonnegative and ordered");
    if (cells < 2) throw InvalidArgument("cells must be at least 2");
    if (me_max_iters < 1) throw InvalidArgument("me_max_iters must be at least 1");
    if (mode != SweepMode::Me && mc_steps < 1) throw InvalidArgument("mc_steps must be at least 1");
    if (!(margin >= 0.0)) throw InvalidArgument("margin must be nonnegative");
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
}

std::string key_of(double M, double T) { return format_double(M) + "," + format_double(T); }

GridPointResult run_point(double M, double T, const SweepConfig& cfg, std::uint64_t index,
                          DiscretizedDistribution* distribution_out) {
    GridPointResult r;
    r.index = index;
    r.M = M;
    r.T = T;
    try {
        SetupParams p = build_params(M, T, cfg.gamma);
        r.tag = classify(p);
        r.lines = line_distances(p);
        r.near_special = r.lines.nearest() < cfg.margin;
        if (r.near_special) r.warnings.push_back("near-special:" + to_string(r.lines.nearest_kind()));

        SpecialKind k = r.tag.kind;
        // Tagged projective but above the rank-one threshold: the ME matrix is still invertible.
        const bool exact_minus = r.tag.all.det_minus < kProjectiveThreshold;
        const bool exact_plus = r.tag.all.det_plus < kProjectiveThreshold;
        if ((k == SpecialKind::ProjectiveMinus && !exact_minus) || (k == SpecialKind::ProjectivePlus && !exact_plus) ||
            (k == SpecialKind::DoubleProjective && !(exact_minus && exact_plus))) {
            r.warnings.push_back("near-projective");
            k = SpecialKind::Generic;
        }
        bool degenerate = k == SpecialKind::Frozen || k == SpecialKind::Shift ||
                          (r.near_special && (r.lines.nearest_kind() == SpecialKind::Frozen ||
                                              r.lines.nearest_kind() == SpecialKind::Shift));
        if (degenerate) r.warnings.push_back("degenerate-stationary");

        DiscretizedDistribution w;
        std::optional<DiscretizedDistribution> me_w;
        if (k == SpecialKind::GammaZero) {
            r.path = "gamma_zero";
            w = bin_peaks(gamma_zero_adf(cfg.mc_theta0, p.M * p.T), cfg.cells);
        } else if (k == SpecialKind::ProjectiveMinus || k == SpecialKind::ProjectivePlus) {
            r.path = "projective_series";
            w = projective_series_adf(p, 20, cfg.cells);
        } else if (k == SpecialKind::DoubleProjective) {
            r.path = "double_projective";
            w = bin_peaks(double_projective_adf(p), cfg.cells);
        } else if (k == SpecialKind::Period2) {
            r.path = "period2";
            w = bin_peaks(period2_adf(), cfg.cells);
        } else if (cfg.mode != SweepMode::Mc) {
            r.path = "me";
            SparseMarkov m = build_markov(p, cfg.cells);
            SolveResult s = power_iterate(m, DiscretizedDistribution::uniform(cfg.cells), cfg.me_max_iters);
            if (!s.report.converged) r.warnings.push_back(s.report.cycling ? "me-cycling" : "me-not-converged");
            if (cfg.eigen_gap && s.report.residual < 1e-8) s.report.eigen_gap = eigen_gap(m, s.w).gap;
            r.solve = s.report;
            r.ergodicity = analyze_ergodicity(p, m);
            w = std::move(s.w);
            me_w = w;
        } else {
            r.path = "mc";
        }
        if (r.path != "me") r.ergodicity_reason = r.path == "mc" ? "requires me mode" : "analytic path";

        if (cfg.mode != SweepMode::Me && (r.path == "me" || r.path == "mc")) {
            TrajectoryConfig tc;
            tc.n_steps = cfg.mc_steps + cfg.mc_burn_in;
            tc.burn_in = cfg.mc_burn_in;
            tc.seed = cfg.seed ^ index;
            tc.initial_state = BlochState::on_gc(cfg.mc_theta0);
            tc.bins = cfg.cells;
            TrajectoryResult mc = simulate(tc, p);
            McSummary ms;
            ms.steps = cfg.mc_steps;
            ms.clicks = mc.clicks;
            if (me_w) ms.chi2_vs_me = chi2_distance(*me_w, mc.histogram);
            r.mc = ms;
            if (r.path == "mc") w = std::move(mc.histogram);
        }

        r.indicators = compute_indicators(w);
        if (r.mc && r.mc->chi2_vs_me) {
            r.indicators.chi2.value = r.mc->chi2_vs_me;
            r.indicators.chi2.reason.clear();
        }
        if (!cfg.distribution_dir.empty()) {
            std::filesystem::create_directories(cfg.distribution_dir);
            r.distribution_file =
                (std::filesystem::path(cfg.distribution_dir) / ("point_" + std::to_string(index) + ".csv")).string();
            write_csv(r.distribution_file, w);
        }
        if (distribution_out) *distribution_out = std::move(w);
    } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
    }
    return r;
}

namespace {

template <typename T>
void maybe(JsonWriter& j, const Maybe<T>& m) {
    if (m.value)
        j.value(*m.value);
    else
        j.null();
}

}  // namespace

std::string to_json(const GridPointResult& r) {
    JsonWriter j;
    j.begin_object();
    j.key("index").value(r.index);
    j.key("M").value(r.M);
    j.key("T").value(r.T);
    j.key("status").value(r.failed ? "failed" : "ok");
    j.key("error").value(r.error);
    j.key("tag").begin_object();
    j.key("kind").value(to_string(r.tag.kind));
    j.key("order").value(r.tag.order);
    j.key("distance").value(r.tag.distance);
    j.end_object();
    j.key("distances").begin_object();
    j.key("frozen").value(r.tag.all.frozen);
    j.key("shift").value(r.tag.all.shift);
    j.key("period2").value(r.tag.all.period2);
    j.key("det_minus").value(r.tag.all.det_minus);
    j.key("det_plus").value(r.tag.all.det_plus);
    j.end_object();
    j.key("line_distances").begin_object();
    j.key("frozen").value(r.lines.frozen);
    j.key("shift").value(r.lines.shift);
    j.key("period2").value(r.lines.period2);
    j.key("projective_minus").value(r.lines.projective_minus);
    j.key("projective_plus").value(r.lines.projective_plus);
    j.end_object();
    j.key("near_special").value(r.near_special);
    j.key("warnings").begin_array();
    for (const auto& w : r.warnings) j.value(w);
    j.end_array();
    j.key("path").value(r.path);

    j.key("solve");
    if (r.solve) {
        j.begin_object();
        j.key("iterations").value(static_cast<std::uint64_t>(r.solve->iterations));
        j.key("residual").value(r.solve->residual);
        j.key("converged").value(r.solve->converged);
        j.key("cycling").value(r.solve->cycling);
        j.key("eigen_gap");
        if (r.solve->eigen_gap >= 0.0)
            j.value(r.solve->eigen_gap);
        else
            j.null();
        j.end_object();
    } else {
        j.null();
    }

    const auto& ind = r.indicators;
    j.key("indicators").begin_object();
    j.key("pr");
    maybe(j, ind.pr);
    j.key("zeta");
    maybe(j, ind.zeta);
    j.key("support");
    maybe(j, ind.support);
    j.key("category");
    maybe(j, ind.category);
    j.key("h_max");
    maybe(j, ind.h_max);
    j.key("h_0");
    maybe(j, ind.h_0);
    j.key("fractal_dim");
    maybe(j, ind.fractal_dim);
    j.key("chi2");
    maybe(j, ind.chi2);
    j.end_object();

    j.key("null_reasons").begin_object();
    auto reason = [&](const char* name, const auto& m) {
        if (m.value && std::isfinite(static_cast<double>(*m.value))) return;
        j.key(name).value(m.value ? std::string("non-finite") : (m.reason.empty() ? "not computed" : m.reason));
    };
    if (!r.failed) {
        reason("pr", ind.pr);
        reason("zeta", ind.zeta);
        reason("support", ind.support);
        reason("category", ind.category);
        reason("h_max", ind.h_max);
        reason("h_0", ind.h_0);
        reason("fractal_dim", ind.fractal_dim);
        reason("chi2", ind.chi2);
        if (!r.solve) j.key("solve").value(r.path == "me" ? "not computed" : "analytic or mc path");
        if (!r.ergodicity) j.key("ergodicity").value(r.ergodicity_reason);
    }
    j.end_object();
    j.key("caveat").value(r.near_special || r.tag.kind != SpecialKind::Generic);

    j.key("ergodicity");
    if (r.ergodicity) {
        j.begin_object();
        j.key("scc_count").value(static_cast<std::uint64_t>(r.ergodicity->scc_count));
        j.key("ergodic").value(r.ergodicity->ergodic);
        j.key("leaves").begin_array();
        for (const auto& leaf : r.ergodicity->leaf_subsets)
            for (const auto& iv : leaf) j.begin_array().value(iv.lo).value(iv.hi).end_array();
        j.end_array();
        j.key("localized").value(r.ergodicity->localized);
        j.end_object();
    } else {
        j.null();
    }

    j.key("mc");
    if (r.mc) {
        j.begin_object();
        j.key("steps").value(r.mc->steps);
        j.key("clicks").value(r.mc->clicks);
        j.key("chi2_vs_me");
        if (r.mc->chi2_vs_me)
            j.value(*r.mc->chi2_vs_me);
        else
            j.null();
        j.end_object();
    } else {
        j.null();
    }
    j.key("distribution_file").value(r.distribution_file);
    j.end_object();
    return j.str();
}

namespace {

std::set<std::string> existing_keys(const std::string& path) {
    std::set<std::string> keys;
    std::ifstream is(path);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            keys.insert(key_of(j.at("M").get<double>(), j.at("T").get<double>()));
        } catch (const std::exception&) {
            // A torn final line from an interrupted run is recomputed.
        }
    }
    return keys;
}

// Drops a trailing partial line so appends start on a fresh line.
void repair_tail(const std::string& path) {
    std::error_code ec;
    auto size = std::filesystem::file_size(path, ec);
    if (ec || size == 0) return;
    std::string content;
    {
        std::ifstream is(path, std::ios::binary);
        content.assign(std::istreambuf_iterator<char>(is), {});
    }
    if (content.back() == '\n') return;
    auto nl = content.rfind('\n');
    std::filesystem::resize_file(path, nl == std::string::npos ? 0 : nl + 1);
}

}  // namespace

SweepSummary run_points(const std::vector<std::pair<double, double>>& points, const SweepConfig& cfg,
                        const PointSink& sink) {
    cfg.validate();
    SweepSummary summary;
    std::set<std::string> done;
    std::ofstream out;
    if (!cfg.output.empty()) {
        repair_tail(cfg.output);
        done = existing_keys(cfg.output);
        out.open(cfg.output, std::ios::app);
        if (!out) throw Error("cannot open " + cfg.output);
    }
    std::vector<std::size_t> todo;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::string k = key_of(points[i].first, points[i].second);
        if (done.count(k) || !seen.insert(k).second)
            ++summary.skipped;
        else
            todo.push_back(i);
    }

    std::vector<std::optional<GridPointResult>> slots(todo.size());
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < todo.size();) {
            std::size_t i = todo[t];
            GridPointResult r = run_point(points[i].first, points[i].second, cfg, i);
            std::lock_guard<std::mutex> lock(mu);
            slots[t] = std::move(r);
            cv.notify_all();
        }
    };
    std::size_t workers = std::min(thread_count(), std::max<std::size_t>(1, todo.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);

    for (std::size_t t = 0; t < todo.size(); ++t) {
        GridPointResult r;
        {
            std::unique_lock<std::mutex> lock(mu);
            cv.wait(lock, [&] { return slots[t].has_value(); });
            r = std::move(*slots[t]);
            slots[t].reset();
        }
        if (out.is_open()) {
            out << to_json(r) << '\n';
            out.flush();
        }
        if (sink) sink(r);
        ++summary.computed;
        if (r.failed) ++summary.failed;
    }
    for (auto& th : pool) th.join();
    return summary;
}

SweepSummary run_cross_section(double M, const std::vector<double>& T, const SweepConfig& cfg,
                               const PointSink& sink) {
    std::vector<std::pair<double, double>> pts;
    for (double t : T) pts.emplace_back(M, t);
    return run_points(pts, cfg, sink);
}

SweepSummary run_grid(const SweepConfig& cfg, const PointSink& sink) {
    cfg.validate();
    std::vector<std::pair<double, double>> pts;
    for (double m : linspace(cfg.m_lo, cfg.m_hi, cfg.m_count))
        for (double t : linspace(cfg.t_lo, cfg.t_hi, cfg.t_count)) pts.emplace_back(m, t);
    SweepSummary s = run_points(pts, cfg, sink);
    if (!cfg.output.empty()) write_overlay(cfg.output + ".overlay.jsonl", overlay_curves(cfg));
    return s;
}

std::vector<OverlayPoint> overlay_curves(const SweepConfig& cfg, std::size_t m_samples) {
    std::vector<OverlayPoint> pts;
    const double t_max = cfg.t_hi;
    for (double M : linspace(cfg.m_lo, cfg.m_hi, m_samples)) {
        SetupParams p = build_params(M, 0.0, cfg.gamma);
        for (int q = 1; kTwoPi * q / p.Y <= t_max; ++q) {
            double T = kTwoPi * q / p.Y;
            if (T >= cfg.t_lo) pts.push_back({"frozen", q, M, T});
        }
        for (int q = 1; kPi * q / M <= t_max; ++q) {
            double T = kPi * q / M;
            if (T >= cfg.t_lo) pts.push_back({"shift", q, M, T});
        }
        for (int l = 0; kPi * (2 * l + 1) / p.Y <= t_max; ++l) {
            double T = kPi * (2 * l + 1) / p.Y;
            if (T >= cfg.t_lo) pts.push_back({"period2", l, M, T});
        }
        if (cfg.gamma == 0.0) continue;
        for (Outcome mu : {Outcome::Minus, Outcome::Plus}) {
            // Scan for sign changes of the real determinant, then bisect.
            auto det_at = [&](double t) {
                SetupParams s = build_params(M, t, cfg.gamma);
                double q2 = (s.M / s.Y) * (s.M / s.Y) * s.sY * s.sY;
                return mu == Outcome::Minus ? s.cM * s.cM - q2 : -s.sM * s.sM + q2;
            };
            const std::size_t steps = 4000;
            double prev_t = cfg.t_lo, prev = det_at(prev_t);
            int order = 0;
            for (std::size_t i = 1; i <= steps; ++i) {
                double t = cfg.t_lo + (t_max - cfg.t_lo) * static_cast<double>(i) / steps;
                double cur = det_at(t);
                if (prev != 0.0 && (prev > 0.0) != (cur > 0.0)) {
                    double root = find_projective_T(M, mu, prev_t, t, cfg.gamma);
                    pts.push_back({mu == Outcome::Minus ? "projective_minus" : "projective_plus", order++, M, root});
                }
                prev_t = t;
                prev = cur;
            }
        }
    }
    return pts;
}

void write_overlay(const std::string& path, const std::vector<OverlayPoint>& pts) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw Error("cannot open " + path);
    for (const auto& p : pts) {
        JsonWriter j;
        j.begin_object();
        j.key("curve").value(p.curve);
        j.key("order").value(p.order);
        j.key("M").value(p.M);
        j.key("T").value(p.T);
        j.end_object();
        os << j.str() << '\n';
    }
}

}  // namespace mq
