// Command-line driver for single points, cross-sections, grids and distribution dumps.
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mq/errors.hpp"
#include "mq/json_writer.hpp"
#include "mq/markov.hpp"
#include "mq/special_cases.hpp"
#include "mq/sweep.hpp"
#include "mq/trajectory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitPartial = 3;

struct Common {
    double M = 0.0, T = 0.0;
    std::string mode = "me";
    std::string format = "json";
    std::string out;
};

void add_common(CLI::App* cmd, mq::SweepConfig& cfg, Common& c, bool point_flags) {
    if (point_flags) {
        cmd->add_option("--M", c.M, "coupling M")->required();
        cmd->add_option("--T", c.T, "measurement period T")->required();
    }
    cmd->add_option("--gamma", cfg.gamma, "hopping strength")->capture_default_str();
    cmd->add_option("--cells", cfg.cells, "Grand Circle cells N")->capture_default_str();
    cmd->add_option("--steps", cfg.mc_steps, "Monte-Carlo steps")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "base seed")->capture_default_str();
    cmd->add_option("--out", c.out, "output path (stdout if empty)");
    cmd->add_option("--mode", c.mode, "me, mc or both")->capture_default_str();
    cmd->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    cmd->add_option("--max-iters", cfg.me_max_iters, "power-iteration budget")->capture_default_str();
    cmd->add_option("--margin", cfg.margin, "special-line margin")->capture_default_str();
    cmd->add_flag("--eigen-gap", cfg.eigen_gap, "estimate the spectral gap");
    cmd->add_option("--dist-dir", cfg.distribution_dir, "directory for per-point distribution CSVs");
}

std::ostream& sink_stream(const std::string& path, std::ofstream& file, bool append) {
    if (path.empty()) return std::cout;
    file.open(path, append ? std::ios::app : std::ios::trunc);
    if (!file) throw mq::Error("cannot open " + path);
    return file;
}

int finish(const mq::SweepSummary& s) {
    std::fprintf(stderr, "computed %zu, skipped %zu, failed %zu\n", s.computed, s.skipped, s.failed);
    return s.failed > 0 ? kExitPartial : kExitOk;
}

void emit_distribution(std::ostream& os, const mq::DiscretizedDistribution& w, const std::string& format) {
    if (format == "csv") {
        mq::write_csv(os, w);
        return;
    }
    mq::JsonWriter j;
    j.begin_array();
    for (std::size_t i = 0; i < w.size(); ++i)
        j.begin_object().key("theta").value(w.center(i)).key("weight").value(w.pr[i]).end_object();
    j.end_array();
    os << j.str() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stroboscopically monitored qubit: trajectories, master equation, indicators"};
    app.require_subcommand(1);

    mq::SweepConfig cfg;
    Common c;

    auto* point = app.add_subcommand("point", "evaluate one (M, T) point");
    add_common(point, cfg, c, true);
    std::string dist_out, matrix_out;
    point->add_option("--dist-out", dist_out, "write the distribution CSV here");
    point->add_option("--dump-matrix", matrix_out, "write the transition matrix as MQME binary");

    auto* cross = app.add_subcommand("cross-section", "sweep T at fixed M");
    add_common(cross, cfg, c, false);
    cross->add_option("--M", c.M, "coupling M")->required();
    cross->add_option("--T-lo", cfg.t_lo)->capture_default_str();
    cross->add_option("--T-hi", cfg.t_hi)->capture_default_str();
    cross->add_option("--T-count", cfg.t_count)->capture_default_str();

    auto* grid = app.add_subcommand("grid", "evaluate an (M, T) grid");
    add_common(grid, cfg, c, false);
    grid->add_option("--M-lo", cfg.m_lo)->capture_default_str();
    grid->add_option("--M-hi", cfg.m_hi)->capture_default_str();
    grid->add_option("--M-count", cfg.m_count)->capture_default_str();
    grid->add_option("--T-lo", cfg.t_lo)->capture_default_str();
    grid->add_option("--T-hi", cfg.t_hi)->capture_default_str();
    grid->add_option("--T-count", cfg.t_count)->capture_default_str();

    auto* special = app.add_subcommand("special", "analytic special cases");
    special->require_subcommand(1);
    auto* classify = special->add_subcommand("classify", "tag (M, T) with its special case");
    double tol = mq::kClassifyTolerance;
    add_common(classify, cfg, c, true);
    classify->add_option("--tol", tol, "exact-case tolerance")->capture_default_str();

    auto* compare = app.add_subcommand("compare-mc-me", "chi2 distance between ME and MC distributions");
    add_common(compare, cfg, c, true);
    std::size_t coarse = 0;
    compare->add_option("--coarse", coarse, "coarse-grain both to this many cells before comparing");

    auto* adf = app.add_subcommand("adf", "dump a distribution");
    add_common(adf, cfg, c, true);
    double theta0 = 0.3;
    adf->add_option("--theta0", theta0, "initial angle for mc and analytic paths")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (c.mode == "analytic" && !adf->parsed()) throw mq::InvalidArgument("mode analytic is only valid for adf");
        if (c.mode != "analytic") cfg.mode = mq::parse_mode(c.mode);
        cfg.validate();
        if (point->parsed() || classify->parsed() || compare->parsed() || adf->parsed())
            mq::build_params(c.M, c.T, cfg.gamma);
        if (cross->parsed()) mq::build_params(c.M, cfg.t_lo, cfg.gamma);
        std::ofstream file;

        if (point->parsed()) {
            mq::DiscretizedDistribution w;
            mq::GridPointResult r = mq::run_point(c.M, c.T, cfg, 0, &w);
            if (c.format == "csv") {
                mq::write_csv(sink_stream(c.out, file, false), w);
            } else {
                sink_stream(c.out, file, true) << mq::to_json(r) << '\n';
            }
            if (!dist_out.empty() && !r.failed) mq::write_csv(dist_out, w);
            if (!matrix_out.empty()) mq::write_mqme(matrix_out, mq::build_markov(mq::build_params(c.M, c.T, cfg.gamma), cfg.cells));
            return r.failed ? kExitPartial : kExitOk;
        }
        if (cross->parsed()) {
            cfg.output = c.out;
            auto print = [&](const mq::GridPointResult& r) {
                if (c.out.empty()) std::cout << mq::to_json(r) << '\n';
            };
            return finish(mq::run_cross_section(c.M, mq::linspace(cfg.t_lo, cfg.t_hi, cfg.t_count), cfg, print));
        }
        if (grid->parsed()) {
            if (c.out.empty()) throw mq::InvalidArgument("grid needs --out");
            cfg.output = c.out;
            return finish(mq::run_grid(cfg));
        }
        if (classify->parsed()) {
            mq::SpecialCaseTag tag = mq::classify(mq::build_params(c.M, c.T, cfg.gamma), tol);
            mq::JsonWriter j;
            j.begin_object();
            j.key("M").value(c.M).key("T").value(c.T).key("gamma").value(cfg.gamma);
            j.key("kind").value(mq::to_string(tag.kind)).key("order").value(tag.order);
            j.key("distance").value(tag.distance);
            j.key("distances").begin_object();
            j.key("frozen").value(tag.all.frozen).key("shift").value(tag.all.shift);
            j.key("period2").value(tag.all.period2).key("det_minus").value(tag.all.det_minus);
            j.key("det_plus").value(tag.all.det_plus);
            j.end_object().end_object();
            sink_stream(c.out, file, false) << j.str() << '\n';
            return kExitOk;
        }
        if (compare->parsed()) {
            mq::SetupParams p = mq::build_params(c.M, c.T, cfg.gamma);
            mq::SparseMarkov m = mq::build_markov(p, cfg.cells);
            mq::SolveResult s = mq::power_iterate(m, mq::DiscretizedDistribution::uniform(cfg.cells), cfg.me_max_iters);
            mq::TrajectoryConfig tc;
            tc.n_steps = cfg.mc_steps + cfg.mc_burn_in;
            tc.burn_in = cfg.mc_burn_in;
            tc.seed = cfg.seed;
            tc.bins = cfg.cells;
            tc.initial_state = mq::BlochState::on_gc(cfg.mc_theta0);
            mq::TrajectoryResult mc = mq::simulate(tc, p);
            mq::DiscretizedDistribution a = s.w, b = mc.histogram;
            if (coarse > 0) {
                a = mq::coarse_grain(a, coarse);
                b = mq::coarse_grain(b, coarse);
            }
            mq::JsonWriter j;
            j.begin_object();
            j.key("M").value(c.M).key("T").value(c.T).key("gamma").value(cfg.gamma);
            j.key("cells").value(static_cast<std::uint64_t>(cfg.cells));
            j.key("compared_cells").value(static_cast<std::uint64_t>(a.size()));
            j.key("mc_steps").value(cfg.mc_steps).key("seed").value(cfg.seed);
            j.key("me_converged").value(s.report.converged);
            j.key("me_iterations").value(static_cast<std::uint64_t>(s.report.iterations));
            j.key("chi2").value(mq::chi2_distance(a, b));
            j.end_object();
            sink_stream(c.out, file, false) << j.str() << '\n';
            return kExitOk;
        }
        if (adf->parsed()) {
            mq::SetupParams p = mq::build_params(c.M, c.T, cfg.gamma);
            std::ostream& os = sink_stream(c.out, file, false);
            if (c.mode == "analytic") {
                mq::SpecialCaseTag tag = mq::classify(p);
                mq::AnalyticADF a;
                switch (tag.kind) {
                    case mq::SpecialKind::GammaZero:
                        a = mq::gamma_zero_adf(theta0, c.M * c.T);
                        break;
                    case mq::SpecialKind::Period2:
                        a = mq::period2_adf();
                        break;
                    case mq::SpecialKind::ProjectiveMinus:
                    case mq::SpecialKind::ProjectivePlus:
                        a = mq::projective_series(p);
                        break;
                    case mq::SpecialKind::DoubleProjective:
                        a = mq::double_projective_adf(p);
                        break;
                    default:
                        throw mq::InvalidArgument("no analytic distribution for kind " + mq::to_string(tag.kind));
                }
                if (c.format == "csv") {
                    mq::write_csv(os, mq::bin_peaks(a, cfg.cells));
                } else {
                    mq::JsonWriter j;
                    j.begin_array();
                    for (const auto& pk : a.peaks)
                        j.begin_object().key("theta").value(pk.theta).key("weight").value(pk.weight).end_object();
                    j.end_array();
                    os << j.str() << '\n';
                }
                return kExitOk;
            }
            if (cfg.mode == mq::SweepMode::Mc) {
                mq::TrajectoryConfig tc;
                tc.n_steps = cfg.mc_steps + cfg.mc_burn_in;
                tc.burn_in = cfg.mc_burn_in;
                tc.seed = cfg.seed;
                tc.bins = cfg.cells;
                tc.initial_state = mq::BlochState::on_gc(theta0);
                emit_distribution(os, mq::simulate(tc, p).histogram, c.format);
            } else {
                mq::SparseMarkov m = mq::build_markov(p, cfg.cells);
                mq::SolveResult s =
                    mq::power_iterate(m, mq::DiscretizedDistribution::uniform(cfg.cells), cfg.me_max_iters);
                emit_distribution(os, s.w, c.format);
            }
            return kExitOk;
        }
    } catch (const mq::InvalidArgument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitOk;
}
