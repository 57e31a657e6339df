#include "vform/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "vform/ares.hpp"
#include "vform/errors.hpp"
#include "vform/fixtures.hpp"
#include "vform/io.hpp"
#include "vform/rng.hpp"

namespace vform {

namespace {

using nlohmann::json;

json json_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double mean_horizon(const PlanTrace& trace) {
    if (trace.steps.empty()) return 0.0;
    double s = 0.0;
    for (const TraceStep& ts : trace.steps) s += ts.horizon;
    return s / static_cast<double>(trace.steps.size());
}

games::GameConfig game_config_for(Mode mode, const ExperimentConfig& cfg) {
    games::GameConfig g = cfg.game;
    g.pso = cfg.pso;
    switch (mode) {
        case Mode::GameBrg: g.attack = games::AttackKind::Removal; break;
        case Mode::GameRdg: g.attack = games::AttackKind::RandomDisplacement; break;
        case Mode::GameAmpc: g.attack = games::AttackKind::AdaptiveDisplacement; break;
        default: throw InternalError("game_config_for: not a game mode");
    }
    return g;
}

bool default_flock_params(const FlockParams& p) {
    const FlockParams d;
    return p.wing_span == d.wing_span && p.view_angle == d.view_angle &&
           p.v_max == d.v_max && p.accel_ratio == d.accel_ratio &&
           p.upwash_alpha == d.upwash_alpha && p.upwash_mean == d.upwash_mean &&
           p.sigma_xx == d.sigma_xx && p.sigma_xy == d.sigma_xy &&
           p.sigma_yy == d.sigma_yy;
}

} // namespace

FlockState initial_state_for(Mode mode, const ExperimentConfig& cfg,
                             std::uint64_t run_seed) {
    switch (mode) {
        case Mode::Ares:
        case Mode::Dampc:
            return sample_initial(cfg.birds, cfg.init, cfg.flock,
                                  seed_for(run_seed, kStreamInit));
        case Mode::GameBrg:
        case Mode::GameRdg:
        case Mode::GameAmpc: {
            FlockState s;
            if ((cfg.birds == 3 || cfg.birds == 5 || cfg.birds == 7) &&
                default_flock_params(cfg.flock)) {
                s = v_fixture(cfg.birds);
            } else {
                s = analytic_v(cfg.birds, cfg.flock);
            }
            if (cost(s, cfg.flock) > cfg.game.threshold)
                throw ConfigError("no V-formation fixture reaches game.threshold "
                                  "for these flock parameters");
            return s;
        }
        case Mode::SmcBatch:
            break;
    }
    throw InternalError("initial_state_for: smc-batch has no single initial state");
}

smc::RunRecord execute_single(Mode mode, const ExperimentConfig& cfg,
                              std::uint64_t run_seed, PlanTrace* trace_out,
                              dampc::LevelLedger* ledger_out) {
    smc::RunRecord rec;
    rec.seed = run_seed;
    switch (mode) {
        case Mode::Ares: {
            const FlockState initial = initial_state_for(mode, cfg, run_seed);
            PlanTrace trace =
                ares::synthesize(initial, cfg.ares, cfg.pso, cfg.flock,
                                 seed_for(run_seed, kStreamAres));
            rec.success = trace.converged;
            rec.duration = static_cast<double>(trace.steps.size());
            rec.avg_horizon = mean_horizon(trace);
            rec.final_cost = trace.final_cost;
            if (trace_out) *trace_out = std::move(trace);
            break;
        }
        case Mode::Dampc: {
            const FlockState initial = initial_state_for(mode, cfg, run_seed);
            dampc::DampcConfig dc = cfg.dampc;
            dc.pso = cfg.pso;
            dampc::DampcResult res = dampc::run(initial, dc, cfg.flock, run_seed);
            rec.success = res.trace.converged;
            rec.duration = static_cast<double>(res.trace.steps.size());
            rec.avg_horizon = res.avg_horizon;
            rec.avg_neighborhood = res.avg_neighborhood;
            rec.final_cost = res.trace.final_cost;
            if (trace_out) *trace_out = std::move(res.trace);
            if (ledger_out) *ledger_out = std::move(res.ledger);
            break;
        }
        case Mode::GameBrg:
        case Mode::GameRdg:
        case Mode::GameAmpc: {
            const FlockState initial = initial_state_for(mode, cfg, run_seed);
            const games::GameConfig gc = game_config_for(mode, cfg);
            games::GameOutcome out = games::play(initial, gc, cfg.flock, run_seed);
            rec.success = out.controller_won;
            rec.duration = static_cast<double>(out.duration);
            rec.avg_horizon = out.avg_horizon;
            rec.final_cost = out.trace.final_cost;
            if (trace_out) *trace_out = std::move(out.trace);
            break;
        }
        case Mode::SmcBatch:
            throw InternalError("execute_single: smc-batch is not a single-run mode");
    }
    return rec;
}

int run_experiment(const ExperimentConfig& cfg_in, const CliOverrides& overrides,
                   std::ostream& log) {
    ExperimentConfig cfg = cfg_in;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.runs) cfg.runs = *overrides.runs;

    std::vector<std::string> errors;
    validate_config(cfg, errors);
    if (!errors.empty()) {
        for (const std::string& e : errors) log << "config error: " << e << '\n';
        return 2;
    }

    const std::string digest = config_digest(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(overrides.out_dir);
    const auto path = [&](const char* name) {
        return (fs::path(overrides.out_dir) / name).string();
    };

    {
        std::ofstream cf(path("config.txt"));
        cf << canonical_text(cfg);
    }

    json summary;
    summary["mode"] = to_string(cfg.mode);
    summary["seed"] = std::to_string(cfg.seed);
    summary["config_digest"] = digest;
    summary["birds"] = cfg.birds;

    if (cfg.mode == Mode::SmcBatch) {
        const int n = cfg.runs > 0
                          ? cfg.runs
                          : smc::required_samples(cfg.smc_epsilon, cfg.smc_delta);
        const Mode target = cfg.smc_target;
        const auto experiment = [&](std::uint64_t run_seed) {
            return execute_single(target, cfg, run_seed, nullptr, nullptr);
        };
        smc::RunStats stats =
            smc::estimate(experiment, n, cfg.seed, overrides.workers);

        summary["target"] = to_string(target);
        summary["epsilon"] = cfg.smc_epsilon;
        summary["delta"] = cfg.smc_delta;
        summary["runs"] = stats.total;
        summary["successes"] = stats.successes;
        summary["success_rate"] = stats.success_rate;
        summary["mean_duration"] = json_or_null(stats.mean_duration);
        summary["mean_horizon"] = json_or_null(stats.mean_horizon);
        summary["mean_neighborhood"] = json_or_null(stats.mean_neighborhood);

        std::ofstream rc(path("runs.csv"));
        write_runs_csv(rc, stats);
        log << "smc-batch target=" << to_string(target) << " runs=" << stats.total
            << " success_rate=" << stats.success_rate << '\n';
    } else {
        PlanTrace trace;
        dampc::LevelLedger ledger;
        const smc::RunRecord rec =
            execute_single(cfg.mode, cfg, cfg.seed, &trace, &ledger);

        summary["converged"] = rec.success;
        summary["final_cost"] = rec.final_cost;
        summary["steps"] = trace.steps.size();
        summary["duration"] = rec.duration;
        summary["avg_horizon"] = rec.avg_horizon;
        if (cfg.mode == Mode::Dampc) {
            summary["avg_neighborhood"] = rec.avg_neighborhood;
            std::ofstream lc(path("ledger.csv"));
            write_ledger_csv(lc, ledger);
        }
        summary["levels"] = trace.committed_levels;

        TrajectoryData td;
        td.mode = to_string(cfg.mode);
        td.seed = cfg.seed;
        td.digest = digest;
        td.params = cfg.flock;
        td.trace = std::move(trace);
        std::ofstream tf(path("trajectory.txt"));
        write_trajectory(tf, td);

        log << to_string(cfg.mode) << " converged=" << (rec.success ? 1 : 0)
            << " final_cost=" << rec.final_cost << " steps=" << td.trace.steps.size()
            << '\n';
    }

    std::ofstream sf(path("summary.json"));
    sf << summary.dump(2) << '\n';
    return 0;
}

} // namespace vform
