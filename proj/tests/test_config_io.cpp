#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "vform/config.hpp"
#include "vform/errors.hpp"
#include "vform/experiment.hpp"
#include "vform/fixtures.hpp"
#include "vform/io.hpp"
#include "vform/rng.hpp"
#include "vform/smc.hpp"

using namespace vform;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parsed(const std::string& text) {
    std::vector<std::string> errors;
    const ExperimentConfig cfg = parse_config(text, errors);
    CAPTURE(errors.empty() ? std::string() : errors.front());
    REQUIRE(errors.empty());
    return cfg;
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
    for (const std::string& e : errors)
        if (e.find(needle) != std::string::npos) return true;
    return false;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Scratch directory per test, wiped on both entry and exit so stale state
// from an aborted run cannot leak in.
struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag)
        : path(fs::temp_directory_path() / (std::string("vform-io-") + tag)) {
        std::error_code ec;
        fs::remove_all(path, ec);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

// Keeps experiment-level tests fast; three birds need nothing near the
// default swarm budget.
std::string light_overrides() {
    return "[pso]\n"
           "max_iterations = 40\n"
           "stall_iterations = 15\n"
           "[ares]\n"
           "clone_count = 10\n";
}

// A short hand-built trajectory whose states really are rollouts of the
// recorded inputs, including one removal and one displacement.
TrajectoryData sample_trajectory() {
    TrajectoryData td;
    td.mode = "ares";
    td.seed = 31337;
    td.digest = "0123456789abcdef";

    PlanTrace& trace = td.trace;
    trace.initial = sample_initial(3, InitBounds{}, td.params, 99);
    Rng rng(4);
    FlockState cur = trace.initial;
    for (int t = 1; t <= 3; ++t) {
        TraceStep ts;
        ts.level = 2.0 / t;
        ts.delta = 0.01 * t;
        ts.horizon = t;
        ts.particles = 10 * t;
        ts.accel.resize(3);
        for (Vec2& a : ts.accel) a = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
        ts.dist = Disturbance::none(3);
        if (t == 2) {
            ts.dist.remove[1] = 1;
            ts.dist.displacement[0] = {0.1, -0.3};
        }
        cur = step(cur, ts.accel, ts.dist, td.params);
        ts.state_after = cur;
        trace.steps.push_back(std::move(ts));
    }
    trace.committed_levels = {2.0, 1.0, 0.5};
    trace.final_cost = cost(cur, td.params);
    trace.converged = false;
    return td;
}

std::string serialized(const TrajectoryData& td) {
    std::ostringstream out;
    write_trajectory(out, td);
    return out.str();
}

} // namespace

TEST_CASE("config: empty text parses to the defaults") {
    const ExperimentConfig cfg = parsed("");
    CHECK(cfg == ExperimentConfig{});
    CHECK(cfg.mode == Mode::Ares);
    CHECK(cfg.birds == 3);
    CHECK(cfg.seed == 1);
    CHECK(cfg.runs == 0);
    CHECK(cfg.pso.inertia == 0.729);
    CHECK(cfg.ares.clone_count == 20);
    CHECK(cfg.dampc.beta == 100);
    CHECK(cfg.smc_epsilon == 0.1);
    CHECK(cfg.smc_target == Mode::Ares);
}

TEST_CASE("config: handwritten file with comments and loose spacing") {
    const std::string text =
        "# planner comparison setup\n"
        "[experiment]\n"
        "mode = dampc   # distributed planner\n"
        "birds=5\n"
        "seed = 42\n"
        "\n"
        "[dampc]\n"
        "  threshold = 0.25\n"
        "k_min = 3\n"
        "\n"
        "[game]\n"
        "remove = 2 3\n";
    const ExperimentConfig cfg = parsed(text);
    CHECK(cfg.mode == Mode::Dampc);
    CHECK(cfg.birds == 5);
    CHECK(cfg.seed == 42);
    CHECK(cfg.dampc.threshold == 0.25);
    CHECK(cfg.dampc.k_min == 3);

    // File ids are 1-based; birds 2 and 3 are internal 1 and 2.
    REQUIRE(cfg.game.removal_set.size() == 2);
    CHECK(cfg.game.removal_set[0] == 1);
    CHECK(cfg.game.removal_set[1] == 2);

    // And they serialize back 1-based.
    CHECK(canonical_text(cfg).find("remove = 2 3") != std::string::npos);
}

TEST_CASE("config: parser reports every problem, not just the first") {
    const std::string text =
        "[experiment\n"
        "mode = ares\n"
        "[experiment]\n"
        "mode = warp\n"
        "birds = 3\n"
        "birds = 4\n"
        "seed = -3\n"
        "pace = 9\n"
        "runs\n"
        "[pso]\n"
        "inertia = fast\n";
    std::vector<std::string> errors;
    const ExperimentConfig cfg = parse_config(text, errors);
    REQUIRE(errors.size() == 8);
    CHECK(errors[0] == "line 1: malformed section header");
    CHECK(errors[1] == "line 2: key 'mode' outside any [section]");
    CHECK(errors[2] == "experiment.mode: invalid value 'warp'");
    CHECK(errors[3] == "experiment.birds: duplicate key");
    CHECK(errors[4] == "experiment.seed: invalid value '-3'");
    CHECK(errors[5] == "experiment.pace: unknown key");
    CHECK(errors[6] == "line 9: expected key = value");
    CHECK(errors[7] == "pso.inertia: invalid value 'fast'");

    // Valid assignments before and around the bad ones still land.
    CHECK(cfg.birds == 3);
}

TEST_CASE("config: validation collects cross-field violations") {
    ExperimentConfig cfg;
    cfg.mode = Mode::GameBrg;
    cfg.flock.accel_ratio = 1.2;
    cfg.dampc.k_min = 5;
    cfg.dampc.k_max = 2;
    cfg.smc_epsilon = 0.0;
    cfg.smc_target = Mode::SmcBatch;
    cfg.game.attacked_count = 3; // would remove the whole three-bird flock
    std::vector<std::string> errors;
    validate_config(cfg, errors);
    CHECK(errors.size() == 5);
    CHECK(mentions(errors, "flock.accel_ratio: must be in (0, 1), got 1.2"));
    CHECK(mentions(errors, "dampc.k_min/k_max"));
    CHECK(mentions(errors, "smc.epsilon"));
    CHECK(mentions(errors, "smc.target"));
    CHECK(mentions(errors, "game.attacked_count"));

    // Explicit removal lists: out-of-range and duplicate ids.
    ExperimentConfig rm;
    rm.mode = Mode::GameBrg;
    rm.birds = 5;
    rm.game.removal_set = {0, 0};
    errors.clear();
    validate_config(rm, errors);
    CHECK(mentions(errors, "game.remove: duplicate bird id"));
    rm.game.removal_set = {7};
    errors.clear();
    validate_config(rm, errors);
    CHECK(mentions(errors, "game.remove: bird ids must be in [1, birds]"));

    // The game checks follow smc.target when the mode is a batch.
    ExperimentConfig batch;
    batch.mode = Mode::SmcBatch;
    batch.smc_target = Mode::GameBrg;
    batch.game.attacked_count = 3;
    errors.clear();
    validate_config(batch, errors);
    CHECK(mentions(errors, "game.attacked_count"));

    errors.clear();
    validate_config(ExperimentConfig{}, errors);
    CHECK(errors.empty());
}

TEST_CASE("config: canonical text round-trips every field exactly") {
    ExperimentConfig c;
    c.mode = Mode::GameRdg;
    c.birds = 7;
    c.seed = 0xDEADBEEFCAFEULL;
    c.runs = 17;
    c.flock.view_angle = 1.0471975511965976;
    c.flock.sigma_xy = -0.125;
    c.init.vel_hi = {1.5, 0.25};
    c.pso.neighborhood_fraction = 0.37;
    c.ares.p_max = 55;
    c.dampc.k_max = 6;
    c.game.removal_set = {1, 2};
    c.game.magnitude = 0.75;
    c.smc_epsilon = 0.05;
    c.smc_target = Mode::Dampc;

    const std::string text = canonical_text(c);
    const ExperimentConfig back = parsed(text);
    CHECK(back == c);
    CHECK(canonical_text(back) == text);
    CHECK(config_digest(back) == config_digest(c));

    const std::string d = config_digest(c);
    CHECK(d.size() == 16);
    for (char ch : d)
        CHECK(((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f')));

    ExperimentConfig tweaked = c;
    tweaked.seed += 1;
    CHECK(config_digest(tweaked) != d);
    CHECK_FALSE(tweaked == c);
}

TEST_CASE("config: every mode name maps both ways") {
    CHECK(std::string(to_string(Mode::Ares)) == "ares");
    CHECK(std::string(to_string(Mode::Dampc)) == "dampc");
    CHECK(std::string(to_string(Mode::GameBrg)) == "game-brg");
    CHECK(std::string(to_string(Mode::GameRdg)) == "game-rdg");
    CHECK(std::string(to_string(Mode::GameAmpc)) == "game-ampc");
    CHECK(std::string(to_string(Mode::SmcBatch)) == "smc-batch");
    for (Mode m : {Mode::Ares, Mode::Dampc, Mode::GameBrg, Mode::GameRdg,
                   Mode::GameAmpc, Mode::SmcBatch}) {
        Mode out;
        REQUIRE(mode_from_string(to_string(m), out));
        CHECK(out == m);
    }
    Mode out;
    CHECK(!mode_from_string("warp", out));
    CHECK(!mode_from_string("", out));
}

TEST_CASE("trajectory: write-read round trip is exact") {
    const TrajectoryData td = sample_trajectory();
    const std::string text = serialized(td);
    std::istringstream in(text);
    const TrajectoryData back = read_trajectory(in);

    CHECK(back.mode == td.mode);
    CHECK(back.seed == td.seed);
    CHECK(back.digest == td.digest);
    const FlockParams& p = td.params;
    const FlockParams& q = back.params;
    CHECK(q.wing_span == p.wing_span);
    CHECK(q.view_angle == p.view_angle);
    CHECK(q.v_max == p.v_max);
    CHECK(q.accel_ratio == p.accel_ratio);
    CHECK(q.upwash_alpha == p.upwash_alpha);
    CHECK(q.upwash_mean == p.upwash_mean);
    CHECK(q.sigma_xx == p.sigma_xx);
    CHECK(q.sigma_xy == p.sigma_xy);
    CHECK(q.sigma_yy == p.sigma_yy);
    CHECK(q.min_pair_distance == p.min_pair_distance);

    CHECK(back.trace.committed_levels == td.trace.committed_levels);
    CHECK(back.trace.final_cost == td.trace.final_cost);
    CHECK(back.trace.converged == td.trace.converged);
    CHECK(back.trace.initial == td.trace.initial);
    REQUIRE(back.trace.steps.size() == td.trace.steps.size());
    for (std::size_t i = 0; i < td.trace.steps.size(); ++i) {
        const TraceStep& a = td.trace.steps[i];
        const TraceStep& b = back.trace.steps[i];
        CHECK(b.level == a.level);
        CHECK(b.delta == a.delta);
        CHECK(b.horizon == a.horizon);
        CHECK(b.particles == a.particles);
        CHECK(b.accel == a.accel);
        CHECK(b.dist.displacement == a.dist.displacement);
        CHECK(b.dist.remove == a.dist.remove);
        CHECK(b.state_after == a.state_after);
    }

    // Parsed values re-step to the recorded states and re-serialize
    // byte-identically.
    CHECK(replay_deviation(back) == 0.0);
    CHECK(serialized(back) == text);
}

TEST_CASE("trajectory: replay flags tampered records") {
    TrajectoryData td = sample_trajectory();
    CHECK(replay_deviation(td) == 0.0);

    td.trace.steps[1].state_after.x[0].x += 1e-6;
    CHECK(replay_deviation(td) == doctest::Approx(1e-6).epsilon(1e-6));

    TrajectoryData rm = sample_trajectory();
    rm.trace.steps[2].state_after.removed[0] = 1;
    CHECK(replay_deviation(rm) >= 1.0);

    TrajectoryData acc = sample_trajectory();
    acc.trace.steps[0].accel[2].y += 0.05;
    CHECK(replay_deviation(acc) > 1e-3);
}

TEST_CASE("trajectory: malformed input is rejected") {
    const auto reject = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(read_trajectory(in), ConfigError);
    };
    reject("");
    reject("vform-trajectory 2\n");

    const std::string good = serialized(sample_trajectory());
    const auto cut_at = [&](const char* marker) {
        return good.substr(0, good.find(marker));
    };
    reject(cut_at("seed "));     // header truncated
    reject(cut_at("state\n"));   // no initial state
    reject(cut_at("step 2 "));   // fewer step blocks than announced

    const auto swap = [&](const std::string& from, const std::string& to) {
        std::string t = good;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    reject(swap("seed 31337", "seed 31337 0"));     // extra value
    reject(swap("seed 31337", "seed -4"));          // negative id
    reject(swap("birds 3", "birds x"));             // non-numeric count
    reject(swap("birds 3", "birds 0"));             // no birds at all
    reject(swap("steps 3", "steps -1"));
    reject(swap("final_cost ", "final_cost zzz "));
    reject(swap(" level ", " lvl "));               // wrong step header token
    reject(swap("mode ares", "made ares"));         // wrong header key
}

TEST_CASE("csv: ledger and run tables have the documented shape") {
    dampc::LevelLedger ledger;
    dampc::StepRow r1;
    r1.step = 1;
    r1.lookahead_cost = 0.5;
    r1.level = 2.0;
    r1.delta = 0.125;
    r1.k = 3;
    r1.rounds = 2;
    dampc::StepRow r2 = r1;
    r2.step = 2;
    r2.lookahead_cost = 0.25;
    ledger.rows = {r1, r2};
    std::ostringstream lc;
    write_ledger_csv(lc, ledger);
    CHECK(lc.str() ==
          "step,cost,level,delta,k,rounds\n"
          "1,0.5,2,0.125,3,2\n"
          "2,0.25,2,0.125,3,2\n");

    smc::RunStats stats;
    smc::RunRecord rec;
    rec.seed = 7;
    rec.success = true;
    rec.duration = 3.0;
    rec.avg_horizon = 1.5;
    rec.avg_neighborhood = 2.5;
    rec.final_cost = 0.25;
    stats.records = {rec};
    std::ostringstream rc;
    write_runs_csv(rc, stats);
    CHECK(rc.str() ==
          "index,seed,success,duration,avg_horizon,avg_neighborhood,final_cost\n"
          "0,7,1,3,1.5,2.5,0.25\n");
}

TEST_CASE("experiment: initial states come from the right source") {
    ExperimentConfig cfg;

    // Planner modes sample fresh states per run seed.
    const FlockState a = initial_state_for(Mode::Ares, cfg, 1);
    const FlockState b = initial_state_for(Mode::Ares, cfg, 2);
    CHECK(a.size() == 3);
    CHECK_FALSE(a == b);
    CHECK(a == initial_state_for(Mode::Dampc, cfg, 1));

    // Games start from the pinned formation fixture.
    ExperimentConfig game;
    game.mode = Mode::GameBrg;
    game.birds = 5;
    CHECK(initial_state_for(Mode::GameBrg, game, 1) == v_fixture(5));
    CHECK(initial_state_for(Mode::GameBrg, game, 9) == v_fixture(5));

    // Off-fixture sizes fall back to the constructed formation.
    game.birds = 4;
    const FlockState c = initial_state_for(Mode::GameRdg, game, 1);
    CHECK(c.size() == 4);
    CHECK(cost(c, game.flock) <= game.game.threshold);

    // No formation can satisfy an impossible threshold.
    game.game.threshold = 1e-12;
    CHECK_THROWS_AS(initial_state_for(Mode::GameBrg, game, 1), ConfigError);
}

TEST_CASE("experiment: single run writes a reproducible bundle") {
    const ExperimentConfig cfg = parsed(
        "[experiment]\nmode = ares\nbirds = 3\nseed = 17\n" + light_overrides());
    TempDir dir("single");
    CliOverrides ov;
    ov.out_dir = (dir.path / "a").string();
    std::ostringstream log;
    REQUIRE(run_experiment(cfg, ov, log) == 0);

    CHECK(slurp(dir.path / "a" / "config.txt") == canonical_text(cfg));

    const json summary = json::parse(slurp(dir.path / "a" / "summary.json"));
    CHECK(summary.at("mode") == "ares");
    CHECK(summary.at("seed") == "17");
    CHECK(summary.at("config_digest") == config_digest(cfg));
    CHECK(summary.at("birds") == 3);
    CHECK(summary.at("converged").is_boolean());
    CHECK(summary.at("final_cost").is_number());
    CHECK(summary.at("levels").is_array());

    std::ifstream tf(dir.path / "a" / "trajectory.txt");
    const TrajectoryData td = read_trajectory(tf);
    CHECK(td.mode == "ares");
    CHECK(td.seed == 17);
    CHECK(td.digest == config_digest(cfg));
    CHECK(td.trace.steps.size() == summary.at("steps").get<std::size_t>());
    CHECK(td.trace.committed_levels.size() == summary.at("levels").size());
    CHECK(replay_deviation(td) == 0.0);

    // Same configuration, fresh directory: byte-identical outputs.
    ov.out_dir = (dir.path / "b").string();
    std::ostringstream log2;
    REQUIRE(run_experiment(cfg, ov, log2) == 0);
    for (const char* name : {"config.txt", "summary.json", "trajectory.txt"})
        CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
    CHECK(log.str() == log2.str());
}

TEST_CASE("experiment: command-line overrides replace config values") {
    const ExperimentConfig cfg = parsed(
        "[experiment]\nmode = ares\nbirds = 3\nseed = 17\n" + light_overrides());
    TempDir dir("override");
    CliOverrides ov;
    ov.seed = 99;
    ov.out_dir = (dir.path / "o").string();
    std::ostringstream log;
    REQUIRE(run_experiment(cfg, ov, log) == 0);

    // The override is part of the effective config, so it lands in the
    // canonical text, the digest and the trajectory header.
    const std::string canon = slurp(dir.path / "o" / "config.txt");
    CHECK(canon.find("seed = 99") != std::string::npos);
    const json summary = json::parse(slurp(dir.path / "o" / "summary.json"));
    CHECK(summary.at("seed") == "99");
    std::ifstream tf(dir.path / "o" / "trajectory.txt");
    const TrajectoryData td = read_trajectory(tf);
    CHECK(td.seed == 99);
    ExperimentConfig expect = cfg;
    expect.seed = 99;
    CHECK(td.digest == config_digest(expect));
}

TEST_CASE("experiment: invalid configuration exits with code 2") {
    ExperimentConfig bad;
    bad.flock.accel_ratio = 1.5;
    TempDir dir("invalid");
    CliOverrides ov;
    ov.out_dir = (dir.path / "e").string();
    std::ostringstream log;
    CHECK(run_experiment(bad, ov, log) == 2);
    CHECK(log.str().find("config error: flock.accel_ratio") != std::string::npos);
    CHECK(!fs::exists(dir.path / "e"));
}

TEST_CASE("experiment: dampc runs emit the level ledger") {
    const ExperimentConfig cfg = parsed(
        "[experiment]\nmode = dampc\nbirds = 3\nseed = 11\n"
        "[dampc]\nmax_steps = 6\nthreshold = 0.02\n" + light_overrides());
    TempDir dir("dampc");
    CliOverrides ov;
    ov.out_dir = (dir.path / "d").string();
    std::ostringstream log;
    REQUIRE(run_experiment(cfg, ov, log) == 0);

    const json summary = json::parse(slurp(dir.path / "d" / "summary.json"));
    CHECK(summary.at("avg_neighborhood").is_number());

    // One ledger row per executed step.
    std::istringstream lc(slurp(dir.path / "d" / "ledger.csv"));
    std::string line;
    REQUIRE(std::getline(lc, line));
    CHECK(line == "step,cost,level,delta,k,rounds");
    int rows = 0;
    while (std::getline(lc, line))
        if (!line.empty()) ++rows;
    CHECK(rows == summary.at("steps").get<int>());

    std::ifstream tf(dir.path / "d" / "trajectory.txt");
    const TrajectoryData td = read_trajectory(tf);
    CHECK(td.mode == "dampc");
    CHECK(replay_deviation(td) == 0.0);
}

TEST_CASE("experiment: smc batch writes per-run records") {
    const ExperimentConfig cfg = parsed(
        "[experiment]\nmode = smc-batch\nbirds = 3\nseed = 3\nruns = 4\n"
        "[smc]\ntarget = ares\n" + light_overrides());
    TempDir dir("batch");
    CliOverrides ov;
    ov.out_dir = (dir.path / "s1").string();
    std::ostringstream log;
    REQUIRE(run_experiment(cfg, ov, log) == 0);

    const json summary = json::parse(slurp(dir.path / "s1" / "summary.json"));
    CHECK(summary.at("target") == "ares");
    CHECK(summary.at("runs") == 4);
    const int successes = summary.at("successes").get<int>();
    CHECK(successes >= 0);
    CHECK(successes <= 4);
    CHECK(summary.at("success_rate").get<double>() ==
          doctest::Approx(successes / 4.0).epsilon(1e-12));
    CHECK(!fs::exists(dir.path / "s1" / "trajectory.txt"));

    // Each record carries its own derived run seed, in index order.
    std::istringstream rc(slurp(dir.path / "s1" / "runs.csv"));
    std::string line;
    REQUIRE(std::getline(rc, line));
    CHECK(line ==
          "index,seed,success,duration,avg_horizon,avg_neighborhood,final_cost");
    for (int i = 0; i < 4; ++i) {
        REQUIRE(std::getline(rc, line));
        const std::string prefix =
            std::to_string(i) + ',' + std::to_string(smc::run_seed(3, i)) + ',';
        CHECK(line.substr(0, prefix.size()) == prefix);
    }
    CHECK(!std::getline(rc, line));

    // Worker count must not change any output byte.
    ov.out_dir = (dir.path / "s2").string();
    ov.workers = 3;
    std::ostringstream log2;
    REQUIRE(run_experiment(cfg, ov, log2) == 0);
    CHECK(slurp(dir.path / "s1" / "runs.csv") == slurp(dir.path / "s2" / "runs.csv"));
    CHECK(slurp(dir.path / "s1" / "summary.json") ==
          slurp(dir.path / "s2" / "summary.json"));
}
