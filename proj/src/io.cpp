#include "vform/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "vform/config.hpp"
#include "vform/errors.hpp"

namespace vform {

namespace {

constexpr const char* kMagic = "vform-trajectory 1";

void write_state_rows(std::ostream& out, const FlockState& s) {
    for (int i = 0; i < s.size(); ++i)
        out << format_g17(s.x[i].x) << ' ' << format_g17(s.x[i].y) << ' '
            << format_g17(s.v[i].x) << ' ' << format_g17(s.v[i].y) << ' '
            << int(s.removed[i]) << '\n';
}

std::string expect_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(std::string("trajectory: unexpected end of file, wanted ") + what);
    return line;
}

// Reads "key v1 v2 ..." and returns the values; checks the key.
std::vector<std::string> keyed(const std::string& line, const std::string& key) {
    std::istringstream in(line);
    std::string k;
    in >> k;
    if (k != key) throw ConfigError("trajectory: expected '" + key + "', got '" + k + "'");
    std::vector<std::string> vals;
    std::string v;
    while (in >> v) vals.push_back(v);
    return vals;
}

double to_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(s, &pos);
        if (pos == s.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("trajectory: bad number '" + s + "'");
}

int to_int(const std::string& s) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("trajectory: bad integer '" + s + "'");
}

std::uint64_t to_u64(const std::string& s) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos == s.size() && s[0] != '-') return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("trajectory: bad integer '" + s + "'");
}

// Single-value header line.
std::string single(const std::string& line, const std::string& key) {
    const auto vals = keyed(line, key);
    if (vals.size() != 1)
        throw ConfigError("trajectory: '" + key + "' needs exactly one value");
    return vals[0];
}

FlockState read_state_rows(std::istream& in, int birds) {
    FlockState s = make_state(birds);
    for (int i = 0; i < birds; ++i) {
        std::istringstream row(expect_line(in, "state row"));
        int rm;
        if (!(row >> s.x[i].x >> s.x[i].y >> s.v[i].x >> s.v[i].y >> rm))
            throw ConfigError("trajectory: malformed state row");
        s.removed[i] = static_cast<std::uint8_t>(rm);
    }
    return s;
}

} // namespace

void write_trajectory(std::ostream& out, const TrajectoryData& td) {
    const FlockParams& p = td.params;
    out << kMagic << '\n'
        << "mode " << td.mode << '\n'
        << "seed " << td.seed << '\n'
        << "digest " << td.digest << '\n'
        << "birds " << td.trace.initial.size() << '\n'
        << "params " << format_g17(p.wing_span) << ' ' << format_g17(p.view_angle)
        << ' ' << format_g17(p.v_max) << ' ' << format_g17(p.accel_ratio) << ' '
        << format_g17(p.upwash_alpha) << ' ' << format_g17(p.upwash_mean.x) << ' '
        << format_g17(p.upwash_mean.y) << ' ' << format_g17(p.sigma_xx) << ' '
        << format_g17(p.sigma_xy) << ' ' << format_g17(p.sigma_yy) << ' '
        << format_g17(p.min_pair_distance) << '\n'
        << "levels";
    for (double l : td.trace.committed_levels) out << ' ' << format_g17(l);
    out << '\n'
        << "final_cost " << format_g17(td.trace.final_cost) << '\n'
        << "converged " << int(td.trace.converged) << '\n'
        << "steps " << td.trace.steps.size() << '\n'
        << "state\n";
    write_state_rows(out, td.trace.initial);

    int idx = 0;
    for (const TraceStep& ts : td.trace.steps) {
        out << "step " << ++idx << " level " << format_g17(ts.level) << " delta "
            << format_g17(ts.delta) << " horizon " << ts.horizon << " particles "
            << ts.particles << '\n';
        for (int i = 0; i < td.trace.initial.size(); ++i)
            out << format_g17(ts.accel[i].x) << ' ' << format_g17(ts.accel[i].y)
                << ' ' << format_g17(ts.dist.displacement[i].x) << ' '
                << format_g17(ts.dist.displacement[i].y) << ' '
                << int(ts.dist.remove[i]) << '\n';
        out << "state\n";
        write_state_rows(out, ts.state_after);
    }
}

TrajectoryData read_trajectory(std::istream& in) {
    if (expect_line(in, "magic") != kMagic)
        throw ConfigError("trajectory: bad magic line");

    TrajectoryData td;
    td.mode = single(expect_line(in, "mode"), "mode");
    td.seed = to_u64(single(expect_line(in, "seed"), "seed"));
    td.digest = single(expect_line(in, "digest"), "digest");
    const int birds = to_int(single(expect_line(in, "birds"), "birds"));
    if (birds < 1) throw ConfigError("trajectory: birds must be >= 1");

    const auto pv = keyed(expect_line(in, "params"), "params");
    if (pv.size() != 11) throw ConfigError("trajectory: params line needs 11 values");
    FlockParams& p = td.params;
    p.wing_span = to_double(pv[0]);
    p.view_angle = to_double(pv[1]);
    p.v_max = to_double(pv[2]);
    p.accel_ratio = to_double(pv[3]);
    p.upwash_alpha = to_double(pv[4]);
    p.upwash_mean = {to_double(pv[5]), to_double(pv[6])};
    p.sigma_xx = to_double(pv[7]);
    p.sigma_xy = to_double(pv[8]);
    p.sigma_yy = to_double(pv[9]);
    p.min_pair_distance = to_double(pv[10]);

    for (const std::string& l : keyed(expect_line(in, "levels"), "levels"))
        td.trace.committed_levels.push_back(to_double(l));
    td.trace.final_cost = to_double(single(expect_line(in, "final_cost"), "final_cost"));
    td.trace.converged = single(expect_line(in, "converged"), "converged") == "1";
    const int steps = to_int(single(expect_line(in, "steps"), "steps"));
    if (steps < 0) throw ConfigError("trajectory: steps must be >= 0");

    keyed(expect_line(in, "state"), "state");
    td.trace.initial = read_state_rows(in, birds);

    for (int t = 0; t < steps; ++t) {
        const auto sv = keyed(expect_line(in, "step"), "step");
        if (sv.size() != 9 || sv[1] != "level" || sv[3] != "delta" ||
            sv[5] != "horizon" || sv[7] != "particles")
            throw ConfigError("trajectory: malformed step header");
        TraceStep ts;
        ts.level = to_double(sv[2]);
        ts.delta = to_double(sv[4]);
        ts.horizon = to_int(sv[6]);
        ts.particles = to_int(sv[8]);
        ts.accel.resize(birds);
        ts.dist = Disturbance::none(birds);
        for (int i = 0; i < birds; ++i) {
            std::istringstream row(expect_line(in, "action row"));
            int rm;
            if (!(row >> ts.accel[i].x >> ts.accel[i].y >> ts.dist.displacement[i].x >>
                  ts.dist.displacement[i].y >> rm))
                throw ConfigError("trajectory: malformed action row");
            ts.dist.remove[i] = static_cast<std::uint8_t>(rm);
        }
        keyed(expect_line(in, "state"), "state");
        ts.state_after = read_state_rows(in, birds);
        td.trace.steps.push_back(std::move(ts));
    }
    return td;
}

double replay_deviation(const TrajectoryData& td) {
    FlockState cur = td.trace.initial;
    double worst = 0.0;
    for (const TraceStep& ts : td.trace.steps) {
        cur = step(cur, ts.accel, ts.dist, td.params);
        for (int i = 0; i < cur.size(); ++i) {
            worst = std::max(worst, std::fabs(cur.x[i].x - ts.state_after.x[i].x));
            worst = std::max(worst, std::fabs(cur.x[i].y - ts.state_after.x[i].y));
            worst = std::max(worst, std::fabs(cur.v[i].x - ts.state_after.v[i].x));
            worst = std::max(worst, std::fabs(cur.v[i].y - ts.state_after.v[i].y));
            if (cur.removed[i] != ts.state_after.removed[i])
                worst = std::max(worst, 1.0);
        }
    }
    return worst;
}

void write_ledger_csv(std::ostream& out, const dampc::LevelLedger& ledger) {
    out << "step,cost,level,delta,k,rounds\n";
    for (const dampc::StepRow& r : ledger.rows)
        out << r.step << ',' << format_g17(r.lookahead_cost) << ','
            << format_g17(r.level) << ',' << format_g17(r.delta) << ',' << r.k
            << ',' << r.rounds << '\n';
}

void write_runs_csv(std::ostream& out, const smc::RunStats& stats) {
    out << "index,seed,success,duration,avg_horizon,avg_neighborhood,final_cost\n";
    for (std::size_t i = 0; i < stats.records.size(); ++i) {
        const smc::RunRecord& r = stats.records[i];
        out << i << ',' << r.seed << ',' << int(r.success) << ','
            << format_g17(r.duration) << ',' << format_g17(r.avg_horizon) << ','
            << format_g17(r.avg_neighborhood) << ',' << format_g17(r.final_cost)
            << '\n';
    }
}

} // namespace vform
