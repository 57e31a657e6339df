#include "vform/config.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>

namespace vform {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_double(const std::string& v, double& out) {
    const char* c = v.c_str();
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(c, &end);
    if (end == c || *end != '\0' || errno == ERANGE || std::isnan(d)) return false;
    out = d;
    return true;
}

bool parse_int(const std::string& v, int& out) {
    const char* c = v.c_str();
    char* end = nullptr;
    errno = 0;
    const long l = std::strtol(c, &end, 10);
    if (end == c || *end != '\0' || errno == ERANGE || l < INT_MIN || l > INT_MAX)
        return false;
    out = static_cast<int>(l);
    return true;
}

bool parse_u64(const std::string& v, std::uint64_t& out) {
    if (v.empty() || v[0] == '-') return false;
    const char* c = v.c_str();
    char* end = nullptr;
    errno = 0;
    const unsigned long long u = std::strtoull(c, &end, 10);
    if (end == c || *end != '\0' || errno == ERANGE) return false;
    out = u;
    return true;
}

bool parse_id_list(const std::string& v, std::vector<int>& out) {
    out.clear();
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) {
        int id;
        if (!parse_int(tok, id)) return false;
        out.push_back(id - 1); // 1-based in files, 0-based internally
    }
    return true;
}

std::string id_list_text(const std::vector<int>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(ids[i] + 1);
    }
    return s;
}

struct Field {
    const char* section;
    const char* key;
    std::function<bool(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Sub>
Field fd(const char* sec, const char* key, Sub ExperimentConfig::* sub, double Sub::* m) {
    return {sec, key,
            [=](ExperimentConfig& c, const std::string& v) { return parse_double(v, c.*sub.*m); },
            [=](const ExperimentConfig& c) { return format_g17(c.*sub.*m); }};
}

template <typename Sub>
Field fi(const char* sec, const char* key, Sub ExperimentConfig::* sub, int Sub::* m) {
    return {sec, key,
            [=](ExperimentConfig& c, const std::string& v) { return parse_int(v, c.*sub.*m); },
            [=](const ExperimentConfig& c) { return std::to_string(c.*sub.*m); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = [] {
        std::vector<Field> r;
        r.push_back({"experiment", "mode",
                     [](ExperimentConfig& c, const std::string& v) { return mode_from_string(v, c.mode); },
                     [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); }});
        r.push_back({"experiment", "birds",
                     [](ExperimentConfig& c, const std::string& v) { return parse_int(v, c.birds); },
                     [](const ExperimentConfig& c) { return std::to_string(c.birds); }});
        r.push_back({"experiment", "seed",
                     [](ExperimentConfig& c, const std::string& v) { return parse_u64(v, c.seed); },
                     [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
        r.push_back({"experiment", "runs",
                     [](ExperimentConfig& c, const std::string& v) { return parse_int(v, c.runs); },
                     [](const ExperimentConfig& c) { return std::to_string(c.runs); }});

        r.push_back(fd("flock", "wing_span", &ExperimentConfig::flock, &FlockParams::wing_span));
        r.push_back(fd("flock", "view_angle", &ExperimentConfig::flock, &FlockParams::view_angle));
        r.push_back(fd("flock", "v_max", &ExperimentConfig::flock, &FlockParams::v_max));
        r.push_back(fd("flock", "accel_ratio", &ExperimentConfig::flock, &FlockParams::accel_ratio));
        r.push_back(fd("flock", "upwash_alpha", &ExperimentConfig::flock, &FlockParams::upwash_alpha));
        r.push_back({"flock", "upwash_mean_x",
                     [](ExperimentConfig& c, const std::string& v) { return parse_double(v, c.flock.upwash_mean.x); },
                     [](const ExperimentConfig& c) { return format_g17(c.flock.upwash_mean.x); }});
        r.push_back({"flock", "upwash_mean_y",
                     [](ExperimentConfig& c, const std::string& v) { return parse_double(v, c.flock.upwash_mean.y); },
                     [](const ExperimentConfig& c) { return format_g17(c.flock.upwash_mean.y); }});
        r.push_back(fd("flock", "sigma_xx", &ExperimentConfig::flock, &FlockParams::sigma_xx));
        r.push_back(fd("flock", "sigma_xy", &ExperimentConfig::flock, &FlockParams::sigma_xy));
        r.push_back(fd("flock", "sigma_yy", &ExperimentConfig::flock, &FlockParams::sigma_yy));
        r.push_back(fd("flock", "min_pair_distance", &ExperimentConfig::flock, &FlockParams::min_pair_distance));

        auto vec_field = [](const char* key, Vec2 InitBounds::* m, bool is_x) {
            return Field{"init", key,
                         [m, is_x](ExperimentConfig& c, const std::string& v) {
                             return parse_double(v, is_x ? (c.init.*m).x : (c.init.*m).y);
                         },
                         [m, is_x](const ExperimentConfig& c) {
                             return format_g17(is_x ? (c.init.*m).x : (c.init.*m).y);
                         }};
        };
        r.push_back(vec_field("pos_lo_x", &InitBounds::pos_lo, true));
        r.push_back(vec_field("pos_lo_y", &InitBounds::pos_lo, false));
        r.push_back(vec_field("pos_hi_x", &InitBounds::pos_hi, true));
        r.push_back(vec_field("pos_hi_y", &InitBounds::pos_hi, false));
        r.push_back(vec_field("vel_lo_x", &InitBounds::vel_lo, true));
        r.push_back(vec_field("vel_lo_y", &InitBounds::vel_lo, false));
        r.push_back(vec_field("vel_hi_x", &InitBounds::vel_hi, true));
        r.push_back(vec_field("vel_hi_y", &InitBounds::vel_hi, false));

        r.push_back(fd("pso", "inertia", &ExperimentConfig::pso, &PsoConfig::inertia));
        r.push_back(fd("pso", "self_adjust", &ExperimentConfig::pso, &PsoConfig::self_adjust));
        r.push_back(fd("pso", "social_adjust", &ExperimentConfig::pso, &PsoConfig::social_adjust));
        r.push_back(fi("pso", "max_iterations", &ExperimentConfig::pso, &PsoConfig::max_iterations));
        r.push_back(fd("pso", "neighborhood_fraction", &ExperimentConfig::pso, &PsoConfig::neighborhood_fraction));
        r.push_back(fd("pso", "stall_tolerance", &ExperimentConfig::pso, &PsoConfig::stall_tolerance));
        r.push_back(fi("pso", "stall_iterations", &ExperimentConfig::pso, &PsoConfig::stall_iterations));

        r.push_back(fd("ares", "threshold", &ExperimentConfig::ares, &ares::AresConfig::threshold));
        r.push_back(fi("ares", "clone_count", &ExperimentConfig::ares, &ares::AresConfig::clone_count));
        r.push_back(fi("ares", "max_levels", &ExperimentConfig::ares, &ares::AresConfig::max_levels));
        r.push_back(fi("ares", "h_max", &ExperimentConfig::ares, &ares::AresConfig::h_max));
        r.push_back(fi("ares", "p_start", &ExperimentConfig::ares, &ares::AresConfig::p_start));
        r.push_back(fi("ares", "p_inc", &ExperimentConfig::ares, &ares::AresConfig::p_inc));
        r.push_back(fi("ares", "p_max", &ExperimentConfig::ares, &ares::AresConfig::p_max));

        r.push_back(fd("dampc", "threshold", &ExperimentConfig::dampc, &dampc::DampcConfig::threshold));
        r.push_back(fi("dampc", "h_max", &ExperimentConfig::dampc, &dampc::DampcConfig::h_max));
        r.push_back(fi("dampc", "max_steps", &ExperimentConfig::dampc, &dampc::DampcConfig::max_steps));
        r.push_back(fi("dampc", "beta", &ExperimentConfig::dampc, &dampc::DampcConfig::beta));
        r.push_back(fi("dampc", "k_min", &ExperimentConfig::dampc, &dampc::DampcConfig::k_min));
        r.push_back(fi("dampc", "k_max", &ExperimentConfig::dampc, &dampc::DampcConfig::k_max));

        r.push_back(fi("game", "attacked_count", &ExperimentConfig::game, &games::GameConfig::attacked_count));
        r.push_back({"game", "remove",
                     [](ExperimentConfig& c, const std::string& v) { return parse_id_list(v, c.game.removal_set); },
                     [](const ExperimentConfig& c) { return id_list_text(c.game.removal_set); }});
        r.push_back(fd("game", "magnitude", &ExperimentConfig::game, &games::GameConfig::magnitude));
        r.push_back(fi("game", "attack_rounds", &ExperimentConfig::game, &games::GameConfig::attack_rounds));
        r.push_back(fd("game", "threshold", &ExperimentConfig::game, &games::GameConfig::threshold));
        r.push_back(fi("game", "max_steps", &ExperimentConfig::game, &games::GameConfig::max_steps));
        r.push_back(fi("game", "h_max", &ExperimentConfig::game, &games::GameConfig::h_max));
        r.push_back(fi("game", "att_h_max", &ExperimentConfig::game, &games::GameConfig::att_h_max));
        r.push_back(fi("game", "beta_ctrl", &ExperimentConfig::game, &games::GameConfig::beta_ctrl));
        r.push_back(fi("game", "beta_att", &ExperimentConfig::game, &games::GameConfig::beta_att));

        r.push_back({"smc", "epsilon",
                     [](ExperimentConfig& c, const std::string& v) { return parse_double(v, c.smc_epsilon); },
                     [](const ExperimentConfig& c) { return format_g17(c.smc_epsilon); }});
        r.push_back({"smc", "delta",
                     [](ExperimentConfig& c, const std::string& v) { return parse_double(v, c.smc_delta); },
                     [](const ExperimentConfig& c) { return format_g17(c.smc_delta); }});
        r.push_back({"smc", "target",
                     [](ExperimentConfig& c, const std::string& v) { return mode_from_string(v, c.smc_target); },
                     [](const ExperimentConfig& c) { return std::string(to_string(c.smc_target)); }});
        return r;
    }();
    return f;
}

} // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* to_string(Mode mode) {
    switch (mode) {
        case Mode::Ares: return "ares";
        case Mode::Dampc: return "dampc";
        case Mode::GameBrg: return "game-brg";
        case Mode::GameRdg: return "game-rdg";
        case Mode::GameAmpc: return "game-ampc";
        case Mode::SmcBatch: return "smc-batch";
    }
    return "?";
}

bool mode_from_string(const std::string& name, Mode& out) {
    for (Mode m : {Mode::Ares, Mode::Dampc, Mode::GameBrg, Mode::GameRdg,
                   Mode::GameAmpc, Mode::SmcBatch})
        if (name == to_string(m)) {
            out = m;
            return true;
        }
    return false;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    return canonical_text(*this) == canonical_text(o);
}

ExperimentConfig parse_config(const std::string& text,
                              std::vector<std::string>& errors) {
    ExperimentConfig cfg;
    std::map<std::pair<std::string, std::string>, bool> seen;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": key '" + key +
                             "' outside any [section]");
            continue;
        }

        const Field* field = nullptr;
        for (const Field& f : fields())
            if (section == f.section && key == f.key) { field = &f; break; }
        if (!field) {
            errors.push_back(section + "." + key + ": unknown key");
            continue;
        }
        if (seen[{section, key}]) {
            errors.push_back(section + "." + key + ": duplicate key");
            continue;
        }
        seen[{section, key}] = true;
        if (!field->set(cfg, value))
            errors.push_back(section + "." + key + ": invalid value '" + value + "'");
    }
    return cfg;
}

void validate_config(const ExperimentConfig& cfg, std::vector<std::string>& errors) {
    auto bad = [&](const std::string& msg) { errors.push_back(msg); };

    if (cfg.birds < 1) bad("experiment.birds: must be >= 1");
    if (cfg.runs < 0) bad("experiment.runs: must be >= 0");

    const FlockParams& f = cfg.flock;
    if (!(f.wing_span > 0.0)) bad("flock.wing_span: must be > 0");
    if (!(f.view_angle > 0.0 && f.view_angle <= kTau))
        bad("flock.view_angle: must be in (0, 2*pi]");
    if (!(f.v_max > 0.0)) bad("flock.v_max: must be > 0");
    if (!(f.accel_ratio > 0.0 && f.accel_ratio < 1.0))
        bad("flock.accel_ratio: must be in (0, 1), got " + format_g17(f.accel_ratio));
    if (!(f.upwash_alpha > 0.0)) bad("flock.upwash_alpha: must be > 0");
    if (!(f.sigma_xx > 0.0 && f.sigma_xx * f.sigma_yy - f.sigma_xy * f.sigma_xy > 0.0))
        bad("flock.sigma_*: covariance must be positive definite");
    if (!(f.min_pair_distance >= 0.0)) bad("flock.min_pair_distance: must be >= 0");

    if (cfg.init.pos_hi.x < cfg.init.pos_lo.x || cfg.init.pos_hi.y < cfg.init.pos_lo.y)
        bad("init.pos_*: need lo <= hi");
    if (cfg.init.vel_hi.x < cfg.init.vel_lo.x || cfg.init.vel_hi.y < cfg.init.vel_lo.y)
        bad("init.vel_*: need lo <= hi");

    const PsoConfig& p = cfg.pso;
    if (p.max_iterations < 1) bad("pso.max_iterations: must be >= 1");
    if (!(p.neighborhood_fraction > 0.0 && p.neighborhood_fraction <= 1.0))
        bad("pso.neighborhood_fraction: must be in (0, 1]");
    if (!(p.stall_tolerance >= 0.0)) bad("pso.stall_tolerance: must be >= 0");
    if (p.stall_iterations < 1) bad("pso.stall_iterations: must be >= 1");
    if (!(p.inertia >= 0.0)) bad("pso.inertia: must be >= 0");
    if (!(p.self_adjust >= 0.0) || !(p.social_adjust >= 0.0))
        bad("pso.self_adjust/social_adjust: must be >= 0");

    const auto& a = cfg.ares;
    if (!(a.threshold > 0.0)) bad("ares.threshold: must be > 0");
    if (a.clone_count < 1) bad("ares.clone_count: must be >= 1");
    if (a.max_levels < 1) bad("ares.max_levels: must be >= 1");
    if (a.h_max < 1) bad("ares.h_max: must be >= 1");
    if (a.p_start < 1 || a.p_max < a.p_start)
        bad("ares.p_start/p_max: need 1 <= p_start <= p_max");
    if (a.p_inc < 1) bad("ares.p_inc: must be >= 1");

    const auto& d = cfg.dampc;
    if (!(d.threshold > 0.0)) bad("dampc.threshold: must be > 0");
    if (d.h_max < 1) bad("dampc.h_max: must be >= 1");
    if (d.max_steps < 1) bad("dampc.max_steps: must be >= 1");
    if (d.beta < 1) bad("dampc.beta: must be >= 1");
    if (d.k_min < 1 || d.k_max < d.k_min) bad("dampc.k_min/k_max: need 1 <= k_min <= k_max");

    const auto& g = cfg.game;
    if (!(g.threshold > 0.0)) bad("game.threshold: must be > 0");
    if (g.max_steps < 1) bad("game.max_steps: must be >= 1");
    if (g.h_max < 1) bad("game.h_max: must be >= 1");
    if (g.att_h_max < 1) bad("game.att_h_max: must be >= 1");
    if (g.beta_ctrl < 1 || g.beta_att < 1) bad("game.beta_*: must be >= 1");
    if (!(g.magnitude >= 0.0)) bad("game.magnitude: must be >= 0");
    if (g.attack_rounds < 0 || g.attack_rounds > g.max_steps)
        bad("game.attack_rounds: must be in [0, game.max_steps]");

    const Mode effective = cfg.mode == Mode::SmcBatch ? cfg.smc_target : cfg.mode;
    if (effective == Mode::GameBrg) {
        const int r = g.removal_set.empty() ? g.attacked_count
                                            : static_cast<int>(g.removal_set.size());
        if (r < 0 || r >= cfg.birds)
            bad("game.attacked_count: removal must leave at least one bird");
        std::vector<int> ids = g.removal_set;
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] < 0 || ids[i] >= cfg.birds) {
                bad("game.remove: bird ids must be in [1, birds]");
                break;
            }
            if (i && ids[i] == ids[i - 1]) {
                bad("game.remove: duplicate bird id");
                break;
            }
        }
    } else if (effective == Mode::GameRdg || effective == Mode::GameAmpc) {
        if (g.attacked_count < 0 || g.attacked_count > cfg.birds)
            bad("game.attacked_count: must be in [0, birds]");
    }

    if (!(cfg.smc_epsilon > 0.0 && cfg.smc_epsilon <= 1.0))
        bad("smc.epsilon: must be in (0, 1]");
    if (!(cfg.smc_delta > 0.0 && cfg.smc_delta < 1.0))
        bad("smc.delta: must be in (0, 1)");
    if (cfg.smc_target == Mode::SmcBatch)
        bad("smc.target: must name a single-run mode");
}

std::string canonical_text(const ExperimentConfig& cfg) {
    std::string out;
    std::string section;
    for (const Field& f : fields()) {
        if (section != f.section) {
            section = f.section;
            if (!out.empty()) out += '\n';
            out += '[' + section + "]\n";
        }
        out += std::string(f.key) + " = " + f.get(cfg) + '\n';
    }
    return out;
}

std::string config_digest(const ExperimentConfig& cfg) {
    const std::string text = canonical_text(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace vform
