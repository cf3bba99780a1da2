#include "heatlab/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "heatlab/errors.hpp"
#include "heatlab/profile.hpp"

namespace heatlab {

const char* to_string(TaskKind k) {
    switch (k) {
        case TaskKind::geometry: return "geometry";
        case TaskKind::iso: return "iso";
        case TaskKind::fk: return "fk";
        case TaskKind::bounds: return "bounds";
        case TaskKind::solve: return "solve";
        case TaskKind::pipeline: return "pipeline";
        case TaskKind::verify: return "verify";
    }
    return "?";
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double to_double(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'", line);
    }
}

int to_int(const std::string& key, const std::string& v, int line) {
    double d = to_double(key, v, line);
    if (d != std::floor(d) || std::fabs(d) > 1e9) throw ConfigError(key + ": not an integer: '" + v + "'", line);
    return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'", line);
}

double positive(const std::string& key, double v, int line) {
    if (!(v > 0.0)) throw ConfigError(key + " must be positive", line);
    return v;
}

template <class E>
E pick(const std::string& key, const std::string& v, const std::map<std::string, E>& opts, int line) {
    auto it = opts.find(v);
    if (it == opts.end()) {
        std::string names;
        for (const auto& [k, e] : opts) names += (names.empty() ? "" : ", ") + k;
        throw ConfigError(key + ": unknown value '" + v + "' (expected " + names + ")", line);
    }
    return it->second;
}

const std::map<std::string, TaskKind> kTasks{{"geometry", TaskKind::geometry}, {"iso", TaskKind::iso},
                                             {"fk", TaskKind::fk},             {"bounds", TaskKind::bounds},
                                             {"solve", TaskKind::solve},       {"pipeline", TaskKind::pipeline},
                                             {"verify", TaskKind::verify}};
const std::map<std::string, WeightKind> kWeights{{"none", WeightKind::none}, {"two_end", WeightKind::two_end}};
const std::map<std::string, Spacing> kSpacing{{"uniform", Spacing::uniform}, {"graded", Spacing::graded}};
const std::map<std::string, Scheme> kScheme{{"crank_nicolson", Scheme::crank_nicolson},
                                            {"implicit_euler", Scheme::implicit_euler}};
const std::map<std::string, BoundaryCondition> kBc{{"neumann", BoundaryCondition::neumann},
                                                   {"dirichlet", BoundaryCondition::dirichlet}};
const std::map<std::string, OutputFormat> kFormat{{"csv", OutputFormat::csv}, {"json", OutputFormat::json}};

template <class E>
std::string name_of(E e, const std::map<std::string, E>& opts) {
    for (const auto& [k, v] : opts)
        if (v == e) return k;
    return "?";
}

const std::map<std::string, std::vector<std::string>> kSectionKeys{
    {"model", {"family", "alpha", "n", "beta", "cap_radius", "path", "domain", "weight"}},
    {"minus", {"family", "alpha", "n", "beta", "cap_radius", "path", "domain"}},
    {"task", {"task", "source"}},
    {"grid", {"r_min", "r_max", "nodes", "spacing", "ratio", "dt", "scheme", "rannacher_startup_steps", "left_bc",
              "far_bc", "auto_extend"}},
    {"time", {"t_start", "t_end", "t_steps", "log_spaced"}},
    {"output", {"dir", "format"}},
    {"calibration", {"anchor", "fk_c", "fk_Q"}},
    {"verify", {"seed"}},
};

struct Profiles {
    std::string model, minus;
    int model_line = 0, minus_line = 0;
};

void apply(TaskConfig& c, Profiles& p, const std::string& sec, const std::string& key, const std::string& val,
           int line) {
    const auto& allowed = kSectionKeys.at(sec);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw ConfigError("unknown key '" + key + "' in [" + sec + "]", line);
    if (sec == "model" || sec == "minus") {
        if (key == "weight") {
            c.weight = pick(key, val, kWeights, line);
            return;
        }
        std::string& s = sec == "model" ? p.model : p.minus;
        (sec == "model" ? p.model_line : p.minus_line) = line;
        s += (s.empty() ? "" : " ") + key + "=" + val;
        return;
    }
    if (key == "task") c.task = pick(key, val, kTasks, line);
    else if (key == "source") c.source = to_double(key, val, line);
    else if (key == "r_min") c.r_min = to_double(key, val, line);
    else if (key == "r_max") c.r_max = to_double(key, val, line);
    else if (key == "nodes") {
        int n = to_int(key, val, line);
        if (n < 64) throw ConfigError("nodes must be at least 64", line);
        c.nodes = n;
    } else if (key == "spacing") c.spacing = pick(key, val, kSpacing, line);
    else if (key == "ratio") c.ratio = positive(key, to_double(key, val, line), line);
    else if (key == "dt") c.dt = positive(key, to_double(key, val, line), line);
    else if (key == "scheme") c.scheme = pick(key, val, kScheme, line);
    else if (key == "rannacher_startup_steps") {
        int n = to_int(key, val, line);
        if (n < 0) throw ConfigError("rannacher_startup_steps must be nonnegative", line);
        c.rannacher_startup_steps = n;
    } else if (key == "left_bc") c.left_bc = pick(key, val, kBc, line);
    else if (key == "far_bc") c.far_bc = pick(key, val, kBc, line);
    else if (key == "auto_extend") c.auto_extend = to_bool(key, val, line);
    else if (key == "t_start") c.t_start = positive(key, to_double(key, val, line), line);
    else if (key == "t_end") c.t_end = positive(key, to_double(key, val, line), line);
    else if (key == "t_steps") {
        int n = to_int(key, val, line);
        if (n < 1) throw ConfigError("t_steps must be positive", line);
        c.t_steps = n;
    } else if (key == "log_spaced") c.log_spaced = to_bool(key, val, line);
    else if (key == "dir") {
        if (val.empty()) throw ConfigError("dir must not be empty", line);
        c.out_dir = val;
    } else if (key == "format") c.format = pick(key, val, kFormat, line);
    else if (key == "anchor") c.anchor = positive(key, to_double(key, val, line), line);
    else if (key == "fk_c") c.fk_c = positive(key, to_double(key, val, line), line);
    else if (key == "fk_Q") {
        double q = to_double(key, val, line);
        if (!(q > 1.0)) throw ConfigError("fk_Q must exceed 1", line);
        c.fk_Q = q;
    } else if (key == "seed") {
        double d = to_double(key, val, line);
        if (d < 0 || d != std::floor(d)) throw ConfigError("seed must be a nonnegative integer", line);
        c.seed = static_cast<std::uint64_t>(d);
    }
}

void check_profile(const std::string& spec, int line) {
    try {
        parse_profile(spec);
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), line);
    } catch (const std::exception& e) {
        throw ConfigError(e.what(), line);
    }
}

}  // namespace

TaskConfig parse_config(const std::string& text) {
    TaskConfig c;
    Profiles p;
    std::istringstream in(text);
    std::string raw, sec;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::string tok;
        while (ls >> tok) {
            if (tok.front() == '[') {
                if (tok.back() != ']' || tok.size() < 3) throw ConfigError("malformed section header '" + tok + "'", line);
                sec = tok.substr(1, tok.size() - 2);
                if (!kSectionKeys.count(sec)) throw ConfigError("unknown section [" + sec + "]", line);
                continue;
            }
            auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + tok + "'", line);
            if (sec.empty()) throw ConfigError("key '" + tok.substr(0, eq) + "' outside a section", line);
            apply(c, p, sec, tok.substr(0, eq), tok.substr(eq + 1), line);
        }
    }
    if (!p.model.empty()) {
        check_profile(p.model, p.model_line);
        c.model = p.model;
    }
    if (!p.minus.empty()) {
        check_profile(p.minus, p.minus_line);
        c.minus = p.minus;
    }

    bool any_time = c.t_start || c.t_end || c.t_steps;
    bool needs_time = c.task == TaskKind::bounds || c.task == TaskKind::pipeline || c.task == TaskKind::solve;
    if (needs_time || any_time) {
        if (!c.t_start) throw ConfigError("missing required key t_start in [time]");
        if (!c.t_end) throw ConfigError("missing required key t_end in [time]");
        if (!c.t_steps) throw ConfigError("missing required key t_steps in [time]");
        if (!(*c.t_end >= *c.t_start)) throw ConfigError("t_end must not be below t_start");
    }
    if (c.r_min && c.r_max && !(*c.r_max > *c.r_min)) throw ConfigError("r_max must exceed r_min");
    if (c.spacing == Spacing::graded && c.ratio && !(*c.ratio > 1.0 && *c.ratio <= 1.05))
        throw ConfigError("ratio must lie in (1, 1.05] for graded spacing");
    return c;
}

TaskConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string render_config(const TaskConfig& c) {
    std::ostringstream os;
    os << "[model] " << c.model << " weight=" << name_of(c.weight, kWeights) << '\n';
    os << "[minus] " << c.minus << '\n';
    os << "[task] task=" << to_string(c.task) << " source=" << num(c.source) << '\n';
    os << "[grid]";
    if (c.r_min) os << " r_min=" << num(*c.r_min);
    if (c.r_max) os << " r_max=" << num(*c.r_max);
    if (c.nodes) os << " nodes=" << *c.nodes;
    os << " spacing=" << name_of(c.spacing, kSpacing);
    if (c.ratio) os << " ratio=" << num(*c.ratio);
    if (c.dt) os << " dt=" << num(*c.dt);
    os << " scheme=" << name_of(c.scheme, kScheme);
    if (c.rannacher_startup_steps) os << " rannacher_startup_steps=" << *c.rannacher_startup_steps;
    os << " left_bc=" << name_of(c.left_bc, kBc) << " far_bc=" << name_of(c.far_bc, kBc)
       << " auto_extend=" << (c.auto_extend ? "true" : "false") << '\n';
    os << "[time]";
    if (c.t_start) os << " t_start=" << num(*c.t_start);
    if (c.t_end) os << " t_end=" << num(*c.t_end);
    if (c.t_steps) os << " t_steps=" << *c.t_steps;
    os << " log_spaced=" << (c.log_spaced ? "true" : "false") << '\n';
    os << "[output] dir=" << c.out_dir << " format=" << name_of(c.format, kFormat) << '\n';
    os << "[calibration]";
    if (c.anchor) os << " anchor=" << num(*c.anchor);
    os << " fk_c=" << num(c.fk_c) << " fk_Q=" << num(c.fk_Q) << '\n';
    os << "[verify] seed=" << c.seed << '\n';
    return os.str();
}

std::vector<double> config_times(const TaskConfig& c) {
    std::vector<double> t;
    if (!c.t_start || !c.t_end || !c.t_steps) return t;
    int n = *c.t_steps;
    for (int i = 0; i < n; ++i) {
        double w = n > 1 ? double(i) / (n - 1) : 0.0;
        t.push_back(c.log_spaced ? *c.t_start * std::pow(*c.t_end / *c.t_start, w)
                                 : *c.t_start + w * (*c.t_end - *c.t_start));
    }
    if (n > 1) t.back() = *c.t_end;
    return t;
}

std::string config_hash(const TaskConfig& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : render_config(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace heatlab
