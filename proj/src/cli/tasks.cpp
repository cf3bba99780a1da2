#include "heatlab/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "heatlab/errors.hpp"
#include "heatlab/h_transform.hpp"
#include "heatlab/isoperimetry.hpp"
#include "heatlab/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace heatlab {

std::string resolve_out_dir(const TaskConfig& cfg) {
    const char* env = std::getenv("HEATLAB_OUT");
    return env && *env ? std::string(env) : cfg.out_dir;
}

namespace {

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

class Output {
public:
    Output(std::string dir, OutputFormat fmt) : dir_(std::move(dir)), fmt_(fmt) { fs::create_directories(dir_); }

    void table(const Table& t) {
        if (fmt_ == OutputFormat::json) {
            report_["tables"][t.name] = {{"columns", t.columns}, {"rows", t.rows}};
            return;
        }
        std::ofstream out(fs::path(dir_) / (t.name + ".csv"));
        if (!out) throw std::runtime_error("cannot write " + t.name + ".csv");
        for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
        out << '\n' << std::setprecision(17);
        for (const auto& r : t.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << '\n';
        }
    }

    json& report() { return report_; }

    std::string finish() {
        std::string s = report_.dump(2);
        std::ofstream(fs::path(dir_) / "report.json") << s << '\n';
        return s;
    }

private:
    std::string dir_;
    OutputFormat fmt_;
    json report_ = json::object();
};

double num_or_nan(double v) { return std::isfinite(v) ? v : NAN; }

WeightedModel base_model(const TaskConfig& cfg) {
    RadialProfile p = parse_profile(cfg.model);
    if (cfg.weight == WeightKind::none) return WeightedModel(p);
    if (p.family() != Family::exp_alpha) throw ConfigError("weight=two_end needs family=exp_alpha for the plus end");
    return WeightedModel(RadialProfile::two_end(p, parse_profile(cfg.minus)));
}

// Base model, or its h-transform when weight=two_end (kappas recorded in info).
WeightedModel solver_model(const TaskConfig& cfg, json& info) {
    WeightedModel m = base_model(cfg);
    if (cfg.weight == WeightKind::none) return m;
    TransformPair pair = build_two_end_weight(m);
    info["kappa1"] = pair.kappa1;
    info["kappa2"] = pair.kappa2;
    return pair.transformed;
}

// Model used by the profile tasks: the model itself, or the plus view from the waist when transformed.
struct HalfLine {
    WeightedModel model;
    std::optional<double> alpha;
    json info = json::object();
};

HalfLine half_line(const TaskConfig& cfg) {
    RadialProfile p = parse_profile(cfg.model);
    std::optional<double> alpha;
    if (p.family() == Family::exp_alpha) alpha = p.alpha();
    if (cfg.weight == WeightKind::two_end) {
        TransformPair pair = build_two_end_weight(base_model(cfg));
        double w = find_waist(pair.transformed);
        HalfLine h{pair.transformed.view(w, +1), alpha};
        h.info = {{"kappa1", pair.kappa1}, {"kappa2", pair.kappa2}, {"waist", w}, {"h_waist", pair.h(w)}};
        return h;
    }
    WeightedModel m(p);
    if (m.domain() != Domain::half_line) throw ConfigError("profile tasks need a half-line model or weight=two_end");
    return {m, alpha};
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return v;
}

void task_geometry(const TaskConfig& cfg, Output& out) {
    WeightedModel M = solver_model(cfg, out.report());
    double lo = cfg.r_min.value_or(std::isfinite(M.r_min()) ? M.r_min() : -10.0);
    double hi = cfg.r_max.value_or(std::min(M.r_max(), 10.0));
    int n = cfg.nodes.value_or(101);
    Table t{"geometry", {"r", "S", "S_tilde", "V"}, {}};
    for (int i = 0; i < n; ++i) {
        double r = lo + (hi - lo) * i / (n - 1);
        t.rows.push_back({r, M.area(r).f, M.area_tilde(r), volume(M, r)});
    }
    out.table(t);
    json& rep = out.report();
    rep["model"] = M.profile().describe();
    rep["plus_end"] = to_string(classify_parabolicity(M, End::plus));
    if (M.domain() == Domain::full_line) rep["minus_end"] = to_string(classify_parabolicity(M, End::minus));
}

void task_iso(const TaskConfig& cfg, Output& out) {
    HalfLine h = half_line(cfg);
    IsoProfile J = profile_halfline(h.model);
    double v_hi = std::min(1e8, J.v_max * (1.0 - 1e-9));
    double v_lo = std::min(1e-2, v_hi * 1e-6);
    IsoProfile env = ratio_envelope(J, std::min(1e-8, v_lo), std::min(1e28, J.v_max * (1.0 - 1e-9)));
    IsoProfile warped = warped_product_profile(env, profile_sphere(h.model.dim()), 1.0, 1.0);
    std::optional<IsoProfile> closed;
    if (h.alpha) closed = asymptotic_profile(*h.alpha, h.model.dim(), 1.0);
    Table t{"iso", {"v", "J_nu", "J_warped", "J_asymptotic"}, {}};
    for (double v : log_grid(v_lo, v_hi, 61)) t.rows.push_back({v, J(v), warped(v), closed ? (*closed)(v) : NAN});
    out.table(t);
    json& rep = out.report();
    rep["setup"] = h.info;
    rep["j_over_v_nonincreasing"] = J.j_over_v_nonincreasing;
    if (closed) rep["c_tilde"] = profile_ratio_min(J, *closed, std::max(1e-6, v_lo), v_hi);
}

void task_fk(const TaskConfig& cfg, Output& out) {
    HalfLine h = half_line(cfg);
    IsoProfile J = profile_halfline(h.model);
    double v_top = std::min(1e28, J.v_max * (1.0 - 1e-9));
    FaberKrahnFunction fk = fk_from_iso(ratio_envelope(J, 1e-8, v_top));
    Table t{"fk", {"v", "Lambda"}, {}};
    for (double v : log_grid(1e-4, std::min(1e8, v_top), 61)) t.rows.push_back({v, fk(v)});
    out.table(t);
    out.report()["setup"] = h.info;
    out.report()["integrable_at_zero"] = fk.integrable_at_zero;
    out.report()["nonincreasing"] = fk.nonincreasing;
}

PipelineOptions pipeline_options(const TaskConfig& cfg) {
    PipelineOptions o;
    if (cfg.r_min) o.grid_r_min = *cfg.r_min;
    if (cfg.r_max) o.grid_r_max = *cfg.r_max;
    if (cfg.nodes) o.nodes = *cfg.nodes;
    if (cfg.dt) o.dt = *cfg.dt;
    o.fk_c = cfg.fk_c;
    o.fk_Q = cfg.fk_Q;
    if (cfg.anchor) o.anchor_time = *cfg.anchor;
    return o;
}

void task_pipeline(const TaskConfig& cfg, Output& out, bool full) {
    RadialProfile p = parse_profile(cfg.model);
    if (p.family() != Family::exp_alpha) throw ConfigError("pipeline needs family=exp_alpha in [model]");
    PipelineResult r = run_two_end_pipeline(p.alpha(), p.dim(), parse_profile(cfg.minus), config_times(cfg),
                                            pipeline_options(cfg));
    const BoundsReport& b = r.bounds;
    Table bt{"bounds", {"t", "upper", "lower", "numeric"}, {}};
    for (std::size_t i = 0; i < b.times.size(); ++i) bt.rows.push_back({b.times[i], b.upper[i], b.lower[i], b.numeric[i]});
    out.table(bt);
    if (full) {
        Table it{"iso", {"v", "J_nu", "J_warped", "J_asymptotic"}, {}};
        for (const auto& row : r.iso) it.rows.push_back({row.v, row.J_nu, row.J_warped, row.J_asymptotic});
        out.table(it);
        Table et{"eigen", {"R", "lambda1", "rayleigh_upper"}, {}};
        for (const auto& row : r.eigen) et.rows.push_back({row.R, row.lambda1, row.rayleigh_upper});
        out.table(et);
    }
    json& rep = out.report();
    rep["alpha"] = r.alpha;
    rep["n"] = r.n;
    rep["theory_exponent"] = r.alpha / (2.0 - r.alpha);
    rep["fitted_exponent"] = b.fitted_exponent;
    rep["numeric_exponent"] = num_or_nan(b.numeric_exponent);
    rep["lower_exponent"] = std::isfinite(b.lower_exponent) ? json(b.lower_exponent) : json(nullptr);
    rep["upper_polynomial"] = b.upper_polynomial;
    rep["numeric_polynomial"] = b.numeric_polynomial;
    rep["ordering_ok"] = r.ordering_ok;
    rep["calibration"] = {{"anchor_time", r.anchor_time}, {"upper_A", r.upper_calibration},
                          {"lower_B", r.lower_calibration}, {"c_tilde", r.c_tilde},
                          {"fk_c", cfg.fk_c}, {"fk_Q", cfg.fk_Q}};
    rep["transform"] = {{"kappa1", r.kappa1}, {"kappa2", r.kappa2}, {"waist", r.waist}, {"h_ref", r.h_ref}};
    rep["solver"] = {{"max_leakage", r.max_leakage}, {"clamp_count", r.clamp_count}};
    int fk_bad = 0, ray_bad = 0;
    for (const auto& e : r.eigen) {
        if (!(e.lambda1 <= e.rayleigh_upper)) ++ray_bad;
        if (!(e.lambda1 >= e.fk_floor)) ++fk_bad;
    }
    rep["eigen_checks"] = {{"rayleigh_violations", ray_bad}, {"faber_krahn_violations", fk_bad}};
}

std::string time_tag(double t) {
    std::ostringstream os;
    os << std::setprecision(6) << t;
    return os.str();
}

void task_solve(const TaskConfig& cfg, Output& out) {
    WeightedModel M = solver_model(cfg, out.report());
    GridSpec g;
    bool full = M.domain() == Domain::full_line;
    g.r_min = cfg.r_min.value_or(full ? -20.0 : M.r_min());
    g.r_max = cfg.r_max.value_or(full ? 20.0 : 10.0);
    g.nodes = cfg.nodes.value_or(1024);
    g.spacing = cfg.spacing;
    g.ratio = cfg.ratio.value_or(1.0);
    g.dt = cfg.dt.value_or(1e-3);
    g.scheme = cfg.scheme;
    g.rannacher_startup_steps = cfg.rannacher_startup_steps.value_or(2);
    g.far_bc = cfg.far_bc;
    g.auto_extend = cfg.auto_extend;
    std::vector<double> r = grid_nodes(g);
    Discretization d = discretize(M, r);
    std::size_t src = 0;
    for (std::size_t i = 1; i < r.size(); ++i)
        if (std::fabs(r[i] - cfg.source) < std::fabs(r[src] - cfg.source)) src = i;
    std::vector<double> init(r.size(), 0.0);
    init[src] = 1.0 / d.w[src];
    std::vector<double> times = config_times(cfg);
    SolveResult res = solve(M, g, cfg.left_bc, init, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        Table t{"field_t" + time_tag(times[k]), {"r", "u"}, {}};
        for (std::size_t i = 0; i < res.r.size(); ++i) t.rows.push_back({res.r[i], res.fields[k][i]});
        out.table(t);
    }
    json& rep = out.report();
    rep["source_node_r"] = r[src];
    rep["mass"] = res.mass;
    rep["initial_mass"] = res.initial_mass;
    rep["far_leakage"] = res.far_leakage;
    rep["left_leakage"] = res.left_leakage;
    rep["max_step_mass_defect"] = res.max_step_mass_defect;
    rep["stability"] = res.stability;
    rep["leakage_warning"] = res.leakage_warning;
    rep["extended"] = res.extended;
}

}  // namespace

TaskOutcome execute_task(const TaskConfig& cfg, const std::string& out_dir) {
    TaskOutcome o;
    o.out_dir = out_dir;
    try {
        Output out(out_dir, cfg.format);
        std::ofstream(fs::path(out_dir) / "config.effective") << render_config(cfg);
        out.report()["task"] = to_string(cfg.task);
        out.report()["config_hash"] = config_hash(cfg);
        switch (cfg.task) {
            case TaskKind::geometry: task_geometry(cfg, out); break;
            case TaskKind::iso: task_iso(cfg, out); break;
            case TaskKind::fk: task_fk(cfg, out); break;
            case TaskKind::bounds: task_pipeline(cfg, out, false); break;
            case TaskKind::pipeline: task_pipeline(cfg, out, true); break;
            case TaskKind::solve: task_solve(cfg, out); break;
            case TaskKind::verify: {
                auto lines = run_verify_suites(cfg.seed);
                json arr = json::array();
                bool ok = true;
                for (const auto& l : lines) {
                    arr.push_back({{"module", l.module}, {"check", l.name}, {"pass", l.pass}, {"detail", l.detail}});
                    ok = ok && l.pass;
                }
                out.report()["checks"] = arr;
                out.report()["pass"] = ok;
                std::ostringstream table;
                print_verify_table(lines, table);
                o.message = table.str();
                if (!ok) o.exit_code = exit_verify;
                break;
            }
        }
        o.report_json = out.finish();
    } catch (const ConfigError& e) {
        o.exit_code = exit_config;
        o.message = std::string("config error: ") + e.what();
    } catch (const std::exception& e) {
        o.exit_code = exit_numeric;
        o.message = std::string("error: ") + e.what();
    }
    if (o.report_json.empty()) o.report_json = "{}";
    return o;
}

TaskOutcome run_config_file(const std::string& path) {
    TaskConfig cfg;
    try {
        cfg = load_config(path);
    } catch (const ConfigError& e) {
        TaskOutcome o;
        o.exit_code = exit_config;
        o.message = path + ": " + e.what();
        o.report_json = "{}";
        return o;
    }
    return execute_task(cfg, resolve_out_dir(cfg));
}

int sweep(const std::string& dir, std::ostream& log) {
    if (!fs::is_directory(dir)) {
        log << "sweep: not a directory: " << dir << '\n';
        return exit_config;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    const char* env = std::getenv("HEATLAB_OUT");
    std::string base = env && *env ? std::string(env) : dir;
    json merged = json::object();
    int worst = exit_ok;
    for (const auto& f : files) {
        TaskConfig cfg;
        std::string key;
        TaskOutcome o;
        try {
            cfg = load_config(f.string());
            key = config_hash(cfg);
            o = execute_task(cfg, (fs::path(base) / key).string());
        } catch (const ConfigError& e) {
            std::uint64_t h = 1469598103934665603ull;
            for (unsigned char ch : f.filename().string()) h = (h ^ ch) * 1099511628211ull;
            std::ostringstream os;
            os << "invalid-" << std::hex << std::setw(16) << std::setfill('0') << h;
            key = os.str();
            o.exit_code = exit_config;
            o.message = e.what();
            o.report_json = "{}";
        }
        worst = std::max(worst, o.exit_code);
        merged[key] = {{"config", f.filename().string()}, {"exit", o.exit_code},
                       {"report", json::parse(o.report_json)}};
        if (!o.message.empty()) merged[key]["message"] = o.message;
        log << f.filename().string() << " -> " << key << " exit " << o.exit_code << '\n';
    }
    fs::create_directories(base);
    std::ofstream(fs::path(base) / "sweep.json") << merged.dump(2) << '\n';
    return worst;
}

void print_verify_table(const std::vector<VerifyLine>& lines, std::ostream& os) {
    for (const auto& l : lines)
        os << (l.pass ? "PASS " : "FAIL ") << std::left << std::setw(16) << l.module << std::setw(44) << l.name
           << l.detail << '\n';
}

}  // namespace heatlab
