#include "muskat/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "muskat/errors.hpp"
#include "muskat/fvref.hpp"
#include "muskat/transport.hpp"

namespace muskat {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == trim(s).size() || trim(s).substr(pos).empty();
    } catch (...) {
        return false;
    }
}

bool parse_size(const std::string& s, std::size_t& out) {
    try {
        const long long v = std::stoll(s);
        if (v < 0) return false;
        out = static_cast<std::size_t>(v);
        return true;
    } catch (...) {
        return false;
    }
}

struct PendingMasses {
    std::optional<double> f, g;
};

// Applies one key to the config; appends a message per violation.
void set_key(RunConfig& cfg, PendingMasses& masses, const std::string& key,
             const std::string& raw, std::vector<std::string>& violations) {
    const std::string value = trim(raw);
    auto need_double = [&](double& target) {
        double v;
        if (parse_double(value, v))
            target = v;
        else
            violations.push_back(key + ": '" + value + "' is not a number");
    };
    auto need_size = [&](std::size_t& target) {
        std::size_t v;
        if (parse_size(value, v))
            target = v;
        else
            violations.push_back(key + ": '" + value + "' is not a nonnegative integer");
    };
    if (key == "mode") {
        cfg.mode = value;
    } else if (key == "R") {
        need_double(cfg.phys.R);
    } else if (key == "R_mu") {
        need_double(cfg.phys.R_mu);
    } else if (key == "tau") {
        need_double(cfg.tau);
    } else if (key == "N") {
        need_size(cfg.N);
    } else if (key == "grid_min") {
        need_double(cfg.grid_min);
    } else if (key == "grid_max") {
        need_double(cfg.grid_max);
    } else if (key == "grid_cells") {
        need_size(cfg.grid_cells);
    } else if (key == "fv_cells") {
        need_size(cfg.fv_cells);
    } else if (key == "t_final") {
        need_double(cfg.t_final);
    } else if (key == "cfl_safety") {
        need_double(cfg.cfl_safety);
    } else if (key == "initial_f" || key == "initial_g") {
        try {
            PresetSpec p = parse_preset(value);
            (key == "initial_f" ? cfg.initial_f : cfg.initial_g) = p;
        } catch (const Error& err) {
            violations.push_back(key + ": " + err.what());
        }
    } else if (key == "mass_f") {
        double v;
        if (parse_double(value, v))
            masses.f = v;
        else
            violations.push_back(key + ": '" + value + "' is not a number");
    } else if (key == "mass_g") {
        double v;
        if (parse_double(value, v))
            masses.g = v;
        else
            violations.push_back(key + ": '" + value + "' is not a number");
    } else if (key == "sweep_taus") {
        std::vector<double> taus;
        bool ok = !value.empty();
        for (const std::string& part : split(value, ',')) {
            double v;
            if (parse_double(part, v))
                taus.push_back(v);
            else
                ok = false;
        }
        if (ok)
            cfg.sweep_taus = taus;
        else
            violations.push_back(key + ": '" + value + "' is not a comma-separated number list");
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "seed") {
        std::size_t v;
        if (parse_size(value, v))
            cfg.seed = static_cast<unsigned>(v);
        else
            violations.push_back(key + ": '" + value + "' is not a nonnegative integer");
    } else if (key == "jobs") {
        std::size_t v;
        if (parse_size(value, v) && v > 0)
            cfg.jobs = static_cast<int>(v);
        else
            violations.push_back(key + ": '" + value + "' is not a positive integer");
    } else {
        violations.push_back(key + ": unknown key");
    }
}

void validate(const RunConfig& cfg, std::vector<std::string>& violations) {
    static const std::vector<std::string> modes{"jko", "fv", "compare", "sweep", "certify"};
    if (std::find(modes.begin(), modes.end(), cfg.mode) == modes.end())
        violations.push_back("mode: must be one of jko, fv, compare, sweep, certify");
    if (!(cfg.phys.R > 0.0)) violations.push_back("R: must be > 0");
    if (!(cfg.phys.R_mu > 0.0)) violations.push_back("R_mu: must be > 0");
    if (!(cfg.tau > 0.0)) violations.push_back("tau: must be > 0");
    if (cfg.N < 2) violations.push_back("N: must be >= 2");
    if (cfg.grid_cells < 2) violations.push_back("grid_cells: must be >= 2");
    if (!(cfg.grid_min < cfg.grid_max)) violations.push_back("grid_min: must be < grid_max");
    if (!(cfg.t_final >= 0.0)) violations.push_back("t_final: must be >= 0");
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
        violations.push_back("cfl_safety: must lie in (0, 1]");
    if (cfg.masses && !(cfg.masses->first > 0.0 && cfg.masses->second > 0.0))
        violations.push_back("mass_f/mass_g: must be > 0");
    for (double t : cfg.sweep_taus)
        if (!(t > 0.0)) violations.push_back("sweep_taus: entries must be > 0");
}

void finish_masses(RunConfig& cfg, const PendingMasses& m, std::vector<std::string>& violations) {
    if (m.f.has_value() != m.g.has_value()) {
        violations.push_back("mass_f/mass_g: both or neither must be given");
        return;
    }
    if (m.f) cfg.masses = std::make_pair(*m.f, *m.g);
}

} // namespace

PresetSpec parse_preset(const std::string& text) {
    const std::string s = trim(text);
    PresetSpec out;
    const auto open = s.find('(');
    if (open == std::string::npos) {
        out.kind = s;
        out.args.clear();
        if (out.kind != "zero")
            throw SchemaError("preset '" + s + "' needs parenthesized arguments");
        return out;
    }
    if (s.back() != ')') throw SchemaError("preset '" + s + "' is missing ')'");
    out.kind = trim(s.substr(0, open));
    out.args.clear();
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    if (!trim(inner).empty()) {
        for (const std::string& part : split(inner, ',')) {
            double v;
            if (!parse_double(part, v))
                throw SchemaError("preset argument '" + part + "' is not a number");
            out.args.push_back(v);
        }
    }
    static const std::vector<std::pair<std::string, std::size_t>> known{
        {"gaussian", 2}, {"uniform", 2}, {"bump", 2}, {"two_bump", 4}, {"zero", 0}};
    for (const auto& [kind, nargs] : known) {
        if (out.kind == kind) {
            if (out.args.size() != nargs)
                throw SchemaError("preset '" + kind + "' takes " + std::to_string(nargs) +
                                  " arguments");
            return out;
        }
    }
    throw SchemaError("unknown preset '" + out.kind + "'");
}

std::string preset_to_string(const PresetSpec& p) {
    if (p.kind == "zero") return "zero";
    std::string out = p.kind + "(";
    for (std::size_t i = 0; i < p.args.size(); ++i) {
        if (i) out += ",";
        out += format_number(p.args[i]);
    }
    return out + ")";
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    PendingMasses masses;
    std::vector<std::string> violations;

    const std::string body = trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("invalid JSON: ") + e.what());
        }
        for (const auto& [key, val] : doc.items()) {
            std::string v;
            if (val.is_string())
                v = val.get<std::string>();
            else if (val.is_array()) {
                for (std::size_t i = 0; i < val.size(); ++i) {
                    if (i) v += ",";
                    v += val[i].dump();
                }
            } else
                v = val.dump();
            set_key(cfg, masses, key, v, violations);
        }
    } else {
        std::istringstream in(body);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                violations.push_back("line " + std::to_string(line_no) + ": expected key=value");
                continue;
            }
            set_key(cfg, masses, trim(line.substr(0, eq)), line.substr(eq + 1), violations);
        }
    }
    finish_masses(cfg, masses, violations);
    validate(cfg, violations);
    if (!violations.empty()) {
        std::string msg = "config violations:";
        for (const std::string& v : violations) msg += "\n  - " + v;
        throw SchemaError(msg);
    }
    return cfg;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw SchemaError("override '" + assignment + "': expected key=value");
    std::vector<std::string> violations;
    PendingMasses masses;
    if (cfg.masses) {
        masses.f = cfg.masses->first;
        masses.g = cfg.masses->second;
    }
    set_key(cfg, masses, trim(assignment.substr(0, eq)), assignment.substr(eq + 1), violations);
    finish_masses(cfg, masses, violations);
    validate(cfg, violations);
    if (!violations.empty()) {
        std::string msg = "override violations:";
        for (const std::string& v : violations) msg += "\n  - " + v;
        throw SchemaError(msg);
    }
}

GridDensity make_initial(const PresetSpec& preset, const Grid& grid) {
    auto in_grid = [&](double lo, double hi) {
        return lo >= grid.x_min && hi <= grid.x_max() && lo < hi;
    };
    std::vector<double> vals(grid.n_cells, 0.0);
    auto sample = [&](auto&& func) {
        for (std::size_t i = 0; i < grid.n_cells; ++i) vals[i] = func(grid.center(i));
    };
    if (preset.kind == "zero") {
        return GridDensity(grid, std::move(vals));
    } else if (preset.kind == "gaussian") {
        const double mean = preset.args[0], sigma = preset.args[1];
        if (!(sigma > 0.0) || !in_grid(mean - 5.0 * sigma, mean + 5.0 * sigma))
            throw PresetOutOfDomain("gaussian(" + format_number(mean) + "," +
                                    format_number(sigma) + ") does not fit the grid");
        sample([&](double x) {
            const double u = (x - mean) / sigma;
            return std::exp(-0.5 * u * u);
        });
    } else if (preset.kind == "uniform") {
        const double a = preset.args[0], b = preset.args[1];
        if (!in_grid(a, b)) throw PresetOutOfDomain("uniform window must lie inside the grid");
        sample([&](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; });
    } else if (preset.kind == "bump") {
        const double c = preset.args[0], w = preset.args[1];
        if (!(w > 0.0) || !in_grid(c - w, c + w))
            throw PresetOutOfDomain("bump support must lie inside the grid");
        sample([&](double x) {
            const double u = (x - c) / w;
            return std::abs(u) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0;
        });
    } else if (preset.kind == "two_bump") {
        const double c1 = preset.args[0], w1 = preset.args[1];
        const double c2 = preset.args[2], w2 = preset.args[3];
        if (!(w1 > 0.0) || !(w2 > 0.0) || !in_grid(c1 - w1, c1 + w1) || !in_grid(c2 - w2, c2 + w2))
            throw PresetOutOfDomain("two_bump supports must lie inside the grid");
        sample([&](double x) {
            double acc = 0.0;
            const double u1 = (x - c1) / w1;
            if (std::abs(u1) < 1.0) acc += std::exp(1.0 - 1.0 / (1.0 - u1 * u1));
            const double u2 = (x - c2) / w2;
            if (std::abs(u2) < 1.0) acc += std::exp(1.0 - 1.0 / (1.0 - u2 * u2));
            return acc;
        });
    } else {
        throw PresetOutOfDomain("unknown preset '" + preset.kind + "'");
    }
    GridDensity d(grid, std::move(vals));
    d.normalize();
    return d;
}

InitialData build_initial(const RunConfig& cfg) {
    const Grid grid = cfg.grid();
    InitialData out;
    GridDensity f0 = make_initial(cfg.initial_f, grid);
    const bool has_g = cfg.initial_g.kind != "zero";
    out.coefficients = SchemeCoefficients::standard(cfg.phys);
    if (cfg.masses) {
        if (!has_g) throw SchemaError("mass rescaling requires an active g channel");
        GridDensity g0 = make_initial(cfg.initial_g, grid);
        for (double& v : f0.values) v *= cfg.masses->first;
        for (double& v : g0.values) v *= cfg.masses->second;
        auto [state, info] = rescale_to_unit_mass(f0, g0, cfg.phys);
        out.state = std::move(state);
        out.rescale = info;
        out.coefficients = SchemeCoefficients::rescaled(cfg.phys, info.mass_f, info.mass_g);
    } else {
        out.state.f = std::move(f0);
        if (has_g) out.state.g = make_initial(cfg.initial_g, grid);
        out.state.params = cfg.phys;
    }
    out.quantiles.params = cfg.phys;
    out.quantiles.f = quantiles_from_density(out.state.f, cfg.N, 1e-9);
    if (out.state.g) out.quantiles.g = quantiles_from_density(*out.state.g, cfg.N, 1e-9);
    return out;
}

JkoParams jko_params(const RunConfig& cfg) {
    JkoParams p;
    p.tau = cfg.tau;
    p.phys = cfg.phys;
    p.N = cfg.N;
    p.grid = cfg.grid();
    if (cfg.masses) {
        const InitialData init = build_initial(cfg);
        p.coefficients = init.coefficients;
    }
    return p;
}

Trajectory run_jko_mode(const RunConfig& cfg) {
    const InitialData init = build_initial(cfg);
    JkoParams p = jko_params(cfg);
    p.coefficients = init.coefficients;
    return run_scheme(init.quantiles, p, cfg.t_final);
}

Trajectory run_fv_mode(const RunConfig& cfg) {
    RunConfig fv_cfg = cfg;
    fv_cfg.grid_cells = cfg.fv_cells ? cfg.fv_cells : cfg.grid_cells;
    fv_cfg.fv_cells = fv_cfg.grid_cells;
    const InitialData init = build_initial(fv_cfg);
    FvConfig c(fv_cfg.grid(), cfg.phys);
    c.cfl_safety = cfg.cfl_safety;
    c.t_final = cfg.t_final;
    std::vector<double> times;
    for (double t = 0.0; t < cfg.t_final + 1e-12; t += cfg.tau) times.push_back(t);
    return fv_run(init.state, c, times);
}

bool RunReport::all_pass() const {
    for (const auto& c : certificates)
        if (!c.pass) return false;
    return true;
}

RunReport certify_run(const RunConfig& cfg, Trajectory* out_traj) {
    const InitialData init = build_initial(cfg);
    JkoParams p = jko_params(cfg);
    p.coefficients = init.coefficients;
    const Trajectory traj = run_scheme(init.quantiles, p, cfg.t_final);

    RunReport report;
    report.rescale = init.rescale;
    report.measured_c_ell = entropy_bound_constant();
    const auto& recs = traj.records;
    const double R = cfg.phys.R, R_mu = cfg.phys.R_mu;

    // mass conservation (quantile coordinates hold it exactly)
    {
        double drift = 0.0;
        for (const auto& r : recs) {
            drift = std::max(drift, std::abs(r.mass_f - 1.0));
            if (init.state.g) drift = std::max(drift, std::abs(r.mass_g - 1.0));
        }
        report.certificates.push_back({"mass_conservation", drift <= 1e-12, drift, 1e-12});
    }
    // energy descent per step within solver slack
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < recs.size(); ++k)
            worst = std::max(worst, recs[k].energy - recs[k - 1].energy - recs[k].slack);
        if (recs.size() < 2) worst = 0.0;
        report.certificates.push_back({"energy_descent", worst <= 0.0, worst, 0.0});
    }
    // cumulative weighted squared increments vs twice the initial energy
    {
        double lhs = 0.0, slack_sum = 0.0;
        for (const auto& r : recs) {
            lhs += r.w2_increment_f * r.w2_increment_f +
                   (R / R_mu) * r.w2_increment_g * r.w2_increment_g;
            slack_sum += r.slack;
        }
        const double rhs = 2.0 * cfg.tau * (recs.empty() ? 0.0 : recs.front().energy) +
                           2.0 * cfg.tau * slack_sum;
        report.certificates.push_back({"increment_bound", lhs <= rhs, lhs, rhs});
    }
    // second moments grow at most linearly; record the constant
    {
        double c4 = 0.0;
        for (const auto& r : recs)
            c4 = std::max(c4, (r.second_moment_f + r.second_moment_g) / (1.0 + r.time));
        report.certificates.push_back({"second_moment_linear_growth", std::isfinite(c4), c4, 0.0});
    }
    // cumulative entropy and energy dissipation estimates
    {
        const TheoremEstimatesReport thm = check_theorem_estimates(traj);
        auto spread = [](const std::vector<EstimateEntry>& es) {
            double worst = -std::numeric_limits<double>::infinity();
            bool ok = true;
            for (const auto& e : es) {
                worst = std::max(worst, e.lhs - e.rhs);
                ok = ok && e.ok;
            }
            return std::pair<double, bool>{worst, ok};
        };
        const auto [went, okent] = spread(thm.entropy_estimate);
        const auto [wen, oken] = spread(thm.energy_estimate);
        report.certificates.push_back({"entropy_dissipation_estimate", okent, went, 0.0});
        report.certificates.push_back({"energy_dissipation_estimate", oken, wen, 0.0});
        double c1 = 0.0;
        for (std::size_t k = 1; k < recs.size(); ++k) {
            const double dt = recs[k].time - recs[k - 1].time;
            c1 += dt * std::max(recs[k].entropy_dissipation_rate,
                                0.5 * recs[k].energy_dissipation_rate);
        }
        report.measured_c1 = c1;
    }
    // per-step certificates on up to 10 sampled steps
    {
        const std::size_t steps = traj.snapshots.size() > 0 ? traj.snapshots.size() - 1 : 0;
        std::vector<std::size_t> samples;
        if (steps > 0) {
            const std::size_t count = std::min<std::size_t>(10, steps);
            for (std::size_t k = 0; k < count; ++k)
                samples.push_back(1 + k * steps / count);
        }
        const auto dict = test_dictionary(cfg.grid_min, cfg.grid_max);
        double el_worst = -std::numeric_limits<double>::infinity();
        double diss_worst = -std::numeric_limits<double>::infinity();
        double flow_worst = -std::numeric_limits<double>::infinity();
        bool el_ok = true, diss_ok = true, flow_ok = true;
        for (std::size_t idx : samples) {
            const QuantilePair& cur = *traj.snapshots[idx].particles;
            const QuantilePair& prev = *traj.snapshots[idx - 1].particles;
            const double slack = recs[idx].slack;
            for (std::size_t j = 0; j < 5 && j < dict.size(); ++j) {
                const ElResidual el = euler_lagrange_residual(cur, prev, p, dict[j]);
                el_worst = std::max({el_worst, el.residual_f - el.bound_f - slack,
                                     el.residual_g - el.bound_g - slack});
            }
            const DissipationCertificate dc = dissipation_certificates(cur, prev, p);
            diss_worst = std::max({diss_worst, dc.lhs_f - dc.rhs_f - 1e-4,
                                   dc.lhs_g - dc.rhs_g - 1e-4});
            const FlowInterchangeReport fi =
                flow_interchange_check(cur, prev, p, {1e-5, 1e-4, 1e-3});
            for (const auto& e : fi.entries) {
                flow_ok = flow_ok && e.ok;
                flow_worst =
                    std::max(flow_worst, fi.objective_base - e.objective_smoothed - fi.slack);
            }
            flow_ok = flow_ok && fi.heat3_ok;
        }
        el_ok = el_worst <= 0.0;
        diss_ok = diss_worst <= 0.0;
        if (samples.empty()) {
            el_worst = diss_worst = flow_worst = 0.0;
            el_ok = diss_ok = flow_ok = true;
        }
        report.certificates.push_back({"euler_lagrange_residuals", el_ok, el_worst, 0.0});
        report.certificates.push_back({"dissipation_certificates", diss_ok, diss_worst, 0.0});
        report.certificates.push_back({"flow_interchange", flow_ok, flow_worst, 0.0});
    }
    // entropy lower bounds on every snapshot of both species
    {
        double worst = -std::numeric_limits<double>::infinity();
        const double c_ell = report.measured_c_ell;
        auto check = [&](const GridDensity& h) {
            if (h.mass() < 1e-12) return;
            const double weight = h.mass() + second_moment(h);
            double l2 = 0.0;
            for (double v : h.values) l2 += v * v;
            l2 *= h.grid.dx;
            worst = std::max(worst, abs_entropy(h) - (c_ell + weight + l2));
            worst = std::max(worst, -c_ell - weight - entropy_single(h));
        };
        for (const auto& snap : traj.snapshots) {
            check(snap.f);
            check(snap.g);
        }
        check(init.state.f);
        if (init.state.g) check(*init.state.g);
        const bool ok = worst <= 1e-10;
        report.certificates.push_back({"entropy_lower_bounds", ok, worst, 1e-10});
    }
    report.measured_c2 = equicontinuity_surrogate(
        traj, test_dictionary(cfg.grid_min, cfg.grid_max), cfg.tau);

    if (out_traj) *out_traj = traj;
    return report;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

} // namespace

void emit_outputs(const Trajectory& traj, const RunReport& report, const RunConfig& cfg,
                  const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir);

    {
        auto out = open_out(std::filesystem::path(dir) / "snapshots.csv");
        out << "time,x,f,g\n";
        for (const auto& snap : traj.snapshots)
            for (std::size_t i = 0; i < snap.f.values.size(); ++i)
                out << format_number(snap.time) << ',' << format_number(snap.f.grid.center(i))
                    << ',' << format_number(snap.f.values[i]) << ','
                    << format_number(snap.g.values[i]) << '\n';
    }
    {
        auto out = open_out(std::filesystem::path(dir) / "diagnostics.csv");
        out << "time,mass_f,mass_g,energy,entropy_pair,second_moment_f,second_moment_g,"
               "w2_increment_f,w2_increment_g,energy_dissipation_rate,entropy_dissipation_rate,"
               "slack,solver_iterations,solver_grad_norm,solver_converged\n";
        for (const auto& r : traj.records) {
            out << format_number(r.time) << ',' << format_number(r.mass_f) << ','
                << format_number(r.mass_g) << ',' << format_number(r.energy) << ','
                << format_number(r.entropy_pair) << ',' << format_number(r.second_moment_f) << ','
                << format_number(r.second_moment_g) << ',' << format_number(r.w2_increment_f)
                << ',' << format_number(r.w2_increment_g) << ','
                << format_number(r.energy_dissipation_rate) << ','
                << format_number(r.entropy_dissipation_rate) << ',' << format_number(r.slack);
            if (r.solver)
                out << ',' << r.solver->iterations << ',' << format_number(r.solver->grad_norm)
                    << ',' << (r.solver->converged ? 1 : 0);
            else
                out << ",,,";
            out << '\n';
        }
    }
    {
        auto out = open_out(std::filesystem::path(dir) / "report.json");
        out << "{\n";
        out << "  \"version\": \"1.0.0\",\n";
        out << "  \"config\": {\n";
        out << "    \"mode\": \"" << json_escape(cfg.mode) << "\",\n";
        out << "    \"R\": " << format_number(cfg.phys.R) << ",\n";
        out << "    \"R_mu\": " << format_number(cfg.phys.R_mu) << ",\n";
        out << "    \"tau\": " << format_number(cfg.tau) << ",\n";
        out << "    \"N\": " << cfg.N << ",\n";
        out << "    \"grid_min\": " << format_number(cfg.grid_min) << ",\n";
        out << "    \"grid_max\": " << format_number(cfg.grid_max) << ",\n";
        out << "    \"grid_cells\": " << cfg.grid_cells << ",\n";
        out << "    \"t_final\": " << format_number(cfg.t_final) << ",\n";
        out << "    \"initial_f\": \"" << json_escape(preset_to_string(cfg.initial_f)) << "\",\n";
        out << "    \"initial_g\": \"" << json_escape(preset_to_string(cfg.initial_g)) << "\",\n";
        out << "    \"eta2\": " << format_number(report.rescale.eta2) << "\n";
        out << "  },\n";
        out << "  \"constants\": {\n";
        out << "    \"C1\": " << format_number(report.measured_c1) << ",\n";
        out << "    \"C2\": " << format_number(report.measured_c2) << ",\n";
        out << "    \"C_ell\": " << format_number(report.measured_c_ell) << "\n";
        out << "  },\n";
        out << "  \"certificates\": [\n";
        for (std::size_t i = 0; i < report.certificates.size(); ++i) {
            const auto& c = report.certificates[i];
            out << "    {\"name\": \"" << json_escape(c.name) << "\", \"pass\": "
                << (c.pass ? "true" : "false") << ", \"measured\": " << format_number(c.measured)
                << ", \"threshold\": " << format_number(c.threshold) << "}"
                << (i + 1 < report.certificates.size() ? "," : "") << "\n";
        }
        out << "  ],\n";
        out << "  \"all_pass\": " << (report.all_pass() ? "true" : "false") << "\n";
        out << "}\n";
    }
}

void emit_comparison(const ComparisonReport& report, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir);
    auto out = open_out(std::filesystem::path(dir) / "comparison.csv");
    out << "time_a,time_b,l1_f,l2_f,w2_f,l1_g,l2_g,w2_g\n";
    for (const auto& e : report.entries)
        out << format_number(e.time_a) << ',' << format_number(e.time_b) << ','
            << format_number(e.l1_f) << ',' << format_number(e.l2_f) << ','
            << format_number(e.w2_f) << ',' << format_number(e.l1_g) << ','
            << format_number(e.l2_g) << ',' << format_number(e.w2_g) << '\n';
}

} // namespace muskat
