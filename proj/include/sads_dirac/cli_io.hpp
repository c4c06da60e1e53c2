#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sads_dirac/boundary.hpp"
#include "sads_dirac/error.hpp"
#include "sads_dirac/geometry.hpp"
#include "sads_dirac/grid.hpp"
#include "sads_dirac/jost.hpp"
#include "sads_dirac/potentials.hpp"
#include "sads_dirac/resolvent.hpp"
#include "sads_dirac/resonance.hpp"
#include "sads_dirac/version.hpp"

namespace sads_dirac {

namespace cli {

using json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kInvalidConfig = 1, kSolverFailure = 2, kAtResonance = 3 };

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"horizon", "potentials", "jost", "boundary", "resolvent", "resonances"};
    return c;
}

/** @brief Flat key=value run configuration; NaN marks "derive from the other fields". */
struct RunConfig {
    double M = 1.0, l = 1.0;
    double s = 0.0, m = 0.3;
    double lambda_re = 0.0, lambda_im = 1.0;
    double re_min = 0.0, re_max = 6.0, im_min = std::numeric_limits<double>::quiet_NaN(), im_max = -1e-3;
    int nx = 25, ny = 10;
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    double ode_rtol = 1e-10, ode_atol = 1e-12;
    double x_min = std::numeric_limits<double>::quiet_NaN(), x0 = -1e-4, x_match = -1.0;
    std::string format = "json", path;
    std::string kind = "phi3";
    double seed_first = 1.0, seed_second = 0.0;
    std::string input, report, field;
    int threads = 0;
};

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> k{"M",       "l",       "s",        "m",        "lambda_re", "lambda_im",
                                            "re_min",  "re_max",  "im_min",   "im_max",   "nx",        "ny",
                                            "epsilon", "ode_rtol", "ode_atol", "x_min",   "x0",        "x_match",
                                            "format",  "path",    "kind",     "seed_first", "seed_second", "input",
                                            "report",  "field",   "threads"};
    return k;
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw InvalidParameter("config key '" + key + "' expects a number, got '" + v + "'");
    }
    if (pos != v.size()) throw InvalidParameter("config key '" + key + "' has trailing characters");
    return d;
}

inline int parse_int(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw InvalidParameter("config key '" + key + "' expects an integer");
    return static_cast<int>(d);
}

inline void set_value(RunConfig& c, const std::string& key, const std::string& v) {
    static const std::map<std::string, double RunConfig::*> reals{
        {"M", &RunConfig::M},           {"l", &RunConfig::l},
        {"s", &RunConfig::s},           {"m", &RunConfig::m},
        {"lambda_re", &RunConfig::lambda_re}, {"lambda_im", &RunConfig::lambda_im},
        {"re_min", &RunConfig::re_min}, {"re_max", &RunConfig::re_max},
        {"im_min", &RunConfig::im_min}, {"im_max", &RunConfig::im_max},
        {"epsilon", &RunConfig::epsilon}, {"ode_rtol", &RunConfig::ode_rtol},
        {"ode_atol", &RunConfig::ode_atol}, {"x_min", &RunConfig::x_min},
        {"x0", &RunConfig::x0},         {"x_match", &RunConfig::x_match},
        {"seed_first", &RunConfig::seed_first}, {"seed_second", &RunConfig::seed_second}};
    static const std::map<std::string, int RunConfig::*> ints{
        {"nx", &RunConfig::nx}, {"ny", &RunConfig::ny}, {"threads", &RunConfig::threads}};
    static const std::map<std::string, std::string RunConfig::*> strings{
        {"format", &RunConfig::format}, {"path", &RunConfig::path},     {"kind", &RunConfig::kind},
        {"input", &RunConfig::input},   {"report", &RunConfig::report}, {"field", &RunConfig::field}};
    if (auto it = reals.find(key); it != reals.end()) {
        c.*(it->second) = parse_double(key, v);
    } else if (auto jt = ints.find(key); jt != ints.end()) {
        c.*(jt->second) = parse_int(key, v);
    } else if (auto kt = strings.find(key); kt != strings.end()) {
        c.*(kt->second) = v;
    } else {
        throw InvalidParameter("unknown config key '" + key + "'");
    }
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/** @brief Reads `key = value` lines; '#' starts a comment. */
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot read config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidParameter("config line " + std::to_string(no) + " lacks '='");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline json config_json(const RunConfig& c) {
    auto num = [](double d) { return std::isnan(d) ? json(nullptr) : json(d); };
    return json{{"params", {{"M", c.M}, {"l", c.l}}},
                {"mode", {{"s", c.s}, {"m", c.m}}},
                {"spectral", {{"lambda_re", c.lambda_re}, {"lambda_im", c.lambda_im}}},
                {"region",
                 {{"re_min", c.re_min},
                  {"re_max", c.re_max},
                  {"im_min", num(c.im_min)},
                  {"im_max", c.im_max},
                  {"nx", c.nx},
                  {"ny", c.ny},
                  {"epsilon", num(c.epsilon)}}},
                {"numerics",
                 {{"ode_rtol", c.ode_rtol},
                  {"ode_atol", c.ode_atol},
                  {"x_min", num(c.x_min)},
                  {"x0", c.x0},
                  {"x_match", c.x_match}}},
                {"seed", {{"first", c.seed_first}, {"second", c.seed_second}}},
                {"kind", c.kind},
                {"output", {{"format", c.format}, {"path", c.path}}},
                {"input", c.input}};
}

/** @brief Scientific notation with 17 significant digits. */
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline JostKind parse_kind(const std::string& k) {
    if (k == "phi1") return JostKind::Phi1;
    if (k == "phi2") return JostKind::Phi2;
    if (k == "phi3") return JostKind::Phi3;
    if (k == "phi4") return JostKind::Phi4;
    throw InvalidParameter("kind must be one of phi1, phi2, phi3, phi4");
}

/** @brief Everything a command needs, built and validated before any solve. */
struct Prepared {
    RunConfig cfg;
    std::unique_ptr<TortoiseMap> map;  // stable address for ev
    std::optional<PotentialEvaluator> ev;
    SolverOptions solver;
    std::vector<double> grid;
    cplx lambda{};
};

inline void require_finite(const std::string& key, double v) {
    if (!std::isfinite(v)) throw InvalidParameter(key + " must be finite");
}

inline std::vector<double> read_grid_csv(const std::string& path, std::vector<Spinor4>& f) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot read input file '" + path + "'");
    std::vector<double> x;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(parse_double("input line " + std::to_string(no), trim(cell)));
        if (v.size() != 9) throw InvalidParameter("input line " + std::to_string(no) + " needs 9 columns");
        x.push_back(v[0]);
        f.emplace_back(cplx(v[1], v[2]), cplx(v[3], v[4]), cplx(v[5], v[6]), cplx(v[7], v[8]));
    }
    if (x.size() < 5) throw InvalidParameter("input holds fewer than 5 samples");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] < 0.0)) throw InvalidParameter("input grid must lie in x < 0");
        if (i > 0 && !(x[i] > x[i - 1])) throw InvalidParameter("input grid must be increasing");
    }
    return x;
}

/** @brief Smooth bump supported in [-5, -1], used when no input is given. */
inline Spinor4 default_bump(double x) {
    if (!(x > -5.0 && x < -1.0)) return {};
    const double b = std::exp(-1.0 / ((x + 5.0) * (-1.0 - x)));
    return Spinor4(b, 0.5 * b, cplx(0.0, b), -b);
}

inline Prepared prepare(const std::string& cmd, const RunConfig& c, std::vector<Spinor4>* f = nullptr) {
    Prepared p;
    p.cfg = c;
    if (std::find(commands().begin(), commands().end(), cmd) == commands().end())
        throw InvalidParameter("unknown command '" + cmd + "'");
    if (c.format != "json" && c.format != "csv") throw InvalidParameter("format must be csv or json");
    for (auto [k, v] : {std::pair{"M", c.M}, {"l", c.l}}) {
        require_finite(k, v);
        if (!(v > 0.0)) throw InvalidParameter(std::string(k) + " must be positive");
    }
    p.map = std::make_unique<TortoiseMap>(BlackHoleParams::make(c.M, c.l));
    if (cmd == "horizon") return p;
    require_finite("s", c.s);
    require_finite("m", c.m);
    p.ev.emplace(*p.map, ModeParams{c.s, c.m});
    if (!(c.ode_rtol > 0.0 && c.ode_rtol < 1e-2) || !(c.ode_atol > 0.0))
        throw InvalidParameter("ode tolerances must be positive (rtol < 1e-2)");
    if (!(c.x0 < 0.0)) throw InvalidParameter("x0 must be negative");
    p.solver.rtol = c.ode_rtol;
    p.solver.atol = c.ode_atol;
    p.solver.x0 = c.x0;
    const double kappa = p.ev->kappa();
    const double x_min = std::isnan(c.x_min) ? -p.solver.x_start_factor / kappa : c.x_min;
    if (!(x_min < c.x0)) throw InvalidParameter("x_min must lie left of x0");
    p.cfg.x_min = x_min;
    if (cmd != "resonances") {
        GridSpec g;
        g.x_min = x_min;
        g.x_end = c.x0;
        p.grid = make_grid(g);
    }
    p.lambda = {c.lambda_re, c.lambda_im};
    require_finite("lambda_re", c.lambda_re);
    require_finite("lambda_im", c.lambda_im);
    if (cmd == "jost") check_jost_strip(*p.ev, p.lambda, parse_kind(c.kind), p.solver.strip_margin);
    if (cmd == "boundary") {
        check_seed(*p.ev, BoundarySeed{p.ev->regime(), c.seed_first, c.seed_second});
        if (!(p.lambda.imag() > -0.5 * kappa + p.solver.strip_margin * kappa))
            throw OutOfStrip("lambda outside the strip Im > -kappa/2");
    }
    if (cmd == "resolvent") {
        if (!std::isnan(c.epsilon)) {
            if (!(c.epsilon > 0.0 && c.epsilon < 0.5 * kappa))
                throw InvalidParameter("epsilon must lie in (0, kappa/2)");
            if (!(p.lambda.imag() > -c.epsilon + p.solver.strip_margin * kappa))
                throw OutOfStrip("lambda outside the weighted strip Im > -epsilon");
        } else if (p.lambda.imag() == 0.0) {
            throw InvalidParameter("resolvent requires Im lambda != 0 (or a weight epsilon)");
        }
        const BoundarySeed seed{p.ev->regime(), c.seed_first, c.seed_second};
        check_seed(*p.ev, seed);
        if (seed.twist_degenerate()) throw InvalidParameter("boundary seed is fixed by the twist");
        if (f) {
            if (!c.input.empty()) {
                p.grid = read_grid_csv(c.input, *f);
            } else {
                f->clear();
                for (double x : p.grid) f->push_back(default_bump(x));
            }
        }
    }
    if (cmd == "resonances") {
        const double eps = std::isnan(c.epsilon) ? 0.45 * kappa : c.epsilon;
        p.cfg.epsilon = eps;
        if (std::isnan(c.im_min)) p.cfg.im_min = -eps;
        ScanRegion r{{c.re_min, c.re_max, p.cfg.im_min, c.im_max}, c.nx, c.ny, eps};
        r.validate(kappa);
        if (!(r.rect.im_min > -0.5 * kappa + p.solver.strip_margin * kappa)) throw OutOfStrip("region leaves the strip");
        if (!(c.x_match < c.x0) || !(c.x_match > x_min)) throw InvalidParameter("x_match must lie in (x_min, x0)");
        if (c.threads < 0) throw InvalidParameter("threads must be >= 0");
    }
    return p;
}

struct Output {
    json doc;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline json cjson(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline std::vector<std::string> spinor_columns(const std::string& name) {
    std::vector<std::string> c{"x"};
    for (int k = 1; k <= 4; ++k) {
        c.push_back(name + std::to_string(k) + "_re");
        c.push_back(name + std::to_string(k) + "_im");
    }
    return c;
}

inline std::vector<double> spinor_row(double x, const Spinor4& v) {
    std::vector<double> r{x};
    for (std::size_t k = 0; k < 4; ++k) {
        r.push_back(v[k].real());
        r.push_back(v[k].imag());
    }
    return r;
}

inline void curve_table(Output& o, const SolutionCurve& c, const std::string& name) {
    o.columns = spinor_columns(name);
    for (std::size_t i = 0; i < c.size(); ++i) o.rows.push_back(spinor_row(c.x[i], c.values[i]));
}

inline Output run_horizon(const Prepared& p) {
    Output o;
    const BlackHoleParams& bh = p.map->params();
    o.doc["result"] = {{"r_sads", bh.r_sads}, {"kappa", bh.kappa}};
    o.columns = {"r_sads", "kappa"};
    o.rows.push_back({bh.r_sads, bh.kappa});
    return o;
}

inline Output run_potentials(const Prepared& p) {
    Output o;
    const PotentialEvaluator& ev = *p.ev;
    o.doc["result"] = {{"regime", to_string(ev.regime())}, {"ml", ev.ml()}, {"kappa", ev.kappa()},
                       {"points", p.grid.size()}};
    o.columns = {"x", "r", "A", "B", "B_plus", "Vm_norm"};
    for (double x : p.grid) {
        const PotentialSample s = ev.sample(x);
        o.rows.push_back({x, ev.map().radius_from_tortoise(x), s.A, s.B, s.B_plus, ev.Vm(s).norm_inf()});
    }
    return o;
}

inline Output run_jost(const Prepared& p) {
    Output o;
    const JostKind kind = parse_kind(p.cfg.kind);
    const SolutionCurve c = jost_solution(*p.ev, p.lambda, kind, p.grid, p.solver);
    o.doc["result"] = {{"lambda", cjson(p.lambda)}, {"kind", to_string(kind)}, {"points", c.size()},
                       {"ode_residual", ode_residual(*p.ev, c)}};
    curve_table(o, c, "psi");
    return o;
}

inline Output run_boundary(const Prepared& p) {
    Output o;
    const BoundarySeed seed{p.ev->regime(), p.cfg.seed_first, p.cfg.seed_second};
    const SolutionCurve c = boundary_solution(*p.ev, p.lambda, seed, p.grid, p.solver);
    const BoundaryReport r = check_boundary_condition(c, p.ev->regime());
    const auto lim = boundary_limits(c, p.ev->ml(), p.ev->regime());
    auto num = [](double d) { return std::isfinite(d) ? json(d) : json(std::isnan(d) ? "nan" : d > 0 ? "inf" : "-inf"); };
    o.doc["result"] = {{"lambda", cjson(p.lambda)},
                       {"regime", to_string(p.ev->regime())},
                       {"seed", {seed.first, seed.second}},
                       {"report",
                        {{"residual", r.residual},
                         {"exponent", num(r.exponent)},
                         {"points", r.points},
                         {"satisfied", r.satisfied}}},
                       {"limits", {cjson(lim.first), cjson(lim.second)}},
                       {"ode_residual", ode_residual(*p.ev, c)}};
    curve_table(o, c, "phi");
    return o;
}

inline Output run_resolvent(const Prepared& p, const std::vector<Spinor4>& f) {
    Output o;
    ResolventOptions ro;
    ro.solver = p.solver;
    ro.seed = BoundarySeed{p.ev->regime(), p.cfg.seed_first, p.cfg.seed_second};
    const bool weighted = !std::isnan(p.cfg.epsilon);
    const double eps = weighted ? p.cfg.epsilon : 0.0;
    if (weighted) ro.jost = JostKind::Phi3;
    const ResolventKernel k = ResolventKernel::build(*p.ev, p.lambda, p.grid, ro);
    std::vector<Spinor4> fw = f;
    for (std::size_t i = 0; i < fw.size(); ++i) fw[i] *= std::exp(eps * p.grid[i]);
    std::vector<Spinor4> u = k.apply(fw);
    // The residual is checked on R(e^{eps y} f) before the outer weight is applied.
    const double residual = resolvent_residual(*p.ev, p.lambda, p.grid, u, fw);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::exp(eps * p.grid[i]);
    const WronskianPair& w = k.wronskian();
    o.doc["result"] = {{"lambda", cjson(p.lambda)},
                       {"weighted", weighted},
                       {"alpha", cjson(w.alpha)},
                       {"beta", cjson(w.beta)},
                       {"variation", w.variation},
                       {"residual", residual},
                       {"input", p.cfg.input.empty() ? "bump" : p.cfg.input}};
    o.columns = spinor_columns("u");
    for (std::size_t i = 0; i < u.size(); ++i) o.rows.push_back(spinor_row(p.grid[i], u[i]));
    return o;
}

inline Output run_resonances(const Prepared& p) {
    Output o;
    const RunConfig& c = p.cfg;
    DeterminantOptions dopt;
    dopt.solver = p.solver;
    dopt.x_match = c.x_match;
    const Determinant det(*p.ev, dopt);
    const DFunction d = [&det](cplx z) { return det(z); };
    const ScanRegion region{{c.re_min, c.re_max, c.im_min, c.im_max}, c.nx, c.ny, c.epsilon};
    SearchOptions so;
    so.threads = static_cast<unsigned>(c.threads);
    so.refine.winding.threads = 1;
    const SearchResult res = find_resonances(d, region, so, [&det](cplx z) { return det.in_strip(z); });
    json list = json::array();
    o.columns = {"lambda_re", "lambda_im", "abs_D", "winding"};
    for (const auto& r : res.resonances) {
        list.push_back({{"lambda_re", r.lambda.real()}, {"lambda_im", r.lambda.imag()}, {"abs_D", r.abs_D},
                        {"winding", r.winding}});
        o.rows.push_back({r.lambda.real(), r.lambda.imag(), r.abs_D, static_cast<double>(r.winding)});
    }
    json count;
    if (!res.field.empty()) {
        try {
            WindingOptions wo;
            wo.threads = so.threads;
            count = count_zeros(d, region.rect, wo);
        } catch (const Error& e) {
            count = std::string("inconclusive: ") + e.what();
        }
    }
    int failed_cells = 0;
    for (const auto& e : res.field.errors) failed_cells += !e.empty();
    o.doc["result"] = {{"resonances", list},
                       {"zero_count", count},
                       {"candidates", res.candidates},
                       {"failed_candidates", res.failures.size()},
                       {"failed_cells", failed_cells},
                       {"min_abs_D", res.field.empty() ? json(nullptr) : json(res.field.min_abs())}};
    if (!c.field.empty()) {
        std::ofstream f(c.field);
        if (!f) throw InvalidParameter("cannot write field file '" + c.field + "'");
        f << "lambda_re,lambda_im,D_re,D_im,error\n";
        for (int j = 0; j < region.ny; ++j)
            for (int i = 0; i < region.nx; ++i) {
                const cplx z = res.field.lambda(i, j), v = res.field.at(i, j);
                f << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << ','
                  << (res.field.ok(i, j) ? "" : "failed") << '\n';
            }
    }
    return o;
}

inline std::string timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_csv(std::ostream& os, const Output& o) {
    for (std::size_t k = 0; k < o.columns.size(); ++k) os << (k ? "," : "") << o.columns[k];
    os << '\n';
    for (const auto& r : o.rows) {
        for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << fmt(r[k]);
        os << '\n';
    }
}

inline void write_text(const std::string& path, std::ostream& fallback, const std::string& text) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw InvalidParameter("cannot write '" + path + "'");
    f << text;
}

inline void report_error(std::ostream& err, const char* kind, int code, const std::string& what) {
    std::string msg = what;
    for (char& ch : msg)
        if (ch == '\n' || ch == '\r') ch = ' ';
    err << "sads-dirac: error kind=" << kind << " exit=" << code << ": " << msg << '\n';
}

/** @brief Command-line entry point; returns the process exit code. */
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Dirac fields on Schwarzschild-AdS: Jost and boundary solutions, resolvent and resonances",
                 "sads-dirac"};
    app.fallthrough();
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kVersion);
    std::string config_path;
    app.add_option("--config", config_path, "key = value file; flags override its entries");
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::Option*> opts;
    const std::map<std::string, std::string> help{
        {"M", "black hole mass (default 1)"},
        {"l", "AdS radius (default 1)"},
        {"s", "angular index s >= 0 (default 0)"},
        {"m", "field mass m > 0 (default 0.3)"},
        {"lambda_re", "spectral parameter, real part (default 0)"},
        {"lambda_im", "spectral parameter, imaginary part (default 1)"},
        {"re_min", "scan rectangle (default 0)"},
        {"re_max", "scan rectangle (default 6)"},
        {"im_min", "scan rectangle (default -epsilon)"},
        {"im_max", "scan rectangle (default -1e-3)"},
        {"nx", "scan columns (default 25)"},
        {"ny", "scan rows (default 10)"},
        {"epsilon", "weight exponent in (0, kappa/2) (default 0.45 kappa)"},
        {"ode_rtol", "integrator relative tolerance (default 1e-10)"},
        {"ode_atol", "integrator absolute tolerance (default 1e-12)"},
        {"x_min", "left grid end (default -30/kappa)"},
        {"x0", "right grid end near the boundary (default -1e-4)"},
        {"x_match", "Wronskian matching point (default -1)"},
        {"format", "json or csv (default json)"},
        {"path", "output file (default stdout)"},
        {"kind", "Jost solution phi1..phi4 (default phi3)"},
        {"seed_first", "boundary seed c or a (default 1)"},
        {"seed_second", "boundary seed d or b (default 0)"},
        {"input", "CSV of f samples: x and 8 real columns (default: smooth bump on [-5,-1])"},
        {"report", "JSON summary file when format is csv"},
        {"field", "CSV dump of the determinant scan"},
        {"threads", "worker threads, 0 = all cores (default 0)"}};
    for (const auto& k : config_keys()) opts[k] = app.add_option("--" + k, flags[k], help.at(k));
    const std::map<std::string, std::string> about{
        {"horizon", "horizon radius and surface gravity"},
        {"potentials", "tortoise grid with r(x), A, B and B + l/x"},
        {"jost", "horizon-anchored Jost solution on the grid"},
        {"boundary", "boundary-anchored solution and boundary-condition report"},
        {"resolvent", "resolvent applied to sampled data, with residual; with --epsilon the weighted continuation"},
        {"resonances", "zeros of alpha^2 - beta^2 in a rectangle of the strip"}};
    for (const auto& c : commands()) app.add_subcommand(c, about.at(c));
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(err, "invalid_config", kInvalidConfig, e.what());
        return kInvalidConfig;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    Prepared p;
    std::vector<Spinor4> f;
    try {
        RunConfig cfg;
        if (!config_path.empty())
            for (const auto& [k, v] : read_config_file(config_path)) set_value(cfg, k, v);
        for (const auto& k : config_keys())
            if (opts[k]->count() > 0) set_value(cfg, k, flags[k]);
        p = prepare(cmd, cfg, &f);
    } catch (const Error& e) {
        report_error(err, e.kind(), kInvalidConfig, e.what());
        return kInvalidConfig;
    } catch (const std::exception& e) {
        report_error(err, "invalid_parameter", kInvalidConfig, e.what());
        return kInvalidConfig;
    }

    try {
        Output o;
        if (cmd == "horizon") o = run_horizon(p);
        else if (cmd == "potentials") o = run_potentials(p);
        else if (cmd == "jost") o = run_jost(p);
        else if (cmd == "boundary") o = run_boundary(p);
        else if (cmd == "resolvent") o = run_resolvent(p, f);
        else o = run_resonances(p);
        json doc;
        doc["header"] = {{"program", "sads-dirac"},
                         {"version", kVersion},
                         {"command", cmd},
                         {"generated", timestamp()},
                         {"config", config_json(p.cfg)}};
        doc["result"] = o.doc["result"];
        if (p.cfg.format == "json") {
            json data = json::array();
            for (const auto& r : o.rows) data.push_back(r);
            doc["columns"] = o.columns;
            doc["data"] = data;
            write_text(p.cfg.path, out, doc.dump(2) + "\n");
        } else {
            std::ostringstream os;
            write_csv(os, o);
            write_text(p.cfg.path, out, os.str());
            if (!p.cfg.report.empty()) write_text(p.cfg.report, out, doc.dump(2) + "\n");
        }
    } catch (const AtResonance& e) {
        report_error(err, e.kind(), kAtResonance, e.what());
        return kAtResonance;
    } catch (const Error& e) {
        report_error(err, e.kind(), kSolverFailure, e.what());
        return kSolverFailure;
    } catch (const std::exception& e) {
        report_error(err, "failure", kSolverFailure, e.what());
        return kSolverFailure;
    }
    return kOk;
}

}  // namespace cli

}  // namespace sads_dirac
