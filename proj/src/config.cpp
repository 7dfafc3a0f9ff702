#include "lfdd/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "lfdd/errors.hpp"

namespace lfdd {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
    }
}

const json* find(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number(const json& obj, const std::string& path, const std::string& key, std::optional<double> fallback) {
    const json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ConfigError(join(path, key), "required");
    }
    if (!v->is_number()) throw ConfigError(join(path, key), "expected a number");
    return v->get<double>();
}

int integer(const json& obj, const std::string& path, const std::string& key, std::optional<int> fallback) {
    const json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ConfigError(join(path, key), "required");
    }
    if (!v->is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    return v->get<int>();
}

std::string text(const json& obj, const std::string& path, const std::string& key,
                 std::optional<std::string> fallback) {
    const json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ConfigError(join(path, key), "required");
    }
    if (!v->is_string()) throw ConfigError(join(path, key), "expected a string");
    return v->get<std::string>();
}

std::vector<double> numbers(const json& obj, const std::string& path, const std::string& key, size_t count) {
    const json* v = find(obj, key);
    if (!v) throw ConfigError(join(path, key), "required");
    if (!v->is_array() || v->size() != count) {
        throw ConfigError(join(path, key), "expected an array of " + std::to_string(count) + " numbers");
    }
    std::vector<double> out;
    for (const auto& x : *v) {
        if (!x.is_number()) throw ConfigError(join(path, key), "expected numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// Runs a builder, turning library input errors into ConfigError at `path`.
template <typename F>
auto guarded(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const InputError& e) {
        throw ConfigError(path, e.what());
    }
}

Integrator parse_integrator(const std::string& s, const std::string& path) {
    if (s == "rk4") return Integrator::RK4;
    if (s == "backward_euler") return Integrator::BackwardEuler;
    throw ConfigError(path, "expected \"rk4\" or \"backward_euler\", got \"" + s + "\"");
}

const std::set<std::string> kTimeKeys{"integrator", "dt",          "cfl_fraction", "t_end",
                                      "record_every", "snapshot_every", "cfl_safety"};

TimeParams time_params(const json& t) {
    TimeParams p;
    p.integrator = parse_integrator(text(t, "time", "integrator", "rk4"), "time.integrator");
    p.cfl_fraction = number(t, "time", "cfl_fraction", 0.25);
    p.dt = number(t, "time", "dt", 0.0);
    if (find(t, "dt") && !(p.dt > 0.0)) throw ConfigError("time.dt", "must be positive");
    if (!(p.cfl_fraction > 0.0)) throw ConfigError("time.cfl_fraction", "must be positive");
    p.record_every = integer(t, "time", "record_every", 1);
    p.snapshot_every = integer(t, "time", "snapshot_every", 0);
    return p;
}

Scenario build_scenario(const std::string& name, const json& params, const TimeParams& time) {
    const std::string path = "parameters";
    auto num = [&](const char* key, double def) { return number(params, path, key, def); };
    auto num_int = [&](const char* key, int def) { return integer(params, path, key, def); };
    if (name == "static_uniaxial") {
        check_keys(params, path,
                   {"sigma0", "lambda", "mu", "rho", "slope", "x_left", "x_right", "n_nodes", "transit_times"});
        StaticUniaxialParams p;
        p.sigma0 = num("sigma0", p.sigma0);
        p.lambda = num("lambda", p.lambda);
        p.mu = num("mu", p.mu);
        p.rho = num("rho", p.rho);
        p.slope = num("slope", p.slope);
        p.x_left = num("x_left", p.x_left);
        p.x_right = num("x_right", p.x_right);
        p.n_nodes = num_int("n_nodes", p.n_nodes);
        p.transit_times = num("transit_times", p.transit_times);
        p.time = time;
        return guarded(path, [&] { return static_uniaxial(p); });
    }
    if (name == "oscillating_shear") {
        check_keys(params, path,
                   {"mu", "rho", "x_left", "length", "mode", "amplitude", "slope", "n_nodes", "periods"});
        OscillatingShearParams p;
        p.mu = num("mu", p.mu);
        p.rho = num("rho", p.rho);
        p.x_left = num("x_left", p.x_left);
        p.length = num("length", p.length);
        p.mode = num_int("mode", p.mode);
        p.amplitude = num("amplitude", p.amplitude);
        p.slope = num("slope", p.slope);
        p.n_nodes = num_int("n_nodes", p.n_nodes);
        p.periods = num("periods", p.periods);
        p.time = time;
        return guarded(path, [&] { return oscillating_shear(p); });
    }
    if (name == "dissipative_homogeneous") {
        check_keys(params, path,
                   {"mu", "lambda", "rho", "g0", "alpha0", "x_left", "x_right", "n_nodes", "decay_times"});
        DissipativeHomogeneousParams p;
        p.mu = num("mu", p.mu);
        p.lambda = num("lambda", p.lambda);
        p.rho = num("rho", p.rho);
        p.g0 = num("g0", p.g0);
        p.alpha0 = num("alpha0", p.alpha0);
        p.x_left = num("x_left", p.x_left);
        p.x_right = num("x_right", p.x_right);
        p.n_nodes = num_int("n_nodes", p.n_nodes);
        p.decay_times = num("decay_times", p.decay_times);
        p.time = time;
        return guarded(path, [&] { return dissipative_homogeneous(p); });
    }
    throw ConfigError("scenario", "unknown scenario \"" + name + "\"");
}

Grid1D parse_grid(const json& cfg) {
    const json* g = find(cfg, "grid");
    if (!g) throw ConfigError("grid", "required");
    check_keys(*g, "grid", {"x_left", "x_right", "n_nodes"});
    const double xl = number(*g, "grid", "x_left", 0.0);
    const double xr = number(*g, "grid", "x_right", 1.0);
    const int n = integer(*g, "grid", "n_nodes", std::nullopt);
    if (n < 3) throw ConfigError("grid.n_nodes", "need at least 3 nodes, got " + std::to_string(n));
    if (!(xr > xl)) throw ConfigError("grid.x_right", "must exceed grid.x_left");
    return Grid1D(xl, xr, n);
}

Material parse_material(const json& cfg) {
    const json* m = find(cfg, "material");
    if (!m) throw ConfigError("material", "required");
    check_keys(*m, "material", {"rho", "lambda", "mu", "stiffness"});
    const double rho = number(*m, "material", "rho", 1.0);
    if (find(*m, "stiffness")) {
        if (find(*m, "lambda") || find(*m, "mu")) {
            throw ConfigError("material.stiffness", "give either stiffness or lambda/mu, not both");
        }
        const auto v = numbers(*m, "material", "stiffness", 81);
        std::array<double, 81> a{};
        std::copy(v.begin(), v.end(), a.begin());
        return guarded("material.stiffness", [&] { return Material(rho, Tensor4(a, Symmetries{true, true, true})); });
    }
    const double lambda = number(*m, "material", "lambda", std::nullopt);
    const double mu = number(*m, "material", "mu", std::nullopt);
    return guarded("material", [&] { return Material::isotropic(rho, lambda, mu); });
}

BoundaryCondition parse_bc(const json& cfg) {
    BoundaryCondition bc;
    const json* b = find(cfg, "bc");
    if (!b) return bc;
    check_keys(*b, "bc", {"left", "right"});
    bc.left = guarded("bc.left", [&] { return parse_bc_type(text(*b, "bc", "left", "clamped")); });
    bc.right = guarded("bc.right", [&] { return parse_bc_type(text(*b, "bc", "right", "clamped")); });
    return bc;
}

AlphaSource parse_alpha(const json& cfg, const Grid1D& grid) {
    const json* a = find(cfg, "alpha");
    if (!a) return std::vector<Tensor2>(grid.n_nodes(), Tensor2::Zero());
    if (!a->is_object()) throw ConfigError("alpha", "expected an object");
    const std::string kind = text(*a, "alpha", "kind", std::nullopt);
    if (kind == "zero") {
        check_keys(*a, "alpha", {"kind"});
        return std::vector<Tensor2>(grid.n_nodes(), Tensor2::Zero());
    }
    if (kind == "crossed_grid") {
        check_keys(*a, "alpha", {"kind", "slope"});
        return PsiField::linear(number(*a, "alpha", "slope", 1.0));
    }
    if (kind == "psi_sine") {
        check_keys(*a, "alpha", {"kind", "amplitude", "wavenumber"});
        return PsiField::sine(number(*a, "alpha", "amplitude", 1.0), number(*a, "alpha", "wavenumber", 1.0));
    }
    if (kind == "screw") {
        check_keys(*a, "alpha", {"kind", "alpha0"});
        Tensor2 t = Tensor2::Zero();
        t(2, 2) = number(*a, "alpha", "alpha0", 1.0);
        return std::vector<Tensor2>(grid.n_nodes(), t);
    }
    if (kind == "uniform") {
        check_keys(*a, "alpha", {"kind", "tensor"});
        const auto v = numbers(*a, "alpha", "tensor", 9);
        Tensor2 t;
        for (int i = 0; i < 9; ++i) t(i / 3, i % 3) = v[i];
        return std::vector<Tensor2>(grid.n_nodes(), t);
    }
    throw ConfigError("alpha.kind", "unknown kind \"" + kind + "\"");
}

FieldState parse_initial(const json& cfg, const Grid1D& grid) {
    FieldState s = FieldState::zero(grid);
    const json* in = find(cfg, "initial");
    if (!in) return s;
    if (!in->is_object()) throw ConfigError("initial", "expected an object");
    const std::string kind = text(*in, "initial", "kind", std::nullopt);
    if (kind == "zero") {
        check_keys(*in, "initial", {"kind"});
    } else if (kind == "uniform_strain") {
        check_keys(*in, "initial", {"kind", "eps"});
        const auto v = numbers(*in, "initial", "eps", 6);
        std::array<double, 6> e{};
        std::copy(v.begin(), v.end(), e.begin());
        s.eps.assign(grid.n_nodes(), SymTensor2(e));
    } else if (kind == "sine_velocity") {
        check_keys(*in, "initial", {"kind", "amplitude", "mode", "component"});
        const double amp = number(*in, "initial", "amplitude", 1.0);
        const int mode = integer(*in, "initial", "mode", 1);
        const int comp = integer(*in, "initial", "component", 1);
        if (mode < 1) throw ConfigError("initial.mode", "must be >= 1");
        if (comp < 1 || comp > 3) throw ConfigError("initial.component", "must be 1, 2 or 3");
        const double k = mode * M_PI / grid.length();
        for (int i = 0; i < grid.n_nodes(); ++i) s.v[i](comp - 1) = amp * std::sin(k * (grid.x(i) - grid.x_left()));
    } else {
        throw ConfigError("initial.kind", "unknown kind \"" + kind + "\"");
    }
    return s;
}

double classify_tol(const json& cfg) {
    const json* e = find(cfg, "eigen");
    if (!e) return 1e-8;
    check_keys(*e, "eigen", {"classify_tol"});
    const double tol = number(*e, "eigen", "classify_tol", 1e-8);
    if (!(tol > 0.0)) throw ConfigError("eigen.classify_tol", "must be positive");
    return tol;
}

}  // namespace

json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "malformed JSON in " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    return j;
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("", "override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node = &config;
    std::stringstream ss(key);
    std::string part, walked;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError(key, "empty path component in override");
        parts.push_back(part);
    }
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        walked = join(walked, parts[i]);
        if (!node->contains(parts[i])) (*node)[parts[i]] = json::object();
        node = &(*node)[parts[i]];
        if (!node->is_object()) throw ConfigError(walked, "not an object; cannot set " + key);
    }
    (*node)[parts.back()] = value;
}

Problem build_problem(const json& cfg, bool need_time) {
    if (!cfg.is_object()) throw ConfigError("", "config must be a JSON object");
    const json empty = json::object();
    const json* time = find(cfg, "time");
    if (time) check_keys(*time, "time", kTimeKeys);
    const json& t = time ? *time : empty;

    if (const json* sc = find(cfg, "scenario")) {
        check_keys(cfg, "", {"scenario", "parameters", "time", "eigen"});
        if (!sc->is_string()) throw ConfigError("scenario", "expected a string");
        const json* params = find(cfg, "parameters");
        Scenario s = build_scenario(sc->get<std::string>(), params ? *params : empty, time_params(t));
        if (find(t, "t_end")) s.config.t_end = number(t, "time", "t_end", std::nullopt);
        s.config.cfl_safety = number(t, "time", "cfl_safety", s.config.cfl_safety);
        if (need_time) guarded("time", [&] { validate(s.config); return 0; });
        std::vector<Tensor2> alpha = resolve_alpha(s.config.alpha_source, s.config.grid);
        return Problem{sc->get<std::string>(), s.config, std::move(alpha), classify_tol(cfg), true, std::move(s)};
    }

    check_keys(cfg, "", {"grid", "material", "bc", "alpha", "initial", "time", "eigen"});
    const Grid1D grid = parse_grid(cfg);
    const Material material = parse_material(cfg);
    const BoundaryCondition bc = parse_bc(cfg);
    const AlphaSource alpha_source = parse_alpha(cfg, grid);
    const std::vector<Tensor2> alpha = guarded("alpha", [&] { return resolve_alpha(alpha_source, grid); });
    FieldState init = parse_initial(cfg, grid);
    init.alpha = alpha;

    SimConfig sim{grid, material, bc, alpha_source, init};
    const bool has_time = time != nullptr;
    if (has_time || need_time) {
        if (!has_time) throw ConfigError("time", "required");
        const TimeParams tp = time_params(t);
        sim.integrator = tp.integrator;
        sim.dt = tp.dt > 0.0 ? tp.dt : tp.cfl_fraction * cfl_dt(grid, material);
        sim.t_end = number(t, "time", "t_end", std::nullopt);
        sim.record_every = tp.record_every;
        sim.snapshot_every = tp.snapshot_every;
        sim.cfl_safety = number(t, "time", "cfl_safety", sim.cfl_safety);
        if (need_time) guarded("time", [&] { validate(sim); return 0; });
    }
    return Problem{"", sim, alpha, classify_tol(cfg), has_time, std::nullopt};
}

}  // namespace lfdd
