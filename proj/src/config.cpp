#include "conical/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace conical {

namespace {

using nlohmann::json;

struct Collector {
    std::vector<std::string> errors;

    void add(const std::string& path, const std::string& msg) {
        errors.push_back(path + ": " + msg);
    }
    bool ok() const { return errors.empty(); }
};

Poly parse_field(const json& j, std::size_t dim, const std::string& path, Collector& out) {
    if (!j.is_object()) {
        out.add(path, "expected a field object");
        return Poly::constant(dim, 0.0);
    }
    const std::string kind = j.value("kind", "");
    if (kind == "const") {
        if (!j.contains("c")) out.add(path + "/c", "missing constant value");
        return Poly::constant(dim, j.value("c", 0.0));
    }
    if (kind == "linear") {
        Vec a = j.value("a", Vec{});
        if (a.size() != dim) out.add(path + "/a", "coefficient count must equal dim");
        a.resize(dim, 0.0);
        return Poly::linear(a, j.value("b", 0.0));
    }
    if (kind == "poly") {
        std::vector<Poly::Term> terms;
        if (!j.contains("terms") || !j["terms"].is_array()) {
            out.add(path + "/terms", "missing term list");
        } else {
            for (std::size_t i = 0; i < j["terms"].size(); ++i) {
                const auto& t = j["terms"][i];
                std::vector<int> k = t.value("k", std::vector<int>{});
                if (k.size() != dim)
                    out.add(path + "/terms/" + std::to_string(i) + "/k",
                            "exponent count must equal dim");
                k.resize(dim, 0);
                for (int e : k)
                    if (e < 0)
                        out.add(path + "/terms/" + std::to_string(i) + "/k",
                                "exponents must be nonnegative");
                terms.push_back({t.value("c", 0.0), std::move(k)});
            }
        }
        return Poly(dim, std::move(terms));
    }
    out.add(path + "/kind", "unknown field kind '" + kind + "' (const | linear | poly)");
    return Poly::constant(dim, 0.0);
}

Factor1D parse_factor(const json& j, const std::string& path, Collector& out) {
    const std::string kind = j.value("kind", "");
    const double c = j.value("center", 0.0);
    const double w = j.value("width", 1.0);
    if (w <= 0.0) out.add(path + "/width", "width must be positive");
    if (kind == "gaussian") return Factor1D::gaussian(c, w);
    if (kind == "bump") return Factor1D::bump(c, w);
    if (kind == "monomial_bump") return Factor1D::monomial_bump(c, w, j.value("degree", 1));
    if (kind == "one") return Factor1D::one();
    out.add(path + "/kind", "unknown factor kind '" + kind + "'");
    return Factor1D::one();
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
    Collector out;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("parse error: ") + e.what());
    }

    RunConfig cfg;
    cfg.raw_json = text;

    // --- potential ---
    std::size_t dim = 1, codim = 1;
    Poly w = Poly::constant(1, 1.0), v0 = Poly::constant(1, 0.0);
    VectorField g;
    Box declared;
    bool expects_crossings = true;
    if (!j.contains("potential") || !j["potential"].is_object()) {
        out.add("/potential", "missing potential block");
    } else {
        const auto& p = j["potential"];
        dim = p.value("dim", 0u);
        codim = p.value("codim", 1u);
        if (dim < 1 || dim > 2) out.add("/potential/dim", "dim must be 1 or 2");
        if (dim >= 1 && (codim < 1 || codim > dim))
            out.add("/potential/codim", "codim must satisfy 1 <= p <= d");
        const std::size_t dsafe = std::max<std::size_t>(dim, 1);
        w = p.contains("w") ? parse_field(p["w"], dsafe, "/potential/w", out)
                            : (out.add("/potential/w", "missing"), Poly::constant(dsafe, 1.0));
        v0 = p.contains("V0") ? parse_field(p["V0"], dsafe, "/potential/V0", out)
                              : (out.add("/potential/V0", "missing"), Poly::constant(dsafe, 0.0));
        if (!p.contains("g")) {
            out.add("/potential/g", "missing");
            g = VectorField::canonical(dsafe, std::min<std::size_t>(codim, dsafe));
        } else if (p["g"].is_string()) {
            if (p["g"] != "coordinates")
                out.add("/potential/g", "string form must be \"coordinates\"");
            g = VectorField::canonical(dsafe, std::min<std::size_t>(codim, dsafe));
        } else if (p["g"].is_array()) {
            std::vector<Poly> comps;
            for (std::size_t i = 0; i < p["g"].size(); ++i)
                comps.push_back(parse_field(p["g"][i], dsafe,
                                            "/potential/g/" + std::to_string(i), out));
            if (comps.size() != codim)
                out.add("/potential/g", "component count must equal codim");
            g = VectorField::polynomial(dsafe, std::move(comps));
        } else {
            out.add("/potential/g", "must be \"coordinates\" or a list of fields");
        }
        if (!p.contains("box") || !p["box"].is_array() || p["box"].size() != dim) {
            out.add("/potential/box", "need one [lo, hi] pair per axis");
            declared.assign(dsafe, {-1.0, 1.0});
        } else {
            for (const auto& ax : p["box"]) {
                if (!ax.is_array() || ax.size() != 2 || !(double(ax[0]) < double(ax[1]))) {
                    out.add("/potential/box", "each axis needs lo < hi");
                    declared.push_back({-1.0, 1.0});
                } else {
                    declared.push_back({ax[0], ax[1]});
                }
            }
        }
        expects_crossings = p.value("expects_crossings", true);
    }
    cfg.declared_box = declared;

    // --- grid ---
    cfg.pad_fraction = 0.3;
    std::size_t n_default = 512;
    if (j.contains("grid")) {
        const auto& gr = j["grid"];
        cfg.pad_fraction = gr.value("pad_fraction", 0.3);
        if (gr.contains("n") && gr["n"].is_string()) {
            if (gr["n"] != "auto") out.add("/grid/n", "string form must be \"auto\"");
            cfg.auto_grid = true;
            n_default = 64;
        } else {
            n_default = gr.value("n", 512u);
            if (!is_power_of_two(n_default))
                out.add("/grid/n", "points per axis must be a power of two");
        }
        cfg.xi_max = gr.value("xi_max", 0.0);
        if (cfg.auto_grid && !(cfg.xi_max > 0.0))
            out.add("/grid/xi_max", "auto grids need a positive momentum window");
        if (cfg.pad_fraction < 0.0 || cfg.pad_fraction > 2.0)
            out.add("/grid/pad_fraction", "expected within [0, 2]");
    }
    Box padded;
    for (const auto& [lo, hi] : declared) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo) * (1.0 + cfg.pad_fraction);
        padded.push_back({c - h, c + h});
        cfg.axes.push_back({c - h, c + h, n_default});
    }

    // --- initial state ---
    if (!j.contains("initial") || !j["initial"].is_object()) {
        out.add("/initial", "missing initial-state block");
    } else {
        const auto& in = j["initial"];
        const std::string kind = in.value("kind", "");
        if (kind == "coherent") {
            cfg.initial.kind = InitialStateSpec::Kind::coherent;
            cfg.initial.q = in.value("q", Vec{});
            cfg.initial.p = in.value("p", Vec{});
            if (cfg.initial.q.size() != dim) out.add("/initial/q", "size must equal dim");
            if (cfg.initial.p.size() != dim) out.add("/initial/p", "size must equal dim");
        } else if (kind == "wkb") {
            cfg.initial.kind = InitialStateSpec::Kind::wkb;
            cfg.initial.amplitude =
                in.contains("A") ? parse_field(in["A"], dim, "/initial/A", out)
                                 : (out.add("/initial/A", "missing"), Poly::constant(dim, 1.0));
            cfg.initial.phase =
                in.contains("S") ? parse_field(in["S"], dim, "/initial/S", out)
                                 : (out.add("/initial/S", "missing"), Poly::constant(dim, 0.0));
        } else {
            out.add("/initial/kind", "must be coherent or wkb");
        }
    }

    // --- time, eps ---
    if (j.contains("time")) {
        const auto& t = j["time"];
        cfg.time.t_final = t.value("t_final", 0.0);
        cfg.time.dt = t.value("dt", 0.0);
        cfg.time.snapshots = t.value("snapshots", std::vector<double>{});
        if (cfg.time.t_final < 0.0) out.add("/time/t_final", "must be nonnegative");
    }
    cfg.eps_list = j.value("eps_list", std::vector<double>{});
    for (double e : cfg.eps_list)
        if (!(e > 0.0)) out.add("/eps_list", "entries must be positive");

    // --- symbols ---
    if (j.contains("symbols")) {
        const auto& sy = j["symbols"];
        if (sy.is_object() && sy.contains("centers")) {
            std::vector<std::pair<Vec, Vec>> centers;
            for (const auto& c : sy["centers"])
                centers.push_back({c.value("q", Vec{}), c.value("p", Vec{})});
            cfg.symbols = standard_symbol_catalog(dim, centers, sy.value("width", 0.35));
        } else if (sy.is_array()) {
            for (std::size_t i = 0; i < sy.size(); ++i) {
                const auto& s = sy[i];
                SymbolSpec spec;
                spec.id = s.value("id", "symbol_" + std::to_string(i));
                spec.scale = s.value("scale", 1.0);
                const std::string base = "/symbols/" + std::to_string(i);
                for (const auto& f : s.value("x", json::array()))
                    spec.fx.push_back(parse_factor(f, base + "/x", out));
                for (const auto& f : s.value("xi", json::array()))
                    spec.fxi.push_back(parse_factor(f, base + "/xi", out));
                if (spec.fx.size() != dim || spec.fxi.size() != dim)
                    out.add(base, "need one x and one xi factor per axis");
                cfg.symbols.push_back(std::move(spec));
            }
        } else {
            out.add("/symbols", "expected a list or a centers preset");
        }
    }

    // --- trajectory ---
    if (j.contains("trajectory")) {
        const auto& t = j["trajectory"];
        TrajectoryConfig tc;
        tc.start.x = t.value("x", Vec{});
        tc.start.xi = t.value("xi", Vec{});
        tc.t_final = t.value("t_final", 1.0);
        tc.samples = t.value("samples", 400u);
        if (tc.start.x.size() != dim) out.add("/trajectory/x", "size must equal dim");
        if (tc.start.xi.size() != dim) out.add("/trajectory/xi", "size must equal dim");
        if (tc.samples < 2) out.add("/trajectory/samples", "need at least 2 samples");
        cfg.trajectory = std::move(tc);
    }

    // --- egorov ---
    if (j.contains("egorov")) {
        const auto& e = j["egorov"];
        cfg.egorov.t = e.value("t", 0.0);
        cfg.egorov.n_particles = e.value("n_particles", 20000u);
        if (e.contains("criteria")) {
            const auto& c = e["criteria"];
            if (c.contains("min_slope")) cfg.egorov.criteria.min_slope = double(c["min_slope"]);
            cfg.egorov.criteria.monotone = c.value("monotone", false);
            if (c.contains("final_ratio_max"))
                cfg.egorov.criteria.final_ratio_max = double(c["final_ratio_max"]);
        }
    }

    // --- diagnostics ---
    if (j.contains("diagnostics")) {
        const auto& dg = j["diagnostics"];
        cfg.diagnostics.R_list = dg.value("R_list", std::vector<double>{8.0});
        cfg.diagnostics.delta_list = dg.value("delta_list", std::vector<double>{0.2});
        cfg.diagnostics.tube_radii =
            dg.value("tube_radii", std::vector<double>{0.2, 0.1, 0.05});
        cfg.diagnostics.y_max = dg.value("y_max", 0.0);
    }
    cfg.diagnostics.probe.id = "mass";
    cfg.diagnostics.probe.ykind = TwoMicrolocalSymbol::YKind::constant;
    cfg.diagnostics.probe.fx = {Factor1D::bump(0.0, 1.0)};
    cfg.diagnostics.probe.fxi = {Factor1D::bump(1.0, 1.2)};

    cfg.seed = j.value("seed", 1u);
    cfg.out_dir = j.value("out_dir", "out");
    cfg.threads = j.value("threads", 1);

    // --- cross-field resolution rules (named); auto grids satisfy them by
    // construction, fixed grids must be checked here ---
    for (double eps : cfg.auto_grid ? std::vector<double>{} : cfg.eps_list) {
        for (std::size_t i = 0; i < cfg.axes.size(); ++i) {
            const auto& a = cfg.axes[i];
            if (cfg.xi_max > 0.0) {
                const double need = 1.5 * a.length() * cfg.xi_max / (M_PI * eps);
                if (double(a.n) < need) {
                    std::ostringstream os;
                    os << "grid resolution rule: axis " << i << " needs n >= " << std::ceil(need)
                       << " to hold |xi| <= " << cfg.xi_max << " at eps = " << eps
                       << " (n = " << a.n << ")";
                    out.add("/grid/n", os.str());
                }
            }
            if (cfg.initial.kind == InitialStateSpec::Kind::coherent &&
                a.dx() > std::sqrt(eps) / 4.0) {
                std::ostringstream os;
                os << "coherent width rule: axis " << i << " spacing " << a.dx()
                   << " exceeds sqrt(eps)/4 = " << std::sqrt(eps) / 4.0 << " at eps = " << eps;
                out.add("/grid/n", os.str());
            }
        }
    }

    if (!out.ok()) throw ConfigError(out.errors);

    try {
        cfg.potential = std::make_shared<ConicalPotential>(dim, std::move(w), std::move(v0),
                                                           std::move(g), padded,
                                                           expects_crossings);
    } catch (const ConfigError& e) {
        throw ConfigError(std::vector<std::string>{std::string("/potential: ") + e.what()});
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

}  // namespace conical
