#include "config.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace biharm::cli {

namespace {

using json = nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!keys.count(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

const json& require(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) {
        throw ConfigError(where + ": missing key '" + key + "'");
    }
    return j.at(key);
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) {
        throw ConfigError(where + " must be a number");
    }
    return j.get<double>();
}

double number_or(const json& j, const std::string& where, const char* key, double fallback) {
    return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

std::size_t count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(where + " must be a nonnegative integer");
    }
    return static_cast<std::size_t>(j.get<long long>());
}

std::string text(const json& j, const std::string& where) {
    if (!j.is_string()) {
        throw ConfigError(where + " must be a string");
    }
    return j.get<std::string>();
}

Vector vector_of(const json& j, const std::string& where, std::size_t m) {
    if (!j.is_array()) {
        throw ConfigError(where + " must be an array");
    }
    if (j.size() != m) {
        throw ConfigError(where + " has length " + std::to_string(j.size()) + ", expected " + std::to_string(m));
    }
    Vector v(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        v(static_cast<Eigen::Index>(i)) = number(j.at(i), where + "[" + std::to_string(i) + "]");
    }
    return v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

SectionOperator parse_section(const json& j, const std::filesystem::path& base) {
    const std::string kind = text(require(j, "section", "kind"), "section.kind");
    if (kind == "laplacian-1d") {
        only_keys(j, "section", {"kind", "m", "L"});
        const std::size_t m = count(require(j, "section", "m"), "section.m");
        const double L = number_or(j, "section", "L", 1.0);
        if (m == 0 || m > 4096) {
            throw ConfigError("section.m must be in 1..4096");
        }
        if (!(L > 0.0)) {
            throw ConfigError("section.L must be positive");
        }
        return SectionOperator::dirichlet_laplacian_1d(m, L);
    }
    if (kind == "matrix-file") {
        only_keys(j, "section", {"kind", "path"});
        const auto path = resolve(base, text(require(j, "section", "path"), "section.path"));
        return SectionOperator::from_matrix(read_matrix_file(path.string()), path.filename().string());
    }
    throw ConfigError("section.kind must be laplacian-1d or matrix-file, got '" + kind + "'");
}

std::optional<ExactCase> parse_manufactured(const json& j, const RunConfig& cfg) {
    const std::string which = text(require(j, "forcing", "case"), "forcing.case");
    if (which == "homogeneous") {
        only_keys(j, "forcing", {"kind", "case", "terms"});
        const json& terms = require(j, "forcing", "terms");
        if (!terms.is_array() || terms.empty()) {
            throw ConfigError("forcing.terms must be a nonempty array");
        }
        std::vector<HomogeneousTerm> out;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string where = "forcing.terms[" + std::to_string(i) + "]";
            only_keys(terms[i], where, {"mode", "A1", "A2"});
            HomogeneousTerm t;
            t.mode = count(require(terms[i], where, "mode"), where + ".mode");
            t.A1 = number_or(terms[i], where, "A1", 0.0);
            t.A2 = number_or(terms[i], where, "A2", 0.0);
            out.push_back(t);
        }
        try {
            return manufactured_homogeneous(cfg.generator, cfg.geom, cfg.k, out);
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("forcing: ") + e.what());
        }
    }
    if (which == "forced") {
        only_keys(j, "forcing", {"kind", "case", "mode", "profile", "U0", "U1"});
        const std::size_t mode = count(require(j, "forcing", "mode"), "forcing.mode");
        const json& profile = require(j, "forcing", "profile");
        if (!profile.is_array()) {
            throw ConfigError("forcing.profile must be an array of polynomial coefficients");
        }
        std::vector<double> r;
        for (std::size_t i = 0; i < profile.size(); ++i) {
            r.push_back(number(profile[i], "forcing.profile[" + std::to_string(i) + "]"));
        }
        try {
            return manufactured_forced(cfg.generator, cfg.geom, cfg.k, mode, r, number_or(j, "forcing", "U0", 0.0),
                                       number_or(j, "forcing", "U1", 0.0));
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("forcing: ") + e.what());
        }
    }
    throw ConfigError("forcing.case must be homogeneous or forced, got '" + which + "'");
}

ModalForcing parse_forcing(const json& j, RunConfig& cfg, const std::filesystem::path& base) {
    const std::string kind = text(require(j, "forcing", "kind"), "forcing.kind");
    if (kind == "zero") {
        only_keys(j, "forcing", {"kind"});
        return ModalForcing::zero();
    }
    if (kind == "sine") {
        only_keys(j, "forcing", {"kind", "side", "k"});
        const std::string side = j.contains("side") ? text(j.at("side"), "forcing.side") : "both";
        if (side != "minus" && side != "plus" && side != "both") {
            throw ConfigError("forcing.side must be minus, plus or both");
        }
        const std::size_t wave = j.contains("k") ? count(j.at("k"), "forcing.k") : 1;
        if (wave == 0) {
            throw ConfigError("forcing.k must be positive");
        }
        return ModalForcing::sine(cfg.generator->section(), cfg.geom, side != "plus", side != "minus",
                                  static_cast<int>(wave));
    }
    if (kind == "csv") {
        only_keys(j, "forcing", {"kind", "path"});
        const auto path = resolve(base, text(require(j, "forcing", "path"), "forcing.path"));
        return read_modal_forcing_csv(path.string(), cfg.geom, cfg.generator->dimension());
    }
    if (kind == "manufactured") {
        cfg.exact = parse_manufactured(j, cfg);
        return cfg.exact->forcing;
    }
    throw ConfigError("forcing.kind must be zero, sine, csv or manufactured, got '" + kind + "'");
}

BoundaryData parse_boundary(const json* j, const RunConfig& cfg, std::uint64_t seed) {
    const auto m = static_cast<std::ptrdiff_t>(cfg.generator->dimension());
    std::string kind = cfg.exact ? "exact" : "zero";
    if (j) {
        kind = text(require(*j, "boundary", "kind"), "boundary.kind");
    }
    if (kind == "zero") {
        if (j) {
            only_keys(*j, "boundary", {"kind"});
        }
        return BoundaryData::zero(m);
    }
    if (kind == "exact") {
        if (j) {
            only_keys(*j, "boundary", {"kind"});
        }
        if (!cfg.exact) {
            throw ConfigError("boundary.kind exact requires a manufactured forcing");
        }
        return cfg.exact->bc;
    }
    if (kind == "explicit") {
        only_keys(*j, "boundary", {"kind", "phi1_minus", "phi2_minus", "phi1_plus", "phi2_plus"});
        const auto mm = static_cast<std::size_t>(m);
        BoundaryData bc;
        bc.phi1_minus = vector_of(require(*j, "boundary", "phi1_minus"), "boundary.phi1_minus", mm);
        bc.phi2_minus = vector_of(require(*j, "boundary", "phi2_minus"), "boundary.phi2_minus", mm);
        bc.phi1_plus = vector_of(require(*j, "boundary", "phi1_plus"), "boundary.phi1_plus", mm);
        bc.phi2_plus = vector_of(require(*j, "boundary", "phi2_plus"), "boundary.phi2_plus", mm);
        return bc;
    }
    if (kind == "random") {
        only_keys(*j, "boundary", {"kind"});
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        const auto draw = [&] {
            Vector v(m);
            for (auto& x : v) {
                x = dist(rng);
            }
            return v;
        };
        BoundaryData bc;
        bc.phi1_minus = draw();
        bc.phi2_minus = draw();
        bc.phi1_plus = draw();
        bc.phi2_plus = draw();
        return bc;
    }
    throw ConfigError("boundary.kind must be zero, exact, explicit or random, got '" + kind + "'");
}

}  // namespace

RunConfig parse_config(const std::string& content, const std::filesystem::path& base, const Overrides& overrides) {
    json root;
    try {
        root = json::parse(content);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(root, "config",
              {"section", "geometry", "diffusivities", "forcing", "boundary", "solver", "scan", "convergence",
               "output", "seed"});

    RunConfig cfg;
    cfg.generator = std::make_shared<const GeneratorM>(parse_section(require(root, "config", "section"), base));

    const json& g = require(root, "config", "geometry");
    only_keys(g, "geometry", {"a", "gamma", "b"});
    try {
        cfg.geom = CylinderGeometry::make(number(require(g, "geometry", "a"), "geometry.a"),
                                          number(require(g, "geometry", "gamma"), "geometry.gamma"),
                                          number(require(g, "geometry", "b"), "geometry.b"));
    } catch (const InvalidGeometry& e) {
        throw ConfigError(std::string("geometry: ") + e.what());
    }

    if (root.contains("diffusivities")) {
        const json& d = root.at("diffusivities");
        only_keys(d, "diffusivities", {"k_minus", "k_plus"});
        try {
            cfg.k = Diffusivities::make(number_or(d, "diffusivities", "k_minus", 1.0),
                                        number_or(d, "diffusivities", "k_plus", 1.0));
        } catch (const Error& e) {
            throw ConfigError(std::string("diffusivities: ") + e.what());
        }
    }

    std::uint64_t seed = 1;
    if (root.contains("seed")) {
        seed = count(root.at("seed"), "seed");
    }
    if (overrides.seed) {
        seed = *overrides.seed;
    }

    ModalForcing forcing = ModalForcing::zero();
    if (root.contains("forcing")) {
        forcing = parse_forcing(root.at("forcing"), cfg, base);
    }
    const BoundaryData bc = parse_boundary(root.contains("boundary") ? &root.at("boundary") : nullptr, cfg, seed);

    if (root.contains("solver")) {
        const json& s = root.at("solver");
        only_keys(s, "solver", {"route", "n_x", "probes", "source_convention"});
        if (s.contains("route")) {
            cfg.options.route = parse_route(text(s.at("route"), "solver.route"));
        }
        if (s.contains("n_x")) {
            cfg.options.n_x = count(s.at("n_x"), "solver.n_x");
        }
        if (s.contains("probes")) {
            cfg.options.probes = count(s.at("probes"), "solver.probes");
        }
        if (s.contains("source_convention")) {
            const std::string conv = text(s.at("source_convention"), "solver.source_convention");
            if (conv == "printed") {
                cfg.options.source_convention = SourceConvention::printed;
            } else if (conv == "half") {
                cfg.options.source_convention = SourceConvention::half;
            } else {
                throw ConfigError("solver.source_convention must be printed or half");
            }
        }
    }
    if (overrides.route) {
        cfg.options.route = parse_route(*overrides.route);
    }
    if (overrides.n_x) {
        cfg.options.n_x = *overrides.n_x;
    }
    if (cfg.options.n_x < 17) {
        throw ConfigError("solver.n_x must be at least 17");
    }
    if (cfg.options.probes < 2) {
        throw ConfigError("solver.probes must be at least 2");
    }

    cfg.scan.parameter_sets.push_back(SymbolContext{cfg.geom.c(), cfg.geom.d(), cfg.k.k_minus, cfg.k.k_plus});
    if (root.contains("scan")) {
        const json& s = root.at("scan");
        only_keys(s, "scan", {"lo", "hi", "n", "parameter_sets"});
        cfg.scan.lo = number_or(s, "scan", "lo", cfg.scan.lo);
        cfg.scan.hi = number_or(s, "scan", "hi", cfg.scan.hi);
        if (s.contains("n")) {
            cfg.scan.n = count(s.at("n"), "scan.n");
        }
        if (s.contains("parameter_sets")) {
            const json& sets = s.at("parameter_sets");
            if (!sets.is_array()) {
                throw ConfigError("scan.parameter_sets must be an array");
            }
            cfg.scan.parameter_sets.clear();
            for (std::size_t i = 0; i < sets.size(); ++i) {
                const std::string where = "scan.parameter_sets[" + std::to_string(i) + "]";
                only_keys(sets[i], where, {"c", "d", "k_minus", "k_plus"});
                SymbolContext ctx{number(require(sets[i], where, "c"), where + ".c"),
                                  number(require(sets[i], where, "d"), where + ".d"),
                                  number(require(sets[i], where, "k_minus"), where + ".k_minus"),
                                  number(require(sets[i], where, "k_plus"), where + ".k_plus")};
                try {
                    ctx.validate();
                } catch (const Error& e) {
                    throw ConfigError(where + ": " + e.what());
                }
                cfg.scan.parameter_sets.push_back(ctx);
            }
        }
        if (cfg.scan.n == 0) {
            throw ConfigError("scan.n must be positive: the scan grid is empty");
        }
        if (!(cfg.scan.lo > 0.0) || !(cfg.scan.hi >= cfg.scan.lo)) {
            throw ConfigError("scan needs 0 < lo <= hi");
        }
        if (cfg.scan.parameter_sets.empty()) {
            throw ConfigError("scan.parameter_sets must not be empty");
        }
    }

    if (root.contains("convergence")) {
        const json& c = root.at("convergence");
        only_keys(c, "convergence", {"method", "levels"});
        if (c.contains("method")) {
            cfg.convergence.method = parse_method(text(c.at("method"), "convergence.method"));
        }
        if (c.contains("levels")) {
            const json& levels = c.at("levels");
            if (!levels.is_array()) {
                throw ConfigError("convergence.levels must be an array");
            }
            cfg.convergence.levels.clear();
            for (std::size_t i = 0; i < levels.size(); ++i) {
                cfg.convergence.levels.push_back(count(levels[i], "convergence.levels[" + std::to_string(i) + "]"));
            }
        }
    }

    if (root.contains("output")) {
        const json& o = root.at("output");
        only_keys(o, "output", {"dir"});
        if (o.contains("dir")) {
            cfg.out_dir = resolve(base, text(o.at("dir"), "output.dir"));
        }
    }
    if (overrides.out_dir) {
        cfg.out_dir = *overrides.out_dir;
    }

    cfg.problem = TransmissionProblem{cfg.generator, cfg.geom, cfg.k, forcing, bc};
    try {
        cfg.problem.validate();
    } catch (const DimensionMismatch& e) {
        throw ConfigError(std::string("boundary: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path().empty() ? "." : path.parent_path(), overrides);
}

}  // namespace biharm::cli
