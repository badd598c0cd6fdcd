#include "cflm/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cflm {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct RawValue {
    std::string text;
    int line = 0;
    mutable bool used = false;
};

struct KeyTable {
    std::map<std::string, RawValue> kv;

    [[noreturn]] static void fail(const std::string& key, int line, const std::string& what) {
        throw std::invalid_argument("line " + std::to_string(line) + ": key '" + key + "': " +
                                    what);
    }

    const RawValue* find(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    double get_double(const std::string& key, double dflt, bool* present = nullptr) const {
        const RawValue* rv = find(key);
        if (present) *present = rv != nullptr;
        if (!rv) return dflt;
        char* end = nullptr;
        const double v = std::strtod(rv->text.c_str(), &end);
        if (end == rv->text.c_str() || *end != '\0')
            fail(key, rv->line, "expected a number, got '" + rv->text + "'");
        return v;
    }

    long get_int(const std::string& key, long dflt) const {
        const RawValue* rv = find(key);
        if (!rv) return dflt;
        char* end = nullptr;
        const long v = std::strtol(rv->text.c_str(), &end, 10);
        if (end == rv->text.c_str() || *end != '\0')
            fail(key, rv->line, "expected an integer, got '" + rv->text + "'");
        return v;
    }

    bool get_bool(const std::string& key, bool dflt) const {
        const RawValue* rv = find(key);
        if (!rv) return dflt;
        const std::string& s = rv->text;
        if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "off" || s == "no") return false;
        fail(key, rv->line, "expected a boolean, got '" + s + "'");
    }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        const RawValue* rv = find(key);
        return rv ? rv->text : dflt;
    }

    // amplitude/width style: "auto" or a number; auto maps to the sentinel -1
    double get_auto_double(const std::string& key, double dflt) const {
        const RawValue* rv = find(key);
        if (!rv) return dflt;
        if (rv->text == "auto") return -1.0;
        return get_double(key, dflt);
    }

    int line_of(const std::string& key, int dflt = 0) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : it->second.line;
    }

    void check_all_used() const {
        for (const auto& [key, rv] : kv)
            if (!rv.used) fail(key, rv.line, "unknown key");
    }
};

KeyTable tokenize(const std::string& text) {
    KeyTable tab;
    std::istringstream in(text);
    std::string line, prefix;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("line " + std::to_string(lineno) +
                                            ": unterminated section header");
            prefix = trim(line.substr(1, line.size() - 2));
            if (!prefix.empty()) prefix += ".";
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = prefix + trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (tab.kv.count(key))
            throw std::invalid_argument("line " + std::to_string(lineno) + ": key '" + key +
                                        "': duplicate (first at line " +
                                        std::to_string(tab.kv[key].line) + ")");
        tab.kv[key] = RawValue{val, lineno};
    }
    return tab;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

bool Config::operator==(const Config& o) const {
    return grid == o.grid && params.a == o.params.a && params.kappa == o.params.kappa &&
           params.epsilon == o.params.epsilon && run.dt == o.run.dt &&
           run.t_end == o.run.t_end && run.nonlinear_enabled == o.run.nonlinear_enabled &&
           run.dealias_enabled == o.run.dealias_enabled && run.output_every == o.run.output_every &&
           run.seed == o.run.seed && run.init.kind == o.run.init.kind &&
           run.init.amplitude == o.run.init.amplitude && run.init.width == o.run.init.width &&
           run.init.mode == o.run.init.mode && run.init.band_lo == o.run.init.band_lo &&
           run.init.band_hi == o.run.init.band_hi && output_dir == o.output_dir &&
           snapshot_every == o.snapshot_every;
}

Config parse_config(const std::string& text) {
    KeyTable tab = tokenize(text);
    Config cfg;

    std::array<int, 3> n{};
    std::array<double, 3> l{};
    const char* nk[3] = {"grid.n_x", "grid.n_y", "grid.n_z"};
    const char* lk[3] = {"grid.l_x", "grid.l_y", "grid.l_z"};
    for (int a = 0; a < 3; ++a) {
        n[a] = static_cast<int>(tab.get_int(nk[a], 32));
        if (n[a] % 2 != 0) KeyTable::fail(nk[a], tab.line_of(nk[a]), "must be even");
        if (n[a] < 8) KeyTable::fail(nk[a], tab.line_of(nk[a]), "must be >= 8");
        l[a] = tab.get_double(lk[a], kTwoPi);
        if (!(l[a] > 0.0)) KeyTable::fail(lk[a], tab.line_of(lk[a]), "must be > 0");
    }
    cfg.grid = make_grid(n, l);

    const double a_amp = tab.get_double("params.a", 0.0);
    if (a_amp < 0.0)
        KeyTable::fail("params.a", tab.line_of("params.a"), "shear amplitude must be >= 0");
    const double kappa = tab.get_double("params.kappa", 0.2);
    bool have_eps = false;
    const double eps_in = tab.get_double("params.epsilon", 0.0, &have_eps);
    if (!(kappa > 1.0 / 16.0))
        KeyTable::fail("params.kappa", tab.line_of("params.kappa", tab.line_of("params.epsilon")),
                       "kappa = " + fmt(kappa) +
                           " violates the decay hypothesis kappa > 1/16 + epsilon");
    const double eps = have_eps ? eps_in : (kappa - 1.0 / 16.0) / 2.0;
    if (!(eps > 0.0))
        KeyTable::fail("params.epsilon", tab.line_of("params.epsilon"), "must be > 0");
    if (!(kappa > 1.0 / 16.0 + eps))
        KeyTable::fail("params.kappa", tab.line_of("params.kappa", tab.line_of("params.epsilon")),
                       "kappa = " + fmt(kappa) +
                           " violates the decay hypothesis kappa > 1/16 + epsilon");
    cfg.params = make_params(a_amp, kappa, eps);

    const std::string kind = tab.get_string("init.kind", "gaussian");
    if (kind == "gaussian")
        cfg.run.init.kind = InitKind::gaussian;
    else if (kind == "single_mode")
        cfg.run.init.kind = InitKind::single_mode;
    else if (kind == "random_band")
        cfg.run.init.kind = InitKind::random_band;
    else
        KeyTable::fail("init.kind", tab.line_of("init.kind"),
                       "must be gaussian, single_mode or random_band");
    cfg.run.init.amplitude = tab.get_auto_double("init.amplitude", -1.0);
    cfg.run.init.width = tab.get_auto_double("init.width", -1.0);
    cfg.run.init.mode = {static_cast<int>(tab.get_int("init.mode_x", 1)),
                         static_cast<int>(tab.get_int("init.mode_y", 0)),
                         static_cast<int>(tab.get_int("init.mode_z", 0))};
    cfg.run.init.band_lo = static_cast<int>(tab.get_int("init.band_lo", 1));
    cfg.run.init.band_hi = static_cast<int>(tab.get_int("init.band_hi", 2));
    if (cfg.run.init.kind == InitKind::gaussian) {
        const double w = cfg.run.init.width > 0.0 ? cfg.run.init.width : cfg.grid.l[0] / 8.0;
        const double h = std::max({cfg.grid.spacing(0), cfg.grid.spacing(1), cfg.grid.spacing(2)});
        if (w < 3.0 * h)
            KeyTable::fail("init.width", tab.line_of("init.width"),
                           "gaussian width under-resolved (< 3 cells)");
    }
    if (cfg.run.init.kind == InitKind::random_band) {
        if (cfg.run.init.band_lo < 0 || cfg.run.init.band_hi < cfg.run.init.band_lo)
            KeyTable::fail("init.band_lo", tab.line_of("init.band_lo"),
                           "need 0 <= band_lo <= band_hi");
        for (int ax = 0; ax < 3; ++ax)
            if (3 * cfg.run.init.band_hi > cfg.grid.n[ax])
                KeyTable::fail("init.band_hi", tab.line_of("init.band_hi"),
                               "band exceeds the dealias band");
    }

    cfg.run.dt = tab.get_double("time.dt", 0.01);
    if (!(cfg.run.dt > 0.0)) KeyTable::fail("time.dt", tab.line_of("time.dt"), "must be > 0");
    cfg.run.t_end = tab.get_double("time.t_end", 1.0);
    if (!(cfg.run.t_end > 0.0))
        KeyTable::fail("time.t_end", tab.line_of("time.t_end"), "must be > 0");
    cfg.run.output_every = static_cast<int>(tab.get_int("time.output_every", 10));
    if (cfg.run.output_every < 1)
        KeyTable::fail("time.output_every", tab.line_of("time.output_every"), "must be >= 1");

    cfg.run.nonlinear_enabled = tab.get_bool("nonlinear.enabled", true);
    cfg.run.dealias_enabled = tab.get_bool("nonlinear.dealias", true);

    cfg.output_dir = tab.get_string("output.dir", "out");
    cfg.snapshot_every = static_cast<int>(tab.get_int("output.snapshot_every", 0));
    if (cfg.snapshot_every < 0)
        KeyTable::fail("output.snapshot_every", tab.line_of("output.snapshot_every"),
                       "must be >= 0");

    const long seed = tab.get_int("seed", 12345);
    if (seed < 0) KeyTable::fail("seed", tab.line_of("seed"), "must be >= 0");
    cfg.run.seed = static_cast<std::uint64_t>(seed);

    tab.check_all_used();
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const Config& cfg) {
    std::ostringstream out;
    out << "grid.n_x = " << cfg.grid.n[0] << "\n";
    out << "grid.n_y = " << cfg.grid.n[1] << "\n";
    out << "grid.n_z = " << cfg.grid.n[2] << "\n";
    out << "grid.l_x = " << fmt(cfg.grid.l[0]) << "\n";
    out << "grid.l_y = " << fmt(cfg.grid.l[1]) << "\n";
    out << "grid.l_z = " << fmt(cfg.grid.l[2]) << "\n";
    out << "params.a = " << fmt(cfg.params.a) << "\n";
    out << "params.kappa = " << fmt(cfg.params.kappa) << "\n";
    out << "params.epsilon = " << fmt(cfg.params.epsilon) << "\n";
    const char* kind = cfg.run.init.kind == InitKind::gaussian      ? "gaussian"
                       : cfg.run.init.kind == InitKind::single_mode ? "single_mode"
                                                                    : "random_band";
    out << "init.kind = " << kind << "\n";
    out << "init.amplitude = "
        << (cfg.run.init.amplitude < 0.0 ? "auto" : fmt(cfg.run.init.amplitude)) << "\n";
    out << "init.width = " << (cfg.run.init.width < 0.0 ? "auto" : fmt(cfg.run.init.width))
        << "\n";
    out << "init.mode_x = " << cfg.run.init.mode[0] << "\n";
    out << "init.mode_y = " << cfg.run.init.mode[1] << "\n";
    out << "init.mode_z = " << cfg.run.init.mode[2] << "\n";
    out << "init.band_lo = " << cfg.run.init.band_lo << "\n";
    out << "init.band_hi = " << cfg.run.init.band_hi << "\n";
    out << "time.dt = " << fmt(cfg.run.dt) << "\n";
    out << "time.t_end = " << fmt(cfg.run.t_end) << "\n";
    out << "time.output_every = " << cfg.run.output_every << "\n";
    out << "nonlinear.enabled = " << (cfg.run.nonlinear_enabled ? "true" : "false") << "\n";
    out << "nonlinear.dealias = " << (cfg.run.dealias_enabled ? "true" : "false") << "\n";
    out << "output.dir = " << cfg.output_dir << "\n";
    out << "output.snapshot_every = " << cfg.snapshot_every << "\n";
    out << "seed = " << cfg.run.seed << "\n";
    return out.str();
}

}  // namespace cflm
