#include "ckdv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "ckdv/errors.hpp"

namespace ckdv {

namespace {

constexpr std::pair<Experiment, std::string_view> kExperimentNames[] = {
    {Experiment::Simulate, "simulate"},
    {Experiment::Classify, "classify"},
    {Experiment::Radius, "radius"},
    {Experiment::AclScan, "acl-scan"},
    {Experiment::CommutatorScan, "commutator-scan"},
    {Experiment::Picard, "picard"},
    {Experiment::InequalityScan, "inequality-scan"},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw InvalidParameter("expected true or false, got '" + std::string(v) + "'");
}

long long parse_int(std::string_view v) {
    long long x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw InvalidParameter("expected an integer, got '" + std::string(v) + "'");
    return x;
}

std::uint64_t parse_uint(std::string_view v) {
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw InvalidParameter("expected a nonnegative integer, got '" + std::string(v) + "'");
    return x;
}

std::string format_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += format_real(xs[i]);
    }
    return out;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return out;
}

std::string scheme_name(Scheme s) { return s == Scheme::ETDRK4 ? "etdrk4" : "ifrk4"; }

struct Entry {
    std::string key;
    std::function<void(RunConfig&, std::string_view)> set;
    /// Empty optional: key not shown in the resolved text.
    std::function<std::optional<std::string>(const RunConfig&)> get;
    bool canonical = true;
};

using Get = std::optional<std::string>;

Get real_or_none(const std::optional<double>& x) {
    if (!x) return std::nullopt;
    return format_real(*x);
}

bool uses(const SystemSpec& s, const std::string& key) {
    if (s.preset == "explicit") return true;
    if (s.preset == "majda-biello") return key == "a2";
    if (s.preset == "hirota-satsuma") return key == "a1" || key == "c12";
    return false;
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t;
        t.push_back({"experiment",
                     [](RunConfig& c, std::string_view v) { c.experiment = parse_experiment(v); },
                     [](const RunConfig& c) -> Get { return std::string(to_string(c.experiment)); }});
        t.push_back({"output_dir",
                     [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
                     [](const RunConfig& c) -> Get { return c.output_dir.string(); }, false});
        t.push_back({"seed", [](RunConfig& c, std::string_view v) { c.seed = parse_uint(v); },
                     [](const RunConfig& c) -> Get { return std::to_string(c.seed); }});
        t.push_back({"threads",
                     [](RunConfig& c, std::string_view v) {
                         c.threads = static_cast<int>(parse_int(v));
                     },
                     [](const RunConfig& c) -> Get { return std::to_string(c.threads); }, false});
        t.push_back({"enforce_admissibility",
                     [](RunConfig& c, std::string_view v) { c.enforce_admissibility = parse_bool(v); },
                     [](const RunConfig& c) -> Get {
                         return std::string(c.enforce_admissibility ? "true" : "false");
                     }});

        t.push_back({"system.preset",
                     [](RunConfig& c, std::string_view v) { c.system.preset = std::string(v); },
                     [](const RunConfig& c) -> Get { return c.system.preset; }});
        auto coeff = [&t](const char* name, std::optional<double> SystemSpec::*member) {
            t.push_back({std::string("system.") + name,
                         [member](RunConfig& c, std::string_view v) { c.system.*member = parse_real(v); },
                         [member, name](const RunConfig& c) -> Get {
                             if (!uses(c.system, name)) return std::nullopt;
                             return real_or_none(c.system.*member);
                         }});
        };
        coeff("a1", &SystemSpec::a1);
        coeff("a2", &SystemSpec::a2);
        coeff("c11", &SystemSpec::c11);
        coeff("c12", &SystemSpec::c12);
        coeff("c21", &SystemSpec::c21);
        coeff("c22", &SystemSpec::c22);

        t.push_back({"grid.n",
                     [](RunConfig& c, std::string_view v) {
                         c.n_points = static_cast<std::size_t>(parse_uint(v));
                     },
                     [](const RunConfig& c) -> Get { return std::to_string(c.n_points); }});
        t.push_back({"grid.length", [](RunConfig& c, std::string_view v) { c.length = parse_real(v); },
                     [](const RunConfig& c) -> Get { return format_real(c.length); }});

        t.push_back({"initial.profile",
                     [](RunConfig& c, std::string_view v) { c.initial.profile = std::string(v); },
                     [](const RunConfig& c) -> Get { return c.initial.profile; }});
        auto param = [&t](const char* name, double ProfileParams::*member) {
            t.push_back({std::string("initial.") + name,
                         [member](RunConfig& c, std::string_view v) {
                             c.initial.params.*member = parse_real(v);
                         },
                         [member](const RunConfig& c) -> Get {
                             const double x = c.initial.params.*member;
                             if (std::isnan(x)) return std::nullopt;
                             return format_real(x);
                         }});
        };
        param("u_amplitude", &ProfileParams::u_amplitude);
        param("v_amplitude", &ProfileParams::v_amplitude);
        param("width", &ProfileParams::width);
        param("u_center", &ProfileParams::u_center);
        param("v_center", &ProfileParams::v_center);
        param("radius", &ProfileParams::radius);
        t.push_back({"initial.dealias",
                     [](RunConfig& c, std::string_view v) { c.initial.params.dealias = parse_bool(v); },
                     [](const RunConfig& c) -> Get {
                         return std::string(c.initial.params.dealias ? "true" : "false");
                     }});
        auto file = [&t](const char* name, std::filesystem::path InitialSpec::*member) {
            t.push_back({std::string("initial.") + name,
                         [member](RunConfig& c, std::string_view v) {
                             c.initial.*member = std::string(v);
                         },
                         [member](const RunConfig& c) -> Get {
                             if ((c.initial.*member).empty()) return std::nullopt;
                             return (c.initial.*member).string();
                         }});
        };
        file("u_file", &InitialSpec::u_file);
        file("v_file", &InitialSpec::v_file);

        t.push_back({"stepper.scheme",
                     [](RunConfig& c, std::string_view v) {
                         if (v == "etdrk4") c.stepper.scheme = Scheme::ETDRK4;
                         else if (v == "ifrk4") c.stepper.scheme = Scheme::IFRK4;
                         else throw InvalidParameter("scheme must be etdrk4 or ifrk4");
                     },
                     [](const RunConfig& c) -> Get { return scheme_name(c.stepper.scheme); }});
        t.push_back({"stepper.dt",
                     [](RunConfig& c, std::string_view v) {
                         if (v == "auto") {
                             c.dt_auto = true;
                         } else {
                             c.stepper.dt = parse_real(v);
                             c.dt_auto = false;
                         }
                     },
                     [](const RunConfig& c) -> Get { return format_real(c.stepper.dt); }});
        t.push_back({"stepper.dealias",
                     [](RunConfig& c, std::string_view v) { c.stepper.dealias = parse_bool(v); },
                     [](const RunConfig& c) -> Get {
                         return std::string(c.stepper.dealias ? "true" : "false");
                     }});
        t.push_back({"stepper.contour_points",
                     [](RunConfig& c, std::string_view v) {
                         c.stepper.contour_points = static_cast<int>(parse_int(v));
                     },
                     [](const RunConfig& c) -> Get { return std::to_string(c.stepper.contour_points); }});

        auto real = [&t](std::string key, auto getter) {
            t.push_back({key,
                         [getter](RunConfig& c, std::string_view v) { getter(c) = parse_real(v); },
                         [getter](const RunConfig& c) -> Get {
                             return format_real(getter(const_cast<RunConfig&>(c)));
                         }});
        };
        auto list = [&t](std::string key, auto getter) {
            t.push_back({key,
                         [getter](RunConfig& c, std::string_view v) { getter(c) = parse_real_list(v); },
                         [getter](const RunConfig& c) -> Get {
                             return format_list(getter(const_cast<RunConfig&>(c)));
                         }});
        };
        auto count = [&t](std::string key, auto getter) {
            t.push_back({key,
                         [getter](RunConfig& c, std::string_view v) {
                             getter(c) = static_cast<std::remove_reference_t<decltype(getter(c))>>(
                                 parse_uint(v));
                         },
                         [getter](const RunConfig& c) -> Get {
                             return std::to_string(getter(const_cast<RunConfig&>(c)));
                         }});
        };

        real("analysis.rho", [](RunConfig& c) -> double& { return c.analysis.rho; });
        real("analysis.b", [](RunConfig& c) -> double& { return c.analysis.b; });
        real("analysis.b_prime", [](RunConfig& c) -> double& { return c.analysis.b_prime; });
        real("analysis.epsilon", [](RunConfig& c) -> double& { return c.analysis.epsilon; });
        t.push_back({"analysis.C_b",
                     [](RunConfig& c, std::string_view v) { c.analysis.C_b = parse_real(v); },
                     [](const RunConfig& c) -> Get { return real_or_none(c.analysis.C_b); }});
        real("lifespan.c0", [](RunConfig& c) -> double& { return c.life.c0; });
        real("lifespan.a", [](RunConfig& c) -> double& { return c.life.a; });

        real("simulate.t_final", [](RunConfig& c) -> double& { return c.simulate.t_final; });
        count("simulate.stride", [](RunConfig& c) -> std::size_t& { return c.simulate.stride; });
        list("simulate.gevrey_sigmas",
             [](RunConfig& c) -> std::vector<double>& { return c.simulate.gevrey_sigmas; });
        t.push_back({"simulate.estimate_radius",
                     [](RunConfig& c, std::string_view v) { c.simulate.estimate_radius = parse_bool(v); },
                     [](const RunConfig& c) -> Get {
                         return std::string(c.simulate.estimate_radius ? "true" : "false");
                     }});

        real("radius.t_final", [](RunConfig& c) -> double& { return c.radius.t_final; });
        count("radius.samples", [](RunConfig& c) -> std::size_t& { return c.radius.options.samples; });
        real("radius.span", [](RunConfig& c) -> double& { return c.radius.options.span; });
        real("radius.noise_floor", [](RunConfig& c) -> double& { return c.radius.options.noise_floor; });
        real("radius.proxy_growth", [](RunConfig& c) -> double& { return c.radius.options.proxy_growth; });

        list("acl.sigmas", [](RunConfig& c) -> std::vector<double>& { return c.acl.sigmas; });
        list("commutator.sigmas", [](RunConfig& c) -> std::vector<double>& { return c.commutator.sigmas; });

        list("picard.deltas", [](RunConfig& c) -> std::vector<double>& { return c.picard.deltas; });
        t.push_back({"picard.iterations",
                     [](RunConfig& c, std::string_view v) {
                         c.picard.options.iterations = static_cast<int>(parse_int(v));
                     },
                     [](const RunConfig& c) -> Get { return std::to_string(c.picard.options.iterations); }});
        t.push_back({"picard.quadrature_nodes",
                     [](RunConfig& c, std::string_view v) {
                         c.picard.options.quadrature_nodes = static_cast<int>(parse_int(v));
                     },
                     [](const RunConfig& c) -> Get {
                         return std::to_string(c.picard.options.quadrature_nodes);
                     }});
        real("picard.floor", [](RunConfig& c) -> double& { return c.picard.options.floor; });

        real("inequality.xi_min", [](RunConfig& c) -> double& { return c.inequality.xi_min; });
        real("inequality.xi_max", [](RunConfig& c) -> double& { return c.inequality.xi_max; });
        real("inequality.xi_step", [](RunConfig& c) -> double& { return c.inequality.xi_step; });
        list("inequality.sigmas", [](RunConfig& c) -> std::vector<double>& { return c.inequality.sigmas; });
        list("inequality.rhos", [](RunConfig& c) -> std::vector<double>& { return c.inequality.rhos; });
        return t;
    }();
    return table;
}

void apply(RunConfig& cfg, const std::string& key, std::string_view value, int line) {
    const auto& table = entries();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Entry& e) { return e.key == key; });
    if (it == table.end()) throw ConfigError("unknown key '" + key + "'", line, key);
    try {
        it->set(cfg, value);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("key '" + key + "': " + e.what(), line, key);
    }
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("key '" + key + "': " + what, 0, key);
}

void resolve(RunConfig& cfg) {
    require(cfg.threads >= 1, "threads", "must be at least 1");
    if (cfg.length == 0.0) cfg.length = 64.0 * std::numbers::pi;
    require(cfg.length > 0.0 && std::isfinite(cfg.length), "grid.length", "must be positive");
    require(cfg.n_points >= 16 && (cfg.n_points & (cfg.n_points - 1)) == 0, "grid.n",
            "must be a power of two, at least 16");

    const auto& p = cfg.system.preset;
    require(p == "majda-biello" || p == "hirota-satsuma" || p == "explicit", "system.preset",
            "must be majda-biello, hirota-satsuma or explicit");
    const std::pair<const char*, std::optional<double>*> slots[] = {
        {"a1", &cfg.system.a1}, {"a2", &cfg.system.a2}, {"c11", &cfg.system.c11},
        {"c12", &cfg.system.c12}, {"c21", &cfg.system.c21}, {"c22", &cfg.system.c22}};
    for (const auto& [name, slot] : slots) {
        const std::string key = std::string("system.") + name;
        if (slot->has_value())
            require(uses(cfg.system, name), key, "not used by preset " + p);
        else if (p == "explicit")
            throw ConfigError("key '" + key + "' is required by preset explicit", 0, key);
    }
    if (p == "majda-biello" && !cfg.system.a2) cfg.system.a2 = 1.0;
    if (p == "hirota-satsuma") {
        if (!cfg.system.a1) cfg.system.a1 = 0.1;
        if (!cfg.system.c12) cfg.system.c12 = 1.0;
    }
    try {
        (void)build_coefficients(cfg.system);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("system: ") + e.what(), 0, "system");
    }

    try {
        validate(cfg.analysis);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("analysis: ") + e.what(), 0, "analysis");
    }
    require(cfg.life.c0 > 0.0, "lifespan.c0", "must be positive");
    require(cfg.life.a >= 0.0, "lifespan.a", "must be nonnegative");

    cfg.initial.params.seed = cfg.seed;
    if (cfg.initial.profile == "file") {
        require(!cfg.initial.u_file.empty() || !cfg.initial.v_file.empty(), "initial.u_file",
                "profile 'file' needs initial.u_file or initial.v_file");
        for (auto* f : {&cfg.initial.u_file, &cfg.initial.v_file}) {
            if (f->empty()) continue;
            if (f->is_relative() && !cfg.base_dir.empty()) *f = cfg.base_dir / *f;
            require(std::filesystem::exists(*f), f == &cfg.initial.u_file ? "initial.u_file" : "initial.v_file",
                    "file '" + f->string() + "' does not exist");
        }
    } else {
        require(cfg.initial.u_file.empty() && cfg.initial.v_file.empty(), "initial.u_file",
                "files are only read with profile 'file'");
    }

    const auto grid = build_grid(cfg);
    SpectralState s0 = [&] {
        try {
            return build_initial_state(cfg, grid);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("initial: ") + e.what(), 0, "initial.profile");
        }
    }();
    const double delta = lifespan(l2_norm(s0.u_hat), l2_norm(s0.v_hat), cfg.life.c0, cfg.life.a);
    if (cfg.dt_auto) cfg.stepper.dt = default_dt(delta);
    require(cfg.stepper.dt > 0.0 && std::isfinite(cfg.stepper.dt), "stepper.dt", "must be positive");
    require(cfg.stepper.contour_points >= 4, "stepper.contour_points", "must be at least 4");

    require(cfg.simulate.t_final >= 0.0, "simulate.t_final", "must be nonnegative");
    require(cfg.radius.t_final > 0.0, "radius.t_final", "must be positive");
    require(cfg.radius.options.samples >= 8, "radius.samples", "must be at least 8");
    require(cfg.radius.options.span >= 16.0, "radius.span", "must be at least 16");
    cfg.radius.options.epsilon_tolerance = cfg.analysis.epsilon;

    if (cfg.acl.sigmas.empty()) {
        cfg.acl.sigmas = {0.0};
        for (double s : log_spaced(1e-3, 1e-1, 9)) cfg.acl.sigmas.push_back(s);
    }
    if (cfg.commutator.sigmas.empty()) cfg.commutator.sigmas = log_spaced(1e-3, 1e-1, 9);
    if (cfg.picard.deltas.empty())
        for (double f : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            const double d = std::min(1.0, f * delta);
            if (cfg.picard.deltas.empty() || d > cfg.picard.deltas.back()) cfg.picard.deltas.push_back(d);
        }
    if (cfg.inequality.sigmas.empty()) cfg.inequality.sigmas = default_scan_sigmas();
    if (cfg.inequality.rhos.empty()) cfg.inequality.rhos = default_scan_rhos();
    require(cfg.inequality.xi_step > 0.0 && cfg.inequality.xi_max >= cfg.inequality.xi_min,
            "inequality.xi_step", "needs xi_step > 0 and xi_max >= xi_min");
    require(cfg.picard.options.iterations >= 2, "picard.iterations", "must be at least 2");
    require(cfg.picard.options.quadrature_nodes >= 8, "picard.quadrature_nodes", "must be at least 8");
    for (double d : cfg.picard.deltas)
        require(d > 0.0 && d <= 1.0, "picard.deltas", "entries must lie in (0, 1]");
}

}  // namespace

std::string_view to_string(Experiment e) {
    for (const auto& [k, v] : kExperimentNames)
        if (k == e) return v;
    return "?";
}

Experiment parse_experiment(std::string_view name) {
    for (const auto& [k, v] : kExperimentNames)
        if (v == name) return k;
    throw InvalidParameter("unknown experiment '" + std::string(name) + "'");
}

double parse_real(std::string_view text) {
    std::string_view s = trim(text);
    double factor = 1.0;
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
        factor = std::numbers::pi;
        s = trim(s.substr(0, s.size() - 2));
        if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
        if (s.empty()) return factor;
    }
    double x = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(x))
        throw InvalidParameter("expected a real number, got '" + std::string(text) + "'");
    return x * factor;
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    std::string_view rest = trim(text);
    if (rest.empty()) return out;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(parse_real(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

std::string format_real(double x) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides,
                       const std::filesystem::path& base_dir) {
    RunConfig cfg;
    cfg.base_dir = base_dir;
    std::set<std::string> seen;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError("malformed section header", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected 'key = value'", line_no, std::string(line));
        std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key", line_no);
        if (!section.empty()) key = section + "." + key;
        if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no, key);
        apply(cfg, key, value, line_no);
    }
    for (const auto& [key, value] : overrides) apply(cfg, key, trim(value), 0);
    resolve(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides, path.parent_path());
}

std::string resolved_config_text(const RunConfig& cfg, bool canonical) {
    std::string out;
    for (const auto& e : entries()) {
        if (canonical && !e.canonical) continue;
        if (const auto v = e.get(cfg)) out += e.key + " = " + *v + "\n";
    }
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : resolved_config_text(cfg, true)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SystemCoefficients build_coefficients(const SystemSpec& s) {
    if (s.preset == "majda-biello") return make_majda_biello(s.a2.value_or(1.0));
    if (s.preset == "hirota-satsuma") return make_hirota_satsuma(s.a1.value_or(0.1), s.c12.value_or(1.0));
    if (s.preset == "explicit") {
        if (!(s.a1 && s.a2 && s.c11 && s.c12 && s.c21 && s.c22))
            throw InvalidParameter("explicit system needs all of a1, a2, c11, c12, c21, c22");
        return SystemCoefficients(*s.a1, *s.a2, *s.c11, *s.c12, *s.c21, *s.c22);
    }
    throw InvalidParameter("unknown system preset '" + s.preset + "'");
}

GridPtr build_grid(const RunConfig& cfg) {
    return make_grid(cfg.n_points, cfg.length > 0.0 ? cfg.length : 64.0 * std::numbers::pi);
}

SpectralState build_initial_state(const RunConfig& cfg, const GridPtr& grid) {
    if (cfg.initial.profile != "file") {
        ProfileParams p = cfg.initial.params;
        p.seed = cfg.seed;
        return initial_profile(cfg.initial.profile, p, grid);
    }
    SpectralState s{SpectralField(grid), SpectralField(grid), 0.0};
    if (!cfg.initial.u_file.empty()) s.u_hat = load_spectrum_file(cfg.initial.u_file, grid);
    if (!cfg.initial.v_file.empty()) s.v_hat = load_spectrum_file(cfg.initial.v_file, grid);
    return s;
}

}  // namespace ckdv
