#include "ywlab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "ywlab/errors.hpp"
#include "ywlab/presets.hpp"

namespace ywlab {

namespace {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("config key " + key + ": cannot parse '" + text + "'");
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(value)) throw ConfigError("config key " + key + ": value must be finite");
    return value;
}

struct Field {
    std::string name;  ///< section.key
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

template <class T>
Field field(std::string name, T RunConfig::*member) {
    Field f;
    f.name = name;
    if constexpr (std::is_same_v<T, std::string>) {
        f.get = [member](const RunConfig& c) { return c.*member; };
        f.set = [member](RunConfig& c, const std::string& v) { c.*member = trim(v); };
    } else if constexpr (std::is_same_v<T, double>) {
        f.get = [member](const RunConfig& c) { return format_real(c.*member); };
        f.set = [member, name](RunConfig& c, const std::string& v) { c.*member = parse_number<double>(name, v); };
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        f.get = [member](const RunConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < (c.*member).size(); ++i) out += (i ? "," : "") + format_real((c.*member)[i]);
            return out;
        };
        f.set = [member, name](RunConfig& c, const std::string& v) {
            std::vector<double> xs;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) xs.push_back(parse_number<double>(name, item));
            if (xs.empty()) throw ConfigError("config key " + name + ": empty list");
            c.*member = std::move(xs);
        };
    } else {
        f.get = [member](const RunConfig& c) { return std::to_string(c.*member); };
        f.set = [member, name](RunConfig& c, const std::string& v) { c.*member = parse_number<T>(name, v); };
    }
    return f;
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        field("run.preset", &RunConfig::preset),
        field("run.seed", &RunConfig::seed),
        field("run.family", &RunConfig::family),
        field("run.paths", &RunConfig::paths),
        field("run.samples", &RunConfig::samples),
        field("run.ensemble", &RunConfig::ensemble),
        field("run.ensemble_b", &RunConfig::ensemble_b),
        field("run.compat_samples", &RunConfig::compat_samples),
        field("run.cut", &RunConfig::cut),
        field("run.alpha", &RunConfig::alpha),
        field("space.dim", &RunConfig::dim),
        field("space.length", &RunConfig::length),
        field("coefficients.preset", &RunConfig::coefficients),
        field("coefficients.modes", &RunConfig::modes),
        field("coefficients.sigma_scale", &RunConfig::sigma_scale),
        field("coefficients.gamma", &RunConfig::gamma),
        field("coefficients.p_exp", &RunConfig::p_exp),
        field("coefficients.embedding", &RunConfig::embedding),
        field("coefficients.smoothing", &RunConfig::smoothing),
        field("coefficients.jump_scale", &RunConfig::jump_scale),
        field("intensity.preset", &RunConfig::intensity),
        field("intensity.layers", &RunConfig::layers),
        field("intensity.cutoff", &RunConfig::cutoff),
        field("grid.horizon", &RunConfig::horizon),
        field("grid.steps", &RunConfig::steps),
        field("initial.mean", &RunConfig::initial_mean),
        field("initial.sd", &RunConfig::initial_sd),
        field("solver.stepping", &RunConfig::stepping),
        field("solver.summation", &RunConfig::summation),
        field("solver.variant", &RunConfig::variant),
    };
    return table;
}

void set_field(RunConfig& config, const std::string& name, const std::string& value) {
    for (const Field& f : fields())
        if (f.name == name) {
            f.set(config, value);
            return;
        }
    throw ConfigError("unknown config key '" + name + "'");
}

}  // namespace

RunConfig preset_config(const std::string& name) {
    RunConfig c;
    c.preset = name;
    if (name == "heat") {
        return c;
    }
    if (name == "heat_jump") {
        c.coefficients = "heat";
        c.sigma_scale = 0.0;
        c.initial_mean = {0.0};
        return c;
    }
    if (name == "zero") {
        c.coefficients = "zero";
        c.intensity = "finite3";
        return c;
    }
    if (name == "identity") {
        c.coefficients = "identity";
        c.intensity = "finite3";
        c.embedding = "direct";
        c.initial_mean = {0.0};
        return c;
    }
    if (name == "porous_medium") {
        c.coefficients = "porous_medium";
        c.intensity = "alpha_half_spacetime";
        c.initial_mean = {0.5};
        c.gamma = 0.5;
        return c;
    }
    if (name == "multiplicative_sigma") {
        c.coefficients = "multiplicative_sigma";
        c.intensity = "finite3";
        c.gamma = 1.0;
        c.jump_scale = 0.1;
        return c;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> run_preset_names() {
    return {"zero", "heat", "heat_jump", "porous_medium", "multiplicative_sigma", "identity"};
}

void load_config_file(RunConfig& config, const std::string& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("cannot read config file: " + std::string(e.what()));
    }
    // the preset resets defaults, so apply it before the other keys
    if (auto preset = tree.get_optional<std::string>("run.preset")) config = preset_config(trim(*preset));
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config file: key '" + section + "' outside a section");
        for (const auto& [key, value] : body) set_field(config, section + "." + key, value.data());
    }
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not section.key=value");
    const std::string name = trim(assignment.substr(0, eq));
    const std::string value = assignment.substr(eq + 1);
    if (name == "run.preset") {
        config = preset_config(trim(value));
        return;
    }
    set_field(config, name, value);
}

std::string canonical_text(const RunConfig& config) {
    std::string out;
    for (const Field& f : fields()) out += f.name + "=" + f.get(config) + "\n";
    return out;
}

std::uint64_t config_digest(const RunConfig& config) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_text(config)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string digest_hex(std::uint64_t digest) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

Model build_model(const RunConfig& c) {
    if (c.dim == 0) throw ConfigError("space.dim must be positive");
    if (c.steps == 0) throw ConfigError("grid.steps must be positive");
    if (!(c.horizon > 0.0)) throw ConfigError("grid.horizon must be positive");
    if (!(c.cut > 0.0 && c.cut <= 1.0)) throw ConfigError("run.cut must lie in (0, 1]");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("run.alpha must lie in (0, 1)");
    if (c.initial_mean.size() != 1 && c.initial_mean.size() != c.dim)
        throw ConfigError("initial.mean needs one value or one per coefficient");
    if (!(c.initial_sd >= 0.0)) throw ConfigError("initial.sd must be nonnegative");

    Model m;
    try {
        m.space = GalerkinSpace::dirichlet(c.dim, c.length);
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    IntensityOptions io;
    io.layers = c.layers;
    io.location_extent = c.length;
    m.intensity = intensity_preset(c.intensity, io);
    if (c.cutoff > m.intensity->layers.size()) throw ConfigError("intensity.cutoff exceeds the ladder");

    CoefficientOptions co;
    co.modes = c.modes;
    co.sigma_scale = c.sigma_scale;
    co.gamma = c.gamma;
    co.p_exp = c.p_exp;
    if (c.embedding == "direct") {
        co.embedding.kind = JumpEmbedding::Kind::direct;
    } else if (c.embedding == "smoothed") {
        co.embedding.kind = JumpEmbedding::Kind::smoothed;
    } else {
        throw ConfigError("coefficients.embedding must be direct or smoothed");
    }
    co.embedding.smoothing = c.smoothing;
    co.embedding.scale = c.jump_scale;
    m.coefficients = coefficient_preset(c.coefficients, m.space, m.intensity, co);
    m.embedding = make_embedding(co.embedding, m.space, m.intensity->dimension);

    if (c.stepping == "explicit") {
        m.options.stepping = Stepping::explicit_euler;
    } else if (c.stepping == "semi_implicit") {
        m.options.stepping = Stepping::semi_implicit;
        if (m.coefficients.stiff_diagonal.empty())
            throw ConfigError("semi_implicit stepping needs a coefficient preset with a linear drift part");
    } else {
        throw ConfigError("solver.stepping must be explicit or semi_implicit");
    }
    if (c.summation == "sequential") {
        m.options.summation = Summation::sequential;
    } else if (c.summation == "pairwise") {
        m.options.summation = Summation::pairwise;
    } else {
        throw ConfigError("solver.summation must be sequential or pairwise");
    }
    if (c.variant == "anticipating") {
        m.options.anticipating = true;
    } else if (c.variant == "ambient_rng") {
        m.options.ambient_rng = true;
    } else if (c.variant != "standard") {
        throw ConfigError("solver.variant must be standard, anticipating or ambient_rng");
    }

    m.digest = config_digest(c);
    m.noise.grid = TimeGrid::uniform(c.horizon, c.steps);
    m.noise.wiener_modes = std::max<std::size_t>(c.modes, 1);
    m.noise.intensity = *m.intensity;
    m.noise.n_max = c.cutoff;
    m.noise.initial.mean.assign(c.dim, c.initial_mean.front());
    if (c.initial_mean.size() == c.dim) m.noise.initial.mean = c.initial_mean;
    m.noise.initial.sd.assign(c.dim, c.initial_sd);
    m.noise.family = c.family;
    m.noise.config_digest = m.digest;
    return m;
}

}  // namespace ywlab
