#include "ecoplus/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ecoplus {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& value, const std::string& key) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for " + key);
    }
    if (pos != value.size()) throw std::invalid_argument("config: trailing junk after value for " + key);
    return out;
}

int parse_int(const std::string& value, const std::string& key) {
    const double d = parse_double(value, key);
    const int i = static_cast<int>(d);
    if (d != i) throw std::invalid_argument("config: integer expected for " + key);
    return i;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: boolean expected for " + key);
}

std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    using Setter = std::function<void(Config&, const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"road.length", [](Config& c, const std::string& v, const std::string& k) { c.road.length = parse_double(v, k); }},
        {"road.slope", [](Config& c, const std::string& v, const std::string& k) { c.road.slope = parse_double(v, k); }},
        {"road.gravity", [](Config& c, const std::string& v, const std::string& k) { c.road.gravity = parse_double(v, k); }},
        {"boundary.v0", [](Config& c, const std::string& v, const std::string& k) { c.boundary.v0 = parse_double(v, k); }},
        {"boundary.vd", [](Config& c, const std::string& v, const std::string& k) { c.boundary.vd = parse_double(v, k); }},
        {"boundary.tm", [](Config& c, const std::string& v, const std::string& k) { c.boundary.tm = parse_double(v, k); }},
        {"limits.v_max", [](Config& c, const std::string& v, const std::string& k) { c.limits.v_max = parse_double(v, k); }},
        {"limits.u_min", [](Config& c, const std::string& v, const std::string& k) { c.limits.u_min = parse_double(v, k); }},
        {"limits.u_max", [](Config& c, const std::string& v, const std::string& k) { c.limits.u_max = parse_double(v, k); }},
        {"limits.j_min", [](Config& c, const std::string& v, const std::string& k) { c.limits.j_min = parse_double(v, k); }},
        {"limits.j_max", [](Config& c, const std::string& v, const std::string& k) { c.limits.j_max = parse_double(v, k); }},
        {"limits.a_min", [](Config& c, const std::string& v, const std::string& k) { c.limits.a_min = parse_double(v, k); }},
        {"limits.a_max", [](Config& c, const std::string& v, const std::string& k) { c.limits.a_max = parse_double(v, k); }},
        {"model.cpem.c1", [](Config& c, const std::string& v, const std::string& k) { c.cpem.c1 = parse_double(v, k); }},
        {"model.cpem.c2", [](Config& c, const std::string& v, const std::string& k) { c.cpem.c2 = parse_double(v, k); }},
        {"model.cpem.cr", [](Config& c, const std::string& v, const std::string& k) { c.cpem.cr = parse_double(v, k); }},
        {"model.cpem.rho", [](Config& c, const std::string& v, const std::string& k) { c.cpem.rho = parse_double(v, k); }},
        {"model.cpem.area", [](Config& c, const std::string& v, const std::string& k) { c.cpem.area = parse_double(v, k); }},
        {"model.cpem.cd", [](Config& c, const std::string& v, const std::string& k) { c.cpem.cd = parse_double(v, k); }},
        {"model.cpem.mass", [](Config& c, const std::string& v, const std::string& k) { c.cpem.mass = parse_double(v, k); }},
        {"model.cpem.eta_d", [](Config& c, const std::string& v, const std::string& k) { c.cpem.eta_d = parse_double(v, k); }},
        {"model.cpem.eta_em", [](Config& c, const std::string& v, const std::string& k) { c.cpem.eta_em = parse_double(v, k); }},
        {"model.cpem.eta_b", [](Config& c, const std::string& v, const std::string& k) { c.cpem.eta_b = parse_double(v, k); }},
        {"model.cpem.regen_coeff", [](Config& c, const std::string& v, const std::string& k) { c.cpem.regen_coeff = parse_double(v, k); }},
        {"model.kmmk.c0", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.c0 = parse_double(v, k); }},
        {"model.kmmk.c1", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.c1 = parse_double(v, k); }},
        {"model.kmmk.c2", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.c2 = parse_double(v, k); }},
        {"model.kmmk.c3", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.c3 = parse_double(v, k); }},
        {"model.kmmk.c4", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.c4 = parse_double(v, k); }},
        {"model.kmmk.c5", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.c5 = parse_double(v, k); }},
        {"model.kmmk.c6", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.c6 = parse_double(v, k); }},
        {"model.kmmk.mass", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.mass = parse_double(v, k); }},
        {"model.kmmk.rho", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.rho = parse_double(v, k); }},
        {"model.kmmk.cd", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.cd = parse_double(v, k); }},
        {"model.kmmk.area", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.area = parse_double(v, k); }},
        {"model.kmmk.mu", [](Config& c, const std::string& v, const std::string& k) { c.kmmk.mu = parse_double(v, k); }},
        {"pwa.segments", [](Config& c, const std::string& v, const std::string& k) { c.pwa.segments = parse_int(v, k); }},
        {"pwa.oracle_segments", [](Config& c, const std::string& v, const std::string& k) { c.pwa.oracle_segments = parse_int(v, k); }},
        {"safety.enabled", [](Config& c, const std::string& v, const std::string& k) { c.safety.enabled = parse_bool(v, k); }},
        {"safety.min_gap", [](Config& c, const std::string& v, const std::string& k) { c.safety.min_gap = parse_double(v, k); }},
        {"safety.time_gap", [](Config& c, const std::string& v, const std::string& k) { c.safety.time_gap = parse_double(v, k); }},
        {"safety.entry_delay", [](Config& c, const std::string& v, const std::string& k) { c.safety.entry_delay = parse_double(v, k); }},
        {"experiment.dt", [](Config& c, const std::string& v, const std::string& k) { c.experiment.dt = parse_double(v, k); }},
        {"experiment.tm_max", [](Config& c, const std::string& v, const std::string& k) { c.experiment.tm_max = parse_double(v, k); }},
        {"experiment.tm_step", [](Config& c, const std::string& v, const std::string& k) { c.experiment.tm_step = parse_double(v, k); }},
    };

    std::istringstream stream(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section at line " + std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = setters.find(full);
        if (it == setters.end()) throw std::invalid_argument("config: unknown key '" + full + "'");
        it->second(cfg, value, full);
    }
    // The fuel model's indicator shares the control upper limit.
    cfg.kmmk.u_max = cfg.limits.u_max;
    cfg.validate();
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream stream(path);
    if (!stream) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return parse(buffer.str());
}

void Config::validate() const {
    road.validate();
    boundary.validate();
    limits.validate();
    cpem.validate();
    kmmk.validate();
    if (pwa.segments < 1 || pwa.oracle_segments < 1)
        throw std::invalid_argument("config: pwa segment counts must be positive");
    if (!(experiment.dt > 0.0) || !(experiment.tm_step > 0.0) || !(experiment.tm_max > 0.0))
        throw std::invalid_argument("config: experiment steps must be positive");
    if (safety.enabled && !(safety.min_gap > 0.0))
        throw std::invalid_argument("config: safety minimum gap must be positive");
}

std::string Config::render() const {
    std::ostringstream os;
    os << "[road]\n";
    os << "length = " << g9(road.length) << "\n";
    os << "slope = " << g9(road.slope) << "\n";
    os << "gravity = " << g9(road.gravity) << "\n\n";
    os << "[boundary]\n";
    os << "v0 = " << g9(boundary.v0) << "\n";
    os << "vd = " << g9(boundary.vd) << "\n";
    os << "tm = " << g9(boundary.tm) << "\n\n";
    os << "[limits]\n";
    os << "v_max = " << g9(limits.v_max) << "\n";
    os << "u_min = " << g9(limits.u_min) << "\n";
    os << "u_max = " << g9(limits.u_max) << "\n";
    os << "j_min = " << g9(limits.j_min) << "\n";
    os << "j_max = " << g9(limits.j_max) << "\n";
    if (limits.a_min) os << "a_min = " << g9(*limits.a_min) << "\n";
    if (limits.a_max) os << "a_max = " << g9(*limits.a_max) << "\n";
    os << "\n[model.cpem]\n";
    os << "c1 = " << g9(cpem.c1) << "\n";
    os << "c2 = " << g9(cpem.c2) << "\n";
    os << "cr = " << g9(cpem.cr) << "\n";
    os << "rho = " << g9(cpem.rho) << "\n";
    os << "area = " << g9(cpem.area) << "\n";
    os << "cd = " << g9(cpem.cd) << "\n";
    os << "mass = " << g9(cpem.mass) << "\n";
    os << "eta_d = " << g9(cpem.eta_d) << "\n";
    os << "eta_em = " << g9(cpem.eta_em) << "\n";
    os << "eta_b = " << g9(cpem.eta_b) << "\n";
    os << "regen_coeff = " << g9(cpem.regen_coeff) << "\n";
    os << "\n[model.kmmk]\n";
    os << "c0 = " << g9(kmmk.c0) << "\n";
    os << "c1 = " << g9(kmmk.c1) << "\n";
    os << "c2 = " << g9(kmmk.c2) << "\n";
    os << "c3 = " << g9(kmmk.c3) << "\n";
    os << "c4 = " << g9(kmmk.c4) << "\n";
    os << "c5 = " << g9(kmmk.c5) << "\n";
    os << "c6 = " << g9(kmmk.c6) << "\n";
    os << "mass = " << g9(kmmk.mass) << "\n";
    os << "rho = " << g9(kmmk.rho) << "\n";
    os << "cd = " << g9(kmmk.cd) << "\n";
    os << "area = " << g9(kmmk.area) << "\n";
    os << "mu = " << g9(kmmk.mu) << "\n";
    os << "\n[pwa]\n";
    os << "segments = " << pwa.segments << "\n";
    os << "oracle_segments = " << pwa.oracle_segments << "\n";
    os << "\n[safety]\n";
    os << "enabled = " << (safety.enabled ? "true" : "false") << "\n";
    os << "min_gap = " << g9(safety.min_gap) << "\n";
    os << "time_gap = " << g9(safety.time_gap) << "\n";
    os << "entry_delay = " << g9(safety.entry_delay) << "\n";
    os << "\n[experiment]\n";
    os << "dt = " << g9(experiment.dt) << "\n";
    os << "tm_max = " << g9(experiment.tm_max) << "\n";
    os << "tm_step = " << g9(experiment.tm_step) << "\n";
    return os.str();
}

} // namespace ecoplus
