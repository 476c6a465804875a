#ifndef ECOPLUS_CONFIG_HPP
#define ECOPLUS_CONFIG_HPP

#include "ecoplus/types.hpp"

#include <string>

namespace ecoplus {

struct PwaSection {
    int segments = 5;
    int oracle_segments = 500;
};

struct SafetySection {
    bool enabled = false;
    double min_gap = 2.0;
    double time_gap = 4.0;
    double entry_delay = 2.0;
};

struct ExperimentSection {
    double dt = 0.1;
    double tm_max = 30.0;
    double tm_step = 0.1;
};

/// Full run configuration. Defaults reproduce the reference simulation
/// setup; a single file determines a run.
struct Config {
    RoadSpec road;
    BoundarySpec boundary;
    Limits limits;
    CpemParams cpem;
    KmmkParams kmmk;
    PwaSection pwa;
    SafetySection safety;
    ExperimentSection experiment;

    static Config defaults() { return Config{}; }
    /// Parses an INI-style file over the defaults. Unknown sections or keys
    /// are rejected.
    static Config load(const std::string& path);
    static Config parse(const std::string& text);
    /// Canonical effective-config echo (re-parseable INI).
    std::string render() const;
    void validate() const;
};

} // namespace ecoplus

#endif // ECOPLUS_CONFIG_HPP
