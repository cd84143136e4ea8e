#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trackdens/pipeline.hpp"
#include "trackdens/synth.hpp"

namespace trackdens {

/// Flat `key = value` file with `[section]` headers and `#` comments.
/// Values are looked up as "section.key".
class Config {
public:
    Config() = default;
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;  // comma separated
    std::vector<int> get_ints(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& entries() const { return entries_; }

    /// Text the config was parsed from (hashed into the run manifest).
    const std::string& source_text() const { return text_; }

private:
    std::map<std::string, std::string> entries_;
    std::string text_;
};

/// Template emitted by `init`, with every key present and documented.
std::string config_template();

/// Everything a subcommand needs, resolved from [sections] with defaults.
struct RunSettings {
    std::string input_path;
    std::string input_format = "synth";  // csv | hurdat | synth
    std::string years_path;

    std::size_t p = 13;
    PipelineParams params;
    SynthSpec synth;

    std::size_t simulate_count = 0;  // 0: n
    std::size_t validate_k = 199;
    double alpha = 0.05;

    std::vector<int> dim_candidates{2, 3, 4};
    std::size_t dim_sims = 100;

    std::string condition_path;
    std::size_t cde_count = 19;
    std::vector<std::pair<double, double>> cde_region;  // per-dimension ranges

    bool cv_requested = false;  // diffusion.epsilon = "cv"
    std::uint64_t seed = 20060801;
    std::string out_dir = "out";
    int jobs = 0;  // 0: library default
};

RunSettings resolve_settings(const Config& config);

/// Load tracks per the settings (file formats or the synthetic generator).
TrackSet load_input_tracks(const RunSettings& settings, std::vector<std::string>* warnings = nullptr);

}  // namespace trackdens
