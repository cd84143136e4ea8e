#include "trackdens/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "trackdens/csv.hpp"
#include "trackdens/error.hpp"
#include "trackdens/track_io.hpp"

namespace trackdens {

Config Config::parse(const std::string& text) {
    Config config;
    config.text_ = text;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        if (sv.front() == '[') {
            if (sv.back() != ']') throw parse_error("unterminated section header", line_no);
            section = std::string(trim(sv.substr(1, sv.size() - 2)));
            continue;
        }
        const std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos) throw parse_error("expected `key = value`", line_no);
        const std::string key = std::string(trim(sv.substr(0, eq)));
        if (key.empty()) throw parse_error("empty key", line_no);
        config.entries_[section.empty() ? key : section + "." + key] =
            std::string(trim(sv.substr(eq + 1)));
    }
    return config;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

bool Config::has(const std::string& key) const {
    auto it = entries_.find(key);
    return it != entries_.end() && !it->second.empty();
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return (it == entries_.end() || it->second.empty()) ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double_field(entries_.at(key), 0);
}

long Config::get_int(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    return parse_int_field(entries_.at(key), 0);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = entries_.at(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw input_error("config: boolean expected for " + key + ", got '" + v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    for (auto field : split_csv_line(entries_.at(key)))
        out.push_back(parse_double_field(field, 0));
    return out;
}

std::vector<int> Config::get_ints(const std::string& key) const {
    std::vector<int> out;
    if (!has(key)) return out;
    for (auto field : split_csv_line(entries_.at(key)))
        out.push_back(static_cast<int>(parse_int_field(field, 0)));
    return out;
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

std::string config_template() {
    return R"(# trackdens pipeline configuration
# Every key is optional; the values below are the defaults.

[input]
# format: csv | hurdat | synth. synth ignores path and uses [synth].
format = synth
path =
# Optional `id,year` sidecar for csv inputs (hurdat years come from timestamps).
years =

[tracks]
# Number of equally spaced points per regularized track.
p = 13
# Scale longitude differences by cos(mean latitude) in the track metric.
cos_lat_scaling = false

[synth]
n = 608
genesis_lon0 = -81
genesis_lat0 = 11
genesis_lon1 = -58.5
genesis_lat1 = 17.5
heading_min = 2.46
heading_max = 3.69
curvature_min = -0.075
curvature_max = 0.075
arc_length = 40
raw_points = 41
year_min = 1950
year_max = 2005

[diffusion]
# epsilon: a number, `median` (median pairwise squared distance), or `cv`
# (leave-one-out cross-validation over the grid below).
epsilon = median
t = 1
m = 3
# cv grid: epsilons log-spaced between the q10 and q90 of pairwise squared
# distances, each combined with every t.
cv_epsilon_count = 7
cv_t = 1,2,3

[density]
# 0 = round(sqrt(n)) nearest neighbors for the adaptive bandwidths.
k = 0

[preimage]
# 0 = 9 log-spaced sigmas in [0.1*q25, 10*q75] of squared embedded distances;
# or give an explicit comma-separated list in sigma_grid.
sigma_count = 9
sigma_grid =
stretch_min = 0.75
stretch_max = 1.5
stretch_step = 0.05
# anchors: origination | lysis | both
anchors = both

[simulate]
# 0 = one simulated track per observed track.
count = 0

[validate]
k = 199
alpha = 0.05

[dim]
candidates = 2,3,4
sims = 100

[cde]
condition =
count = 19
# Optional discrepancy-region query, e.g. 2.4:3,-0.9:-0.4 (one lo:hi per
# leading diffusion coordinate).
region =

[run]
seed = 20060801
out = out
# 0 = use all available cores.
jobs = 0
)";
}

namespace {

std::vector<std::pair<double, double>> parse_region(const std::string& text) {
    std::vector<std::pair<double, double>> region;
    if (text.empty()) return region;
    for (auto range : split_csv_line(text)) {
        range = trim(range);
        const std::size_t colon = range.find(':');
        if (colon == std::string_view::npos)
            throw input_error("config: cde region ranges must look like lo:hi");
        region.emplace_back(parse_double_field(range.substr(0, colon), 0),
                            parse_double_field(range.substr(colon + 1), 0));
    }
    return region;
}

}  // namespace

RunSettings resolve_settings(const Config& config) {
    RunSettings s;
    s.input_format = config.get("input.format", "synth");
    if (s.input_format != "csv" && s.input_format != "hurdat" && s.input_format != "synth")
        throw input_error("config: unknown input format '" + s.input_format + "'");
    s.input_path = config.get("input.path", "");
    s.years_path = config.get("input.years", "");

    s.p = static_cast<std::size_t>(config.get_int("tracks.p", 13));
    if (s.p < 2) throw input_error("config: tracks.p must be >= 2");
    s.params.metric.cos_lat_scaling = config.get_bool("tracks.cos_lat_scaling", false);

    s.synth.n = static_cast<std::size_t>(config.get_int("synth.n", 608));
    s.synth.p = s.p;
    s.synth.genesis_lon0 = config.get_double("synth.genesis_lon0", -81.0);
    s.synth.genesis_lat0 = config.get_double("synth.genesis_lat0", 11.0);
    s.synth.genesis_lon1 = config.get_double("synth.genesis_lon1", -58.5);
    s.synth.genesis_lat1 = config.get_double("synth.genesis_lat1", 17.5);
    s.synth.heading_min = config.get_double("synth.heading_min", 2.46);
    s.synth.heading_max = config.get_double("synth.heading_max", 3.69);
    s.synth.curvature_min = config.get_double("synth.curvature_min", -0.075);
    s.synth.curvature_max = config.get_double("synth.curvature_max", 0.075);
    s.synth.arc_length = config.get_double("synth.arc_length", 40.0);
    s.synth.raw_points = static_cast<std::size_t>(config.get_int("synth.raw_points", 41));
    s.synth.year_min = static_cast<int>(config.get_int("synth.year_min", 1950));
    s.synth.year_max = static_cast<int>(config.get_int("synth.year_max", 2005));

    const std::string epsilon = config.get("diffusion.epsilon", "median");
    if (epsilon == "median") {
        s.params.diffusion.use_median_epsilon = true;
    } else if (epsilon == "cv") {
        s.params.diffusion.use_median_epsilon = true;  // placeholder until cv runs
        s.cv_requested = true;
    } else {
        s.params.diffusion.use_median_epsilon = false;
        s.params.diffusion.epsilon = parse_double_field(epsilon, 0);
        if (!(s.params.diffusion.epsilon > 0.0))
            throw input_error("config: diffusion.epsilon must be positive");
    }
    s.params.diffusion.t = static_cast<int>(config.get_int("diffusion.t", 1));
    s.params.diffusion.m = static_cast<int>(config.get_int("diffusion.m", 3));

    s.params.density_k = static_cast<int>(config.get_int("density.k", 0));

    s.params.preimage.sigma_grid = config.get_doubles("preimage.sigma_grid");
    const double stretch_min = config.get_double("preimage.stretch_min", 0.75);
    const double stretch_max = config.get_double("preimage.stretch_max", 1.5);
    const double stretch_step = config.get_double("preimage.stretch_step", 0.05);
    if (!(stretch_step > 0.0)) throw input_error("config: preimage.stretch_step must be positive");
    const auto steps = static_cast<std::size_t>((stretch_max - stretch_min) / stretch_step + 1e-9);
    for (std::size_t i = 0; i <= steps; ++i)
        s.params.preimage.stretch_grid.push_back(
            std::min(stretch_min + static_cast<double>(i) * stretch_step, stretch_max));
    const std::string anchors = config.get("preimage.anchors", "both");
    s.params.preimage.anchor_origination = anchors == "both" || anchors == "origination";
    s.params.preimage.anchor_lysis = anchors == "both" || anchors == "lysis";
    if (!s.params.preimage.anchor_origination && !s.params.preimage.anchor_lysis)
        throw input_error("config: preimage.anchors must be origination, lysis, or both");

    s.simulate_count = static_cast<std::size_t>(config.get_int("simulate.count", 0));
    s.validate_k = static_cast<std::size_t>(config.get_int("validate.k", 199));
    s.alpha = config.get_double("validate.alpha", 0.05);

    if (config.has("dim.candidates")) s.dim_candidates = config.get_ints("dim.candidates");
    s.dim_sims = static_cast<std::size_t>(config.get_int("dim.sims", 100));

    s.condition_path = config.get("cde.condition", "");
    s.cde_count = static_cast<std::size_t>(config.get_int("cde.count", 19));
    s.cde_region = parse_region(config.get("cde.region", ""));

    s.seed = static_cast<std::uint64_t>(config.get_int("run.seed", 20060801));
    s.out_dir = config.get("run.out", "out");
    s.jobs = static_cast<int>(config.get_int("run.jobs", 0));
    return s;
}

TrackSet load_input_tracks(const RunSettings& settings, std::vector<std::string>* warnings) {
    if (settings.input_format == "synth")
        return synthesize_tracks(settings.synth, settings.seed);

    if (settings.input_path.empty()) throw input_error("config: input.path is required");
    const TrackFormat format =
        settings.input_format == "csv" ? TrackFormat::csv : TrackFormat::hurdat;
    ParseResult parsed = parse_tracks_file(settings.input_path, format);
    TrackSet set = build_track_set(parsed, settings.p, warnings);
    if (!settings.years_path.empty()) {
        const auto years = read_years_csv_file(settings.years_path);
        for (std::size_t i = 0; i < set.tracks.size(); ++i) {
            auto it = years.find(set.tracks[i].id);
            if (it != years.end()) set.years[i] = it->second;
        }
    }
    return set;
}

}  // namespace trackdens
