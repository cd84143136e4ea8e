// trackdens: diffusion-map density estimation and simulation for track data.
//
// Subcommands mirror the pipeline stages: synth, embed, cv, dim, fit,
// simulate, validate, cde. `init` writes a documented config template.
// Every run is a pure function of (config, input files, seed); outputs are
// byte-identical across reruns and a manifest records the hashes.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "trackdens/cde.hpp"
#include "trackdens/config.hpp"
#include "trackdens/csv.hpp"
#include "trackdens/error.hpp"
#include "trackdens/hash.hpp"
#include "trackdens/pipeline.hpp"
#include "trackdens/rng.hpp"
#include "trackdens/track_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trackdens;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    long seed = -1;
    int jobs = -1;
    bool fail_on_reject = false;
};

struct RunContext {
    Config config;
    RunSettings settings;
    fs::path out;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
};

RunContext make_context(const CliOptions& options) {
    RunContext ctx;
    ctx.config = options.config_path.empty() ? Config::parse(config_template())
                                             : Config::load(options.config_path);
    ctx.settings = resolve_settings(ctx.config);
    if (options.seed >= 0) ctx.settings.seed = static_cast<std::uint64_t>(options.seed);
    if (options.jobs >= 0) ctx.settings.jobs = options.jobs;
    if (!options.out_dir.empty()) ctx.settings.out_dir = options.out_dir;
#ifdef _OPENMP
    if (ctx.settings.jobs > 0) omp_set_num_threads(ctx.settings.jobs);
#endif
    ctx.out = fs::path(ctx.settings.out_dir);
    fs::create_directories(ctx.out);
    return ctx;
}

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return hash_hex(fnv1a64(buffer.str()));
}

void write_text(RunContext& ctx, const std::string& name, const std::string& body) {
    const fs::path path = ctx.out / name;
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path.string());
    out << body;
    ctx.outputs.push_back(name);
}

void write_manifest(RunContext& ctx, const std::string& command, const json& params) {
    json manifest;
    manifest["command"] = command;
    manifest["config_hash"] = hash_hex(fnv1a64(ctx.config.source_text()));
    manifest["input_hash"] = ctx.settings.input_format == "synth"
                                 ? "synth-seed-" + std::to_string(ctx.settings.seed)
                                 : file_hash(ctx.settings.input_path);
    manifest["seed"] = ctx.settings.seed;
    manifest["parameters"] = params;
    manifest["outputs"] = ctx.outputs;
    std::ofstream out(ctx.out / (command + "_manifest.json"));
    out << manifest.dump(2) << '\n';
    for (const auto& w : ctx.warnings) std::cerr << "warning: " << w << '\n';
}

std::string embedding_csv(const std::vector<std::string>& ids, const Eigen::MatrixXd& coords) {
    std::ostringstream out;
    out << "id";
    for (Eigen::Index c = 0; c < coords.cols(); ++c) out << ",d" << (c + 1);
    out << '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i];
        for (Eigen::Index c = 0; c < coords.cols(); ++c)
            out << ',' << format_double(coords(static_cast<Eigen::Index>(i), c));
        out << '\n';
    }
    return out.str();
}

std::vector<std::string> track_ids(const TrackSet& set) {
    std::vector<std::string> ids;
    ids.reserve(set.size());
    for (const auto& t : set.tracks) ids.push_back(t.id);
    return ids;
}

json model_dump(const FittedPipeline& pipeline) {
    json dump;
    dump["epsilon"] = pipeline.epsilon_used;
    dump["t"] = pipeline.model.t;
    dump["m"] = pipeline.model.m;
    dump["n"] = pipeline.model.n();
    dump["track_set_hash"] = track_set_hash(pipeline.tracks());
    dump["eigenvalues"] = std::vector<double>(
        pipeline.model.eigenvalues.data(),
        pipeline.model.eigenvalues.data() + pipeline.model.eigenvalues.size());
    return dump;
}

json params_json(const RunSettings& s) {
    json p;
    p["p"] = s.p;
    p["epsilon"] = s.params.diffusion.use_median_epsilon
                       ? json("median")
                       : json(s.params.diffusion.epsilon);
    p["t"] = s.params.diffusion.t;
    p["m"] = s.params.diffusion.m;
    p["density_k"] = s.params.density_k;
    p["cos_lat_scaling"] = s.params.metric.cos_lat_scaling;
    return p;
}

TrackSet load_tracks(RunContext& ctx) {
    TrackSet tracks = load_input_tracks(ctx.settings, &ctx.warnings);
    if (tracks.size() == 0) throw input_error("input contains no usable tracks");
    return tracks;
}

void apply_cv_if_requested(RunContext& ctx, const TrackSet& tracks) {
    if (!ctx.settings.cv_requested) return;
    const CvResult cv = cross_validate(tracks,
                                       default_cv_grid(tracks, ctx.settings.params.metric),
                                       ctx.settings.params.diffusion.m,
                                       ctx.settings.params.preimage, ctx.settings.params.metric);
    ctx.settings.params.diffusion.use_median_epsilon = false;
    ctx.settings.params.diffusion.epsilon = cv.best.epsilon;
    ctx.settings.params.diffusion.t = cv.best.t;
}

int cmd_synth(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const TrackSet tracks = synthesize_tracks(ctx.settings.synth, ctx.settings.seed);
    {
        std::ostringstream body;
        write_tracks_csv(body, tracks.tracks);
        write_text(ctx, "tracks.csv", body.str());
    }
    write_years_csv_file((ctx.out / "years.csv").string(), tracks);
    ctx.outputs.push_back("years.csv");
    write_manifest(ctx, "synth", {{"n", tracks.size()}, {"p", tracks.p()}});
    std::cout << "synth: wrote " << tracks.size() << " tracks\n";
    return 0;
}

int cmd_embed(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const TrackSet tracks = load_tracks(ctx);
    apply_cv_if_requested(ctx, tracks);
    const auto pipeline = fit_pipeline(tracks, ctx.settings.params);
    write_text(ctx, "embedding.csv", embedding_csv(track_ids(tracks), pipeline->embedding));
    write_text(ctx, "model.json", model_dump(*pipeline).dump(2) + "\n");
    write_manifest(ctx, "embed", params_json(ctx.settings));
    std::cout << "embed: " << tracks.size() << " tracks -> m=" << pipeline->model.m
              << " (epsilon=" << format_double(pipeline->epsilon_used) << ")\n";
    return 0;
}

int cmd_cv(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const TrackSet tracks = load_tracks(ctx);
    const auto grid = default_cv_grid(tracks, ctx.settings.params.metric);
    const CvResult cv = cross_validate(tracks, grid, ctx.settings.params.diffusion.m,
                                       ctx.settings.params.preimage, ctx.settings.params.metric);
    std::ostringstream table;
    table << "epsilon,t,total_error,feasible\n";
    for (const auto& entry : cv.table)
        table << format_double(entry.candidate.epsilon) << ',' << entry.candidate.t << ','
              << format_double(entry.total_error) << ',' << (entry.feasible ? 1 : 0) << '\n';
    write_text(ctx, "cv_table.csv", table.str());
    const json best = {{"epsilon", cv.best.epsilon}, {"t", cv.best.t}};
    write_text(ctx, "cv_best.json", best.dump(2) + "\n");
    write_manifest(ctx, "cv", params_json(ctx.settings));
    std::cout << "cv: best epsilon=" << format_double(cv.best.epsilon) << " t=" << cv.best.t
              << "\n";
    return 0;
}

int cmd_dim(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const TrackSet tracks = load_tracks(ctx);
    apply_cv_if_requested(ctx, tracks);
    const RunSettings& s = ctx.settings;
    const auto factory = [&](int m) {
        PipelineParams params = s.params;
        params.diffusion.m = m;
        return make_sampler(fit_pipeline(tracks, params));
    };
    const DimSelection selection = select_dimension(tracks, s.dim_candidates, s.dim_sims, factory,
                                                    s.seed, s.params.metric);
    json report;
    report["selected_m"] = selection.selected_m;
    report["sims"] = s.dim_sims;
    for (const auto& entry : selection.table)
        report["candidates"].push_back({{"m", entry.m},
                                        {"mean_ratio", entry.mean_ratio},
                                        {"feasible", entry.feasible}});
    write_text(ctx, "dim.json", report.dump(2) + "\n");
    write_manifest(ctx, "dim", params_json(ctx.settings));
    std::cout << "dim: selected m=" << selection.selected_m << "\n";
    return 0;
}

int cmd_fit(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const TrackSet tracks = load_tracks(ctx);
    apply_cv_if_requested(ctx, tracks);
    const auto pipeline = fit_pipeline(tracks, ctx.settings.params);

    json fit;
    fit["model"] = model_dump(*pipeline);
    fit["density"] = {{"k", pipeline->density.k},
                      {"n", pipeline->density.n()},
                      {"bandwidths",
                       std::vector<double>(pipeline->density.bandwidths.data(),
                                           pipeline->density.bandwidths.data() +
                                               pipeline->density.bandwidths.size())}};
    write_text(ctx, "density.json", fit.dump(2) + "\n");

    // Density surface on a bounding-box grid, for plot emission.
    const int m = pipeline->model.m;
    const int per_axis = m <= 2 ? 40 : 12;
    Eigen::VectorXd lo = pipeline->embedding.colwise().minCoeff();
    Eigen::VectorXd hi = pipeline->embedding.colwise().maxCoeff();
    const Eigen::VectorXd pad = 0.1 * (hi - lo);
    lo -= pad;
    hi += pad;
    Eigen::Index cells = 1;
    for (int c = 0; c < m; ++c) cells *= per_axis;
    Eigen::MatrixXd grid(cells, m);
    for (Eigen::Index cell = 0; cell < cells; ++cell) {
        Eigen::Index rest = cell;
        for (int c = 0; c < m; ++c) {
            const Eigen::Index idx = rest % per_axis;
            rest /= per_axis;
            grid(cell, c) =
                lo(c) + (hi(c) - lo(c)) * static_cast<double>(idx) / (per_axis - 1);
        }
    }
    const Eigen::VectorXd values = kde_evaluate_batch(pipeline->density, grid);
    std::ostringstream surface;
    for (int c = 0; c < m; ++c) surface << 'd' << (c + 1) << ',';
    surface << "density\n";
    for (Eigen::Index cell = 0; cell < cells; ++cell) {
        for (int c = 0; c < m; ++c) surface << format_double(grid(cell, c)) << ',';
        surface << format_double(values(cell)) << '\n';
    }
    write_text(ctx, "density_grid.csv", surface.str());
    write_manifest(ctx, "fit", params_json(ctx.settings));
    std::cout << "fit: k=" << pipeline->density.k << " over " << pipeline->density.n()
              << " embedded points\n";
    return 0;
}

int cmd_simulate(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const TrackSet tracks = load_tracks(ctx);
    apply_cv_if_requested(ctx, tracks);
    const auto pipeline = fit_pipeline(tracks, ctx.settings.params);
    const std::size_t count =
        ctx.settings.simulate_count > 0 ? ctx.settings.simulate_count : tracks.size();

    const Eigen::MatrixXd draws = sampled_coordinates(*pipeline, count, ctx.settings.seed);
    const TrackSet simulated = simulate_tracks(*pipeline, count, ctx.settings.seed);
    {
        std::ostringstream body;
        write_tracks_csv(body, simulated.tracks);
        write_text(ctx, "simulated_tracks.csv", body.str());
    }
    write_text(ctx, "samples.csv", embedding_csv(track_ids(simulated), draws));
    write_manifest(ctx, "simulate", params_json(ctx.settings));
    std::cout << "simulate: wrote " << simulated.size() << " tracks\n";
    return 0;
}

int cmd_validate(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const TrackSet tracks = load_tracks(ctx);
    apply_cv_if_requested(ctx, tracks);
    const auto pipeline = fit_pipeline(tracks, ctx.settings.params);
    const TrackSampler sampler = make_sampler(pipeline);

    const ValidationReport report = simulated_test(sampler, tracks, ctx.settings.validate_k,
                                                   ctx.settings.seed, ctx.settings.params.metric);
    {
        std::ostringstream body;
        write_report_json(body, report);
        write_text(ctx, "validation.json", body.str());
    }
    {
        // Rebuild the final draw (deterministic) to geolocate both samples
        // in diffusion space for the saturation plot.
        const TrackSet final_draw =
            simulate_tracks(*pipeline, tracks.size(),
                            mix_seed(ctx.settings.seed, 2 * static_cast<std::uint64_t>(
                                                                ctx.settings.validate_k)));
        const Eigen::MatrixXd sim_coords = nystrom_extend_batch(pipeline->model, final_draw.tracks);
        const AssessmentTable table =
            visual_assessment(report, track_ids(tracks), pipeline->embedding,
                              track_ids(final_draw), sim_coords);
        std::ostringstream body;
        write_assessment_csv(body, table);
        write_text(ctx, "assessment.csv", body.str());
    }
    write_manifest(ctx, "validate", params_json(ctx.settings));
    const bool reject = report.p_value <= ctx.settings.alpha;
    std::cout << "validate: ell*=" << format_double(report.ell_star)
              << " p=" << format_double(report.p_value) << (reject ? " (reject)" : "") << "\n";
    if (reject && options.fail_on_reject) return 1;
    return 0;
}

int cmd_cde(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const TrackSet tracks = load_tracks(ctx);
    if (ctx.settings.condition_path.empty())
        throw input_error("cde: config key cde.condition (year,value csv) is required");
    const auto condition = read_condition_csv_file(ctx.settings.condition_path);
    const ConditionSplit split = split_by_condition(tracks, condition, ctx.settings.cde_count);

    apply_cv_if_requested(ctx, tracks);
    const RunSettings& s = ctx.settings;
    const double epsilon = s.params.diffusion.use_median_epsilon
                               ? median_pairwise_sq_distance(tracks, s.params.metric)
                               : s.params.diffusion.epsilon;
    const ConditionalDensities cd =
        conditional_densities(tracks, split, epsilon, s.params.diffusion.t, s.params.diffusion.m,
                              s.params.density_k, s.params.metric);

    json report;
    report["model"] = {{"epsilon", epsilon},
                       {"t", s.params.diffusion.t},
                       {"m", s.params.diffusion.m},
                       {"track_set_hash", cd.model_hash}};
    report["hot"] = {{"years", split.hot_years}, {"n", cd.hot_ids.size()}, {"k", cd.hot.k}};
    report["cold"] = {{"years", split.cold_years}, {"n", cd.cold_ids.size()}, {"k", cd.cold.k}};
    if (!s.cde_region.empty()) {
        json region;
        for (const auto& [lo, hi] : s.cde_region) region.push_back({{"lo", lo}, {"hi", hi}});
        AssessmentTable table;  // reuse the region query over all tracks
        table.ids = track_ids(tracks);
        table.sample.assign(tracks.size(), 0);
        table.within_nn.assign(tracks.size(), 0);
        table.coords = cd.embedding;
        report["discrepancy_region"] = {{"ranges", region},
                                        {"track_ids", rows_in_region(table, s.cde_region)}};
    }
    write_text(ctx, "cde.json", report.dump(2) + "\n");
    write_text(ctx, "cde_embedding.csv", embedding_csv(track_ids(tracks), cd.embedding));
    write_manifest(ctx, "cde", params_json(ctx.settings));
    std::cout << "cde: hot n=" << cd.hot_ids.size() << ", cold n=" << cd.cold_ids.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffusion-map density estimation and simulation for track data"};
    app.require_subcommand(1);

    CliOptions options;
    app.add_option("--config", options.config_path, "pipeline config file (default: built-in)");
    app.add_option("--seed", options.seed, "override run.seed");
    app.add_option("--jobs", options.jobs, "cap worker threads (0 = all cores)");
    app.add_option("--out", options.out_dir, "override run.out output directory");
    app.add_flag("--fail-on-reject", options.fail_on_reject,
                 "exit 1 when validation rejects at the configured alpha");

    auto* init = app.add_subcommand("init", "write a documented config template");
    std::string init_path = "trackdens.conf";
    init->add_option("path", init_path, "where to write the template");

    auto* synth = app.add_subcommand("synth", "generate a synthetic track archive");
    auto* embed = app.add_subcommand("embed", "build the diffusion map and export coordinates");
    auto* cv = app.add_subcommand("cv", "cross-validate (epsilon, t)");
    auto* dim = app.add_subcommand("dim", "select the embedding dimension");
    auto* fit = app.add_subcommand("fit", "fit the density and export a surface grid");
    auto* simulate = app.add_subcommand("simulate", "sample the density and invert to tracks");
    auto* validate = app.add_subcommand("validate", "run the two-sample NN validation");
    auto* cde = app.add_subcommand("cde", "hot/cold-year conditional densities");

    CLI11_PARSE(app, argc, argv);

    try {
        if (init->parsed()) {
            std::ofstream out(init_path);
            if (!out) throw input_error("cannot write " + init_path);
            out << config_template();
            std::cout << "init: wrote " << init_path << "\n";
            return 0;
        }
        if (synth->parsed()) return cmd_synth(options);
        if (embed->parsed()) return cmd_embed(options);
        if (cv->parsed()) return cmd_cv(options);
        if (dim->parsed()) return cmd_dim(options);
        if (fit->parsed()) return cmd_fit(options);
        if (simulate->parsed()) return cmd_simulate(options);
        if (validate->parsed()) return cmd_validate(options);
        if (cde->parsed()) return cmd_cde(options);
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
