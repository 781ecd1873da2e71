#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "swarm/capture.hpp"
#include "swarm/dataset.hpp"
#include "swarm/discovery.hpp"
#include "swarm/embedding_client.hpp"
#include "swarm/text.hpp"
#include "swarm/trajectory_io.hpp"
#include "swarm/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace swarm;

namespace swarmdisc {

namespace {

constexpr const char* kManifestFormat = "swarmdisc-manifest";
constexpr int kManifestVersion = 1;

fs::path prepare_dir(const std::string& out) {
    const fs::path dir(out.empty() ? "." : out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(dir.string(), "cannot create output directory: " + ec.message());
    return dir;
}

SimProfile pick_profile(const std::string& name, const Pinned& pinned) {
    return pinned.profile ? *pinned.profile : resolve_profile(name);
}

ClassifierThresholds pick_calibration(const std::string& path, const Pinned& pinned) {
    if (pinned.calibration) return *pinned.calibration;
    return path.empty() ? ClassifierThresholds{} : load_calibration(path);
}

json manifest(const char* subcommand, const json& options) {
    return {{"format", kManifestFormat},
            {"version", kManifestVersion},
            {"tool_version", kToolVersion},
            {"subcommand", subcommand},
            {"options", options},
            {"outputs", json::array()}};
}

void pin_profile(json& m, const SimProfile& profile) {
    m["profile"] = {{"name", profile.name}, {"text", format_profile(profile)}};
}

void write_manifest(const fs::path& dir, const json& m) {
    text::write_file((dir / "manifest.json").string(), m.dump(2) + "\n");
}

ControllerGenome parse_genome(const std::string& s) {
    const auto parts = text::split(s, ',');
    std::array<double, ControllerGenome::kGenes> genes{};
    if (parts.size() != genes.size()) {
        throw ConfigError("--genome expects 4 comma-separated numbers (v_clear,w_clear,v_seen,w_seen), got '" + s + "'");
    }
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (!text::parse_double(text::trim(parts[i]), genes[i])) {
            throw ConfigError("--genome: '" + std::string(parts[i]) + "' is not a number");
        }
    }
    return ControllerGenome::from_genes(genes);
}

// Archive files store genes as f32, which can land a hair outside the box.
ControllerGenome clamp_genome(const ControllerGenome& g, const SimProfile& profile) {
    const auto bounds = GenomeBounds::from(profile);
    auto genes = g.genes();
    for (std::size_t i = 0; i < genes.size(); ++i) genes[i] = std::clamp(genes[i], -bounds.limit(i), bounds.limit(i));
    return ControllerGenome::from_genes(genes);
}

BehaviorLabel label_entry(const ArchiveEntry& e, const SimProfile& profile, const ClassifierThresholds& t) {
    return classify_behavior(run_episode(clamp_genome(e.genome, profile), profile, e.seed), profile, t);
}

struct MedoidRow {
    std::size_t index;
    ArchiveEntry entry;
    BehaviorLabel label;
};

std::vector<MedoidRow> label_medoids(const NoveltyArchive& archive, const MedoidResult& medoids,
                                     const SimProfile& profile, const ClassifierThresholds& t) {
    std::vector<MedoidRow> rows;
    for (const std::size_t m : medoids.medoids) rows.push_back({m, archive.entry(m), label_entry(archive.entry(m), profile, t)});
    return rows;
}

std::string medoid_table(const std::vector<MedoidRow>& rows) {
    std::string out = "# swarmdisc medoids v1\nrank\tindex\tgeneration\tseed\tv_clear\tw_clear\tv_seen\tw_seen\tlabel\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& e = rows[r].entry;
        out += std::to_string(r) + '\t' + std::to_string(rows[r].index) + '\t' + std::to_string(e.generation) + '\t' +
               std::to_string(e.seed);
        for (const double g : e.genome.genes()) out += '\t' + text::format_double(g);
        out += '\t';
        out += to_string(rows[r].label);
        out += '\n';
    }
    return out;
}

void print_medoids(const std::vector<MedoidRow>& rows) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto g = rows[r].entry.genome;
        std::printf("  medoid %zu  entry %-6zu gen %-4u genome (%+.4f, %+.4f, %+.4f, %+.4f)  %s\n", r, rows[r].index,
                    rows[r].entry.generation, g.v_clear, g.w_clear, g.v_seen, g.w_seen, to_string(rows[r].label));
    }
}

std::size_t distinct_non_random(const std::vector<MedoidRow>& rows) {
    std::vector<BehaviorLabel> seen;
    for (const auto& r : rows) {
        if (r.label != BehaviorLabel::random && std::find(seen.begin(), seen.end(), r.label) == seen.end()) {
            seen.push_back(r.label);
        }
    }
    return seen.size();
}

}  // namespace

int run_simulate(const SimulateOptions& o, const Pinned& pinned) {
    const SimProfile profile = pick_profile(o.profile, pinned);
    const ControllerGenome genome = parse_genome(o.genome);
    const fs::path dir = prepare_dir(o.out);
    const Trajectory traj = run_episode(genome, profile, o.seed);

    json m = manifest("simulate", o);
    pin_profile(m, profile);
    write_trajectory(traj, (dir / "trajectory.swtr").string());
    m["outputs"].push_back("trajectory.swtr");
    if (o.frames) {
        fs::create_directories(dir / "frames");
        const FrameStack stack = subsample(traj);
        for (int c = 0; c < FrameStack::kChannels; ++c) {
            char name[64];
            std::snprintf(name, sizeof name, "frames/step_%04d.pgm", stack.steps[c]);
            write_pgm(stack.channels[c], (dir / name).string());
            m["outputs"].push_back(name);
        }
    }
    write_manifest(dir, m);

    const auto f = behavior_features(traj, profile);
    std::printf("simulated %d steps, %zu agents, profile %s, seed %llu\n", profile.episode_steps, traj.n_agents,
                profile.name.c_str(), static_cast<unsigned long long>(o.seed));
    std::printf("metrics: avg_speed=%.6f angular_momentum=%.6f radial_variance=%.6f scatter=%.6f group_rotation=%.6f\n",
                f.metrics.avg_speed, f.metrics.angular_momentum, f.metrics.radial_variance, f.metrics.scatter,
                f.metrics.group_rotation);
    std::printf("label: %s\n", to_string(classify_features(f, {})));
    std::printf("wrote %s\n", (dir / "trajectory.swtr").string().c_str());
    return kExitOk;
}

int run_replay(const ReplayOptions& o) {
    if (o.every < 1) throw ConfigError("--every must be >= 1");
    const Trajectory traj = read_trajectory(o.trajectory);
    const fs::path dir = prepare_dir(o.out);
    json m = manifest("replay", o);
    pin_profile(m, traj.profile);
    std::size_t written = 0;
    for (std::size_t t = 0; t < traj.length(); t += static_cast<std::size_t>(o.every)) {
        char name[64];
        std::snprintf(name, sizeof name, "frame_%05zu.pgm", t);
        write_pgm(rasterize(traj.positions_at(t), o.width, o.height, traj.profile), (dir / name).string());
        m["outputs"].push_back(name);
        ++written;
    }
    write_manifest(dir, m);
    std::printf("wrote %zu frames to %s\n", written, dir.string().c_str());
    return kExitOk;
}

int run_gen_dataset(const DatasetOptions& o, const Pinned& pinned) {
    if (o.n < 1) throw ConfigError("--n must be >= 1");
    const SimProfile profile = pick_profile(o.profile, pinned);
    const fs::path dir = prepare_dir(o.out);
    const auto summary = generate_dataset(o.n, profile, o.seed, (dir / "dataset.swbd").string(), o.width, o.height);
    json m = manifest("gen-dataset", o);
    pin_profile(m, profile);
    m["outputs"].push_back("dataset.swbd");
    write_manifest(dir, m);
    std::printf("wrote %u records (%dx%d, profile %s, %llu bytes) to %s\n", summary.records, summary.height,
                summary.width, summary.profile_name.c_str(), static_cast<unsigned long long>(summary.bytes),
                summary.path.c_str());
    return kExitOk;
}

int run_discover(const DiscoverOptions& o, const Pinned& pinned) {
    const SimProfile profile = pick_profile(o.profile, pinned);
    const ClassifierThresholds thresholds = pick_calibration(o.calibration, pinned);
    const Backend backend_kind = parse_backend(o.backend);
    const SeedPolicy seed_policy = parse_seed_policy(o.seed_policy);
    SearchConfig config;
    config.population = o.pop;
    config.generations = o.gens;
    config.k_neighbors = o.neighbors;
    config.crossover_rate = o.crossover;
    config.mutation_rate = o.mutation;
    config.tournament_size = o.tournament;
    config.mutation_sigma_fraction = o.sigma;
    config.seed = o.seed;
    config.k_medoids = o.k;
    config.validate();
    if (backend_kind == Backend::learned && o.endpoint.empty()) {
        throw ConfigError("--backend endpoint requires --endpoint");
    }
    const fs::path dir = prepare_dir(o.out);

    json m = manifest("discover", o);
    pin_profile(m, profile);
    m["calibration"] = format_calibration(thresholds);
    m["seeds"] = {{"run", o.seed}, {"policy", to_string(seed_policy)}};

    std::unique_ptr<EmbeddingSession> session;
    std::unique_ptr<BehaviorBackend> backend;
    if (backend_kind == Backend::learned) {
        session = std::make_unique<EmbeddingSession>(EmbeddingEndpoint::parse(o.endpoint), StackShape{},
                                                     std::chrono::milliseconds(o.timeout_ms));
        backend = std::make_unique<LearnedBackend>(*session);
        m["endpoint"] = {{"address", o.endpoint}, {"dim", session->dim()}, {"protocol", session->server_version()}};
    } else {
        backend = std::make_unique<HandcraftedBackend>();
    }

    NoveltyArchive archive;
    try {
        archive = run_discovery(profile, config, *backend, seed_policy);
    } catch (const DiscoveryError& e) {
        write_archive(e.archive(), (dir / "archive.partial.swar").string());
        m["outputs"].push_back("archive.partial.swar");
        m["failure"] = {{"generation", e.generation()}, {"genome", e.genome_index()}, {"message", e.what()}};
        write_manifest(dir, m);
        throw;
    }
    write_archive(archive, (dir / "archive.swar").string());
    write_archive_index(archive, (dir / "archive_index.tsv").string());
    m["outputs"].push_back("archive.swar");
    m["outputs"].push_back("archive_index.tsv");

    const MedoidResult medoids = cluster_archive(archive, static_cast<std::size_t>(o.k), o.seed);
    const auto rows = label_medoids(archive, medoids, profile, thresholds);
    text::write_file((dir / "medoids.tsv").string(), medoid_table(rows));
    m["outputs"].push_back("medoids.tsv");
    if (o.export_embeddings) {
        export_embeddings(archive, (dir / "embeddings.tsv").string());
        m["outputs"].push_back("embeddings.tsv");
    }
    write_manifest(dir, m);

    std::printf("archive: %zu entries (%d x %d), backend %s, dim %zu -> %s\n", archive.size(), o.pop, o.gens,
                to_string(archive.backend()), archive.dim(), (dir / "archive.swar").string().c_str());
    std::printf("medoids: %zu, cost %.6f, %zu distinct non-random labels\n", rows.size(), medoids.cost,
                distinct_non_random(rows));
    print_medoids(rows);
    return kExitOk;
}

int run_cluster(const ClusterOptions& o, const Pinned& pinned) {
    const SimProfile profile = pick_profile(o.profile, pinned);
    const ClassifierThresholds thresholds = pick_calibration(o.calibration, pinned);
    const NoveltyArchive archive = read_archive(o.archive);
    if (o.k < 1 || static_cast<std::size_t>(o.k) > archive.size()) {
        throw ConfigError("--k must lie in [1, " + std::to_string(archive.size()) + "]");
    }
    const fs::path dir = prepare_dir(o.out);
    const MedoidResult medoids = cluster_archive(archive, static_cast<std::size_t>(o.k), o.seed);
    const auto rows = label_medoids(archive, medoids, profile, thresholds);
    text::write_file((dir / "medoids.tsv").string(), medoid_table(rows));

    json m = manifest("cluster", o);
    pin_profile(m, profile);
    m["calibration"] = format_calibration(thresholds);
    m["outputs"].push_back("medoids.tsv");
    write_manifest(dir, m);
    std::printf("medoids: %zu of %zu entries, cost %.6f, %d swaps\n", rows.size(), archive.size(), medoids.cost,
                medoids.swaps);
    print_medoids(rows);
    return kExitOk;
}

int run_evaluate(const EvaluateOptions& o, const Pinned& pinned) {
    const int sources = (o.labeled.empty() ? 0 : 1) + (o.archive.empty() ? 0 : 1) + (o.synthetic > 0 ? 1 : 0);
    if (sources != 1) throw ConfigError("evaluate needs exactly one of --labeled, --archive, --synthetic");
    const SimProfile profile = pick_profile(o.profile, pinned);
    const ClassifierThresholds thresholds = pick_calibration(o.calibration, pinned);

    std::vector<LabeledBehavior> labeled;
    if (!o.labeled.empty()) {
        labeled = to_labeled(read_embeddings(o.labeled));
    } else if (!o.archive.empty()) {
        const NoveltyArchive archive = read_archive(o.archive);
        for (std::size_t i = 0; i < archive.size(); ++i) {
            labeled.push_back({label_entry(archive.entry(i), profile, thresholds), archive.entry(i).genome,
                               archive.behavior(i)});
        }
    } else {
        for (const auto label : kAllLabels) {
            for (int s = 0; s < o.synthetic; ++s) {
                const auto seed = mix_seed(o.seed, static_cast<std::uint64_t>(label) * 1000003u + s);
                const Trajectory traj = synthesize_behavior(label, profile, seed);
                labeled.push_back({label, {}, handcrafted_embed(traj, profile).to_vector()});
            }
        }
    }
    if (labeled.empty()) throw ConfigError("evaluate: no labelled behaviours in the input");

    TripletOptions topt;
    topt.max_triplets = o.max_triplets;
    topt.seed = o.seed;
    const ConfusionMatrix cm = triplet_confusion(labeled, topt);
    const fs::path dir = prepare_dir(o.out);

    std::map<BehaviorLabel, int> counts;
    for (const auto& l : labeled) ++counts[l.label];
    std::string kv = "# swarmdisc confusion v1\nexamples=" + std::to_string(labeled.size()) + "\n";
    for (const auto& [label, n] : counts) kv += std::string("count.") + to_string(label) + "=" + std::to_string(n) + "\n";
    kv += cm.key_values();
    text::write_file((dir / "confusion.txt").string(), cm.table());
    text::write_file((dir / "confusion.kv").string(), kv);

    json m = manifest("evaluate", o);
    pin_profile(m, profile);
    m["calibration"] = format_calibration(thresholds);
    m["outputs"] = {"confusion.txt", "confusion.kv"};
    if (o.export_embeddings) {
        export_embeddings(labeled, (dir / "labeled.tsv").string());
        m["outputs"].push_back("labeled.tsv");
    }
    write_manifest(dir, m);

    std::printf("%zu labelled behaviours\n", labeled.size());
    for (const auto& [label, n] : counts) std::printf("  %-16s %d\n", to_string(label), n);
    std::printf("\n%s", cm.table().c_str());
    return kExitOk;
}

int run_ablate(const AblateOptions& o, const Pinned& pinned) {
    const ClassifierThresholds thresholds = pick_calibration(o.calibration, pinned);
    const fs::path dir = prepare_dir(o.out);
    json m = manifest("ablate", o);
    m["calibration"] = format_calibration(thresholds);

    const SimProfile profiles[] = {rsrs_profile(), default_profile()};
    std::map<std::string, std::map<BehaviorLabel, int>> presence;
    for (const auto& profile : profiles) {
        m["profiles"][profile.name] = format_profile(profile);
        SearchConfig config;
        config.population = o.pop;
        config.generations = o.gens;
        config.k_medoids = o.k;
        config.seed = o.seed;
        HandcraftedBackend backend;
        const NoveltyArchive archive = run_discovery(profile, config, backend);
        const auto medoids = cluster_archive(archive, static_cast<std::size_t>(o.k), o.seed);
        const auto rows = label_medoids(archive, medoids, profile, thresholds);
        fs::create_directories(dir / profile.name);
        write_archive(archive, (dir / profile.name / "archive.swar").string());
        text::write_file((dir / profile.name / "medoids.tsv").string(), medoid_table(rows));
        m["outputs"].push_back(profile.name + "/archive.swar");
        m["outputs"].push_back(profile.name + "/medoids.tsv");
        for (const auto& r : rows) ++presence[profile.name][r.label];
        std::printf("%s: %zu entries, medoids:\n", profile.name.c_str(), archive.size());
        print_medoids(rows);
    }

    std::string table = "# swarmdisc ablation v1\nbehavior\trsrs\tdefault\n";
    std::printf("\n%-16s %6s %8s\n", "behavior", "rsrs", "default");
    for (const auto label : kAllLabels) {
        const int a = presence["rsrs"][label];
        const int b = presence["default"][label];
        table += std::string(to_string(label)) + '\t' + std::to_string(a) + '\t' + std::to_string(b) + '\n';
        std::printf("%-16s %6d %8d\n", to_string(label), a, b);
    }

    // The mechanism behind the profile difference: sliding along walls.
    SimProfile stuck = rsrs_profile();
    stuck.friction_mu = 1.0;
    const std::pair<std::string, SimProfile> probes[] = {
        {"default", default_profile()}, {"rsrs", rsrs_profile()}, {"rsrs_mu1", stuck}};
    std::string slide;
    std::printf("\nwall slide (45 deg approach, progress per contact step):\n");
    std::map<std::string, WallSlideProbe> results;
    for (const auto& [name, profile] : probes) {
        const auto p = wall_slide_probe(profile);
        results[name] = p;
        slide += "slide." + name + ".mu=" + text::format_double(profile.friction_mu) + "\n";
        slide += "slide." + name + ".contact_steps=" + std::to_string(p.contact_steps) + "\n";
        slide += "slide." + name + ".mean_progress=" + text::format_double(p.mean_progress) + "\n";
        slide += "slide." + name + ".min_progress=" + text::format_double(p.min_progress) + "\n";
        std::printf("  %-9s mu=%.2f  contact steps %2d  mean %.6f m  min %.6f m\n", name.c_str(), profile.friction_mu,
                    p.contact_steps, p.mean_progress, p.min_progress);
    }
    const bool slides = results["default"].contact_steps > 0 && results["default"].min_progress > 0;
    const bool sticks = results["rsrs_mu1"].contact_steps > 0 && results["rsrs_mu1"].max_progress == 0 &&
                        results["rsrs_mu1"].min_progress == 0;
    slide += std::string("mechanism=") + (slides && sticks ? "pass" : "fail") + "\n";
    text::write_file((dir / "ablation.tsv").string(), table);
    text::write_file((dir / "wall_slide.kv").string(), slide);
    m["outputs"].push_back("ablation.tsv");
    m["outputs"].push_back("wall_slide.kv");
    write_manifest(dir, m);
    std::printf("mechanism: %s\n", slides && sticks ? "pass" : "FAIL");
    if (!(slides && sticks)) throw MechanismError("friction mechanism check failed, see wall_slide.kv");
    return kExitOk;
}

int run_from_manifest(const std::string& manifest_path, const std::string& out) {
    json m;
    try {
        m = json::parse(text::read_file(manifest_path));
    } catch (const json::exception& e) {
        throw FormatError(0, manifest_path + ": not a manifest: " + e.what());
    }
    if (m.value("format", "") != kManifestFormat) throw BadMagicError(0, manifest_path + ": not a swarmdisc manifest");
    if (m.value("version", 0) != kManifestVersion) {
        throw BadVersionError(0, manifest_path + ": unsupported manifest version");
    }
    Pinned pinned;
    try {
        if (m.contains("profile")) {
            pinned.profile = parse_profile(m["profile"]["text"].get<std::string>(),
                                           m["profile"]["name"].get<std::string>(), manifest_path);
        }
        if (m.contains("calibration")) {
            pinned.calibration = parse_calibration(m["calibration"].get<std::string>(), manifest_path);
        }
        const std::string sub = m.at("subcommand").get<std::string>();
        const json& options = m.at("options");
        auto with_out = [&](auto opts) {
            if (!out.empty()) opts.out = out;
            return opts;
        };
        if (sub == "simulate") return run_simulate(with_out(options.get<SimulateOptions>()), pinned);
        if (sub == "replay") return run_replay(with_out(options.get<ReplayOptions>()));
        if (sub == "gen-dataset") return run_gen_dataset(with_out(options.get<DatasetOptions>()), pinned);
        if (sub == "discover") return run_discover(with_out(options.get<DiscoverOptions>()), pinned);
        if (sub == "cluster") return run_cluster(with_out(options.get<ClusterOptions>()), pinned);
        if (sub == "evaluate") return run_evaluate(with_out(options.get<EvaluateOptions>()), pinned);
        if (sub == "ablate") return run_ablate(with_out(options.get<AblateOptions>()), pinned);
        throw FormatError(0, manifest_path + ": unknown subcommand '" + sub + "'");
    } catch (const json::exception& e) {
        throw FormatError(0, manifest_path + ": malformed manifest: " + e.what());
    }
}

}  // namespace swarmdisc
