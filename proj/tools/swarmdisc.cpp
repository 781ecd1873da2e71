// swarmdisc: command-line front end of the behaviour discovery pipeline.

#include <cstdio>
#include <exception>
#include <functional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "swarm/discovery.hpp"
#include "swarm/version.hpp"

using namespace swarmdisc;

namespace {

void add_out(CLI::App* cmd, std::string& out) {
    cmd->add_option("--out", out, "output directory (created if missing)")->capture_default_str();
}

void add_profile(CLI::App* cmd, std::string& profile) {
    cmd->add_option("--profile", profile,
                    "built-in profile (rsrs, default), profile file, or name under $SWARMDISC_PROFILE_DIR")
        ->capture_default_str();
}

void add_calibration(CLI::App* cmd, std::string& path) {
    cmd->add_option("--calibration", path, "classifier calibration file (built-in thresholds if omitted)")
        ->check(CLI::ExistingFile);
}

int report(const char* kind, const std::exception& e, int code) {
    std::fprintf(stderr, "swarmdisc: %s: %s\n", kind, e.what());
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarm behaviour discovery: simulate, capture, search and evaluate emergent behaviours"};
    app.set_version_flag("--version", swarm::kToolVersion);
    app.require_subcommand(1);

    std::function<int()> action;

    SimulateOptions sim;
    auto* c_sim = app.add_subcommand("simulate", "run one episode and write its trajectory");
    add_profile(c_sim, sim.profile);
    c_sim->add_option("--genome", sim.genome, "v_clear,w_clear,v_seen,w_seen")->required();
    c_sim->add_option("--seed", sim.seed, "spawn seed")->capture_default_str();
    c_sim->add_flag("--frames", sim.frames, "also dump the three captured frames as PGM");
    add_out(c_sim, sim.out);
    c_sim->callback([&] { action = [&] { return run_simulate(sim); }; });

    ReplayOptions rep;
    auto* c_rep = app.add_subcommand("replay", "render a trajectory file as a PGM frame sequence");
    c_rep->add_option("--trajectory", rep.trajectory, "trajectory file")->required()->check(CLI::ExistingFile);
    c_rep->add_option("--every", rep.every, "render every n-th snapshot")->capture_default_str();
    c_rep->add_option("--width", rep.width)->capture_default_str();
    c_rep->add_option("--height", rep.height)->capture_default_str();
    add_out(c_rep, rep.out);
    c_rep->callback([&] { action = [&] { return run_replay(rep); }; });

    DatasetOptions ds;
    auto* c_ds = app.add_subcommand("gen-dataset", "render frame stacks of random controllers into a dataset file");
    c_ds->add_option("--n", ds.n, "number of records")->capture_default_str();
    add_profile(c_ds, ds.profile);
    c_ds->add_option("--seed", ds.seed)->capture_default_str();
    c_ds->add_option("--width", ds.width)->capture_default_str();
    c_ds->add_option("--height", ds.height)->capture_default_str();
    add_out(c_ds, ds.out);
    c_ds->callback([&] { action = [&] { return run_gen_dataset(ds); }; });

    DiscoverOptions dis;
    auto* c_dis = app.add_subcommand("discover", "novelty search over controllers, then k-medoids");
    add_profile(c_dis, dis.profile);
    c_dis->add_option("--backend", dis.backend, "behaviour representation: metrics or endpoint")
        ->check(CLI::IsMember({"metrics", "endpoint"}))
        ->capture_default_str();
    c_dis->add_option("--endpoint", dis.endpoint, "encoder: tcp://host:port or a command speaking on stdio");
    c_dis->add_option("--timeout-ms", dis.timeout_ms, "per-request encoder timeout")->capture_default_str();
    c_dis->add_option("--pop", dis.pop, "population size")->capture_default_str();
    c_dis->add_option("--gens", dis.gens, "generations")->capture_default_str();
    c_dis->add_option("--k", dis.k, "medoids to report")->capture_default_str();
    c_dis->add_option("--neighbors", dis.neighbors, "novelty neighbourhood size")->capture_default_str();
    c_dis->add_option("--crossover", dis.crossover)->capture_default_str();
    c_dis->add_option("--mutation", dis.mutation)->capture_default_str();
    c_dis->add_option("--tournament", dis.tournament)->capture_default_str();
    c_dis->add_option("--sigma", dis.sigma, "mutation std. dev. as a fraction of each gene's range")
        ->capture_default_str();
    c_dis->add_option("--seed", dis.seed)->capture_default_str();
    c_dis->add_option("--seed-policy", dis.seed_policy, "spawn layout per run (fixed) or per evaluation (per-genome)")
        ->check(CLI::IsMember({"fixed", "per-genome"}))
        ->capture_default_str();
    add_calibration(c_dis, dis.calibration);
    c_dis->add_flag("--export", dis.export_embeddings, "also write embeddings.tsv");
    add_out(c_dis, dis.out);
    c_dis->callback([&] { action = [&] { return run_discover(dis); }; });

    ClusterOptions clu;
    auto* c_clu = app.add_subcommand("cluster", "k-medoids over an archive file");
    c_clu->add_option("--archive", clu.archive)->required()->check(CLI::ExistingFile);
    c_clu->add_option("--k", clu.k)->capture_default_str();
    c_clu->add_option("--seed", clu.seed)->capture_default_str();
    add_profile(c_clu, clu.profile);
    add_calibration(c_clu, clu.calibration);
    add_out(c_clu, clu.out);
    c_clu->callback([&] { action = [&] { return run_cluster(clu); }; });

    EvaluateOptions ev;
    auto* c_ev = app.add_subcommand("evaluate", "triplet confusion matrix of labelled behaviours");
    auto* o_lab = c_ev->add_option("--labeled", ev.labeled, "embedding table with label tags")
                      ->check(CLI::ExistingFile);
    auto* o_arc = c_ev->add_option("--archive", ev.archive, "archive file; entries labelled by the classifier")
                      ->check(CLI::ExistingFile);
    auto* o_syn = c_ev->add_option("--synthetic", ev.synthetic, "closed-form examples per class");
    o_lab->excludes(o_arc)->excludes(o_syn);
    o_arc->excludes(o_syn);
    add_profile(c_ev, ev.profile);
    add_calibration(c_ev, ev.calibration);
    c_ev->add_option("--seed", ev.seed)->capture_default_str();
    c_ev->add_option("--max-triplets", ev.max_triplets, "per-cell cap before subsampling")->capture_default_str();
    c_ev->add_flag("--export", ev.export_embeddings, "also write labeled.tsv");
    add_out(c_ev, ev.out);
    c_ev->callback([&] { action = [&] { return run_evaluate(ev); }; });

    AblateOptions ab;
    auto* c_ab = app.add_subcommand("ablate", "discover under rsrs and default profiles and compare");
    c_ab->add_option("--seed", ab.seed)->capture_default_str();
    c_ab->add_option("--pop", ab.pop)->capture_default_str();
    c_ab->add_option("--gens", ab.gens)->capture_default_str();
    c_ab->add_option("--k", ab.k)->capture_default_str();
    add_calibration(c_ab, ab.calibration);
    add_out(c_ab, ab.out);
    c_ab->callback([&] { action = [&] { return run_ablate(ab); }; });

    std::string manifest;
    std::string rerun_out;
    auto* c_re = app.add_subcommand("rerun", "repeat a run from its manifest");
    c_re->add_option("manifest", manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
    c_re->add_option("--out", rerun_out, "output directory (default: the recorded one)");
    c_re->callback([&] { action = [&] { return run_from_manifest(manifest, rerun_out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return action();
    } catch (const swarm::ConfigError& e) {
        return report("invalid configuration", e, kExitUsage);
    } catch (const swarm::ValidationError& e) {
        return report("invalid argument", e, kExitUsage);
    } catch (const swarm::IoError& e) {
        return report("I/O error", e, kExitIo);
    } catch (const swarm::FormatError& e) {
        return report("malformed input", e, kExitFormat);
    } catch (const swarm::EmbeddingError& e) {
        return report("encoder endpoint", e, kExitEmbedding);
    } catch (const swarm::DiscoveryError& e) {
        return report("discovery", e, kExitEmbedding);
    } catch (const MechanismError& e) {
        return report("ablation", e, kExitMechanism);
    } catch (const std::exception& e) {
        return report("error", e, kExitInternal);
    }
}
