#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarm/behavior.hpp"
#include "swarm/kernels.hpp"
#include "swarm/novelty.hpp"
#include "swarm/sim.hpp"

namespace swarm {

enum class BehaviorLabel : std::uint8_t { aggregation, cyclic_pursuit, dispersal, milling, wall_following, random };
inline constexpr std::array<BehaviorLabel, 6> kAllLabels = {
    BehaviorLabel::aggregation, BehaviorLabel::cyclic_pursuit, BehaviorLabel::dispersal,
    BehaviorLabel::milling,     BehaviorLabel::wall_following, BehaviorLabel::random};

const char* to_string(BehaviorLabel label) noexcept;
// Throws ConfigError for names outside the closed set.
BehaviorLabel parse_label(const std::string& name);

struct LabeledBehavior {
    BehaviorLabel label = BehaviorLabel::random;
    ControllerGenome genome;
    BehaviorVector behavior;
};

// Row = anchor/positive class A, column = negative class N. Cell (A, N) for
// A != N is the fraction of triplets a, p in A (a != p), n in N with
// d(a, p) < d(a, n); the diagonal (A, A) draws n from every class other than
// A. Ties fail. Rows of classes with fewer than 2 examples are missing.
struct ConfusionMatrix {
    std::vector<BehaviorLabel> labels;            // present classes, enum order
    std::vector<std::optional<double>> cells;     // labels.size()^2, row-major
    std::vector<std::uint64_t> triplets;          // triplets evaluated per cell
    std::vector<bool> sampled;                    // cell subsampled rather than enumerated

    std::size_t size() const noexcept { return labels.size(); }
    std::optional<double> at(BehaviorLabel anchor, BehaviorLabel negative) const;
    // Fixed-width table, "-" for missing cells.
    std::string table() const;
    // One "cell.<anchor>.<negative>=<value|missing>" line per cell.
    std::string key_values() const;
};

struct TripletOptions {
    std::uint64_t max_triplets = 1'000'000;  // per cell; above this, sample this many
    std::uint64_t seed = 0;
    kernels::ExecPolicy policy = kernels::ExecPolicy::parallel;
};

// Throws ValidationError when fewer than 2 classes are present or vectors
// disagree in backend or dimension.
ConfusionMatrix triplet_confusion(std::span<const LabeledBehavior> labeled, const TripletOptions& options = {});

// Decision thresholds of the heuristic classifier. Distances in metres,
// scatter and radial variance in the normalised units of HandcraftedMetrics.
struct ClassifierThresholds {
    double wall_clearance = 0.05;        // mean gap between body and nearest wall
    double wall_min_speed = 0.5;
    double min_motion_speed = 0.1;       // rotating classes need this much motion
    double rotation_min = 0.6;           // |group_rotation|
    double cyclic_max_radial_variance = 0.004;
    double cyclic_min_scatter = 0.005;
    double cyclic_max_scatter = 0.3;
    double aggregation_max_scatter = 0.03;
    double aggregation_shrink = 0.7;     // final / initial scatter
    double dispersal_min_scatter = 0.2;
    double dispersal_growth = 1.5;       // final / initial scatter
    double dispersal_stability = 0.05;   // |final - late| scatter
    double dispersal_max_speed = 0.35;

    friend bool operator==(const ClassifierThresholds&, const ClassifierThresholds&) = default;
};

inline constexpr int kCalibrationVersion = 1;

// key=value text with a mandatory "version" key; unknown keys are errors,
// missing keys keep their defaults. Throws ConfigError.
ClassifierThresholds parse_calibration(std::string_view content, const std::string& source = "<calibration>");
ClassifierThresholds load_calibration(const std::string& path);
std::string format_calibration(const ClassifierThresholds& thresholds);

// Everything the classifier looks at.
struct BehaviorFeatures {
    HandcraftedMetrics metrics;
    double wall_clearance = 0.0;   // window mean over agents of distance to nearest wall minus radius
    double scatter_initial = 0.0;  // snapshot 0
    double scatter_late = 0.0;     // mean over 70..80% of the episode
    double scatter_final = 0.0;    // mean over the last 5%
};

// Throws ValidationError for trajectories with fewer than 2 snapshots.
BehaviorFeatures behavior_features(const Trajectory& traj, const SimProfile& profile);

// First matching rule wins: wall_following, cyclic_pursuit, milling,
// aggregation, dispersal, otherwise random.
BehaviorLabel classify_features(const BehaviorFeatures& f, const ClassifierThresholds& thresholds);
BehaviorLabel classify_behavior(const Trajectory& traj, const SimProfile& profile,
                                const ClassifierThresholds& thresholds = {});

// Closed-form trajectories with a known class, full episode length, agents
// taken from the profile. Parameters vary with the seed within class-typical
// ranges; rotating classes turn counter-clockwise.
Trajectory synthesize_behavior(BehaviorLabel label, const SimProfile& profile, std::uint64_t seed);

// Tab-separated embedding table: a version comment, a header line, then per
// row the tag (label name or generation), 4 genes and the vector, all
// rendered losslessly. Throws ValidationError on empty input (no file is
// created) and IoError on write failure.
void export_embeddings(std::span<const LabeledBehavior> labeled, const std::string& path);
void export_embeddings(const NoveltyArchive& archive, const std::string& path);

struct EmbeddingRow {
    std::string tag;
    ControllerGenome genome;
    std::vector<double> values;
};
// Throws FormatError (byte offset of the bad line) or IoError.
std::vector<EmbeddingRow> read_embeddings(const std::string& path);
std::vector<EmbeddingRow> parse_embeddings(std::string_view content);
// Rows whose tag is a label name; throws ConfigError otherwise.
std::vector<LabeledBehavior> to_labeled(const std::vector<EmbeddingRow>& rows, Backend backend = Backend::handcrafted);

}  // namespace swarm
