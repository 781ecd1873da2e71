#include "swarm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "swarm/error.hpp"
#include "swarm/rng.hpp"
#include "swarm/text.hpp"

namespace swarm {

namespace {

// Distance matrices above this many points are not materialised.
constexpr std::size_t kMatrixLimit = 4096;

struct Cell {
    std::uint64_t success = 0;
    std::uint64_t total = 0;
    bool sampled = false;
};

}  // namespace

const char* to_string(BehaviorLabel label) noexcept {
    switch (label) {
        case BehaviorLabel::aggregation: return "aggregation";
        case BehaviorLabel::cyclic_pursuit: return "cyclic_pursuit";
        case BehaviorLabel::dispersal: return "dispersal";
        case BehaviorLabel::milling: return "milling";
        case BehaviorLabel::wall_following: return "wall_following";
        case BehaviorLabel::random: return "random";
    }
    return "?";
}

BehaviorLabel parse_label(const std::string& name) {
    for (const auto label : kAllLabels) {
        if (name == to_string(label)) return label;
    }
    throw ConfigError("unknown behaviour label '" + name + "'");
}

// ---------------------------------------------------------------- confusion

std::optional<double> ConfusionMatrix::at(BehaviorLabel anchor, BehaviorLabel negative) const {
    const auto a = std::find(labels.begin(), labels.end(), anchor);
    const auto n = std::find(labels.begin(), labels.end(), negative);
    if (a == labels.end() || n == labels.end()) return std::nullopt;
    return cells[static_cast<std::size_t>(a - labels.begin()) * size() + static_cast<std::size_t>(n - labels.begin())];
}

std::string ConfusionMatrix::table() const {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-16s", "anchor\\negative");
    out << buf;
    for (const auto l : labels) {
        std::snprintf(buf, sizeof buf, " %15s", to_string(l));
        out << buf;
    }
    out << '\n';
    for (std::size_t r = 0; r < size(); ++r) {
        std::snprintf(buf, sizeof buf, "%-16s", to_string(labels[r]));
        out << buf;
        for (std::size_t c = 0; c < size(); ++c) {
            const auto& v = cells[r * size() + c];
            if (v) {
                std::snprintf(buf, sizeof buf, " %15.4f", *v);
            } else {
                std::snprintf(buf, sizeof buf, " %15s", "-");
            }
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::string ConfusionMatrix::key_values() const {
    std::string out;
    for (std::size_t r = 0; r < size(); ++r) {
        for (std::size_t c = 0; c < size(); ++c) {
            const auto& v = cells[r * size() + c];
            out += "cell.";
            out += to_string(labels[r]);
            out += '.';
            out += to_string(labels[c]);
            out += '=';
            out += v ? text::format_double(*v) : std::string("missing");
            out += '\n';
        }
    }
    return out;
}

ConfusionMatrix triplet_confusion(std::span<const LabeledBehavior> labeled, const TripletOptions& options) {
    const std::size_t n = labeled.size();
    std::size_t dim = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) dim = labeled[0].behavior.dim();
        if (labeled[i].behavior.dim() != dim || labeled[i].behavior.backend != labeled[0].behavior.backend) {
            throw ValidationError("labelled behaviours disagree in backend or dimension (entry " + std::to_string(i) +
                                  ")");
        }
    }

    // Canonical order (label, then vector) so sampling does not depend on the
    // order of the input.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (labeled[a].label != labeled[b].label) return labeled[a].label < labeled[b].label;
        return labeled[a].behavior.values < labeled[b].behavior.values;
    });
    std::vector<double> values(n * dim);
    std::map<BehaviorLabel, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& src = labeled[order[i]];
        std::copy(src.behavior.values.begin(), src.behavior.values.end(),
                  values.begin() + static_cast<std::ptrdiff_t>(i * dim));
        members[src.label].push_back(i);
    }
    if (members.size() < 2) throw ValidationError("triplet confusion needs at least 2 labelled classes");

    ConfusionMatrix cm;
    for (const auto& [label, idx] : members) cm.labels.push_back(label);
    const std::size_t k = cm.labels.size();
    cm.cells.assign(k * k, std::nullopt);
    cm.triplets.assign(k * k, 0);
    cm.sampled.assign(k * k, false);

    const PointSet points{values, dim};
    std::vector<double> matrix;
    if (n <= kMatrixLimit) matrix = kernels::pairwise_distances(points, options.policy);
    auto dist = [&](std::size_t a, std::size_t b) {
        return matrix.empty() ? l2_distance(points.row(a), points.row(b)) : matrix[a * n + b];
    };

    for (std::size_t r = 0; r < k; ++r) {
        const auto& cls = members[cm.labels[r]];
        if (cls.size() < 2) continue;
        std::vector<std::size_t> anchor, positive;
        for (const std::size_t a : cls) {
            for (const std::size_t p : cls) {
                if (a != p) {
                    anchor.push_back(a);
                    positive.push_back(p);
                }
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<std::size_t> negatives;
            if (c == r) {
                for (std::size_t o = 0; o < k; ++o) {
                    if (o != r) negatives.insert(negatives.end(), members[cm.labels[o]].begin(), members[cm.labels[o]].end());
                }
            } else {
                negatives = members[cm.labels[c]];
            }
            const std::uint64_t all = static_cast<std::uint64_t>(anchor.size()) * negatives.size();
            Cell cell;
            if (all <= options.max_triplets && !matrix.empty()) {
                const auto t = kernels::count_triplets({matrix, n, anchor, positive, negatives}, options.policy);
                cell = {t.success, t.total, false};
            } else if (all <= options.max_triplets) {
                for (std::size_t p = 0; p < anchor.size(); ++p) {
                    const double dap = dist(anchor[p], positive[p]);
                    for (const std::size_t neg : negatives) cell.success += dap < dist(anchor[p], neg) ? 1 : 0;
                }
                cell.total = all;
            } else {
                Rng rng(mix_seed(options.seed, r * k + c));
                for (std::uint64_t s = 0; s < options.max_triplets; ++s) {
                    const std::size_t p = rng.below(anchor.size());
                    const std::size_t neg = negatives[rng.below(negatives.size())];
                    cell.success += dist(anchor[p], positive[p]) < dist(anchor[p], neg) ? 1 : 0;
                }
                cell.total = options.max_triplets;
                cell.sampled = true;
            }
            const std::size_t at = r * k + c;
            cm.triplets[at] = cell.total;
            cm.sampled[at] = cell.sampled;
            if (cell.total > 0) cm.cells[at] = static_cast<double>(cell.success) / static_cast<double>(cell.total);
        }
    }
    return cm;
}

// ---------------------------------------------------------------- calibration

namespace {

struct ThresholdField {
    const char* key;
    double ClassifierThresholds::*member;
};

constexpr ThresholdField kFields[] = {
    {"wall_clearance", &ClassifierThresholds::wall_clearance},
    {"wall_min_speed", &ClassifierThresholds::wall_min_speed},
    {"min_motion_speed", &ClassifierThresholds::min_motion_speed},
    {"rotation_min", &ClassifierThresholds::rotation_min},
    {"cyclic_max_radial_variance", &ClassifierThresholds::cyclic_max_radial_variance},
    {"cyclic_min_scatter", &ClassifierThresholds::cyclic_min_scatter},
    {"cyclic_max_scatter", &ClassifierThresholds::cyclic_max_scatter},
    {"aggregation_max_scatter", &ClassifierThresholds::aggregation_max_scatter},
    {"aggregation_shrink", &ClassifierThresholds::aggregation_shrink},
    {"dispersal_min_scatter", &ClassifierThresholds::dispersal_min_scatter},
    {"dispersal_growth", &ClassifierThresholds::dispersal_growth},
    {"dispersal_stability", &ClassifierThresholds::dispersal_stability},
    {"dispersal_max_speed", &ClassifierThresholds::dispersal_max_speed},
};

}  // namespace

ClassifierThresholds parse_calibration(std::string_view content, const std::string& source) {
    ClassifierThresholds t;
    bool have_version = false;
    for (const auto& kv : text::parse_key_values(content, source)) {
        const std::string where = source + ":" + std::to_string(kv.line);
        if (kv.key == "version") {
            long long v = 0;
            if (!text::parse_int(kv.value, v) || v != kCalibrationVersion) {
                throw ConfigError(where + ": unsupported calibration version '" + kv.value + "'");
            }
            have_version = true;
            continue;
        }
        const auto* field = std::find_if(std::begin(kFields), std::end(kFields),
                                         [&](const ThresholdField& f) { return kv.key == f.key; });
        if (field == std::end(kFields)) throw ConfigError(where + ": unknown calibration key '" + kv.key + "'");
        double v = 0.0;
        if (!text::parse_double(kv.value, v) || !std::isfinite(v) || v < 0.0) {
            throw ConfigError(where + ": " + kv.key + " must be a finite non-negative number");
        }
        t.*(field->member) = v;
    }
    if (!have_version) throw ConfigError(source + ": missing 'version' key");
    return t;
}

ClassifierThresholds load_calibration(const std::string& path) {
    return parse_calibration(text::read_file(path), path);
}

std::string format_calibration(const ClassifierThresholds& thresholds) {
    std::string out = "# swarmdisc classifier calibration\nversion=" + std::to_string(kCalibrationVersion) + "\n";
    for (const auto& f : kFields) {
        out += f.key;
        out += '=';
        out += text::format_double(thresholds.*(f.member));
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------- classifier

namespace {

double mean_scatter(const Trajectory& traj, const SimProfile& profile, std::size_t from, std::size_t to) {
    double sum = 0.0;
    for (std::size_t t = from; t <= to; ++t) {
        sum += swarm_moments(traj.positions_at(t), traj.velocities_at(t), profile).scatter;
    }
    return sum / static_cast<double>(to - from + 1);
}

}  // namespace

BehaviorFeatures behavior_features(const Trajectory& traj, const SimProfile& profile) {
    BehaviorFeatures f;
    f.metrics = handcrafted_embed(traj, profile);
    if (traj.n_agents == 0) return f;
    const std::size_t last = traj.steps();
    const std::size_t first = last / 2;

    double clearance = 0.0;
    for (std::size_t t = first; t <= last; ++t) {
        for (const Vec2 p : traj.positions_at(t)) {
            const double gap = std::min({p.x, profile.arena_width - p.x, p.y, profile.arena_height - p.y});
            clearance += gap - profile.body_radius;
        }
    }
    f.wall_clearance = clearance / static_cast<double>((last - first + 1) * traj.n_agents);

    f.scatter_initial = mean_scatter(traj, profile, 0, 0);
    const std::size_t late_from = last * 7 / 10;
    const std::size_t late_to = std::max(late_from, last * 8 / 10);
    f.scatter_late = mean_scatter(traj, profile, late_from, late_to);
    f.scatter_final = mean_scatter(traj, profile, last - last / 20, last);
    return f;
}

BehaviorLabel classify_features(const BehaviorFeatures& f, const ClassifierThresholds& t) {
    const auto& m = f.metrics;
    const double rotation = std::abs(m.group_rotation);
    if (f.wall_clearance < t.wall_clearance && m.avg_speed >= t.wall_min_speed) return BehaviorLabel::wall_following;
    if (rotation >= t.rotation_min && m.avg_speed >= t.min_motion_speed) {
        if (m.radial_variance <= t.cyclic_max_radial_variance && m.scatter >= t.cyclic_min_scatter &&
            m.scatter <= t.cyclic_max_scatter) {
            return BehaviorLabel::cyclic_pursuit;
        }
        return BehaviorLabel::milling;
    }
    if (f.scatter_final <= t.aggregation_max_scatter && f.scatter_final < t.aggregation_shrink * f.scatter_initial) {
        return BehaviorLabel::aggregation;
    }
    if (f.scatter_final >= t.dispersal_min_scatter && f.scatter_final >= t.dispersal_growth * f.scatter_initial &&
        std::abs(f.scatter_final - f.scatter_late) <= t.dispersal_stability && m.avg_speed <= t.dispersal_max_speed) {
        return BehaviorLabel::dispersal;
    }
    return BehaviorLabel::random;
}

BehaviorLabel classify_behavior(const Trajectory& traj, const SimProfile& profile,
                                const ClassifierThresholds& thresholds) {
    return classify_features(behavior_features(traj, profile), thresholds);
}

// ---------------------------------------------------------------- export

namespace {

constexpr std::string_view kTableVersion = "# swarmdisc embeddings v1";

void append_row(std::string& out, const std::string& tag, const ControllerGenome& g, std::span<const double> values) {
    out += tag;
    for (const double x : g.genes()) {
        out += '\t';
        out += text::format_double(x);
    }
    for (const double x : values) {
        out += '\t';
        out += text::format_double(x);
    }
    out += '\n';
}

std::string table_header(std::size_t dim) {
    std::string out = std::string(kTableVersion) + "\ntag";
    for (std::size_t g = 0; g < ControllerGenome::kGenes; ++g) {
        out += '\t';
        out += gene_name(g);
    }
    for (std::size_t i = 0; i < dim; ++i) out += "\tb" + std::to_string(i);
    out += '\n';
    return out;
}

}  // namespace

void export_embeddings(std::span<const LabeledBehavior> labeled, const std::string& path) {
    if (labeled.empty()) throw ValidationError("nothing to export to " + path);
    std::string out = table_header(labeled[0].behavior.dim());
    for (const auto& row : labeled) append_row(out, to_string(row.label), row.genome, row.behavior.values);
    text::write_file(path, out);
}

void export_embeddings(const NoveltyArchive& archive, const std::string& path) {
    if (archive.empty()) throw ValidationError("archive is empty, nothing to export to " + path);
    std::string out = table_header(archive.dim());
    for (std::size_t i = 0; i < archive.size(); ++i) {
        append_row(out, std::to_string(archive.entry(i).generation), archive.entry(i).genome, archive.vector(i));
    }
    text::write_file(path, out);
}

std::vector<EmbeddingRow> parse_embeddings(std::string_view content) {
    std::vector<EmbeddingRow> rows;
    std::size_t offset = 0;
    std::size_t columns = 0;
    bool seen_version = false;
    while (offset < content.size()) {
        const std::size_t end = std::min(content.find('\n', offset), content.size());
        const std::string_view line = content.substr(offset, end - offset);
        const std::size_t line_offset = offset;
        offset = end + 1;
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line == kTableVersion) seen_version = true;
            continue;
        }
        const auto fields = text::split(line, '\t');
        if (fields.front() == "tag") {
            columns = fields.size();
            continue;
        }
        if (!seen_version) throw BadVersionError(line_offset, "embedding table without version line");
        if (fields.size() < 1 + ControllerGenome::kGenes || (columns && fields.size() != columns)) {
            throw FormatError(line_offset, "embedding row has " + std::to_string(fields.size()) + " columns");
        }
        if (!rows.empty() && fields.size() != 1 + ControllerGenome::kGenes + rows.front().values.size()) {
            throw FormatError(line_offset, "embedding rows differ in width");
        }
        EmbeddingRow row;
        row.tag = std::string(fields[0]);
        std::array<double, ControllerGenome::kGenes> genes{};
        for (std::size_t i = 1; i < fields.size(); ++i) {
            double v = 0.0;
            if (!text::parse_double(fields[i], v)) {
                throw FormatError(line_offset, "bad number '" + std::string(fields[i]) + "'");
            }
            if (i <= ControllerGenome::kGenes) {
                genes[i - 1] = v;
            } else {
                row.values.push_back(v);
            }
        }
        row.genome = ControllerGenome::from_genes(genes);
        rows.push_back(std::move(row));
    }
    if (!seen_version) throw BadVersionError(0, "embedding table without version line");
    return rows;
}

std::vector<EmbeddingRow> read_embeddings(const std::string& path) {
    return parse_embeddings(text::read_file(path));
}

std::vector<LabeledBehavior> to_labeled(const std::vector<EmbeddingRow>& rows, Backend backend) {
    std::vector<LabeledBehavior> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back({parse_label(row.tag), row.genome, {backend, row.values}});
    return out;
}

}  // namespace swarm
