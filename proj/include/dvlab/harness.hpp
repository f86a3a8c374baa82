#pragma once

// Experiment orchestration.
//
// Growth: the index starts with every judged passage and grows by a seeded
// shuffle of the distractor pool consumed as a prefix, so each size is a
// superset of the previous one and all systems see identical documents.
//
// Noise: the index holds only the judged passages plus the first `count`
// random strings; reports how often a noise string outscores the relevant
// passage.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dvlab/bm25.hpp"
#include "dvlab/dense_index.hpp"
#include "dvlab/numerics.hpp"
#include "dvlab/parallel.hpp"
#include "dvlab/report.hpp"
#include "dvlab/synthgen.hpp"

namespace dvlab {

struct Bm25System {
    std::string name;
    Bm25Params params;
};

enum class DistractorKind {
    uniform,     ///< uniform on the whole sphere
    cone,        ///< uniform on a cap (global cone, or around each query in empirics)
};

std::string_view to_string(DistractorKind kind) noexcept;
DistractorKind parse_distractor_kind(std::string_view name);

/// Stand-in encoder: queries and distractors drawn from the distractor model,
/// every judged passage planted at exactly `cossim` to its first query. With
/// the cone model, queries and distractors share one cap of `half_angle`
/// around e_1.
struct SyntheticEncoder {
    std::size_t dim = 128;
    double cossim = 0.8;
    DistractorKind distractors = DistractorKind::uniform;
    double half_angle = 0.5;
};

/// Precomputed vectors keyed by document / query id.
struct EmbeddingFiles {
    std::filesystem::path docs;
    std::filesystem::path queries;
};

struct DenseSystem {
    std::string name;
    SimilarityKind similarity = SimilarityKind::cosine;
    std::variant<SyntheticEncoder, EmbeddingFiles> source;
    std::optional<std::size_t> project_to;  ///< seeded orthonormal down-projection
};

using SystemConfig = std::variant<Bm25System, DenseSystem>;

const std::string& system_name(const SystemConfig& system);
std::string describe(const SystemConfig& system);

struct GrowthExperimentSpec {
    std::vector<SystemConfig> systems;
    std::vector<std::uint64_t> sizes;
    TextDataset data;
    std::size_t cutoff = 10;
    std::uint64_t seed = 42;
};

struct NoiseExperimentSpec {
    std::vector<std::uint64_t> noise_counts;
    NoiseSpec noise;  ///< count is ignored; the largest noise count is used
    std::vector<SystemConfig> systems;
    TextDataset data;  ///< pool is ignored
    std::size_t cutoff = 10;
    std::uint64_t seed = 42;
};

struct RunOptions {
    unsigned threads = default_threads();
    /// Called after each (system, size) cell completes, before relative error
    /// rates are filled in.
    std::function<void(const ReportCell&)> on_cell;
    /// Cells from an interrupted run; matching cells are reused, not recomputed.
    std::vector<ReportCell> completed;
};

/// Throws DomainError for invalid specs (sizes not ascending, smallest size
/// below the number of judged passages, pool too small, qrels/query mismatch).
ExperimentReport run_growth(const GrowthExperimentSpec& spec, const RunOptions& options = {});

/// Insertion order of the growth index: judged passages, then the seeded
/// shuffle of the pool. The index at size s holds the first s documents.
std::vector<const Document*> growth_order(const GrowthExperimentSpec& spec);

/// Throws DomainError on id collisions between noise strings and passages.
ExperimentReport run_noise(const NoiseExperimentSpec& spec, const RunOptions& options = {});

struct TheoryRow {
    std::size_t k;
    double theta;
    std::uint64_t n;
    Probability p_single;
    Probability p_compound;
};

/// k-major grid of analytic false-positive probabilities.
std::vector<TheoryRow> theory_curve(std::span<const std::size_t> k_list, PolarAngle theta,
                                    std::span<const std::uint64_t> n_list);

/// Smallest evaluated size where the sparse metric strictly exceeds the dense
/// one after dense led at some smaller size. Throws DomainError when either
/// system lacks a value at some size or fewer than two sizes exist.
std::optional<std::uint64_t> find_tipping_point(const ExperimentReport& report, const std::string& dense_system,
                                                const std::string& sparse_system,
                                                const std::string& metric = metric_names::mrr(10));

struct DistractorModel {
    DistractorKind kind = DistractorKind::uniform;
    double half_angle = 0.0;  ///< cone: cap around each query direction
};

struct EmpiricsRow {
    std::uint64_t n;          ///< index size including the relevant passage
    std::size_t queries;
    std::size_t defeats;
    double measured;
    Probability analytic;     ///< uniform-sphere compound probability
    double sigma;             ///< binomial sd of the measured rate under the analytic value
    std::optional<double> ratio;
};

/// Measured false-positive rate of planted pairs against n-1 distractors per
/// query, next to the analytic value for uniform distractors. Uniform
/// distractors form one shared pool; cone distractors are drawn per query.
std::vector<EmpiricsRow> empirics_vs_theory(const PlantedPairSpec& planted, const DistractorModel& model,
                                            std::span<const std::uint64_t> n_list,
                                            unsigned threads = default_threads());

}  // namespace dvlab
