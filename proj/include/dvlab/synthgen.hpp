#pragma once

// Seeded generators for experiment inputs. Item i of every generator depends
// only on (seed, i), so prefixes are stable as counts grow.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dvlab/bm25.hpp"
#include "dvlab/embedding.hpp"
#include "dvlab/metrics.hpp"
#include "dvlab/numerics.hpp"
#include "dvlab/random.hpp"

namespace dvlab {

inline constexpr std::string_view kNoiseAlphabet = "abcdefghijklmnopqrstuvwxyz ";

/// Random strings over lowercase a-z and space, lengths uniform on
/// [min_len, max_len] inclusive.
struct NoiseSpec {
    std::size_t count = 1;
    std::uint64_t seed = 42;
    std::size_t min_len = 20;
    std::size_t max_len = 150;
};

/// Ids are "noise-<index>".
std::vector<Document> gen_noise_strings(const NoiseSpec& spec);
/// Item `index` of the stream described by spec (count is ignored).
Document gen_noise_string(const NoiseSpec& spec, std::size_t index);

struct ConeSpec {
    std::size_t k = 2;
    std::vector<double> mean_direction;
    double half_angle = 0.5;  ///< radians in (0, pi/2]
    std::size_t count = 1;
    std::uint64_t seed = 42;

    void validate() const;
};

/// Polar angle of a uniform point on the cap of half-angle alpha, at CDF level
/// u in [0,1]: solves cap_fraction(phi) = u * cap_fraction(alpha) in log space
/// by safeguarded Newton iteration.
double inverse_cap_angle(double u, double alpha, Dimension k);

/// One uniform unit vector on the cap of half-angle alpha around `mean`.
void draw_cone_vector(NormalSampler& normal, std::span<const double> mean, double alpha,
                      std::span<double> out);

/// Ids are "cone-<index>".
EmbeddingMatrix gen_cone_vectors(const ConeSpec& spec);

struct PlantedPairSpec {
    std::size_t k = 2;
    double target_cossim = 0.8;  ///< open interval (-1, 1)
    std::size_t num_queries = 1;
    std::uint64_t seed = 42;

    void validate() const;
};

struct PlantedPairs {
    EmbeddingMatrix queries;    ///< ids "q-<i>"
    EmbeddingMatrix relevants;  ///< ids "r-<i>"
};

/// relevant_i = c q_i + sqrt(1-c^2) u_i with u_i a random unit vector
/// orthogonal to q_i. Queries are uniform on the sphere, or uniform on the
/// cap of `within_cone` (its mean direction and half-angle) when given.
PlantedPairs gen_planted_pairs(const PlantedPairSpec& spec, const std::optional<ConeSpec>& within_cone = std::nullopt);

/// Writes a unit vector at exactly cosine c to unit vector q.
void plant_relevant(NormalSampler& normal, std::span<const double> q, double c, std::span<double> out);

/// Queries, their relevant passages and a distractor pool, all as text.
struct TextDataset {
    std::vector<Document> queries;
    std::vector<Document> relevant;
    std::vector<Document> pool;
    Qrels qrels;
};

/// Keyword-overlap corpus for lexical baselines. Each query draws
/// `query_terms` distinct Zipf-distributed vocabulary words; its relevant
/// passage contains `overlap` of them plus Zipf filler; pool passages are pure
/// Zipf filler, so larger pools produce more lexical collisions.
struct KeywordDatasetSpec {
    std::size_t num_queries = 100;
    std::size_t pool_size = 1000;
    std::size_t vocab_size = 5000;
    std::size_t query_terms = 4;
    std::size_t overlap = 2;
    std::size_t doc_length = 30;
    double zipf_exponent = 1.0;
    std::uint64_t seed = 42;

    void validate() const;
};

/// Ids: queries "q-<i>", relevant "rel-<i>", pool "doc-<j>".
TextDataset gen_keyword_dataset(const KeywordDatasetSpec& spec);

/// Vocabulary word i: "w" followed by letters, at least 4 characters.
std::string keyword_term(std::size_t i);

}  // namespace dvlab
