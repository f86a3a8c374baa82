#include "dvlab/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dvlab/errors.hpp"

namespace dvlab {

// ---------------------------------------------------------------------------
// Noise strings

Document gen_noise_string(const NoiseSpec& spec, std::size_t index) {
    SplitMix64 rng(spec.seed, streams::kNoise, index);
    const auto len = static_cast<std::size_t>(rng.uniform_int(spec.min_len, spec.max_len));
    std::string text(len, ' ');
    for (auto& c : text) c = kNoiseAlphabet[rng.uniform_int(0, kNoiseAlphabet.size() - 1)];
    return {"noise-" + std::to_string(index), std::move(text)};
}

std::vector<Document> gen_noise_strings(const NoiseSpec& spec) {
    if (spec.count == 0) throw DomainError("noise count must be positive");
    if (spec.min_len > spec.max_len) throw DomainError("noise min_len exceeds max_len");
    std::vector<Document> docs;
    docs.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) docs.push_back(gen_noise_string(spec, i));
    return docs;
}

// ---------------------------------------------------------------------------
// Cones

void ConeSpec::validate() const {
    static_cast<void>(Dimension{k});
    if (mean_direction.size() != k) throw DomainError("cone mean direction has wrong dimension");
    if (std::fabs(norm(mean_direction) - 1.0) > 1e-12) throw DomainError("cone mean direction must be a unit vector");
    if (!(half_angle > 0.0 && half_angle <= std::numbers::pi / 2)) {
        throw DomainError("cone half-angle must lie in (0, pi/2]");
    }
}

double inverse_cap_angle(double u, double alpha, Dimension k) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("CDF level must lie in [0,1]");
    if (u == 0.0) return 0.0;
    if (u == 1.0) return alpha;
    if (k.value() == 2) return u * alpha;
    const double target = std::log(u) + cap_fraction(PolarAngle(alpha), k).log();
    const double km1 = static_cast<double>(k.value() - 1);
    double lo = 0.0;
    double hi = alpha;
    // Small-angle start: F(phi) ~ phi^(k-1).
    double phi = alpha * std::pow(u, 1.0 / km1);
    for (int iter = 0; iter < 200; ++iter) {
        const double log_f = cap_fraction(PolarAngle(phi), k).log();
        const double g = log_f - target;
        if (g == 0.0) return phi;
        if (g < 0.0) {
            lo = phi;
        } else {
            hi = phi;
        }
        // d log F / d phi = density / F
        const double slope = std::exp(log_cap_density(phi, k) - log_f);
        double next = phi - g / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::fabs(next - phi) <= 1e-15 * std::max(1.0, phi) || hi - lo <= 1e-15) return next;
        phi = next;
    }
    return phi;
}

void draw_cone_vector(NormalSampler& normal, std::span<const double> mean, double alpha, std::span<double> out) {
    const Dimension k(mean.size());
    const double phi = inverse_cap_angle(normal.engine().uniform01(), alpha, k);
    // Uniform direction on the subsphere orthogonal to mean.
    double n2 = 0.0;
    do {
        for (double& v : out) v = normal();
        const double along = dot(out, mean);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= along * mean[i];
        n2 = dot(out, out);
    } while (n2 < 1e-20);
    const double inv = 1.0 / std::sqrt(n2);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * mean[i] + s * out[i] * inv;
    const double n = norm(out);
    for (double& v : out) v /= n;
}

EmbeddingMatrix gen_cone_vectors(const ConeSpec& spec) {
    spec.validate();
    if (spec.count == 0) throw DomainError("cone count must be positive");
    const Dimension k(spec.k);
    std::vector<double> values(spec.count * spec.k);
    std::vector<std::string> ids(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        NormalSampler normal(SplitMix64(spec.seed, streams::kCone, i));
        draw_cone_vector(normal, spec.mean_direction, spec.half_angle, {values.data() + i * spec.k, spec.k});
        ids[i] = "cone-" + std::to_string(i);
    }
    return EmbeddingMatrix(k, std::move(ids), std::move(values));
}

// ---------------------------------------------------------------------------
// Planted pairs

void PlantedPairSpec::validate() const {
    static_cast<void>(Dimension{k});
    if (!(target_cossim > -1.0 && target_cossim < 1.0)) {
        throw DomainError("planted cosine must lie in the open interval (-1, 1)");
    }
    if (num_queries == 0) throw DomainError("planted pairs need at least one query");
}

void plant_relevant(NormalSampler& normal, std::span<const double> q, double c, std::span<double> out) {
    double n2 = 0.0;
    do {
        for (double& v : out) v = normal();
        // Two Gram-Schmidt passes for orthogonality to rounding level.
        for (int pass = 0; pass < 2; ++pass) {
            const double along = dot(out, q);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] -= along * q[i];
        }
        n2 = dot(out, out);
    } while (n2 < 1e-20);
    const double inv = 1.0 / std::sqrt(n2);
    const double s = std::sqrt((1.0 - c) * (1.0 + c));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * q[i] + s * out[i] * inv;
}

PlantedPairs gen_planted_pairs(const PlantedPairSpec& spec, const std::optional<ConeSpec>& within_cone) {
    spec.validate();
    if (within_cone) {
        within_cone->validate();
        if (within_cone->k != spec.k) throw DomainError("cone and planted pairs disagree on dimension");
    }
    const Dimension k(spec.k);
    PlantedPairs out{EmbeddingMatrix(k), EmbeddingMatrix(k)};
    out.queries.reserve(spec.num_queries);
    out.relevants.reserve(spec.num_queries);
    std::vector<double> q(spec.k), r(spec.k);
    for (std::size_t i = 0; i < spec.num_queries; ++i) {
        NormalSampler qn(SplitMix64(spec.seed, streams::kPlantedQuery, i));
        if (within_cone) {
            draw_cone_vector(qn, within_cone->mean_direction, within_cone->half_angle, q);
        } else {
            draw_unit_vector(qn, q);
        }
        NormalSampler rn(SplitMix64(spec.seed, streams::kPlantedRelevant, i));
        plant_relevant(rn, q, spec.target_cossim, r);
        out.queries.append("q-" + std::to_string(i), q);
        out.relevants.append("r-" + std::to_string(i), r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Keyword corpora

void KeywordDatasetSpec::validate() const {
    if (num_queries == 0) throw DomainError("keyword dataset needs at least one query");
    if (vocab_size < query_terms || query_terms == 0) throw DomainError("vocabulary smaller than query length");
    if (overlap > query_terms) throw DomainError("overlap exceeds query length");
    if (doc_length < overlap) throw DomainError("doc_length shorter than overlap");
    if (!(zipf_exponent >= 0.0)) throw DomainError("zipf exponent must be >= 0");
}

std::string keyword_term(std::size_t i) {
    std::string letters;
    do {
        letters.push_back(static_cast<char>('a' + i % 26));
        i /= 26;
    } while (i > 0);
    while (letters.size() < 3) letters.push_back('a');
    std::reverse(letters.begin(), letters.end());
    return "w" + letters;
}

namespace {

class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double s) : cdf_(n) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += std::pow(static_cast<double>(i + 1), -s);
            cdf_[i] = total;
        }
        for (double& c : cdf_) c /= total;
    }

    std::size_t operator()(SplitMix64& rng) const {
        const double u = rng.uniform01();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }

private:
    std::vector<double> cdf_;
};

constexpr std::uint64_t kRoleQuery = 0;
constexpr std::uint64_t kRoleRelevant = 1;
constexpr std::uint64_t kRolePool = 2;

std::uint64_t keyword_stream(std::uint64_t role) { return streams::kKeywords * 16 + role; }

std::string join_terms(const std::vector<std::size_t>& terms) {
    std::string text;
    for (std::size_t t : terms) {
        if (!text.empty()) text.push_back(' ');
        text += keyword_term(t);
    }
    return text;
}

}  // namespace

TextDataset gen_keyword_dataset(const KeywordDatasetSpec& spec) {
    spec.validate();
    const ZipfSampler zipf(spec.vocab_size, spec.zipf_exponent);
    TextDataset data;
    data.queries.reserve(spec.num_queries);
    data.relevant.reserve(spec.num_queries);
    std::vector<std::size_t> terms;
    for (std::size_t i = 0; i < spec.num_queries; ++i) {
        SplitMix64 qrng(spec.seed, keyword_stream(kRoleQuery), i);
        std::vector<std::size_t> query;
        while (query.size() < spec.query_terms) {
            const auto t = zipf(qrng);
            if (std::find(query.begin(), query.end(), t) == query.end()) query.push_back(t);
        }
        SplitMix64 rrng(spec.seed, keyword_stream(kRoleRelevant), i);
        terms.assign(query.begin(), query.begin() + static_cast<std::ptrdiff_t>(spec.overlap));
        while (terms.size() < spec.doc_length) terms.push_back(zipf(rrng));
        const auto qid = "q-" + std::to_string(i);
        const auto rid = "rel-" + std::to_string(i);
        data.queries.push_back({qid, join_terms(query)});
        data.relevant.push_back({rid, join_terms(terms)});
        data.qrels.add(qid, rid);
    }
    data.pool.reserve(spec.pool_size);
    for (std::size_t j = 0; j < spec.pool_size; ++j) {
        SplitMix64 prng(spec.seed, keyword_stream(kRolePool), j);
        terms.clear();
        while (terms.size() < spec.doc_length) terms.push_back(zipf(prng));
        data.pool.push_back({"doc-" + std::to_string(j), join_terms(terms)});
    }
    return data;
}

}  // namespace dvlab
