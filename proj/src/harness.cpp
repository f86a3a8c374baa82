#include "dvlab/harness.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "dvlab/embedding_io.hpp"
#include "dvlab/errors.hpp"
#include "dvlab/metrics.hpp"
#include "dvlab/random.hpp"

namespace dvlab {

std::string_view to_string(DistractorKind kind) noexcept {
    return kind == DistractorKind::cone ? "cone" : "uniform";
}

DistractorKind parse_distractor_kind(std::string_view name) {
    if (name == "uniform") return DistractorKind::uniform;
    if (name == "cone") return DistractorKind::cone;
    throw DomainError("unknown distractor model '" + std::string(name) + "'");
}

const std::string& system_name(const SystemConfig& system) {
    return std::visit([](const auto& s) -> const std::string& { return s.name; }, system);
}

std::string describe(const SystemConfig& system) {
    if (const auto* bm = std::get_if<Bm25System>(&system)) {
        return "bm25 k1=" + format_double(bm->params.k1) + " b=" + format_double(bm->params.b);
    }
    const auto& dense = std::get<DenseSystem>(system);
    std::string out;
    if (const auto* syn = std::get_if<SyntheticEncoder>(&dense.source)) {
        out = "dense dim=" + std::to_string(syn->dim) + " cossim=" + format_double(syn->cossim) +
              " distractors=" + std::string(to_string(syn->distractors));
        if (syn->distractors == DistractorKind::cone) out += " half_angle=" + format_double(syn->half_angle);
    } else {
        const auto& files = std::get<EmbeddingFiles>(dense.source);
        out = "dense-file docs=" + files.docs.string() + " queries=" + files.queries.string();
    }
    out += " similarity=" + std::string(to_string(dense.similarity));
    if (dense.project_to) out += " project=" + std::to_string(*dense.project_to);
    return out;
}

namespace {

std::string join_sizes(const std::vector<std::uint64_t>& sizes) {
    std::string out;
    for (auto s : sizes) {
        if (!out.empty()) out.push_back(',');
        out += std::to_string(s);
    }
    return out;
}

void validate_systems(const std::vector<SystemConfig>& systems) {
    if (systems.empty()) throw DomainError("experiment needs at least one system");
    std::set<std::string> names;
    for (const auto& s : systems) {
        const auto& name = system_name(s);
        if (name.empty() || name.find(',') != std::string::npos) {
            throw DomainError("system names must be non-empty and contain no commas");
        }
        if (!names.insert(name).second) throw DomainError("duplicate system name '" + name + "'");
        if (const auto* bm = std::get_if<Bm25System>(&s)) bm->params.validate();
        if (const auto* dense = std::get_if<DenseSystem>(&s)) {
            if (const auto* syn = std::get_if<SyntheticEncoder>(&dense->source)) {
                static_cast<void>(Dimension{syn->dim});
                if (!(syn->cossim > -1.0 && syn->cossim < 1.0)) {
                    throw DomainError("system '" + name + "': cossim must lie in (-1, 1)");
                }
                if (syn->distractors == DistractorKind::cone &&
                    !(syn->half_angle > 0.0 && syn->half_angle <= std::numbers::pi / 2)) {
                    throw DomainError("system '" + name + "': half_angle must lie in (0, pi/2]");
                }
            }
        }
    }
}

void validate_strictly_ascending(const std::vector<std::uint64_t>& values, const char* what) {
    if (values.empty()) throw DomainError(std::string(what) + " must not be empty");
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] <= values[i - 1]) throw DomainError(std::string(what) + " must be strictly ascending");
    }
}

// Judged queries in dataset order, with checks that qrels reference only known
// queries and known relevant passages.
std::vector<std::size_t> judged_queries(const TextDataset& data) {
    if (data.qrels.empty()) throw DomainError("qrels are empty");
    std::unordered_map<std::string, std::size_t> query_index;
    for (std::size_t i = 0; i < data.queries.size(); ++i) {
        if (!query_index.emplace(data.queries[i].id, i).second) {
            throw DomainError("duplicate query id '" + data.queries[i].id + "'");
        }
    }
    std::unordered_set<std::string> relevant_ids;
    for (const auto& d : data.relevant) relevant_ids.insert(d.id);
    for (const auto& [q, docs] : data.qrels.judgments()) {
        if (!query_index.count(q)) throw DomainError("qrels reference unknown query '" + q + "'");
        for (const auto& d : docs) {
            if (!relevant_ids.count(d)) throw DomainError("qrels reference unknown passage '" + d + "'");
        }
    }
    std::vector<std::size_t> judged;
    for (std::size_t i = 0; i < data.queries.size(); ++i) {
        if (data.qrels.contains(data.queries[i].id)) judged.push_back(i);
    }
    return judged;
}

// Index contents in insertion order: all judged passages, then distractors.
struct Layout {
    std::vector<const Document*> docs;
    std::vector<std::uint64_t> keys;  // relevant: index in data.relevant; distractor: stable key
    std::size_t relevant_count = 0;
};

struct Encoded {
    EmbeddingMatrix docs;
    std::vector<QueryVector> queries;  // aligned with the judged list
};

Encoded encode_synthetic(const DenseSystem& system, const SyntheticEncoder& enc, const TextDataset& data,
                         const Layout& layout, const std::vector<std::size_t>& judged, std::uint64_t seed) {
    const Dimension k(enc.dim);
    const std::uint64_t sys_seed = derive_seed(seed, fnv1a64(system.name), 0);
    std::vector<double> axis(enc.dim, 0.0);
    axis[0] = 1.0;
    const bool cone = enc.distractors == DistractorKind::cone;

    auto draw_background = [&](NormalSampler& normal, std::span<double> out) {
        if (cone) {
            draw_cone_vector(normal, axis, enc.half_angle, out);
        } else {
            draw_unit_vector(normal, out);
        }
    };

    std::vector<std::vector<double>> query_vectors(data.queries.size());
    for (std::size_t i = 0; i < data.queries.size(); ++i) {
        query_vectors[i].resize(enc.dim);
        NormalSampler normal(SplitMix64(sys_seed, streams::kPlantedQuery, i));
        draw_background(normal, query_vectors[i]);
    }
    // Each judged passage is planted next to the first query judging it.
    std::unordered_map<std::string, std::size_t> owner;
    for (std::size_t i = 0; i < data.queries.size(); ++i) {
        if (!data.qrels.contains(data.queries[i].id)) continue;
        for (const auto& d : data.qrels.relevant(data.queries[i].id)) owner.emplace(d, i);
    }

    Encoded out{EmbeddingMatrix(k), {}};
    out.docs.reserve(layout.docs.size());
    std::vector<double> row(enc.dim);
    for (std::size_t r = 0; r < layout.docs.size(); ++r) {
        const auto& doc = *layout.docs[r];
        if (r < layout.relevant_count) {
            NormalSampler normal(SplitMix64(sys_seed, streams::kPlantedRelevant, layout.keys[r]));
            plant_relevant(normal, query_vectors[owner.at(doc.id)], enc.cossim, row);
        } else {
            NormalSampler normal(SplitMix64(sys_seed, streams::kDistractor, layout.keys[r]));
            draw_background(normal, row);
        }
        out.docs.append(doc.id, row);
    }
    for (std::size_t qi : judged) out.queries.push_back({data.queries[qi].id, query_vectors[qi]});
    return out;
}

Encoded encode_files(const EmbeddingFiles& files, const TextDataset& data, const Layout& layout,
                     const std::vector<std::size_t>& judged) {
    const auto doc_vectors = read_embeddings(files.docs);
    const auto query_vectors = read_embeddings(files.queries);
    if (doc_vectors.dim() != query_vectors.dim()) {
        throw DomainError("document and query embeddings differ in dimension");
    }
    Encoded out{EmbeddingMatrix(doc_vectors.dimension()), {}};
    out.docs.reserve(layout.docs.size());
    for (const auto* doc : layout.docs) {
        const auto row = doc_vectors.find(doc->id);
        if (!row) throw DomainError("no embedding for document '" + doc->id + "' in " + files.docs.string());
        out.docs.append(doc->id, doc_vectors.row(*row));
    }
    for (std::size_t qi : judged) {
        const auto& id = data.queries[qi].id;
        const auto row = query_vectors.find(id);
        if (!row) throw DomainError("no embedding for query '" + id + "' in " + files.queries.string());
        const auto v = query_vectors.row(*row);
        out.queries.push_back({id, std::vector<double>(v.begin(), v.end())});
    }
    return out;
}

Encoded encode(const DenseSystem& system, const TextDataset& data, const Layout& layout,
               const std::vector<std::size_t>& judged, std::uint64_t seed) {
    Encoded enc = std::holds_alternative<SyntheticEncoder>(system.source)
                      ? encode_synthetic(system, std::get<SyntheticEncoder>(system.source), data, layout, judged, seed)
                      : encode_files(std::get<EmbeddingFiles>(system.source), data, layout, judged);
    if (system.project_to) {
        const Dimension target(*system.project_to);
        const std::uint64_t proj_seed = derive_seed(seed, fnv1a64(system.name), 1);
        const bool renorm = system.similarity == SimilarityKind::cosine;
        EmbeddingMatrix queries(enc.docs.dimension());
        for (const auto& q : enc.queries) queries.append(q.id, q.values);
        enc.docs = project(enc.docs, target, proj_seed, renorm);
        const auto projected = project(queries, target, proj_seed, renorm);
        for (std::size_t i = 0; i < enc.queries.size(); ++i) {
            const auto v = projected.row(i);
            enc.queries[i].values.assign(v.begin(), v.end());
        }
    }
    return enc;
}

std::vector<Document> prefix_docs(const Layout& layout, std::size_t count) {
    std::vector<Document> docs;
    docs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) docs.push_back(*layout.docs[i]);
    return docs;
}

Qrels judged_qrels(const TextDataset& data, const std::vector<std::size_t>& judged) {
    Qrels q;
    for (std::size_t qi : judged) {
        for (const auto& d : data.qrels.relevant(data.queries[qi].id)) q.add(data.queries[qi].id, d);
    }
    return q;
}

ResultSet collect(std::size_t n, unsigned threads, const std::function<RankedResult(std::size_t)>& run) {
    std::vector<RankedResult> slots(n);
    parallel_for(n, threads, [&](std::size_t i) { slots[i] = run(i); });
    ResultSet results;
    for (auto& r : slots) {
        auto id = r.query_id;
        results.emplace(std::move(id), std::move(r));
    }
    return results;
}

ReportCell rank_cell(const std::string& system, std::uint64_t size, const ResultSet& results, const Qrels& qrels,
                     std::size_t cutoff) {
    const auto ranks = ranks_from_results(results, qrels, cutoff);
    ReportCell cell{system, size, {}};
    cell.metrics[metric_names::mrr(cutoff)] = MetricValue::of(mrr(ranks));
    cell.metrics[metric_names::kErr] = MetricValue::of(error_rate(ranks));
    return cell;
}

const ReportCell* cached(const RunOptions& options, const std::string& system, std::uint64_t size) {
    for (const auto& c : options.completed) {
        if (c.system == system && c.size == size) return &c;
    }
    return nullptr;
}

void fill_relative_errors(ExperimentReport& report, const std::vector<SystemConfig>& systems) {
    const Bm25System* baseline = nullptr;
    for (const auto& s : systems) {
        if ((baseline = std::get_if<Bm25System>(&s))) break;
    }
    for (const auto& s : systems) {
        if (!std::holds_alternative<DenseSystem>(s)) continue;
        for (auto size : report.sizes) {
            auto* cell = report.find(system_name(s), size);
            if (!cell) continue;
            if (!baseline) {
                cell->metrics[metric_names::kRelativeErr] = MetricValue::skipped("no sparse baseline");
                continue;
            }
            const auto dense_err = report.metric(system_name(s), size, metric_names::kErr);
            const auto sparse_err = report.metric(baseline->name, size, metric_names::kErr);
            if (!dense_err || !sparse_err) {
                cell->metrics[metric_names::kRelativeErr] = MetricValue::skipped("missing error rate");
            } else if (*sparse_err == 0.0) {
                cell->metrics[metric_names::kRelativeErr] = MetricValue::skipped("sparse error rate is zero");
            } else {
                cell->metrics[metric_names::kRelativeErr] = MetricValue::of(relative_error_rate(*dense_err, *sparse_err));
            }
        }
    }
}

void base_metadata(ExperimentReport& report, const std::vector<SystemConfig>& systems, std::uint64_t seed,
                   std::size_t cutoff) {
    report.set_metadata("version", kToolVersion);
    report.set_metadata("seed", std::to_string(seed));
    report.set_metadata("cutoff", std::to_string(cutoff));
    report.set_metadata("sizes", join_sizes(report.sizes));
    for (const auto& s : systems) {
        report.systems.push_back(system_name(s));
        report.set_metadata("system." + system_name(s), describe(s));
    }
}

// Places a freshly computed (or cached) cell and notifies the caller.
void emit(ExperimentReport& report, ReportCell cell, const RunOptions& options, bool from_cache) {
    if (!from_cache && options.on_cell) options.on_cell(cell);
    report.cells.push_back(std::move(cell));
}

// Seeded Fisher-Yates over the pool, consumed as a prefix.
std::vector<std::size_t> pool_order(const GrowthExperimentSpec& spec) {
    std::vector<std::size_t> order(spec.data.pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 rng(spec.seed, streams::kShuffle, 0);
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, i - 1));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentReport run_growth(const GrowthExperimentSpec& spec, const RunOptions& options) {
    validate_systems(spec.systems);
    validate_strictly_ascending(spec.sizes, "index sizes");
    if (spec.cutoff == 0) throw DomainError("cutoff must be positive");
    const auto judged = judged_queries(spec.data);
    const std::size_t relevant = spec.data.relevant.size();
    if (spec.sizes.front() < relevant) {
        throw DomainError("smallest index size " + std::to_string(spec.sizes.front()) + " is below the " +
                          std::to_string(relevant) + " judged passages");
    }
    if (spec.sizes.back() - relevant > spec.data.pool.size()) {
        throw DomainError("distractor pool of " + std::to_string(spec.data.pool.size()) +
                          " passages is too small for index size " + std::to_string(spec.sizes.back()));
    }
    {
        std::unordered_set<std::string> ids;
        for (const auto& d : spec.data.relevant) ids.insert(d.id);
        for (const auto& d : spec.data.pool) {
            if (!ids.insert(d.id).second) throw DomainError("duplicate passage id '" + d.id + "'");
        }
    }

    Layout layout;
    layout.relevant_count = relevant;
    layout.docs.reserve(static_cast<std::size_t>(spec.sizes.back()));
    for (std::size_t i = 0; i < relevant; ++i) {
        layout.docs.push_back(&spec.data.relevant[i]);
        layout.keys.push_back(i);
    }
    const auto order = pool_order(spec);
    for (std::size_t j = 0; layout.docs.size() < spec.sizes.back(); ++j) {
        layout.docs.push_back(&spec.data.pool[order[j]]);
        layout.keys.push_back(order[j]);
    }

    const Qrels qrels = judged_qrels(spec.data, judged);
    ExperimentReport report;
    report.experiment = "growth";
    report.sizes = spec.sizes;
    base_metadata(report, spec.systems, spec.seed, spec.cutoff);
    report.set_metadata("queries", std::to_string(judged.size()));
    report.set_metadata("relevant", std::to_string(relevant));
    report.set_metadata("pool", std::to_string(spec.data.pool.size()));

    for (const auto& system : spec.systems) {
        const auto& name = system_name(system);
        const bool all_cached = std::all_of(spec.sizes.begin(), spec.sizes.end(),
                                            [&](auto s) { return cached(options, name, s) != nullptr; });
        if (all_cached) {
            for (auto s : spec.sizes) emit(report, *cached(options, name, s), options, true);
            continue;
        }
        if (const auto* bm = std::get_if<Bm25System>(&system)) {
            for (auto size : spec.sizes) {
                if (const auto* c = cached(options, name, size)) {
                    emit(report, *c, options, true);
                    continue;
                }
                const auto docs = prefix_docs(layout, static_cast<std::size_t>(size));
                const auto index = Bm25Index::build(docs, bm->params);
                const auto results = collect(judged.size(), options.threads, [&](std::size_t i) {
                    const auto& q = spec.data.queries[judged[i]];
                    return index.search(q.id, q.text, spec.cutoff);
                });
                emit(report, rank_cell(name, size, results, qrels, spec.cutoff), options, false);
            }
        } else {
            const auto& dense = std::get<DenseSystem>(system);
            auto encoded = encode(dense, spec.data, layout, judged, spec.seed);
            const auto index = DenseIndex::build(std::move(encoded.docs), dense.similarity);
            for (auto size : spec.sizes) {
                if (const auto* c = cached(options, name, size)) {
                    emit(report, *c, options, true);
                    continue;
                }
                const auto results = collect(judged.size(), options.threads, [&](std::size_t i) {
                    return index.search(encoded.queries[i], spec.cutoff, static_cast<std::size_t>(size));
                });
                emit(report, rank_cell(name, size, results, qrels, spec.cutoff), options, false);
            }
        }
    }
    fill_relative_errors(report, spec.systems);
    return report;
}

std::vector<const Document*> growth_order(const GrowthExperimentSpec& spec) {
    std::vector<const Document*> docs;
    for (const auto& d : spec.data.relevant) docs.push_back(&d);
    for (auto i : pool_order(spec)) docs.push_back(&spec.data.pool[i]);
    return docs;
}

// ---------------------------------------------------------------------------

ExperimentReport run_noise(const NoiseExperimentSpec& spec, const RunOptions& options) {
    validate_systems(spec.systems);
    if (spec.noise_counts.empty()) throw DomainError("noise counts must not be empty");
    for (std::size_t i = 1; i < spec.noise_counts.size(); ++i) {
        if (spec.noise_counts[i] <= spec.noise_counts[i - 1]) throw DomainError("noise counts must be strictly ascending");
    }
    if (spec.cutoff == 0) throw DomainError("cutoff must be positive");
    if (spec.noise.min_len > spec.noise.max_len) throw DomainError("noise min_len exceeds max_len");
    const auto judged = judged_queries(spec.data);
    const std::size_t max_noise = static_cast<std::size_t>(spec.noise_counts.back());

    std::vector<Document> noise;
    noise.reserve(max_noise);
    for (std::size_t i = 0; i < max_noise; ++i) noise.push_back(gen_noise_string(spec.noise, i));
    std::unordered_set<std::string> noise_ids;
    for (const auto& d : noise) noise_ids.insert(d.id);
    {
        std::unordered_set<std::string> ids;
        for (const auto& d : spec.data.relevant) {
            if (noise_ids.count(d.id)) throw DomainError("passage id '" + d.id + "' collides with a noise id");
            if (!ids.insert(d.id).second) throw DomainError("duplicate passage id '" + d.id + "'");
        }
    }

    Layout layout;
    layout.relevant_count = spec.data.relevant.size();
    for (std::size_t i = 0; i < spec.data.relevant.size(); ++i) {
        layout.docs.push_back(&spec.data.relevant[i]);
        layout.keys.push_back(i);
    }
    for (std::size_t i = 0; i < noise.size(); ++i) {
        layout.docs.push_back(&noise[i]);
        layout.keys.push_back(i);
    }

    const Qrels qrels = judged_qrels(spec.data, judged);
    ExperimentReport report;
    report.experiment = "noise";
    report.sizes = spec.noise_counts;
    base_metadata(report, spec.systems, spec.seed, spec.cutoff);
    report.set_metadata("queries", std::to_string(judged.size()));
    report.set_metadata("relevant", std::to_string(layout.relevant_count));
    report.set_metadata("noise_seed", std::to_string(spec.noise.seed));
    report.set_metadata("noise_len", std::to_string(spec.noise.min_len) + ".." + std::to_string(spec.noise.max_len));

    auto noise_cell = [&](const std::string& name, std::uint64_t count, const ResultSet& results) {
        ReportCell cell = rank_cell(name, count, results, qrels, spec.cutoff);
        cell.metrics[metric_names::kNoiseDefeat] = MetricValue::of(noise_defeat_rate(results, qrels, noise_ids));
        return cell;
    };

    for (const auto& system : spec.systems) {
        const auto& name = system_name(system);
        const bool all_cached = std::all_of(spec.noise_counts.begin(), spec.noise_counts.end(),
                                            [&](auto s) { return cached(options, name, s) != nullptr; });
        if (all_cached) {
            for (auto s : spec.noise_counts) emit(report, *cached(options, name, s), options, true);
            continue;
        }
        if (const auto* bm = std::get_if<Bm25System>(&system)) {
            for (auto count : spec.noise_counts) {
                if (const auto* c = cached(options, name, count)) {
                    emit(report, *c, options, true);
                    continue;
                }
                const auto docs = prefix_docs(layout, layout.relevant_count + static_cast<std::size_t>(count));
                const auto index = Bm25Index::build(docs, bm->params);
                const auto results = collect(judged.size(), options.threads, [&](std::size_t i) {
                    const auto& q = spec.data.queries[judged[i]];
                    // Widen the window down to the best relevant passage so every
                    // noise string above it is visible.
                    Rank best = Rank::beyond();
                    for (const auto& d : qrels.relevant(q.id)) best = std::min(best, index.rank_of(q.text, d));
                    const std::size_t top = best.finite() ? std::max(spec.cutoff, best.position()) : spec.cutoff;
                    return index.search(q.id, q.text, top);
                });
                emit(report, noise_cell(name, count, results), options, false);
            }
        } else {
            const auto& dense = std::get<DenseSystem>(system);
            auto encoded = encode(dense, spec.data, layout, judged, spec.seed);
            const auto index = DenseIndex::build(std::move(encoded.docs), dense.similarity);
            for (auto count : spec.noise_counts) {
                if (const auto* c = cached(options, name, count)) {
                    emit(report, *c, options, true);
                    continue;
                }
                const std::size_t rows = layout.relevant_count + static_cast<std::size_t>(count);
                const auto results = collect(judged.size(), options.threads, [&](std::size_t i) {
                    const auto& q = encoded.queries[i];
                    Rank best = Rank::beyond();
                    for (const auto& d : qrels.relevant(q.id)) best = std::min(best, index.rank_of(q, d, std::nullopt, rows));
                    return index.search(q, std::max(spec.cutoff, best.position()), rows);
                });
                emit(report, noise_cell(name, count, results), options, false);
            }
        }
    }
    fill_relative_errors(report, spec.systems);
    return report;
}

// ---------------------------------------------------------------------------

std::vector<TheoryRow> theory_curve(std::span<const std::size_t> k_list, PolarAngle theta,
                                    std::span<const std::uint64_t> n_list) {
    std::vector<TheoryRow> rows;
    rows.reserve(k_list.size() * n_list.size());
    for (std::size_t k : k_list) {
        const Dimension dim(k);
        const auto single = cap_fraction(theta, dim);
        for (std::uint64_t n : n_list) {
            if (n == 0) throw DomainError("index sizes must be positive");
            rows.push_back({k, theta.radians(), n, single, compound_false_positive_prob(single, n)});
        }
    }
    return rows;
}

std::optional<std::uint64_t> find_tipping_point(const ExperimentReport& report, const std::string& dense_system,
                                                const std::string& sparse_system, const std::string& metric) {
    if (report.sizes.size() < 2) throw DomainError("tipping point needs at least two index sizes");
    std::vector<std::uint64_t> sizes = report.sizes;
    std::sort(sizes.begin(), sizes.end());
    std::vector<std::pair<double, double>> rows;
    for (auto size : sizes) {
        const auto dense = report.metric(dense_system, size, metric);
        const auto sparse = report.metric(sparse_system, size, metric);
        if (!dense || !sparse) {
            throw DomainError("report lacks " + metric + " for '" + (dense ? sparse_system : dense_system) +
                              "' at size " + std::to_string(size));
        }
        rows.emplace_back(*dense, *sparse);
    }
    bool dense_led = false;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (dense_led && rows[i].second > rows[i].first) return sizes[i];
        if (rows[i].first > rows[i].second) dense_led = true;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

// Index of the first row of `pool` (within `rows`) whose dot with q exceeds
// `threshold`; rows are scanned four at a time.
std::optional<std::uint64_t> first_above(const EmbeddingMatrix& pool, std::size_t rows, std::span<const double> q,
                                         double threshold) {
    const std::size_t k = pool.dim();
    const double* base = pool.values().data();
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        const double* d0 = base + r * k;
        for (std::size_t i = 0; i < k; ++i) {
            s0 += q[i] * d0[i];
            s1 += q[i] * d0[k + i];
            s2 += q[i] * d0[2 * k + i];
            s3 += q[i] * d0[3 * k + i];
        }
        if (s0 > threshold) return r;
        if (s1 > threshold) return r + 1;
        if (s2 > threshold) return r + 2;
        if (s3 > threshold) return r + 3;
    }
    for (; r < rows; ++r) {
        if (dot(q, pool.row(r)) > threshold) return r;
    }
    return std::nullopt;
}

}  // namespace

std::vector<EmpiricsRow> empirics_vs_theory(const PlantedPairSpec& planted, const DistractorModel& model,
                                            std::span<const std::uint64_t> n_list, unsigned threads) {
    planted.validate();
    if (n_list.empty()) throw DomainError("empirics need at least one index size");
    for (auto n : n_list) {
        if (n == 0) throw DomainError("index sizes must be positive");
    }
    if (model.kind == DistractorKind::cone && !(model.half_angle > 0.0 && model.half_angle <= std::numbers::pi / 2)) {
        throw DomainError("cone half-angle must lie in (0, pi/2]");
    }
    const Dimension k(planted.k);
    const std::uint64_t max_n = *std::max_element(n_list.begin(), n_list.end());
    const std::uint64_t distractors = max_n - 1;
    const auto pairs = gen_planted_pairs(planted);
    const std::size_t queries = planted.num_queries;

    // first_defeat[i]: index of the first distractor beating the relevant passage.
    std::vector<std::optional<std::uint64_t>> first_defeat(queries);
    if (distractors > 0) {
        if (model.kind == DistractorKind::uniform) {
            const auto pool = sample_uniform_sphere(k, static_cast<std::size_t>(distractors),
                                                    derive_seed(planted.seed, streams::kDistractor, 0));
            parallel_for(queries, threads, [&](std::size_t i) {
                const auto q = pairs.queries.row(i);
                first_defeat[i] = first_above(pool, pool.size(), q, dot(q, pairs.relevants.row(i)));
            });
        } else {
            parallel_for(queries, threads, [&](std::size_t i) {
                const auto q = pairs.queries.row(i);
                const double rel = dot(q, pairs.relevants.row(i));
                NormalSampler normal(SplitMix64(derive_seed(planted.seed, streams::kDistractor, 1), streams::kCone, i));
                std::vector<double> d(planted.k);
                for (std::uint64_t j = 0; j < distractors; ++j) {
                    draw_cone_vector(normal, q, model.half_angle, d);
                    if (dot(q, d) > rel) {
                        first_defeat[i] = j;
                        break;
                    }
                }
            });
        }
    }

    const auto single = single_false_positive_prob(planted.target_cossim, k);
    std::vector<EmpiricsRow> rows;
    for (auto n : n_list) {
        std::size_t defeats = 0;
        for (const auto& f : first_defeat) {
            if (f && *f < n - 1) ++defeats;
        }
        const auto analytic = compound_false_positive_prob(single, n);
        const double measured = static_cast<double>(defeats) / static_cast<double>(queries);
        const double a = analytic.value();
        const double sigma = std::sqrt(a * (1.0 - a) / static_cast<double>(queries));
        std::optional<double> ratio;
        if (a > 0.0) ratio = measured / a;
        rows.push_back({n, queries, defeats, measured, analytic, sigma, ratio});
    }
    return rows;
}

}  // namespace dvlab
