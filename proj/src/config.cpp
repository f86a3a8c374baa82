#include "dvlab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dvlab/corpus_io.hpp"
#include "dvlab/errors.hpp"

namespace dvlab {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw DomainError("'" + std::string(key) + "': expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_count(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec == std::errc() && ptr == end) return v;
    // Scientific notation such as 1e5 must still denote an exact integer.
    const double d = parse_double(key, text);
    if (d < 0.0 || d > 9.0e15 || d != std::floor(d)) {
        throw DomainError("'" + std::string(key) + "': expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return static_cast<std::uint64_t>(d);
}

const std::set<std::string, std::less<>> kPlainKeys = {
    "seed",     "cutoff",  "sizes",  "noise_counts", "noise_seed", "noise_min_len", "noise_max_len",
    "dataset",  "corpus",  "queries", "qrels"};

const std::set<std::string, std::less<>> kSyntheticKeys = {"num_queries", "pool_size",  "vocab_size",    "query_terms",
                                                           "overlap",     "doc_length", "zipf_exponent", "seed"};

void check_key(std::string_view key) {
    if (kPlainKeys.count(key)) return;
    if (key.starts_with("synthetic.") && kSyntheticKeys.count(key.substr(10))) return;
    if (key.starts_with("system.") && key.size() > 7) return;
    throw DomainError("unknown config key '" + std::string(key) + "'");
}

std::filesystem::path resolve(const ConfigFile& config, const std::string& value) {
    std::filesystem::path p(value);
    if (p.is_relative() && !config.base_dir.empty()) p = config.base_dir / p;
    return p;
}

std::uint64_t get_count(const ConfigFile& config, std::string_view key, std::uint64_t fallback) {
    const auto* v = config.get(key);
    return v ? parse_count(key, *v) : fallback;
}

std::vector<std::pair<std::string, std::string>> parse_options(std::string_view key, std::istringstream& words) {
    std::vector<std::pair<std::string, std::string>> opts;
    std::string word;
    while (words >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw DomainError("'" + std::string(key) + "': expected option=value, got '" + word + "'");
        }
        opts.emplace_back(word.substr(0, eq), word.substr(eq + 1));
    }
    return opts;
}

SystemConfig parse_system(const ConfigFile& config, const std::string& key, const std::string& value) {
    const std::string name = key.substr(7);
    std::istringstream words(value);
    std::string kind;
    words >> kind;
    const auto opts = parse_options(key, words);
    auto bad = [&](const std::string& opt) {
        return DomainError("'" + key + "': option '" + opt + "' is not valid for " + kind);
    };
    if (kind == "bm25") {
        Bm25System s{name, {}};
        for (const auto& [o, v] : opts) {
            if (o == "k1") s.params.k1 = parse_double(key, v);
            else if (o == "b") s.params.b = parse_double(key, v);
            else throw bad(o);
        }
        return s;
    }
    if (kind == "dense" || kind == "dense-file") {
        DenseSystem s{name, SimilarityKind::cosine, SyntheticEncoder{}, std::nullopt};
        SyntheticEncoder enc;
        EmbeddingFiles files;
        for (const auto& [o, v] : opts) {
            if (o == "similarity") s.similarity = parse_similarity(v);
            else if (o == "project") s.project_to = static_cast<std::size_t>(parse_count(key, v));
            else if (kind == "dense" && o == "dim") enc.dim = static_cast<std::size_t>(parse_count(key, v));
            else if (kind == "dense" && o == "cossim") enc.cossim = parse_double(key, v);
            else if (kind == "dense" && o == "distractors") enc.distractors = parse_distractor_kind(v);
            else if (kind == "dense" && o == "half_angle") enc.half_angle = parse_double(key, v);
            else if (kind == "dense-file" && o == "docs") files.docs = resolve(config, v);
            else if (kind == "dense-file" && o == "queries") files.queries = resolve(config, v);
            else throw bad(o);
        }
        if (kind == "dense") {
            s.source = enc;
        } else {
            if (files.docs.empty() || files.queries.empty()) {
                throw DomainError("'" + key + "': dense-file needs docs= and queries=");
            }
            s.source = files;
        }
        return s;
    }
    throw DomainError("'" + key + "': unknown system kind '" + kind + "' (bm25, dense, dense-file)");
}

std::vector<SystemConfig> systems_from(const ConfigFile& config) {
    std::vector<SystemConfig> systems;
    for (const auto& [k, v] : config.entries) {
        if (k.starts_with("system.")) systems.push_back(parse_system(config, k, v));
    }
    if (systems.empty()) throw DomainError("config defines no system.<name> entries");
    return systems;
}

// Judged passages become the relevant set; the rest of the corpus is the pool.
TextDataset dataset_from(const ConfigFile& config, std::uint64_t seed) {
    const auto* kind = config.get("dataset");
    const std::string dataset = kind ? *kind : "files";
    if (dataset == "synthetic") {
        KeywordDatasetSpec spec;
        spec.seed = seed;
        spec.num_queries = get_count(config, "synthetic.num_queries", spec.num_queries);
        spec.pool_size = get_count(config, "synthetic.pool_size", spec.pool_size);
        spec.vocab_size = get_count(config, "synthetic.vocab_size", spec.vocab_size);
        spec.query_terms = get_count(config, "synthetic.query_terms", spec.query_terms);
        spec.overlap = get_count(config, "synthetic.overlap", spec.overlap);
        spec.doc_length = get_count(config, "synthetic.doc_length", spec.doc_length);
        spec.seed = get_count(config, "synthetic.seed", spec.seed);
        if (const auto* z = config.get("synthetic.zipf_exponent")) spec.zipf_exponent = parse_double("synthetic.zipf_exponent", *z);
        return gen_keyword_dataset(spec);
    }
    if (dataset != "files") throw DomainError("dataset must be 'files' or 'synthetic', got '" + dataset + "'");
    for (const char* key : {"corpus", "queries", "qrels"}) {
        if (!config.get(key)) throw DomainError(std::string("dataset = files needs '") + key + "'");
    }
    TextDataset data;
    data.queries = read_documents_jsonl(resolve(config, *config.get("queries")));
    data.qrels = read_qrels_tsv(resolve(config, *config.get("qrels")));
    const auto judged = data.qrels.all_relevant();
    for (auto& doc : read_documents_jsonl(resolve(config, *config.get("corpus")))) {
        (judged.count(doc.id) ? data.relevant : data.pool).push_back(std::move(doc));
    }
    return data;
}

}  // namespace

const std::string* ConfigFile::get(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

void ConfigFile::set(std::string key, std::string value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries.emplace_back(std::move(key), std::move(value));
}

ConfigFile parse_config(std::istream& in, std::filesystem::path base_dir) {
    ConfigFile config;
    config.base_dir = std::move(base_dir);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body(line);
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw DomainError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        check_key(key);
        if (config.get(key)) throw DomainError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        config.entries.emplace_back(key, value);
    }
    return config;
}

ConfigFile read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    return parse_config(in, path.parent_path());
}

void apply_override(ConfigFile& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw DomainError("--set expects key=value, got '" + std::string(assignment) + "'");
    std::string key(trim(assignment.substr(0, eq)));
    check_key(key);
    config.set(std::move(key), std::string(trim(assignment.substr(eq + 1))));
}

std::vector<std::uint64_t> parse_size_list(std::string_view text, bool allow_zero) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        const auto item = trim(text.substr(start, comma - start));
        if (item.empty()) throw DomainError("empty entry in size list '" + std::string(text) + "'");
        if (const auto dots = item.find(".."); dots != std::string_view::npos) {
            const auto lo = parse_count("sizes", trim(item.substr(0, dots)));
            const auto hi = parse_count("sizes", trim(item.substr(dots + 2)));
            if (lo == 0 || lo > hi) throw DomainError("bad decade range '" + std::string(item) + "'");
            for (std::uint64_t v = lo; v <= hi; v *= 10) {
                out.push_back(v);
                if (v > hi / 10) break;
            }
        } else {
            out.push_back(parse_count("sizes", item));
        }
        if (!allow_zero && out.back() == 0) throw DomainError("sizes must be positive");
        start = comma + 1;
    }
    return out;
}

GrowthExperimentSpec growth_spec_from_config(const ConfigFile& config) {
    GrowthExperimentSpec spec;
    spec.seed = get_count(config, "seed", spec.seed);
    spec.cutoff = get_count(config, "cutoff", spec.cutoff);
    const auto* sizes = config.get("sizes");
    if (!sizes) throw DomainError("growth config needs 'sizes'");
    spec.sizes = parse_size_list(*sizes);
    spec.systems = systems_from(config);
    spec.data = dataset_from(config, spec.seed);
    return spec;
}

NoiseExperimentSpec noise_spec_from_config(const ConfigFile& config) {
    NoiseExperimentSpec spec;
    spec.seed = get_count(config, "seed", spec.seed);
    spec.cutoff = get_count(config, "cutoff", spec.cutoff);
    const auto* counts = config.get("noise_counts");
    if (!counts) throw DomainError("noise config needs 'noise_counts'");
    spec.noise_counts = parse_size_list(*counts, true);
    spec.noise.seed = get_count(config, "noise_seed", spec.seed);
    spec.noise.min_len = get_count(config, "noise_min_len", spec.noise.min_len);
    spec.noise.max_len = get_count(config, "noise_max_len", spec.noise.max_len);
    spec.systems = systems_from(config);
    spec.data = dataset_from(config, spec.seed);
    spec.data.pool.clear();
    return spec;
}

}  // namespace dvlab
