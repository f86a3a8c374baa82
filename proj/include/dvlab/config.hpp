#pragma once

// Flat experiment config: one "key = value" per line, '#' starts a comment.
//
//   seed = 42
//   cutoff = 10
//   sizes = 1e3..1e5            # decades, or a comma list "100,1000,5000"
//   noise_counts = 0,1e3,1e5
//   noise_seed = 7              # defaults to seed
//   noise_min_len = 20
//   noise_max_len = 150
//   dataset = files             # or "synthetic"
//   corpus = toy/corpus.jsonl   # relative paths resolve against the config's directory
//   queries = toy/queries.jsonl
//   qrels = toy/qrels.tsv
//   synthetic.num_queries = 100 # also pool_size, vocab_size, query_terms,
//                               # overlap, doc_length, zipf_exponent, seed
//   system.bm25 = bm25 k1=1.2 b=0.75
//   system.d16 = dense dim=16 cossim=0.8 distractors=uniform similarity=cosine
//   system.ext = dense-file docs=d.dvec queries=q.dvec project=64
//
// Systems run in the order they appear. Unknown keys are schema errors.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dvlab/harness.hpp"

namespace dvlab {

struct ConfigFile {
    std::vector<std::pair<std::string, std::string>> entries;  ///< in file order, keys unique
    std::filesystem::path base_dir;

    const std::string* get(std::string_view key) const;
    /// Replaces an existing key in place or appends a new one.
    void set(std::string key, std::string value);
};

ConfigFile parse_config(std::istream& in, std::filesystem::path base_dir = {});
ConfigFile read_config(const std::filesystem::path& path);

/// "key=value" as given to --set.
void apply_override(ConfigFile& config, std::string_view assignment);

/// Comma-separated positive integers; each item is a plain or scientific
/// integer ("100000", "1e5") or a decade range "1e2..1e5".
std::vector<std::uint64_t> parse_size_list(std::string_view text, bool allow_zero = false);

GrowthExperimentSpec growth_spec_from_config(const ConfigFile& config);
NoiseExperimentSpec noise_spec_from_config(const ConfigFile& config);

}  // namespace dvlab
