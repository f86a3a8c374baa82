#pragma once

// Experiment results as a (system x index size) grid of named metrics.
// Serialises to pretty JSON (with metadata) and to a flat
// "system,size,metric,value" CSV preceded by '#' metadata comment lines.
// Both serialisations are byte-deterministic.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dvlab {

inline constexpr const char* kToolVersion = "0.1.0";

namespace metric_names {
inline constexpr const char* kErr = "err";
inline constexpr const char* kRelativeErr = "relative_err";
inline constexpr const char* kNoiseDefeat = "noise_defeat";
std::string mrr(std::size_t cutoff);  // "mrr@<cutoff>"
}  // namespace metric_names

struct MetricValue {
    std::optional<double> value;
    std::string skipped_reason;  ///< set iff !value

    static MetricValue of(double v) { return {v, {}}; }
    static MetricValue skipped(std::string reason) { return {std::nullopt, std::move(reason)}; }
    bool operator==(const MetricValue&) const = default;
};

struct ReportCell {
    std::string system;
    std::uint64_t size = 0;
    std::map<std::string, MetricValue> metrics;
    bool operator==(const ReportCell&) const = default;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> systems;
    std::vector<std::uint64_t> sizes;
    std::vector<ReportCell> cells;  ///< system-major, sizes ascending

    const ReportCell* find(const std::string& system, std::uint64_t size) const;
    ReportCell* find(const std::string& system, std::uint64_t size);
    std::optional<double> metric(const std::string& system, std::uint64_t size, const std::string& name) const;
    void set_metadata(const std::string& key, std::string value);
};

std::string to_json(const ExperimentReport& report);
std::string to_csv(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

/// One cell as a single JSON line; used for resumable progress logs.
std::string cell_to_json_line(const ReportCell& cell);
ReportCell cell_from_json_line(const std::string& line);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace dvlab
