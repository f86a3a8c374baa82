#include "dvlab/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dvlab/errors.hpp"

namespace dvlab {

using ojson = nlohmann::ordered_json;

std::string metric_names::mrr(std::size_t cutoff) { return "mrr@" + std::to_string(cutoff); }

const ReportCell* ExperimentReport::find(const std::string& system, std::uint64_t size) const {
    for (const auto& c : cells) {
        if (c.system == system && c.size == size) return &c;
    }
    return nullptr;
}

ReportCell* ExperimentReport::find(const std::string& system, std::uint64_t size) {
    for (auto& c : cells) {
        if (c.system == system && c.size == size) return &c;
    }
    return nullptr;
}

std::optional<double> ExperimentReport::metric(const std::string& system, std::uint64_t size,
                                               const std::string& name) const {
    const auto* cell = find(system, size);
    if (!cell) return std::nullopt;
    auto it = cell->metrics.find(name);
    if (it == cell->metrics.end()) return std::nullopt;
    return it->second.value;
}

void ExperimentReport::set_metadata(const std::string& key, std::string value) {
    for (auto& [k, v] : metadata) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    metadata.emplace_back(key, std::move(value));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

namespace {

ojson cell_json(const ReportCell& cell) {
    ojson c;
    c["system"] = cell.system;
    c["size"] = cell.size;
    ojson metrics = ojson::object();
    for (const auto& [name, m] : cell.metrics) {
        if (m.value) {
            metrics[name] = *m.value;
        } else {
            metrics[name] = ojson{{"skipped", m.skipped_reason}};
        }
    }
    c["metrics"] = std::move(metrics);
    return c;
}

ReportCell cell_from(const ojson& c) {
    ReportCell cell;
    cell.system = c.at("system").get<std::string>();
    cell.size = c.at("size").get<std::uint64_t>();
    for (const auto& [name, v] : c.at("metrics").items()) {
        if (v.is_number()) {
            cell.metrics[name] = MetricValue::of(v.get<double>());
        } else {
            cell.metrics[name] = MetricValue::skipped(v.at("skipped").get<std::string>());
        }
    }
    return cell;
}

}  // namespace

std::string to_json(const ExperimentReport& report) {
    ojson root;
    root["experiment"] = report.experiment;
    ojson meta = ojson::object();
    for (const auto& [k, v] : report.metadata) meta[k] = v;
    root["metadata"] = std::move(meta);
    root["systems"] = report.systems;
    root["sizes"] = report.sizes;
    ojson cells = ojson::array();
    for (const auto& c : report.cells) cells.push_back(cell_json(c));
    root["cells"] = std::move(cells);
    return root.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
    try {
        const auto root = ojson::parse(text);
        ExperimentReport r;
        r.experiment = root.at("experiment").get<std::string>();
        for (const auto& [k, v] : root.at("metadata").items()) r.metadata.emplace_back(k, v.get<std::string>());
        r.systems = root.at("systems").get<std::vector<std::string>>();
        r.sizes = root.at("sizes").get<std::vector<std::uint64_t>>();
        for (const auto& c : root.at("cells")) r.cells.push_back(cell_from(c));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid report JSON: ") + e.what());
    }
}

std::string to_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "# experiment=" << report.experiment << '\n';
    for (const auto& [k, v] : report.metadata) out << "# " << k << '=' << v << '\n';
    out << "system,size,metric,value\n";
    for (const auto& c : report.cells) {
        for (const auto& [name, m] : c.metrics) {
            out << c.system << ',' << c.size << ',' << name << ',';
            out << (m.value ? format_double(*m.value) : std::string("skipped")) << '\n';
        }
    }
    return out.str();
}

std::string cell_to_json_line(const ReportCell& cell) { return cell_json(cell).dump(); }

ReportCell cell_from_json_line(const std::string& line) {
    try {
        return cell_from(ojson::parse(line));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid cell record: ") + e.what());
    }
}

}  // namespace dvlab
