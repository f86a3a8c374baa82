#include "dvlab/embedding_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "dvlab/errors.hpp"

namespace dvlab {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'V', 'E', 'C'};

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffu);
    }
    out.write(bytes.data(), bytes.size());
}

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw IoError(std::string("truncated embedding file while reading ") + what);
    }
}

template <typename T>
T get_le(std::istream& in, const char* what) {
    std::array<unsigned char, sizeof(T)> bytes{};
    read_exact(in, reinterpret_cast<char*>(bytes.data()), bytes.size(), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return static_cast<T>(v);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

void write_dvec(const EmbeddingMatrix& m, std::ostream& out) {
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kDvecVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dim()));
    put_le<std::uint64_t>(out, m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& id = m.id(i);
        if (id.size() > std::numeric_limits<std::uint16_t>::max()) {
            throw DomainError("id too long for DVEC: '" + id.substr(0, 32) + "...'");
        }
        put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
        for (double v : m.row(i)) {
            put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
    }
    if (!out) throw IoError("failed writing embedding file");
}

void write_dvec(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    auto out = open_out(path, std::ios::binary | std::ios::trunc);
    write_dvec(m, out);
}

EmbeddingMatrix read_dvec(std::istream& in) {
    std::array<char, 4> magic{};
    read_exact(in, magic.data(), magic.size(), "magic");
    if (magic != kMagic) throw FormatError("not a DVEC embedding file (bad magic bytes)");
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kDvecVersion) {
        throw FormatError("unsupported DVEC version " + std::to_string(version));
    }
    const auto dim = get_le<std::uint32_t>(in, "dimension");
    const auto count = get_le<std::uint64_t>(in, "count");
    EmbeddingMatrix m{Dimension(dim)};
    std::vector<double> row(dim);
    std::string id;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto len = get_le<std::uint16_t>(in, "id length");
        id.assign(len, '\0');
        read_exact(in, id.data(), len, "id");
        for (std::uint32_t j = 0; j < dim; ++j) {
            row[j] = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in, "vector")));
        }
        try {
            m.append(id, row);
        } catch (const DomainError& e) {
            throw FormatError(std::string("invalid DVEC content: ") + e.what());
        }
    }
    return m;
}

EmbeddingMatrix read_dvec(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    return read_dvec(in);
}

void write_embeddings_jsonl(const EmbeddingMatrix& m, std::ostream& out) {
    for (std::size_t i = 0; i < m.size(); ++i) {
        nlohmann::ordered_json line;
        line["id"] = m.id(i);
        const auto row = m.row(i);
        line["vector"] = std::vector<double>(row.begin(), row.end());
        out << line.dump() << '\n';
    }
    if (!out) throw IoError("failed writing embedding file");
}

void write_embeddings_jsonl(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    auto out = open_out(path, std::ios::trunc);
    write_embeddings_jsonl(m, out);
}

EmbeddingMatrix read_embeddings_jsonl(std::istream& in) {
    std::optional<EmbeddingMatrix> m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto obj = nlohmann::json::parse(line);
            auto id = obj.at("id").get<std::string>();
            auto values = obj.at("vector").get<std::vector<double>>();
            if (!m) m.emplace(Dimension(values.size()));
            m->append(std::move(id), values);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("embedding JSONL line " + std::to_string(line_no) + ": " + e.what());
        } catch (const DomainError& e) {
            throw FormatError("embedding JSONL line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!m) throw FormatError("embedding JSONL contains no vectors");
    return std::move(*m);
}

EmbeddingMatrix read_embeddings_jsonl(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in);
    return read_embeddings_jsonl(in);
}

namespace {
bool is_jsonl(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return ext == ".jsonl" || ext == ".json";
}
}  // namespace

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
    return is_jsonl(path) ? read_embeddings_jsonl(path) : read_dvec(path);
}

void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    if (is_jsonl(path)) {
        write_embeddings_jsonl(m, path);
    } else {
        write_dvec(m, path);
    }
}

}  // namespace dvlab
