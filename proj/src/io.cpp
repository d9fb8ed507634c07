#include "fdlab/io.hpp"

#include "fdlab/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace fdlab {

namespace {

void append_number(std::string& out, double v)
{
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(len));
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return cells;
}

double parse_number(const std::string& cell, std::size_t line_no)
{
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size())
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
    return v;
}

static_assert(std::endian::native == std::endian::little, "binary trajectories assume a little-endian host");

template <typename T>
void put(std::string& out, T v)
{
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    out.append(raw, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos)
{
    if (pos + sizeof(T) > in.size())
        throw std::runtime_error("binary trajectory truncated");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

constexpr char traj_magic[8] = {'F', 'D', 'L', 'T', 'R', 'A', 'J', '1'};
constexpr std::uint32_t traj_version = 1;

}  // namespace

std::string format_csv(const CsvTable& table)
{
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c)
            out += ',';
        out += table.header[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw std::invalid_argument("csv row width differs from header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            append_number(out, row[c]);
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text)
{
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line_no == 1) {
            t.header = split_line(line);
            continue;
        }
        if (line.empty())
            continue;
        const auto cells = split_line(line);
        if (cells.size() != t.header.size())
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(t.header.size()) + " columns");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells)
            row.push_back(parse_number(c, line_no));
        t.rows.push_back(std::move(row));
    }
    if (line_no == 0)
        throw std::runtime_error("csv: missing header");
    return t;
}

CsvTable trajectory_table(const SpaceTimeField& f)
{
    CsvTable t{{"t", "r", "u"}, {}};
    const RadialGrid& g = *f.grid;
    t.rows.reserve(f.steps() * g.size());
    for (std::size_t k = 0; k < f.steps(); ++k)
        for (std::size_t i = 0; i < g.size(); ++i)
            t.rows.push_back({f.times[k], g[i], f.states[k][i]});
    return t;
}

CsvTable profile_table(const std::vector<std::string>& names, const std::vector<RadialField>& fields)
{
    if (names.size() != fields.size() || fields.empty())
        throw std::invalid_argument("profile_table: need one name per field");
    CsvTable t;
    t.header.push_back("r");
    t.header.insert(t.header.end(), names.begin(), names.end());
    const GridPtr& g = fields.front().grid_ptr();
    for (const auto& f : fields)
        if (!same_grid(f.grid_ptr(), g))
            throw std::invalid_argument("profile_table: fields must share a grid");
    for (std::size_t i = 0; i < g->size(); ++i) {
        std::vector<double> row{(*g)[i]};
        for (const auto& f : fields)
            row.push_back(f[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string encode_trajectory(const SpaceTimeField& f)
{
    std::string out(traj_magic, sizeof traj_magic);
    put<std::uint32_t>(out, traj_version);
    put<std::uint64_t>(out, f.grid->size());
    put<std::uint64_t>(out, f.steps());
    for (double r : f.grid->nodes())
        put(out, r);
    for (double t : f.times)
        put(out, t);
    for (const auto& s : f.states)
        for (double u : s.values())
            put(out, u);
    return out;
}

SpaceTimeField decode_trajectory(const std::string& bytes)
{
    if (bytes.size() < sizeof traj_magic || std::memcmp(bytes.data(), traj_magic, sizeof traj_magic) != 0)
        throw std::runtime_error("binary trajectory: bad magic");
    std::size_t pos = sizeof traj_magic;
    if (const auto v = get<std::uint32_t>(bytes, pos); v != traj_version)
        throw std::runtime_error("binary trajectory: unsupported version " + std::to_string(v));
    const auto nodes = get<std::uint64_t>(bytes, pos);
    const auto times = get<std::uint64_t>(bytes, pos);
    if (bytes.size() - pos != 8 * (nodes + times + nodes * times))
        throw std::runtime_error("binary trajectory: size does not match header");
    std::vector<double> r(nodes);
    for (auto& x : r)
        x = get<double>(bytes, pos);
    SpaceTimeField f;
    f.grid = share(RadialGrid(std::move(r)));
    f.times.resize(times);
    for (auto& t : f.times)
        t = get<double>(bytes, pos);
    for (std::uint64_t k = 0; k < times; ++k) {
        std::vector<double> u(nodes);
        for (auto& x : u)
            x = get<double>(bytes, pos);
        f.states.emplace_back(f.grid, std::move(u));
    }
    return f;
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
}

void ArtifactWriter::write(const std::string& name, const std::string& bytes)
{
    if (name == "manifest.json")
        throw std::invalid_argument("manifest.json is reserved");
    atomic_write(dir_ / name, bytes);
    entries_.push_back({name, bytes.size(), sha256_hex(bytes)});
}

void ArtifactWriter::finish(const std::string& scenario_json)
{
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& e : entries_)
        files.push_back({{"name", e.name}, {"bytes", e.bytes}, {"sha256", e.sha256}});
    nlohmann::ordered_json manifest;
    manifest["format"] = "fdlab-manifest/1";
    manifest["scenario"] = nlohmann::ordered_json::parse(scenario_json);
    manifest["files"] = std::move(files);
    atomic_write(dir_ / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace fdlab
