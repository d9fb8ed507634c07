#pragma once

#include "fdlab/parabolic.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fdlab {

/// A numeric CSV table with one header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// %.17g per value, comma separated, '\n' line ends.
std::string format_csv(const CsvTable& table);
/// Inverse of format_csv; throws std::runtime_error on ragged rows or bad numbers.
CsvTable parse_csv(const std::string& text);

/// Long format: one row per (stored time, node) with columns t, r, u.
CsvTable trajectory_table(const SpaceTimeField& f);
/// Columns r plus one column per named field (all on one grid).
CsvTable profile_table(const std::vector<std::string>& names, const std::vector<RadialField>& fields);

/// Binary trajectory: "FDLTRAJ1", uint32 version (1), uint64 node count,
/// uint64 time count, then nodes, times and states row by row as
/// little-endian IEEE doubles.
std::string encode_trajectory(const SpaceTimeField& f);
SpaceTimeField decode_trajectory(const std::string& bytes);

/// Writes to path.tmp and renames over path.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

/// Collects emitted files and writes manifest.json (name, bytes, sha256 per file).
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir);

    void write(const std::string& name, const std::string& bytes);
    void write_csv(const std::string& name, const CsvTable& table) { write(name, format_csv(table)); }
    /// Writes manifest.json with the scenario (a JSON document) embedded.
    void finish(const std::string& scenario_json);

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    struct Entry {
        std::string name;
        std::size_t bytes;
        std::string sha256;
    };
    std::filesystem::path dir_;
    std::vector<Entry> entries_;
};

}  // namespace fdlab
