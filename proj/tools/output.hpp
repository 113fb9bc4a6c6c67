#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace slowmf::cli {

std::string sha256_hex(const std::string& bytes);

/// Formats with 17 significant digits so values round-trip.
std::string format_number(double x);

/// Output directory of one run. Every file except timing.json is listed in manifest.json.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir);

    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);
    void write_json(const std::string& name, const nlohmann::json& value);
    void write_timing(const nlohmann::json& value);
    /// Writes manifest.json; call last.
    void finish();

    const std::filesystem::path& path() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }

private:
    void write_file(const std::string& name, const std::string& bytes, bool listed);

    std::filesystem::path dir_;
    std::vector<std::string> files_;
    nlohmann::json manifest_ = nlohmann::json::array();
};

}  // namespace slowmf::cli
