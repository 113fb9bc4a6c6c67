#pragma once

#include "slowmf/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace slowmf::cli {

using json = nlohmann::json;

/// Parses a TOML file, or JSON when the extension is .json or TOML parsing fails.
json load_config_file(const std::filesystem::path& path);

/// Typed read access to one table of the config; finish() rejects keys that were never read.
class Section {
public:
    Section(const json& root, std::string name);

    bool has(const std::string& key) const;
    double number(const std::string& key, double fallback);
    double number(const std::string& key);
    std::int64_t integer(const std::string& key, std::int64_t fallback);
    std::string text(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
    std::vector<std::string> texts(const std::string& key, const std::vector<std::string>& fallback);
    Mat matrix(const std::string& key);
    Section sub(const std::string& key);
    void finish() const;

    const std::string& name() const { return name_; }

private:
    const json* lookup(const std::string& key);

    json data_;
    std::string name_;
    std::set<std::string> seen_;
};

struct RunConfig {
    std::string command;
    json raw;  ///< full parsed file, echoed into the run metadata
    std::uint64_t seed = 1;
    std::filesystem::path out_dir;
};

/// Resolves seed and output directory: command line beats SLOWMF_SEED / SLOWMF_OUT beats the file.
RunConfig make_run_config(const std::string& command, const std::filesystem::path& config_path,
                          std::optional<std::uint64_t> seed_flag, std::optional<std::string> out_flag);

/// Builds a model from the [model] table. Known nonlinearities: "example", "linear".
SlowFastModel build_model(Section model);

}  // namespace slowmf::cli
