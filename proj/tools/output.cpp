#include "output.hpp"

#include "slowmf/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

namespace slowmf::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw Error("sha256: digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

OutputDir::OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw ConfigError("output: cannot create directory '" + dir_.string() + "'");
}

void OutputDir::write_file(const std::string& name, const std::string& bytes, bool listed) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("output: cannot write '" + p.string() + "'");
    out << bytes;
    out.close();
    if (!out) throw ConfigError("output: write failed for '" + p.string() + "'");
    if (listed) {
        files_.push_back(name);
        manifest_.push_back({{"file", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
    }
}

void OutputDir::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
    std::string s;
    for (std::size_t j = 0; j < header.size(); ++j) s += (j ? "," : "") + header[j];
    s += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw Error("output: row width does not match header of " + name);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) s += ',';
            s += format_number(row[j]);
        }
        s += '\n';
    }
    write_file(name, s, true);
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& value) {
    write_file(name, value.dump(2) + "\n", true);
}

void OutputDir::write_timing(const nlohmann::json& value) { write_file("timing.json", value.dump(2) + "\n", false); }

void OutputDir::finish() {
    write_file("manifest.json", nlohmann::json{{"files", manifest_}}.dump(2) + "\n", false);
}

}  // namespace slowmf::cli
