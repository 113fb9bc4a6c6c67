#include "config.hpp"

#include "slowmf/errors.hpp"

#include <toml.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace slowmf::cli {

namespace fs = std::filesystem;

namespace {

json from_toml(const toml::node& node) {
    if (auto t = node.as_table()) {
        json out = json::object();
        for (const auto& [k, v] : *t) out[std::string(k.str())] = from_toml(v);
        return out;
    }
    if (auto a = node.as_array()) {
        json out = json::array();
        for (const auto& v : *a) out.push_back(from_toml(v));
        return out;
    }
    if (auto v = node.as_integer()) return v->get();
    if (auto v = node.as_floating_point()) return v->get();
    if (auto v = node.as_boolean()) return v->get();
    if (auto v = node.as_string()) return v->get();
    throw ConfigError("config: unsupported TOML value (dates and times are not accepted)");
}

const std::set<std::string> kTopLevel{"seed", "out", "model", "paths", "manifold",
                                      "converge", "track", "estimate", "diagnose"};

}  // namespace

json load_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    json root;
    if (path.extension() == ".json") {
        try {
            root = json::parse(text);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config: invalid JSON: ") + e.what());
        }
    } else {
        try {
            root = from_toml(toml::parse(text, path.string()));
        } catch (const toml::parse_error& e) {
            try {
                root = json::parse(text);
            } catch (const json::exception&) {
                std::ostringstream msg;
                msg << "config: invalid TOML: " << e.description() << " at line " << e.source().begin.line;
                throw ConfigError(msg.str());
            }
        }
    }
    if (!root.is_object()) throw ConfigError("config: top level must be a table");
    for (const auto& [k, v] : root.items()) {
        if (!kTopLevel.count(k)) throw ConfigError("config: unknown key '" + k + "'");
    }
    return root;
}

Section::Section(const json& root, std::string name) : name_(std::move(name)) {
    if (root.contains(name_)) {
        data_ = root.at(name_);
        if (!data_.is_object()) throw ConfigError("config: [" + name_ + "] must be a table");
    } else {
        data_ = json::object();
    }
}

bool Section::has(const std::string& key) const { return data_.contains(key); }

const json* Section::lookup(const std::string& key) {
    seen_.insert(key);
    auto it = data_.find(key);
    return it == data_.end() ? nullptr : &*it;
}

double Section::number(const std::string& key, double fallback) {
    const json* v = lookup(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError("config: " + name_ + "." + key + " must be a number");
    return v->get<double>();
}

double Section::number(const std::string& key) {
    if (!has(key)) throw ConfigError("config: missing " + name_ + "." + key);
    return number(key, 0.0);
}

std::int64_t Section::integer(const std::string& key, std::int64_t fallback) {
    const json* v = lookup(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError("config: " + name_ + "." + key + " must be an integer");
    return v->get<std::int64_t>();
}

std::string Section::text(const std::string& key, const std::string& fallback) {
    const json* v = lookup(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError("config: " + name_ + "." + key + " must be a string");
    return v->get<std::string>();
}

std::vector<double> Section::numbers(const std::string& key, const std::vector<double>& fallback) {
    const json* v = lookup(key);
    if (!v) return fallback;
    if (v->is_number()) return {v->get<double>()};
    if (!v->is_array()) throw ConfigError("config: " + name_ + "." + key + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
        if (!x.is_number()) throw ConfigError("config: " + name_ + "." + key + " must be a list of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<std::string> Section::texts(const std::string& key, const std::vector<std::string>& fallback) {
    const json* v = lookup(key);
    if (!v) return fallback;
    if (v->is_string()) return {v->get<std::string>()};
    if (!v->is_array()) throw ConfigError("config: " + name_ + "." + key + " must be a list of strings");
    std::vector<std::string> out;
    for (const auto& x : *v) {
        if (!x.is_string()) throw ConfigError("config: " + name_ + "." + key + " must be a list of strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

Mat Section::matrix(const std::string& key) {
    const json* v = lookup(key);
    if (!v) throw ConfigError("config: missing " + name_ + "." + key);
    const std::string where = name_ + "." + key;
    if (v->is_number()) return Mat::Constant(1, 1, v->get<double>());
    if (!v->is_array() || v->empty()) throw ConfigError("config: " + where + " must be a matrix (list of rows)");
    const auto rows = static_cast<Eigen::Index>(v->size());
    const auto cols = static_cast<Eigen::Index>((*v)[0].is_array() ? (*v)[0].size() : 0);
    if (cols == 0) throw ConfigError("config: " + where + " must be a matrix (list of rows)");
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = (*v)[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError("config: " + where + " has ragged rows");
        }
        for (Eigen::Index j = 0; j < cols; ++j) {
            const json& x = row[static_cast<std::size_t>(j)];
            if (!x.is_number()) throw ConfigError("config: " + where + " entries must be numbers");
            m(i, j) = x.get<double>();
        }
    }
    return m;
}

Section Section::sub(const std::string& key) {
    seen_.insert(key);
    Section s(data_, key);
    s.name_ = name_ + "." + key;
    return s;
}

void Section::finish() const {
    for (const auto& [k, v] : data_.items()) {
        if (!seen_.count(k)) throw ConfigError("config: unknown key '" + name_ + "." + k + "'");
    }
}

RunConfig make_run_config(const std::string& command, const fs::path& config_path,
                          std::optional<std::uint64_t> seed_flag, std::optional<std::string> out_flag) {
    RunConfig rc;
    rc.command = command;
    rc.raw = load_config_file(config_path);

    if (rc.raw.contains("seed")) {
        const json& s = rc.raw["seed"];
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0) throw ConfigError("config: seed must be a non-negative integer");
        rc.seed = s.get<std::uint64_t>();
    }
    if (const char* env = std::getenv("SLOWMF_SEED")) {
        try {
            std::size_t pos = 0;
            rc.seed = std::stoull(env, &pos);
            if (pos != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            throw ConfigError(std::string("SLOWMF_SEED is not an unsigned integer: '") + env + "'");
        }
    }
    if (seed_flag) rc.seed = *seed_flag;

    rc.out_dir = "slowmf_out";
    if (rc.raw.contains("out")) {
        if (!rc.raw["out"].is_string()) throw ConfigError("config: out must be a string");
        rc.out_dir = rc.raw["out"].get<std::string>();
        if (rc.out_dir.is_relative()) rc.out_dir = config_path.parent_path() / rc.out_dir;
    }
    if (const char* env = std::getenv("SLOWMF_OUT")) rc.out_dir = env;
    if (out_flag) rc.out_dir = *out_flag;
    return rc;
}

SlowFastModel build_model(Section s) {
    const std::string kind = s.text("nonlinearity", "example");
    SlowFastModel m;
    if (kind == "example") {
        const double radius = s.number("cutoff_radius", 6.0);
        m = example_model(s.number("a", 0.1), radius, s.number("eps", 0.1));
        if (s.has("sigma")) m = m.with_sigma(Vec::Constant(1, s.number("sigma")));
    } else if (kind == "linear") {
        const Nonlinearity nl = registered_nonlinearity(kind, 1.0);
        m.name = kind;
        m.A = s.matrix("A");
        m.B = s.matrix("B");
        if (m.A.rows() != m.A.cols() || m.B.rows() != m.B.cols()) throw ConfigError("config: model.A and model.B must be square");
        const auto sigma = s.numbers("sigma", std::vector<double>(static_cast<std::size_t>(m.A.rows()), 0.0));
        if (static_cast<Eigen::Index>(sigma.size()) != m.A.rows()) throw ConfigError("config: model.sigma has the wrong length");
        m.sigma = Eigen::Map<const Vec>(sigma.data(), static_cast<Eigen::Index>(sigma.size()));
        m.f = nl.f;
        m.g = nl.g;
        m.eps = s.number("eps", 0.1);
        m.a = s.number("a", 0.0);
        m.gamma1 = s.number("gamma1");
        m.gamma2 = s.number("gamma2");
        m.K = s.number("K");
        m.rho = s.number("rho");
    } else {
        std::string names;
        for (const auto& n : registered_nonlinearity_names()) names += (names.empty() ? "" : ", ") + n;
        throw ConfigError("config: unknown model.nonlinearity '" + kind + "' (known: " + names + ")");
    }
    s.finish();
    return m;
}

}  // namespace slowmf::cli
