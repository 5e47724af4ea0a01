#include "config.hpp"

#include "ellipsoid_lab/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ellipsoid_lab::cli {
namespace {

using nlohmann::json;

std::size_t as_count(const json& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw UsageError("config key '" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

double as_real(const json& v, const std::string& key) {
    if (!v.is_number()) {
        throw UsageError("config key '" + key + "' must be a number");
    }
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) {
        throw UsageError("config key '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

template <typename T, typename Fn>
std::vector<T> as_list(const json& v, const std::string& key, Fn convert) {
    std::vector<T> out;
    if (v.is_array()) {
        for (const auto& item : v) {
            out.push_back(convert(item, key));
        }
    } else {
        out.push_back(convert(v, key));
    }
    return out;
}

}  // namespace

const std::set<std::string>& config_keys() {
    static const std::set<std::string> keys = {
        "d_values", "m_values",   "m_fractions",  "trials",           "master_seed",
        "method",   "least_norm_objective",       "max_residual",     "pd_tolerance",
        "n_u",      "output",     "format",       "threads",          "record_wall_time",
        "verbosity"};
    return keys;
}

void load_config_text(const std::string& text, ExperimentConfig& cfg, std::set<std::string>& seen, int& verbosity) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw UsageError("config must be a flat JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!config_keys().count(key)) {
            throw UsageError("unknown config key '" + key + "'");
        }
        if (value.is_object()) {
            throw UsageError("config key '" + key + "' must not be a nested object");
        }
        if (key == "d_values") {
            cfg.d_values = as_list<std::size_t>(value, key, as_count);
        } else if (key == "m_values") {
            cfg.m_values = as_list<std::size_t>(value, key, as_count);
        } else if (key == "m_fractions") {
            cfg.m_fractions = as_list<double>(value, key, as_real);
        } else if (key == "trials") {
            cfg.trials = as_count(value, key);
        } else if (key == "master_seed") {
            if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
                throw UsageError("config key 'master_seed' must be a non-negative integer");
            }
            cfg.master_seed = value.get<std::uint64_t>();
        } else if (key == "method") {
            const auto method = parse_fit_method(as_string(value, key));
            if (!method) {
                throw UsageError("config key 'method' must be identity_perturbation or least_norm");
            }
            cfg.method = *method;
        } else if (key == "least_norm_objective") {
            const auto s = as_string(value, key);
            if (s == "frobenius") {
                cfg.fit_options.least_norm_objective = LeastNormObjective::frobenius;
            } else if (s == "frobenius_from_identity") {
                cfg.fit_options.least_norm_objective = LeastNormObjective::frobenius_from_identity;
            } else {
                throw UsageError("config key 'least_norm_objective' must be frobenius or frobenius_from_identity");
            }
        } else if (key == "max_residual") {
            cfg.fit_options.tolerances.max_residual = as_real(value, key);
        } else if (key == "pd_tolerance") {
            cfg.fit_options.tolerances.pd_tolerance = as_real(value, key);
        } else if (key == "n_u") {
            cfg.n_u = as_count(value, key);
        } else if (key == "output") {
            cfg.output_path = as_string(value, key);
        } else if (key == "format") {
            const auto s = as_string(value, key);
            if (s == "csv") {
                cfg.format = OutputFormat::csv;
            } else if (s == "json") {
                cfg.format = OutputFormat::json;
            } else {
                throw UsageError("config key 'format' must be csv or json");
            }
        } else if (key == "threads") {
            cfg.workers = as_count(value, key);
        } else if (key == "record_wall_time") {
            if (!value.is_boolean()) {
                throw UsageError("config key 'record_wall_time' must be a boolean");
            }
            cfg.record_wall_time = value.get<bool>();
        } else if (key == "verbosity") {
            verbosity = static_cast<int>(as_count(value, key));
        }
        seen.insert(key);
    }
}

void load_config_file(const std::string& path, ExperimentConfig& cfg, std::set<std::string>& seen, int& verbosity) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    load_config_text(text.str(), cfg, seen, verbosity);
}

}  // namespace ellipsoid_lab::cli
