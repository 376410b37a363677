#include "walkbsde/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "walkbsde/problem.hpp"

namespace walkbsde {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt(v[i]);
    }
    return out;
}

std::string join_longs(const std::vector<long>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_strings(const std::vector<std::string>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i];
    }
    return out;
}

double parse_double(const std::string& key, const std::string& token) {
    size_t used = 0;
    double v;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed numeric value '" + token + "' for key '" + key +
                                    "'");
    }
    if (used != token.size() || !std::isfinite(v))
        throw std::invalid_argument("malformed numeric value '" + token + "' for key '" + key +
                                    "'");
    return v;
}

long parse_long(const std::string& key, const std::string& token) {
    size_t used = 0;
    long v;
    try {
        v = std::stol(token, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed integer value '" + token + "' for key '" + key +
                                    "'");
    }
    if (used != token.size())
        throw std::invalid_argument("malformed integer value '" + token + "' for key '" + key +
                                    "'");
    return v;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

std::string RunConfig::canonical() const {
    std::string out;
    out += "alpha=" + fmt(alpha) + "\n";
    out += "command=" + command + "\n";
    out += "eps=" + fmt(eps) + "\n";
    out += "horizon=" + fmt(horizon) + "\n";
    out += "lambda=" + fmt(lambda) + "\n";
    out += "mu=" + fmt(mu) + "\n";
    out += "n=" + join_longs(n_list) + "\n";
    out += "oracle=" + oracle + "\n";
    out += "out=" + out_dir + "\n";
    out += "plot=" + std::string(plot ? "true" : "false") + "\n";
    out += "problem=" + problem + "\n";
    out += "quad_nodes=" + std::to_string(quad_nodes) + "\n";
    out += "quantiles=" + std::to_string(quantiles) + "\n";
    out += "r=" + join_doubles(r_list) + "\n";
    out += "scale=" + fmt(scale) + "\n";
    out += "sizes=" + join_doubles(sizes) + "\n";
    out += "targets=" + join_strings(targets) + "\n";
    out += "times=" + join_doubles(times) + "\n";
    out += "x0=" + fmt(x0) + "\n";
    return out;
}

std::string RunConfig::content_hash() const {
    // FNV-1a 64 over the canonical form, skipping the presentation-only keys
    // (out, plot): the same study lands in the same stamped directory no
    // matter where the tree is rooted.
    unsigned long long hash = 14695981039346656037ULL;
    std::stringstream ss(canonical());
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("out=", 0) == 0 || line.rfind("plot=", 0) == 0) continue;
        for (unsigned char c : line) {
            hash ^= c;
            hash *= 1099511628211ULL;
        }
        hash ^= '\n';
        hash *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", hash);
    return buf;
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "command") {
        config.command = value;
    } else if (key == "problem") {
        config.problem = value;
    } else if (key == "eps") {
        config.eps = parse_double(key, value);
    } else if (key == "scale") {
        config.scale = parse_double(key, value);
    } else if (key == "lambda") {
        config.lambda = parse_double(key, value);
    } else if (key == "mu") {
        config.mu = parse_double(key, value);
    } else if (key == "alpha") {
        config.alpha = parse_double(key, value);
    } else if (key == "horizon") {
        config.horizon = parse_double(key, value);
    } else if (key == "x0") {
        config.x0 = parse_double(key, value);
    } else if (key == "n") {
        config.n_list.clear();
        for (const auto& tok : split_list(value)) config.n_list.push_back(parse_long(key, tok));
    } else if (key == "times") {
        config.times.clear();
        for (const auto& tok : split_list(value)) config.times.push_back(parse_double(key, tok));
    } else if (key == "r") {
        config.r_list.clear();
        for (const auto& tok : split_list(value)) config.r_list.push_back(parse_double(key, tok));
    } else if (key == "targets") {
        config.targets = split_list(value);
    } else if (key == "oracle") {
        config.oracle = value;
    } else if (key == "quantiles") {
        config.quantiles = parse_long(key, value);
    } else if (key == "quad_nodes") {
        config.quad_nodes = static_cast<int>(parse_long(key, value));
    } else if (key == "sizes") {
        config.sizes.clear();
        for (const auto& tok : split_list(value)) config.sizes.push_back(parse_double(key, tok));
    } else if (key == "out") {
        config.out_dir = value;
    } else if (key == "plot") {
        if (value == "true" || value == "1")
            config.plot = true;
        else if (value == "false" || value == "0")
            config.plot = false;
        else
            throw std::invalid_argument("malformed boolean '" + value + "' for key 'plot'");
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line without '=': " + stripped);
        apply_config_entry(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return config;
}

void validate_config(const RunConfig& config) {
    static const std::vector<std::string> commands = {"solve",     "rates",      "rio",
                                                      "holder",    "stability",  "regularity",
                                                      "list"};
    if (std::find(commands.begin(), commands.end(), config.command) == commands.end())
        throw std::invalid_argument("unknown command '" + config.command + "'");
    if (config.command == "list") return;

    if (config.command != "rio") {
        ProblemParams params;
        params.eps = config.eps;
        params.scale = config.scale;
        params.lambda = config.lambda;
        params.mu = config.mu;
        params.alpha = config.alpha;
        params.horizon = config.horizon;
        params.x0 = config.x0;
        ProblemSpec problem = make_problem(config.problem, params);  // rejects unknown ids

        double lip = problem.generator.norm_y;
        for (long n : config.n_list) {
            if (n < 1) throw std::invalid_argument("n must be positive");
            double h = config.horizon / static_cast<double>(n);
            if (h * lip > 0.5 + 1e-12) {
                long minimal = static_cast<long>(std::ceil(2.0 * config.horizon * lip - 1e-9));
                throw std::invalid_argument(
                    "n = " + std::to_string(n) + " violates the contraction precondition h ||f_y|| <= 1/2; "
                    "minimal valid n = " + std::to_string(minimal));
            }
        }
    }
    if (config.n_list.empty()) throw std::invalid_argument("empty n list");
}

}  // namespace walkbsde
