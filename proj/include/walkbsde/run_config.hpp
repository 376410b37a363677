#pragma once

#include <string>
#include <vector>

namespace walkbsde {

/// One study invocation: a command plus every knob, with a canonical text
/// form. Parsing the canonical form reproduces it byte for byte, and the
/// output directory is stamped with its content hash, so identical configs
/// land in identical places.
struct RunConfig {
    std::string command = "rates";  // solve|rates|rio|holder|stability|regularity|list
    std::string problem = "holder-g";
    double eps = 0.5;
    double scale = 1.0;
    double lambda = 1.0;
    double mu = 0.0;
    double alpha = 0.25;
    double horizon = 1.0;
    double x0 = 0.0;
    std::vector<long> n_list = {16, 64, 256, 1024};
    std::vector<double> times = {0.5};
    std::vector<double> r_list = {1.0};
    std::vector<std::string> targets = {"pointwise_u", "law_Y"};
    std::string oracle = "auto";
    long quantiles = 1000000;
    int quad_nodes = 400;
    std::vector<double> sizes = {1e-3, 1e-2, 1e-1};
    std::string out_dir;  // empty: $WALKBSDE_OUT or ./out
    bool plot = false;

    std::string canonical() const;
    /// Hash of the canonical form minus the presentation-only keys (out,
    /// plot); names the run-stamped output directory.
    std::string content_hash() const;
};

/// Parses "key = value" lines (# comments allowed). Unknown keys and
/// malformed numbers are rejected with the offending token named.
RunConfig parse_config_text(const std::string& text);

/// Applies one key=value assignment (flag override path shares the parser).
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

/// Post-parse validation: known command, known problem id, and the solver
/// contraction precondition for every n (the message names the minimal
/// admissible n).
void validate_config(const RunConfig& config);

}  // namespace walkbsde
