#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcp/distributions.hpp"

namespace rcp {

// Config-driven experiment description: `key = value` lines with `#`
// comments, overridable from the command line.  Unknown keys are rejected
// against the per-command key list; every resolved key (defaults included)
// is echoed into the output header, so outputs are self-describing.
class ExperimentSpec {
public:
    static const std::vector<std::string>& commands();

    // text: config file body; overrides: already split key=value pairs
    static ExperimentSpec parse(const std::string& command, const std::string& text,
                                const std::vector<std::string>& overrides);

    // rebuilds a spec from the `# key = value` header of an output file
    static ExperimentSpec from_output_header(const std::string& csv_text);

    const std::string& command() const { return command_; }

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key) const;  // colon-separated
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

    InterarrivalLaw get_law() const;  // from the `law` key

    std::uint64_t seed() const;
    std::size_t replicas(std::size_t fallback) const;
    std::string out_path() const;

    // records a resolved default so it shows up in the output header
    void resolve(const std::string& key, const std::string& value) const;
    // all keys in deterministic order, defaults included
    std::map<std::string, std::string> resolved() const;

private:
    std::string command_;
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, std::string> defaults_used_;
};

InterarrivalLaw parse_law(const std::string& text);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exit codes: 0 ok, 2 config error, 3 runtime resource error, 4 I/O error
int run_command(const ExperimentSpec& spec);

}  // namespace rcp
