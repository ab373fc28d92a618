#pragma once

#include <string>

#include <json.hpp>

namespace imr::cli {

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_file(const std::string& path);

/// Run record written next to the primary output. Carries everything
/// needed to reproduce the run byte-identically: the subcommand, the
/// semantic configuration, and content hashes of inputs and outputs.
/// Deliberately excludes wall-clock data and worker counts.
class ManifestBuilder {
public:
    explicit ManifestBuilder(std::string command);
    void set_config(nlohmann::json config);
    void add_input(const std::string& path);
    void add_output(const std::string& path);
    void write(const std::string& path) const;

private:
    nlohmann::json doc_;
};

} // namespace imr::cli
