#include "manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>

#include "imr/errors.hpp"
#include "imr/version.hpp"

namespace imr::cli {

std::string sha256_hex(const void* data, std::size_t len) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    if (EVP_Digest(data, len, md, &md_len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * md_len);
    for (unsigned int i = 0; i < md_len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file for hashing: " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(data.data(), data.size());
}

ManifestBuilder::ManifestBuilder(std::string command) {
    doc_["command"] = std::move(command);
    doc_["tool"] = kToolName;
    doc_["version"] = kVersion;
    doc_["inputs"] = nlohmann::json::array();
    doc_["outputs"] = nlohmann::json::array();
}

void ManifestBuilder::set_config(nlohmann::json config) { doc_["config"] = std::move(config); }

void ManifestBuilder::add_input(const std::string& path) {
    doc_["inputs"].push_back({{"path", path}, {"sha256", sha256_file(path)}});
}

void ManifestBuilder::add_output(const std::string& path) {
    doc_["outputs"].push_back({{"path", path}, {"sha256", sha256_file(path)}});
}

void ManifestBuilder::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write manifest: " + path);
    out << doc_.dump(2) << "\n";
}

} // namespace imr::cli
