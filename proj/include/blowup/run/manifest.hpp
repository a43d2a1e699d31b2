#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace blowup::run {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = "blowuplab 1.0.0";

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

struct FileHash {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::vector<std::string> argv;  // without the program name
    std::string command;
    std::string cwd;
    std::string out_dir;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<FileHash> inputs;
    std::vector<FileHash> outputs;  // paths relative to out_dir
    double wall_time = 0.0;
    nlohmann::json stats = nlohmann::json::object();
    std::string version = kVersion;
    int exit_code = 0;

    void add_input(const fs::path& p);
    void add_output(const fs::path& relative);  // hashed under out_dir

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
    void write(const fs::path& path) const;
    static RunManifest read(const fs::path& path);
};

}  // namespace blowup::run
