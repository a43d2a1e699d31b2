#include "blowup/run/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace blowup::run {

using nlohmann::json;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

void RunManifest::add_input(const fs::path& p) { inputs.push_back({p.string(), sha256_file(p)}); }

void RunManifest::add_output(const fs::path& relative) {
    outputs.push_back({relative.generic_string(), sha256_file(fs::path(out_dir) / relative)});
}

json RunManifest::to_json() const {
    json j;
    j["format"] = "blowuplab-manifest";
    j["version"] = version;
    j["command"] = command;
    j["argv"] = argv;
    j["cwd"] = cwd;
    j["out_dir"] = out_dir;
    j["parameters"] = parameters;
    auto files = [](const std::vector<FileHash>& v) {
        json a = json::array();
        for (const auto& f : v) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
        return a;
    };
    j["inputs"] = files(inputs);
    j["outputs"] = files(outputs);
    j["wall_time_s"] = wall_time;
    j["stats"] = stats;
    j["exit_code"] = exit_code;
    return j;
}

RunManifest RunManifest::from_json(const json& j) {
    if (j.value("format", "") != "blowuplab-manifest") throw std::runtime_error("not a run manifest");
    RunManifest m;
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.cwd = j.at("cwd").get<std::string>();
    m.out_dir = j.at("out_dir").get<std::string>();
    m.parameters = j.at("parameters");
    for (const auto& f : j.at("inputs")) m.inputs.push_back({f.at("path"), f.at("sha256")});
    for (const auto& f : j.at("outputs")) m.outputs.push_back({f.at("path"), f.at("sha256")});
    m.wall_time = j.at("wall_time_s").get<double>();
    m.stats = j.at("stats");
    m.exit_code = j.value("exit_code", 0);
    return m;
}

void RunManifest::write(const fs::path& path) const {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json().dump(2) << '\n';
}

RunManifest RunManifest::read(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return from_json(json::parse(in));
}

}  // namespace blowup::run
