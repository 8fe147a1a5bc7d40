#pragma once

#include "sklimit/harness/config_io.hpp"
#include "sklimit/harness/digest.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#ifndef SKLIMIT_VERSION
#define SKLIMIT_VERSION "unknown"
#endif

namespace sklimit::harness {

struct OutputFile {
    std::string name;  // relative to the manifest's directory
    std::string sha256;
};

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::string config_hash;
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
    std::string version = SKLIMIT_VERSION;
    std::string started;
    std::string finished;
    std::vector<OutputFile> outputs;
};

[[nodiscard]] inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

[[nodiscard]] inline nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : m.outputs) files.push_back({{"file", f.name}, {"sha256", f.sha256}});
    return {{"format", "sklimit-manifest"}, {"version", 1},
            {"command", m.command},          {"artifact_version", m.version},
            {"config", m.config},            {"config_hash", m.config_hash},
            {"master_seed", m.master_seed},  {"workers", m.workers},
            {"started", m.started},          {"finished", m.finished},
            {"outputs", files}};
}

inline void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << manifest_to_json(m).dump(2) << '\n';
}

/// Names of outputs whose current digest differs from the recorded one
/// (missing files included). Empty when the manifest checks out.
[[nodiscard]] inline std::vector<std::string> verify_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    const auto j = nlohmann::json::parse(in);
    std::vector<std::string> bad;
    for (const auto& f : j.at("outputs")) {
        const auto name = f.at("file").get<std::string>();
        const auto file = path.parent_path() / name;
        if (!std::filesystem::exists(file) || sha256_file(file.string()) != f.at("sha256").get<std::string>()) {
            bad.push_back(name);
        }
    }
    return bad;
}

}  // namespace sklimit::harness
