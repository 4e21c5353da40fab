#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fleet/apps/model.hpp"

namespace fleet::device {

struct Activity {
    std::string name;
    std::vector<std::string> actions;

    bool operator==(const Activity&) const = default;
};

struct AppManifest {
    std::string package;  // reverse-dns, e.g. com.twitter.android
    std::string apk_name;
    std::string version;
    std::vector<Activity> activities;
    std::string launch_activity;
    apps::ModelParams model;

    const Activity* find_activity(std::string_view name) const;
    bool operator==(const AppManifest&) const = default;
};

// Strict: unknown keys, missing fields, a launch activity not listed, an
// unknown traffic model or bad model parameters all throw ConfigError whose
// field is rooted at "manifest".
AppManifest manifest_from_json(const nlohmann::json& doc);
AppManifest parse_manifest(std::string_view text);
AppManifest load_manifest(const std::filesystem::path& path);

// Parameters are written in full, so parse(serialize(m)) == m.
nlohmann::json manifest_to_json(const AppManifest& manifest);
std::string serialize_manifest(const AppManifest& manifest);

// Shipped corpus addressable by short name: skype, facebook, twitter, game,
// unknown.
std::optional<AppManifest> builtin_manifest(std::string_view name);
std::vector<std::string> builtin_manifest_names();

struct Intent {
    std::optional<std::string> action;
    std::optional<std::pair<std::string, std::string>> component;  // package, activity
    std::map<std::string, std::string> extras;
};

}  // namespace fleet::device
