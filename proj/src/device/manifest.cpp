#include "fleet/device/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "fleet/error.hpp"

namespace fleet::device {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) throw ConfigError("manifest." + field, what);
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> keys, const std::string& where)
{
    for (const auto& [key, value] : obj.items()) {
        const bool known = std::find(keys.begin(), keys.end(), key) != keys.end();
        if (!known) throw ConfigError("manifest." + where + (where.empty() ? "" : ".") + key, "unknown key");
    }
}

std::string checked_string(const json& node, const std::string& path)
{
    require(node.is_string(), path, "must be a string");
    auto value = node.get<std::string>();
    require(!value.empty(), path, "must not be empty");
    require(std::none_of(value.begin(), value.end(), [](unsigned char c) { return std::isspace(c) || c < 0x20; }),
            path, "must not contain whitespace");
    return value;
}

std::string string_field(const json& obj, const std::string& key, const std::string& path)
{
    require(obj.contains(key), path, "missing");
    return checked_string(obj.at(key), path);
}

bool reverse_dns(std::string_view name)
{
    if (name.find('.') == std::string_view::npos) return false;
    std::size_t start = 0;
    while (start <= name.size()) {
        auto end = name.find('.', start);
        if (end == std::string_view::npos) end = name.size();
        const auto part = name.substr(start, end - start);
        if (part.empty() || !std::isalpha(static_cast<unsigned char>(part.front()))) return false;
        for (unsigned char c : part)
            if (!std::isalnum(c) && c != '_') return false;
        start = end + 1;
    }
    return true;
}

// Shipped corpus. The JSON files under data/manifests carry the same content.
constexpr std::pair<std::string_view, std::string_view> kBuiltins[] = {
    {"skype", R"({
  "package": "com.skype.test",
  "apk_name": "Skype_8.45.apk",
  "version": "8.45",
  "activities": [
    {"name": "SplashActivity", "actions": ["android.intent.action.MAIN"]},
    {"name": "CallActivity", "actions": ["android.intent.action.CALL"]}
  ],
  "launch_activity": "CallActivity",
  "traffic_model": {"id": "voip_call", "params": {}}
})"},
    {"facebook", R"({
  "package": "com.facebook.katana",
  "apk_name": "Facebook_250.0.apk",
  "version": "250.0",
  "activities": [
    {"name": "FeedActivity", "actions": ["android.intent.action.MAIN", "android.intent.action.VIEW"]}
  ],
  "launch_activity": "FeedActivity",
  "traffic_model": {"id": "social_feed", "params": {}}
})"},
    {"twitter", R"({
  "package": "com.twitter.android",
  "apk_name": "Twitter_3.0.1.apk",
  "version": "3.0.1",
  "activities": [
    {"name": "StartActivity", "actions": ["android.intent.action.MAIN", "android.intent.action.VIEW"]},
    {"name": "ComposeActivity", "actions": ["android.intent.action.SEND"]}
  ],
  "launch_activity": "StartActivity",
  "traffic_model": {"id": "social_feed", "params": {"host": "api.twitter.test", "server_ip": "198.51.100.31"}}
})"},
    {"game", R"({
  "package": "com.arena.game",
  "apk_name": "Arena_1.2.apk",
  "version": "1.2",
  "activities": [
    {"name": "GameActivity", "actions": ["android.intent.action.MAIN"]}
  ],
  "launch_activity": "GameActivity",
  "traffic_model": {"id": "game_burst", "params": {}}
})"},
    {"unknown", R"({
  "package": "org.example.mystery",
  "apk_name": "Mystery_0.1.apk",
  "version": "0.1",
  "activities": [
    {"name": "MainActivity", "actions": ["android.intent.action.MAIN"]}
  ],
  "launch_activity": "MainActivity",
  "traffic_model": {"id": "unknown_app", "params": {}}
})"},
};

}  // namespace

const Activity* AppManifest::find_activity(std::string_view name) const
{
    for (const auto& a : activities)
        if (a.name == name) return &a;
    return nullptr;
}

AppManifest manifest_from_json(const json& doc)
{
    require(doc.is_object(), "", "must be an object");
    reject_unknown(doc, {"package", "apk_name", "version", "activities", "launch_activity", "traffic_model"}, "");

    AppManifest m;
    m.package = string_field(doc, "package", "package");
    require(reverse_dns(m.package), "package", "must be reverse-dns, e.g. com.example.app");
    m.apk_name = string_field(doc, "apk_name", "apk_name");
    m.version = string_field(doc, "version", "version");

    require(doc.contains("activities") && doc.at("activities").is_array(), "activities", "must be an array");
    require(!doc.at("activities").empty(), "activities", "must not be empty");
    std::set<std::string> names;
    for (std::size_t i = 0; i < doc.at("activities").size(); ++i) {
        const auto& entry = doc.at("activities").at(i);
        const auto path = "activities[" + std::to_string(i) + "]";
        require(entry.is_object(), path, "must be an object");
        reject_unknown(entry, {"name", "actions"}, path);
        Activity activity;
        activity.name = string_field(entry, "name", path + ".name");
        require(names.insert(activity.name).second, path + ".name", "duplicate activity");
        if (entry.contains("actions")) {
            require(entry.at("actions").is_array(), path + ".actions", "must be an array");
            for (std::size_t j = 0; j < entry.at("actions").size(); ++j)
                activity.actions.push_back(
                    checked_string(entry.at("actions").at(j), path + ".actions[" + std::to_string(j) + "]"));
        }
        m.activities.push_back(std::move(activity));
    }
    m.launch_activity = string_field(doc, "launch_activity", "launch_activity");
    require(m.find_activity(m.launch_activity) != nullptr, "launch_activity", "not among activities");

    require(doc.contains("traffic_model") && doc.at("traffic_model").is_object(), "traffic_model",
            "must be an object");
    const auto& tm = doc.at("traffic_model");
    reject_unknown(tm, {"id", "params"}, "traffic_model");
    const auto id_text = string_field(tm, "id", "traffic_model.id");
    const auto id = apps::parse_model_id(id_text);
    require(id.has_value(), "traffic_model.id", "unknown model '" + id_text + "'");
    try {
        m.model = apps::params_from_json(*id, tm.value("params", json::object()));
    } catch (const ConfigError& e) {
        throw ConfigError("manifest.traffic_model." + e.field(), e.reason());
    }
    return m;
}

AppManifest parse_manifest(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("manifest", std::string("not valid JSON: ") + e.what());
    }
    return manifest_from_json(doc);
}

AppManifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot read manifest");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_manifest(text.str());
}

json manifest_to_json(const AppManifest& m)
{
    json activities = json::array();
    for (const auto& a : m.activities) activities.push_back({{"name", a.name}, {"actions", a.actions}});
    return {
        {"package", m.package},
        {"apk_name", m.apk_name},
        {"version", m.version},
        {"activities", std::move(activities)},
        {"launch_activity", m.launch_activity},
        {"traffic_model", {{"id", apps::to_string(apps::model_of(m.model))}, {"params", apps::params_to_json(m.model)}}},
    };
}

std::string serialize_manifest(const AppManifest& manifest)
{
    return manifest_to_json(manifest).dump();
}

std::optional<AppManifest> builtin_manifest(std::string_view name)
{
    for (const auto& [key, text] : kBuiltins)
        if (key == name) return parse_manifest(text);
    return std::nullopt;
}

std::vector<std::string> builtin_manifest_names()
{
    std::vector<std::string> names;
    for (const auto& [key, text] : kBuiltins) names.emplace_back(key);
    return names;
}

}  // namespace fleet::device
