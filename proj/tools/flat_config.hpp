#pragma once

#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

/// Reads either a flat JSON object or key=value lines. Keys that are not
/// global options are routed to the active subcommand, so the same file works
/// with or without a [section] header. A "command" key must name the active
/// subcommand.
class FlatConfig : public CLI::ConfigBase {
  public:
    FlatConfig(std::string subcommand, std::set<std::string> global_keys)
        : subcommand_(std::move(subcommand)), global_(std::move(global_keys)) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        const std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
        const auto first = text.find_first_not_of(" \t\r\n");
        std::vector<CLI::ConfigItem> items;
        if (first != std::string::npos && text[first] == '{') {
            items = from_json(text);
        } else {
            std::istringstream s(text);
            items = CLI::ConfigBase::from_config(s);
        }
        std::vector<CLI::ConfigItem> out;
        for (auto& item : items) {
            if (item.parents.empty() && item.name == "command") {
                const std::string v = item.inputs.empty() ? "" : item.inputs.front();
                if (v != subcommand_)
                    throw CLI::ConfigError("config key 'command' is '" + v + "' but the subcommand is '" +
                                           subcommand_ + "'");
                continue;
            }
            if (item.parents.empty() && item.name == "config")
                throw CLI::ConfigError("config key 'config' is not allowed");
            if (item.parents.empty() && !global_.count(item.name) && !subcommand_.empty())
                item.parents = {subcommand_};
            out.push_back(std::move(item));
        }
        return out;
    }

  private:
    static std::vector<CLI::ConfigItem> from_json(const std::string& text) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConfigError("config JSON must be an object");
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(key, v));
            } else {
                item.inputs.push_back(scalar(key, value));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

    static std::string scalar(const std::string& key, const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConfigError("config key '" + key + "' must hold a scalar or a flat array");
    }

    std::string subcommand_;
    std::set<std::string> global_;
};
