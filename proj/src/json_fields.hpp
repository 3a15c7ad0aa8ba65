#pragma once

// Shared strict-JSON helpers for run configs and sweep grids.

#include "mappereeg/config.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace mappereeg::detail {

using nlohmann::json;

void require_object(const json& j, const std::string& where);
void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

template <typename T>
T get_field(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(where + "." + key + ": " + e.what());
  }
}

LensConfig lens_from_json(const json& j);
json lens_to_json(const LensConfig& lens);
DbscanConfig dbscan_from_json(const json& j);
json dbscan_to_json(const DbscanConfig& cfg);

}  // namespace mappereeg::detail
