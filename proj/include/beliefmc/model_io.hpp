#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "beliefmc/model.hpp"

namespace beliefmc {

// Malformed model file: bad JSON, wrong types, unknown keys, references to
// undeclared entities.  Semantic rule violations (KD45, totality) are left
// to Model::validation().
class LoadError : public std::runtime_error {
 public:
  explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

Model model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const Model& m);

Model load_model_file(const std::string& path);
void save_model_file(const Model& m, const std::string& path);

}  // namespace beliefmc
