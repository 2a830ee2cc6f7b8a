#include "fpomdp/model_io.hpp"

#include <fstream>
#include <sstream>

namespace fpomdp {

namespace {

using nlohmann::json;

std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& require(const json& doc, const char* key) {
  if (!doc.is_object()) throw ModelError("", "document must be an object");
  const auto it = doc.find(key);
  if (it == doc.end()) throw ModelError(key, "missing required field");
  return *it;
}

const json& require_array(const json& value, const std::string& path) {
  if (!value.is_array()) throw ModelError(path, "expected an array");
  return value;
}

double as_number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ModelError(path, "expected a number");
  return value.get<double>();
}

std::size_t as_index(const json& value, const std::string& path) {
  if (!value.is_number_integer() || (value.is_number_integer() && value.get<std::int64_t>() < 0)) {
    throw ModelError(path, "expected a non-negative integer");
  }
  return value.get<std::size_t>();
}

std::vector<double> as_numbers(const json& value, const std::string& path) {
  require_array(value, path);
  std::vector<double> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(as_number(value[i], at(path, i)));
  return out;
}

std::vector<std::string> as_identifiers(const json& value, const std::string& path) {
  require_array(value, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i].is_string()) {
      out.push_back(value[i].get<std::string>());
    } else if (value[i].is_number_integer()) {
      out.push_back(value[i].dump());
    } else {
      throw ModelError(at(path, i), "expected a string identifier");
    }
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

nlohmann::json parse_json_text(std::string_view text) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, column] = line_column(text, byte);
    std::string message = e.what();
    if (const auto colon = message.find(": "); colon != std::string::npos) message.erase(0, colon + 2);
    throw ParseError(line, column, message);
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str());
}

std::vector<std::vector<std::size_t>> index_lists_from_json(const nlohmann::json& value, const std::string& path) {
  require_array(value, path);
  std::vector<std::vector<std::size_t>> lists;
  for (std::size_t c = 0; c < value.size(); ++c) {
    const std::string inner = at(path, c);
    require_array(value[c], inner);
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < value[c].size(); ++k) members.push_back(as_index(value[c][k], at(inner, k)));
    lists.push_back(std::move(members));
  }
  return lists;
}

FactoredPomdp model_from_json(const nlohmann::json& doc) {
  PomdpDefinition def;
  def.num_vars = as_index(require(doc, "num_vars"), "num_vars");
  if (def.num_vars > kMaxVars || def.num_vars < 1) {
    throw ModelError("num_vars", "must be in [1, " + std::to_string(kMaxVars) + "], got " +
                                     std::to_string(def.num_vars));
  }
  def.actions = as_identifiers(require(doc, "actions"), "actions");
  def.observations = as_identifiers(require(doc, "observations"), "observations");

  const json& transition = require_array(require(doc, "transition"), "transition");
  for (std::size_t a = 0; a < transition.size(); ++a) {
    const std::string action_path = at("transition", a);
    require_array(transition[a], action_path);
    std::vector<VariableCpt> cpts;
    for (std::size_t v = 0; v < transition[a].size(); ++v) {
      const std::string cpt_path = at(action_path, v);
      const json& entry = transition[a][v];
      if (!entry.is_object()) throw ModelError(cpt_path, "expected an object with parents and table");
      VariableCpt cpt;
      const auto parents = entry.find("parents");
      if (parents == entry.end()) throw ModelError(cpt_path + ".parents", "missing required field");
      require_array(*parents, cpt_path + ".parents");
      for (std::size_t k = 0; k < parents->size(); ++k) {
        cpt.parents.push_back(as_index((*parents)[k], at(cpt_path + ".parents", k)));
      }
      const auto table = entry.find("table");
      if (table == entry.end()) throw ModelError(cpt_path + ".table", "missing required field");
      cpt.table = as_numbers(*table, cpt_path + ".table");
      cpts.push_back(std::move(cpt));
    }
    def.transition.push_back(std::move(cpts));
  }

  const json& observation_model = require_array(require(doc, "observation_model"), "observation_model");
  for (std::size_t s = 0; s < observation_model.size(); ++s) {
    def.observation_model.push_back(as_numbers(observation_model[s], at("observation_model", s)));
  }
  def.rewards = as_numbers(require(doc, "rewards"), "rewards");
  def.r_max = as_number(require(doc, "r_max"), "r_max");
  def.discount = as_number(require(doc, "discount"), "discount");
  def.initial_state = as_index(require(doc, "initial_state"), "initial_state");
  if (const auto classes = doc.find("classes"); classes != doc.end() && !classes->is_null()) {
    def.classes = index_lists_from_json(*classes, "classes");
  }
  return FactoredPomdp(std::move(def));
}

nlohmann::ordered_json model_to_json(const FactoredPomdp& model) {
  const PomdpDefinition& def = model.definition();
  nlohmann::ordered_json doc;
  doc["num_vars"] = def.num_vars;
  doc["actions"] = def.actions;
  doc["observations"] = def.observations;
  nlohmann::ordered_json transition = nlohmann::ordered_json::array();
  for (const auto& cpts : def.transition) {
    nlohmann::ordered_json per_action = nlohmann::ordered_json::array();
    for (const auto& cpt : cpts) {
      nlohmann::ordered_json entry;
      entry["parents"] = cpt.parents;
      entry["table"] = cpt.table;
      per_action.push_back(std::move(entry));
    }
    transition.push_back(std::move(per_action));
  }
  doc["transition"] = std::move(transition);
  doc["observation_model"] = def.observation_model;
  doc["rewards"] = def.rewards;
  doc["r_max"] = def.r_max;
  doc["discount"] = def.discount;
  doc["initial_state"] = def.initial_state;
  if (def.classes) doc["classes"] = *def.classes;
  return doc;
}

std::string serialize_model(const FactoredPomdp& model) { return model_to_json(model).dump(2) + "\n"; }

FactoredPomdp load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

void save_model(const FactoredPomdp& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_model(model);
}

}  // namespace fpomdp
