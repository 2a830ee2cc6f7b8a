#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "fpomdp/model.hpp"

namespace fpomdp {

/// Malformed JSON text. Carries the 1-based line and column of the failure.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                           message),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses JSON text, converting library errors into ParseError.
nlohmann::json parse_json_text(std::string_view text);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Builds a model from a parsed document. Type and shape errors are reported
/// as ModelError with a path into the document.
FactoredPomdp model_from_json(const nlohmann::json& doc);
nlohmann::ordered_json model_to_json(const FactoredPomdp& model);

FactoredPomdp load_model(const std::filesystem::path& path);
void save_model(const FactoredPomdp& model, const std::filesystem::path& path);
std::string serialize_model(const FactoredPomdp& model);

/// Reads a list of lists of variable indices (the `classes` layout).
std::vector<std::vector<std::size_t>> index_lists_from_json(const nlohmann::json& value, const std::string& path);

}  // namespace fpomdp
