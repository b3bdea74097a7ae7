#pragma once

#include "hcr/engine.hpp"
#include "hcr/error.hpp"

#include <filesystem>
#include <string>

namespace hcr {

inline constexpr int kScenarioVersion = 1;

/// Parse or schema failure with a 1-based source position (0 when unknown).
class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& source, int line, int column, const std::string& message);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct ScenarioFile {
  int version = kScenarioVersion;
  Scenario scenario;
  std::string output_dir;  ///< empty: chosen by the caller
};

ScenarioFile parse_scenario(const std::string& text, const std::string& source = "<input>");
ScenarioFile load_scenario(const std::filesystem::path& path);

/// YAML text that parses back to an identical ScenarioFile. Custom goals are
/// not representable and throw InvalidArgument.
std::string serialize_scenario(const ScenarioFile& file);

bool scenarios_equal(const ScenarioFile& a, const ScenarioFile& b);

}  // namespace hcr
