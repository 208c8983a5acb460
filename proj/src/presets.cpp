#include <utility>

#include "kolmofix/error.hpp"
#include "kolmofix/problem.hpp"

namespace kolmofix {
namespace {

// First comment line of the file.
std::string summary_of(const std::string& text) {
  const auto hash = text.find('#');
  if (hash == std::string::npos) return "";
  const auto end = text.find('\n', hash);
  std::string s = text.substr(hash + 1, end == std::string::npos ? std::string::npos : end - hash - 1);
  const auto b = s.find_first_not_of(' ');
  return b == std::string::npos ? "" : s.substr(b);
}

std::vector<PresetInfo> build() {
  const std::pair<const char*, const char*> raw[] = {
#include "presets_data.inc"
  };
  std::vector<PresetInfo> out;
  for (const auto& [name, text] : raw) out.push_back({name, summary_of(text), text});
  return out;
}

}  // namespace

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> all = build();
  return all;
}

const PresetInfo& preset(const std::string& name) {
  for (const PresetInfo& p : presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const PresetInfo& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown example '" + name + "' (known: " + known + ")");
}

}  // namespace kolmofix
