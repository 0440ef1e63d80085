#pragma once

#include <string>
#include <utility>
#include <vector>

namespace build {

using Partitions = std::vector<std::pair<std::string, std::vector<std::string>>>;

inline std::string activity(const Partitions& parts) {
  std::string s = "@startuml\nstart\n";
  for (const auto& [name, actions] : parts) {
    s += "partition \"" + name + "\" {\n";
    for (const auto& a : actions) s += "  :" + a + ";\n";
    s += "}\n";
  }
  s += "stop\n@enduml";
  return s;
}

inline std::string envelope(const std::string& answer, const std::string& think = "plan") {
  return "<think>" + think + "</think><answer>" + answer + "</answer>";
}

inline Partitions three(std::vector<std::string> messy, std::vector<std::string> priority,
                        std::vector<std::string> steps) {
  return {{"Messy Areas", std::move(messy)},
          {"Priority Order", std::move(priority)},
          {"Specific Steps", std::move(steps)}};
}

}  // namespace build
