#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

inline std::filesystem::path root() { return OOWM_FIXTURE_DIR; }

inline std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string diagram(const std::string& name) { return read(root() / "diagrams" / name); }

inline bool is_class_fixture(const std::filesystem::path& p) {
  return p.filename().string().starts_with("cls_");
}

inline std::vector<std::filesystem::path> diagram_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(root() / "diagrams"))
    if (e.path().extension() == ".puml") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fixtures
