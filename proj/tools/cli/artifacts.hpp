#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ppl::cli {

// Plain CSV with a header row; numbers use %.12g so reruns diff cleanly.
class Csv {
 public:
  Csv(const std::string& path, const std::vector<std::string>& header);
  Csv& operator<<(double v);
  Csv& operator<<(const std::string& v);
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

class Artifacts {
 public:
  explicit Artifacts(std::string dir);

  const std::string& dir() const { return dir_; }
  std::string path(const std::string& name);  // records name
  Csv csv(const std::string& name, const std::vector<std::string>& header);
  void write_json(const std::string& name, const nlohmann::json& j);
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

std::string sha256_hex(const std::string& bytes);

// UTC, second resolution: 2026-10-15T21:59:03Z
std::string iso_timestamp();

}  // namespace ppl::cli
