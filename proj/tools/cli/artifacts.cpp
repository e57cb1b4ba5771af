#include "artifacts.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>

#include "ppl/error.hpp"

namespace ppl::cli {

Csv::Csv(const std::string& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
  if (!out_) fail(ErrorCode::Io, "cannot write " + path);
  for (const auto& h : header) *this << h;
  end_row();
}

Csv& Csv::operator<<(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return *this << std::string(buf);
}

Csv& Csv::operator<<(const std::string& v) {
  if (!first_) out_ << ',';
  out_ << v;
  first_ = false;
  return *this;
}

void Csv::end_row() {
  out_ << '\n';
  first_ = true;
}

Artifacts::Artifacts(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory " + dir_ + ": " + ec.message());
}

std::string Artifacts::path(const std::string& name) {
  files_.push_back(name);
  return (std::filesystem::path(dir_) / name).string();
}

Csv Artifacts::csv(const std::string& name, const std::vector<std::string>& header) { return Csv(path(name), header); }

void Artifacts::write_json(const std::string& name, const nlohmann::json& j) {
  std::ofstream out(path(name), std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + name);
  out << j.dump(2) << '\n';
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    fail(ErrorCode::Io, "sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string iso_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ppl::cli
