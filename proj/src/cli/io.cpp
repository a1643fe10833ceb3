#include "io.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "nehari/errors.hpp"

#ifndef NEHARI_VERSION
#define NEHARI_VERSION "0.0.0"
#endif

namespace nehari::cli {

std::string fmt(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("sha256: cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

OutputDir::OutputDir(const RunConfig& config, std::string command)
    : dir_(config.out_dir),
      command_(std::move(command)),
      config_text_(emit_config(config)),
      started_(utc_now()) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void OutputDir::write(const std::string& name, const std::string& content) {
  const auto target = dir_ / name;
  const auto tmp = dir_ / (name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
  std::erase_if(files_, [&](const Entry& e) { return e.name == name; });
  files_.push_back({name, content.size(), sha256_hex(content)});
}

void OutputDir::finish() {
  nlohmann::json files = nlohmann::json::array();
  for (const Entry& e : files_)
    files.push_back({{"path", e.name}, {"bytes", e.bytes}, {"sha256", e.sha256}});
  nlohmann::json m = {{"artifact", "nehari"},
                      {"version", NEHARI_VERSION},
                      {"command", command_},
                      {"config", nlohmann::json::parse(config_text_)},
                      {"config_sha256", sha256_hex(config_text_)},
                      {"started", started_},
                      {"finished", utc_now()},
                      {"files", files}};
  const std::string text = m.dump(2) + "\n";
  std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("cannot write manifest in '" + dir_.string() + "'");
}

std::string config_digest(const RunConfig& config) {
  RunConfig c = config;
  c.out_dir = "-";
  return sha256_hex(emit_config(c));
}

std::string csv_preamble(const RunConfig& config, const std::string& title) {
  const auto& md = config.model;
  const auto& cp = config.coupling;
  std::ostringstream s;
  s << "# " << title << "\n"
    << "# config_sha256: " << config_digest(config) << "\n"
    << "# model: N=" << md.N << " m=" << md.m << " n=" << md.n << " M=" << md.M << "\n"
    << "# coupling: mu1=" << fmt(cp.mu1) << " mu2=" << fmt(cp.mu2) << " alpha=" << fmt(cp.alpha)
    << " beta=" << fmt(cp.beta) << "\n"
    << "# units: theta in radians; energies dimensionless (plane-side D^{1,2} scale)\n";
  return s.str();
}

}  // namespace nehari::cli
