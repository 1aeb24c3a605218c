#include "parrep/harness/reports.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <system_error>

#include "parrep/errors.hpp"

namespace parrep {
namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

template <class T>
T read_number(const std::string& s, std::string_view column) {
  T x{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw Error("report parse: bad value '" + s + "' in column " + std::string(column));
  }
  return x;
}

}  // namespace

std::string format_real(double x) {
  std::array<char, 64> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error("format_real: conversion failed");
  return std::string(buf.data(), p);
}

std::string to_csv(std::span<const ReportRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += csv_field(r.algorithm) + ',' + std::to_string(r.R) + ',' + format_real(r.beta) + ',' +
           format_real(r.t_corr) + ',' + format_real(r.dt) + ',' + format_real(r.Dt) + ',' +
           format_real(r.t_stop) + ',' + std::to_string(r.seed) + ',' + std::to_string(r.rep) +
           ',' + format_real(r.value) + ',' + format_real(r.std) + ',' +
           (r.oracle ? format_real(*r.oracle) : std::string()) + ',' + csv_field(r.verdict) +
           '\n';
  }
  return out;
}

std::vector<ReportRow> parse_csv(std::string_view text) {
  std::vector<ReportRow> rows;
  bool header = true;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    start = end + 1;
    if (header) {
      if (line != kCsvHeader) throw Error("report parse: unexpected CSV header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) throw Error("report parse: expected 13 CSV fields");
    ReportRow r;
    r.algorithm = f[0];
    r.R = read_number<int>(f[1], "R");
    r.beta = read_number<double>(f[2], "beta");
    r.t_corr = read_number<double>(f[3], "t_corr");
    r.dt = read_number<double>(f[4], "dt");
    r.Dt = read_number<double>(f[5], "Dt");
    r.t_stop = read_number<double>(f[6], "t_stop");
    r.seed = read_number<std::uint64_t>(f[7], "seed");
    r.rep = read_number<int>(f[8], "rep");
    r.value = read_number<double>(f[9], "value");
    r.std = read_number<double>(f[10], "std");
    if (!f[11].empty()) r.oracle = read_number<double>(f[11], "oracle");
    r.verdict = f[12];
    rows.push_back(std::move(r));
  }
  if (header) throw Error("report parse: missing CSV header");
  return rows;
}

std::string to_json(std::span<const ReportRow> rows, std::string_view kind) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["kind"] = std::string(kind);
  auto& arr = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["algorithm"] = r.algorithm;
    j["R"] = r.R;
    j["beta"] = r.beta;
    j["t_corr"] = r.t_corr;
    j["dt"] = r.dt;
    j["Dt"] = r.Dt;
    j["t_stop"] = r.t_stop;
    j["seed"] = r.seed;
    j["rep"] = r.rep;
    j["value"] = r.value;
    j["std"] = r.std;
    j["oracle"] = r.oracle ? nlohmann::ordered_json(*r.oracle) : nlohmann::ordered_json(nullptr);
    j["verdict"] = r.verdict;
    arr.push_back(std::move(j));
  }
  return doc.dump(2) + '\n';
}

std::vector<ReportRow> parse_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error("report parse: unsupported schema_version");
    }
    std::vector<ReportRow> rows;
    for (const auto& j : doc.at("rows")) {
      ReportRow r;
      r.algorithm = j.at("algorithm").get<std::string>();
      r.R = j.at("R").get<int>();
      r.beta = j.at("beta").get<double>();
      r.t_corr = j.at("t_corr").get<double>();
      r.dt = j.at("dt").get<double>();
      r.Dt = j.at("Dt").get<double>();
      r.t_stop = j.at("t_stop").get<double>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.rep = j.at("rep").get<int>();
      r.value = j.at("value").get<double>();
      r.std = j.at("std").get<double>();
      if (!j.at("oracle").is_null()) r.oracle = j.at("oracle").get<double>();
      r.verdict = j.at("verdict").get<std::string>();
      rows.push_back(std::move(r));
    }
    return rows;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("report parse: ") + e.what());
  }
}

std::filesystem::path emit_reports(std::span<const ReportRow> rows, ReportFormat format,
                                   const std::filesystem::path& out_dir, std::string_view stem) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  const auto path =
      out_dir / (std::string(stem) + (format == ReportFormat::csv ? ".csv" : ".json"));
  const std::string body = format == ReportFormat::csv ? to_csv(rows) : to_json(rows, stem);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  out.close();
  if (!out) throw Error("write failed for '" + path.string() + "'");
  return path;
}

}  // namespace parrep
