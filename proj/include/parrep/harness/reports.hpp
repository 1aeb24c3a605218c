#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace parrep {

/// One output row. CSV columns, in order:
///   algorithm,R,beta,t_corr,dt,Dt,t_stop,seed,rep,value,std,oracle,verdict
/// `dt` is the native step (0 for the skeleton driver), `Dt` the fragment
/// duration, `rep` the repetition index or, for aggregate rows, the number
/// of repetitions. `oracle` is empty when there is none. Reals are written
/// with 17 significant digits and a '.' decimal point.
struct ReportRow {
  std::string algorithm;
  int R = 1;
  double beta = 0.0;
  double t_corr = 0.0;
  double dt = 0.0;
  double Dt = 0.0;
  double t_stop = 0.0;
  std::uint64_t seed = 0;
  int rep = 0;
  double value = 0.0;
  double std = 0.0;
  std::optional<double> oracle{};
  std::string verdict;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

enum class ReportFormat { csv, json };

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kCsvHeader =
    "algorithm,R,beta,t_corr,dt,Dt,t_stop,seed,rep,value,std,oracle,verdict";

/// printf("%.17g") without locale: reads back to the same double.
std::string format_real(double x);

std::string to_csv(std::span<const ReportRow> rows);
std::vector<ReportRow> parse_csv(std::string_view text);

/// {"schema_version": 1, "kind": kind, "rows": [...]}
std::string to_json(std::span<const ReportRow> rows, std::string_view kind);
std::vector<ReportRow> parse_json(std::string_view text);

/// Writes `<out_dir>/<stem>.csv` or `.json` and returns the path.
std::filesystem::path emit_reports(std::span<const ReportRow> rows, ReportFormat format,
                                   const std::filesystem::path& out_dir, std::string_view stem);

}  // namespace parrep
