#pragma once

#include <string>
#include <vector>

#include "growthdyn/config.hpp"

namespace growthdyn {

/// Process exit statuses of the command-line front end.
enum ExitStatus : int {
  kExitPass = 0,
  kExitFailure = 1,  // failed verification or falsification record
  kExitUsage = 2,    // schema violation
  kExitUnsupported = 3,
  kExitRuntime = 4,  // numeric or input error while running
};

/// Dense grid emitted next to the JSON report when the format is json+csv.
struct CsvTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  Json document;
  bool pass = true;
  std::vector<CsvTable> tables;
};

/// Runs a normalized config. The document holds the config echo, results,
/// provenance (version, wall clock, tolerances) and a verdict summary; only
/// provenance differs between reruns.
Report run(const Json& config);

/// Writes report.json (and CSV tables for json+csv) into the output directory.
void write_report(const Report& report, const std::string& dir, const std::string& format);

std::string to_csv(const CsvTable& table);

Json to_json(const VerificationReport& report);
Json to_json(const ComparisonVerdict& verdict);
Json to_json(const SpectrumEstimate& estimate);
Json to_json(const BohlExponents& exponents);
Json to_json(const LimitProbeReport& report);
Json to_json(const IntegrabilityReport& report);
Json to_json(const LimitClassification& classification);
Json to_json(const SubbundleReport& report);
/// Finite values as numbers, infinities as "+inf"/"-inf".
Json to_json(const ExtendedReal& value);

}  // namespace growthdyn
