#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "growthdyn/dichotomy.hpp"
#include "growthdyn/growth_rate.hpp"
#include "growthdyn/hull.hpp"
#include "growthdyn/linear_system.hpp"
#include "growthdyn/spectrum.hpp"

namespace growthdyn {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kVersion = "0.1.0";

const std::vector<std::string>& commands();

/// Every numeric default in one place. normalize_config writes the merged
/// table back into the config, so a report always shows what was used.
Json default_numerics();

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> window_scale;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

/// Validates against the schema and materializes defaults. Throws UsageError
/// naming the offending field. Relative CSV paths resolve against base_dir.
Json normalize_config(const Json& raw, const CliOverrides& overrides = {}, const std::string& base_dir = {});

GrowthRate parse_rate(const Json& j, const std::string& path);
Json rate_to_json(const GrowthRate& rate);

LinearSystem parse_system(const Json& j, const std::string& path);
Json system_to_json(const LinearSystem& system);

DichotomyCertificate parse_certificate(const Json& j, const std::string& path);
Json certificate_to_json(const DichotomyCertificate& cert);
GrowthCertificate parse_growth_certificate(const Json& j, const std::string& path);
Json growth_certificate_to_json(const GrowthCertificate& cert);

/// Option structs from a normalized numerics table.
PairGridShape pair_grid_options(const Json& numerics);
VerifyOptions verify_options(const Json& numerics, const LinearSystem& system);
EvolutionOptions evolution_options(const Json& numerics);
EvolutionMethod evolution_method(const Json& numerics);
WeakComparisonOptions weak_options(const Json& numerics);
StrongComparisonOptions strong_options(const Json& numerics);
ClassifyOptions classify_options(const Json& numerics);
TranslatedLimitOptions limit_probe_options(const Json& numerics);
FitOptions fit_options(const Json& numerics, const LinearSystem& system);
BohlOptions bohl_options(const Json& numerics);
SubbundleOptions subbundle_options(const Json& numerics);
ClassificationConfig hull_config(const Json& numerics, const LinearSystem& system);

}  // namespace growthdyn
