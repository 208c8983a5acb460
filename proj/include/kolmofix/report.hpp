#pragma once

#include <string>

#include <json.hpp>

#include "kolmofix/coeff.hpp"
#include "kolmofix/diagnostics.hpp"
#include "kolmofix/fixedpoint.hpp"
#include "kolmofix/frozen.hpp"
#include "kolmofix/lyapunov.hpp"

namespace kolmofix {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const SolveReport& r);
Json to_json(const CheckReport& r);
Json to_json(const SweepReport& r);
Json to_json(const AssumptionReport& r);
Json to_json(const RegularityReport& r);
Json to_json(const TrendReport& r);
Json to_json(const ResidualReport& r, const std::vector<TestFunction>& battery);

/// Writes {"schema_version", "timestamp", ...body} pretty-printed. Only the
/// timestamp differs between identical runs.
void write_report(const std::string& path, const Json& body);

/// iter,theta,distance,v_moment,residual
void write_iterates_csv(const std::string& path, const SolveReport& r);
/// param,gap
void write_trend_csv(const std::string& path, const TrendReport& r);

}  // namespace kolmofix
