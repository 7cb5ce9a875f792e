#pragma once

#include <string>

#include <json.hpp>

#include "chincl/certificate.hpp"
#include "chincl/channel.hpp"
#include "chincl/omp.hpp"

namespace chincl {

/// Channel files: JSON {"rows": n, "cols": m, "p": [[...], ...]} or CSV
/// with one comma-separated row per line. load_channel dispatches on a
/// leading '{'. Throws: parse_error (with line number for CSV), plus
/// validation errors.
Channel load_channel(const std::string& path);
Channel channel_from_json(const nlohmann::json& j);
Channel channel_from_csv_text(const std::string& text);
nlohmann::json channel_to_json(const Channel& k);
void save_channel_json(const Channel& k, const std::string& path);

nlohmann::json pure_to_json(const PureChannel& p);
PureChannel pure_from_json(const nlohmann::json& j);

nlohmann::json certificate_to_json(const InclusionCertificate& cert);
InclusionCertificate certificate_from_json(const nlohmann::json& j);
InclusionCertificate load_certificate(const std::string& path);
void save_certificate(const InclusionCertificate& cert, const std::string& path);

/// {"f": bool, "s1": int, "lambda": [int], "g": [real], "t_act": int,
///  "residue_inf": real}
nlohmann::json outcome_to_json(const OmpOutcome& out);

/// Shortest round-trip decimal form, deterministic across runs.
std::string format_double(double v);

}  // namespace chincl
