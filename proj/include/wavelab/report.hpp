#pragma once

#include "wavelab/blowup.hpp"
#include "wavelab/harness.hpp"
#include "wavelab/picard.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace wavelab {

using Json = nlohmann::ordered_json;

/// Header plus one row per record: eps,T_numeric,T_extrapolated,h,threshold,censored
std::string sweep_csv(std::span<const BlowupRecord> records);

/// Header plus one row: slope,stderr,r_squared,theory_slope
std::string fit_csv(const ScalingFit& fit);

/// Header plus one row per stored node: x,t,u
std::string solution_csv(const LatticeSolution& solution);

Json to_json(const BlowupRecord& r);
Json to_json(const ScalingFit& f);
Json to_json(const EnvelopeAuditEntry& e);
Json to_json(const SeedAudit& s);
Json to_json(const SandwichEntry& s);
Json to_json(const ExistenceCertificate& c);

/// Full blow-up ledger for (p, a, c0, eps): E, F, k, B, eps_cap, S_inf, log C_1,
/// upper bound and the regime flag.
Json constants_ledger(double p, double a, double c0, double eps);

/// One compact JSON document per line.
std::string json_lines(std::span<const Json> docs);

/// Log-log scatter of (eps, T), or (eps, phi(T)) for a = 0: one circle per
/// uncensored record and two lines, the fit and the theory slope through the
/// data centroid.
std::string scatter_svg(std::span<const BlowupRecord> records, const ScalingFit& fit);

/// Writes text to path; throws IoError when the file cannot be written.
void write_text(const std::string& path, const std::string& text);

}  // namespace wavelab
