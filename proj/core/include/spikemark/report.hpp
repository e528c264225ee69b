#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spikemark/metrics.hpp"

namespace spikemark {

/// Render a double the way every serialized artifact in this project does:
/// the shortest decimal string that round-trips to the exact binary value
/// (std::to_chars). Integral values keep a trailing ".0" so they still read
/// back as floating point.
std::string format_double(double value);

/// Parse a double previously written by format_double (or any decimal/
/// scientific literal). Throws data_error on garbage.
double parse_double(const std::string& text);

/// Provenance carried in every generated artifact: tool name, version, PRNG
/// identifier, plus the configuration that produced the output as ordered
/// key/value pairs (values already rendered as text).
struct provenance {
    std::vector<std::pair<std::string, std::string>> config;
};

/// The provenance block as canonical JSON text:
///   {"tool": ..., "version": ..., "prng": ..., "config": {...}}.
std::string provenance_json(const provenance& p);

/// Serialize a metrics report as a canonical JSON object (2-space indent,
/// '\n' line ends, shortest round-trip doubles, fixed key order). Unset
/// optional fields serialize as null. Identical reports produce
/// byte-identical text.
std::string report_to_json(const metrics_report& r);

/// Parse a report back; null maps to nullopt. Throws data_error on
/// malformed input or wrong types.
metrics_report report_from_json(const std::string& text);

void save_report(const std::string& path, const metrics_report& r);
metrics_report load_report(const std::string& path);

}  // namespace spikemark
