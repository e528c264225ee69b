#include "spikemark/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "spikemark/errors.hpp"
#include "spikemark/version.hpp"

namespace spikemark {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string quote(const std::string& s) {
    return nlohmann::json(s).dump();  // handles escaping
}

void append_optional_double(std::string& out, const char* key,
                            const std::optional<double>& v, bool last = false) {
    out += "  \"";
    out += key;
    out += "\": ";
    out += v ? format_double(*v) : "null";
    out += last ? "\n" : ",\n";
}

ordered_json parse_or_throw(const std::string& text, const char* what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw data_error(std::string(what) + ": malformed JSON");
    return j;
}

double number_field(const ordered_json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw data_error(std::string("report: field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::optional<double> optional_number_field(const ordered_json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_number())
        throw data_error(std::string("report: field '") + key + "' must be a number or null");
    return j.at(key).get<double>();
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    std::string text(buf, res.ptr);
    if (text.find_first_of(".eEni") == std::string::npos) text += ".0";
    return text;
}

double parse_double(const std::string& text) {
    double value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw data_error("could not parse '" + text + "' as a number");
    return value;
}

std::string provenance_json(const provenance& p) {
    std::string out = "{\n";
    out += "  \"tool\": \"spikemark\",\n";
    out += "  \"version\": " + quote(version_string) + ",\n";
    out += "  \"prng\": " + quote(prng_id) + ",\n";
    out += "  \"config\": {";
    for (std::size_t i = 0; i < p.config.size(); ++i) {
        out += (i == 0) ? "\n" : ",\n";
        out += "    " + quote(p.config[i].first) + ": " + quote(p.config[i].second);
    }
    out += p.config.empty() ? "}\n" : "\n  }\n";
    out += "}";
    return out;
}

std::string report_to_json(const metrics_report& r) {
    std::string out = "{\n";
    out += "  \"footprint_bytes\": " + std::to_string(r.footprint_bytes) + ",\n";
    out += "  \"connection_sparsity\": " + format_double(r.connection_sparsity) + ",\n";
    append_optional_double(out, "activation_sparsity", r.activation_sparsity);
    append_optional_double(out, "synops_dense", r.synops_dense);
    append_optional_double(out, "synops_eff_mac", r.synops_eff_mac);
    append_optional_double(out, "synops_eff_ac", r.synops_eff_ac);
    out += "  \"correctness_name\": ";
    out += r.correctness_name ? quote(*r.correctness_name) : "null";
    out += ",\n";
    append_optional_double(out, "correctness_value", r.correctness_value);
    append_optional_double(out, "execution_rate_hz", r.execution_rate_hz, /*last=*/true);
    out += "}\n";
    return out;
}

metrics_report report_from_json(const std::string& text) {
    const ordered_json j = parse_or_throw(text, "report");
    if (!j.is_object()) throw data_error("report: expected a JSON object");

    metrics_report r;
    if (!j.contains("footprint_bytes") || !j.at("footprint_bytes").is_number_integer())
        throw data_error("report: field 'footprint_bytes' must be an integer");
    r.footprint_bytes = j.at("footprint_bytes").get<std::uint64_t>();
    r.connection_sparsity = number_field(j, "connection_sparsity");
    r.activation_sparsity = optional_number_field(j, "activation_sparsity");
    r.synops_dense = optional_number_field(j, "synops_dense");
    r.synops_eff_mac = optional_number_field(j, "synops_eff_mac");
    r.synops_eff_ac = optional_number_field(j, "synops_eff_ac");
    if (j.contains("correctness_name") && !j.at("correctness_name").is_null()) {
        if (!j.at("correctness_name").is_string())
            throw data_error("report: field 'correctness_name' must be a string or null");
        r.correctness_name = j.at("correctness_name").get<std::string>();
    }
    r.correctness_value = optional_number_field(j, "correctness_value");
    r.execution_rate_hz = optional_number_field(j, "execution_rate_hz");
    return r;
}

void save_report(const std::string& path, const metrics_report& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("report: cannot open '" + path + "' for writing");
    out << report_to_json(r);
    if (!out) throw data_error("report: failed writing '" + path + "'");
}

metrics_report load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("report: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json(buf.str());
}

}  // namespace spikemark
