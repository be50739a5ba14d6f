#pragma once

#include "tzinf/inference.hpp"
#include "tzinf/simulation.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace tzinf {

using Json = nlohmann::json;

// Infinities are written as the strings "inf" / "-inf", NaN as null.
Json encode_double(double x);
double decode_double(const Json& j);

Json result_to_json(const InferenceResult& r);
InferenceResult result_from_json(const Json& j);  // eta is not serialized

// Stable column order: see the README.
std::string results_to_csv(const std::vector<InferenceResult>& results);

Json config_to_json(const StudyConfig& cfg);
// Collects every offending field into one InputError.
StudyConfig config_from_json(const Json& j);

Json study_to_json(const StudyReport& report);
std::string study_to_csv(const StudyReport& report);

// 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

struct ReportDocument {
    Json metadata;
    std::string input_digest;
    Json payload;

    Json to_json() const;
    static ReportDocument from_json(const Json& j);
};

} // namespace tzinf
