#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "waistlab/estimate.hpp"

namespace waistlab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.3.0";

struct BoundRef {
    std::string tag;
    std::string statement;
};

// Fixed registry of the bounds and identities the tool checks.
const std::vector<BoundRef>& bound_registry();
bool known_bound_ref(const std::string& tag);

enum class Verdict { Pass, Fail, Info };
std::string to_string(Verdict v);

struct Record {
    std::string id;
    std::string criterion;
    std::string bound_ref;
    Verdict verdict = Verdict::Info;
    bool waived = false;  // known-unattainable criterion, excluded from the exit status
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
};

Record make_record(std::string id, std::string criterion, std::string bound_ref, bool pass);

// {value, std_error, samples, seed, method, diagnostics}
nlohmann::ordered_json estimate_json(const EstimateReport& r);

struct ReportDocument {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<Record> records;
    nlohmann::ordered_json timing = nlohmann::ordered_json::object();

    bool passed() const;
    std::vector<std::string> failures() const;
    nlohmann::ordered_json to_json(bool with_timing = true) const;
};

// Throws UsageError naming the first missing or mistyped field.
void validate_report(const nlohmann::json& doc);

}  // namespace waistlab
