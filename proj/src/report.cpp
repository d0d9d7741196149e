#include "waistlab/report.hpp"

#include <algorithm>

#include "waistlab/errors.hpp"

namespace waistlab {

const std::vector<BoundRef>& bound_registry() {
    static const std::vector<BoundRef> registry{
        {"vaaler-section", "central sections of the unit cube have volume at least 1"},
        {"crofton-formula", "volume equals the normalized mean intersection count with random equators"},
        {"transport-lipschitz", "all singular values of the transport differential are at most 1"},
        {"transport-det-rho", "restricted determinant of the transport differential is at least the Gaussian density"},
        {"archimedes-mu-m", "the projected measure mu_m has total mass s_{n+m}"},
        {"rho-m-monotone", "rho_m increases pointwise to exp(-pi |y|^2)"},
        {"pullback-equality", "weighted length of a diameter equals the volume of its preimage"},
        {"sphere-equator", "some fibre of a map S^n -> R^k is at least a great (n-k)-sphere"},
        {"even-map-pi", "some fibre of an even map RP^n -> R^{n-1} has length at least pi"},
        {"rp3-pi2", "some fibre of a map RP^3 -> R has area at least pi^2"},
        {"rpn-volume", "some fibre of a map RP^n -> R^k is at least half a great (n-k)-sphere"},
        {"rpn-nu-t", "some fibre neighbourhood in RP^n is at least the neighbourhood of RP^{n-k}"},
        {"cpn-nu-t", "some fibre neighbourhood in CP^n is at least the neighbourhood of CP^{n-k}"},
        {"hopf-constant", "Hopf fibres all have the same volume, attaining the bound"},
        {"x1sq-2pi", "fibres of x1^2 on RP^2 approach length 2 pi"},
        {"torus-product", "some fibre of a map T_{a_1..a_n} -> R^k is at least a_1 ... a_{n-k}"},
        {"torus-halfslab", "a half-slab of the torus has boundary content 2 a_1 ... a_{n-1}"},
        {"parallelotope-isoperimetry", "half-volume sets of a box have boundary at least a_1 ... a_{n-1}"},
        {"width-inscribed", "the width of a symmetric body is twice its inscribed radius"},
        {"zhang-section", "a normalized body has a central (n-k)-section of volume at most v_{n-k}"},
        {"bending-total", "the bent flat family has total volume at most 4 sqrt(p) + 2"},
        {"bending-z1", "the collapsed part has volume at most 2 sqrt(p) + 2"},
        {"bending-z2", "the stretched collar part has volume at most 2 sqrt(p)"},
        {"cup-power-scaling", "bent families have volume between p^{k/n} and 2^{n+k} C(n,k) p^{k/n}"},
        {"algebraic-crofton", "the zero set of a degree-d polynomial in the unit square has length at most about 2d"},
        {"filling-identity", "the filling H(z) satisfies boundary H(z) = z"},
        {"filling-constant", "the filling cover weight is at most (2^{k+2} - 2) times the cycle cover weight"},
        {"filling-cover-only", "the filling cover depends only on the cover of the cycle"},
        {"star-assignment", "minimal-element assignment has stars of size at most 2^k - 1"},
        {"star-assignment-corrected", "minimal-element assignment has stars of size at most 2^{k+1} - 1"},
        {"partition-identity", "boundary C_I = sum over i not in I of C_{I+i}"},
        {"reproducibility", "identical configuration and seed give identical reports"},
    };
    return registry;
}

bool known_bound_ref(const std::string& tag) {
    const auto& r = bound_registry();
    return std::any_of(r.begin(), r.end(), [&](const BoundRef& b) { return b.tag == tag; });
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "info";
    }
}

Record make_record(std::string id, std::string criterion, std::string bound_ref, bool pass) {
    if (!bound_ref.empty() && !known_bound_ref(bound_ref)) throw UsageError("unknown bound_ref '" + bound_ref + "'");
    Record r;
    r.id = std::move(id);
    r.criterion = std::move(criterion);
    r.bound_ref = std::move(bound_ref);
    r.verdict = pass ? Verdict::Pass : Verdict::Fail;
    return r;
}

nlohmann::ordered_json estimate_json(const EstimateReport& r) {
    nlohmann::ordered_json j;
    j["value"] = r.value;
    j["std_error"] = r.std_error;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["method"] = r.method;
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.diagnostics) d[k] = v;
    j["diagnostics"] = d;
    return j;
}

bool ReportDocument::passed() const {
    return std::none_of(records.begin(), records.end(),
                        [](const Record& r) { return r.verdict == Verdict::Fail && !r.waived; });
}

std::vector<std::string> ReportDocument::failures() const {
    std::vector<std::string> out;
    for (const auto& r : records)
        if (r.verdict == Verdict::Fail && !r.waived) out.push_back(r.id);
    return out;
}

nlohmann::ordered_json ReportDocument::to_json(bool with_timing) const {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["config"] = config;
    nlohmann::ordered_json recs = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json o;
        o["id"] = r.id;
        o["criterion"] = r.criterion;
        o["bound_ref"] = r.bound_ref;
        o["verdict"] = to_string(r.verdict);
        o["waived"] = r.waived;
        o["values"] = r.values;
        recs.push_back(std::move(o));
    }
    j["records"] = recs;
    j["passed"] = passed();
    j["failures"] = failures();
    if (with_timing) j["timing"] = timing;
    return j;
}

void validate_report(const nlohmann::json& doc) {
    auto need = [](const nlohmann::json& o, const char* key, nlohmann::json::value_t type, const std::string& where) {
        if (!o.is_object() || !o.contains(key)) throw UsageError("report: missing field '" + where + key + "'");
        const auto& v = o.at(key);
        bool ok = v.type() == type || (type == nlohmann::json::value_t::number_integer && v.is_number_integer());
        if (!ok) throw UsageError("report: field '" + where + key + "' has the wrong type");
    };
    using T = nlohmann::json::value_t;
    need(doc, "schema_version", T::number_integer, "");
    if (doc["schema_version"].get<int>() != kSchemaVersion) throw UsageError("report: unsupported schema_version");
    need(doc, "tool_version", T::string, "");
    need(doc, "command", T::string, "");
    need(doc, "config", T::object, "");
    need(doc, "records", T::array, "");
    need(doc, "passed", T::boolean, "");
    for (std::size_t i = 0; i < doc["records"].size(); ++i) {
        const auto& r = doc["records"][i];
        std::string where = "records[" + std::to_string(i) + "].";
        need(r, "id", T::string, where);
        need(r, "criterion", T::string, where);
        need(r, "bound_ref", T::string, where);
        need(r, "verdict", T::string, where);
        need(r, "waived", T::boolean, where);
        need(r, "values", T::object, where);
        const std::string ref = r["bound_ref"];
        if (!ref.empty() && !known_bound_ref(ref)) throw UsageError("report: unknown bound_ref '" + ref + "' at " + where);
    }
}

}  // namespace waistlab
