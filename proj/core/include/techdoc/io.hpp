#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "techdoc/kb.hpp"
#include "techdoc/plan.hpp"

// JSON persistence for knowledge bases and plans.
//
// A KB document has top-level arrays `roles`, `concepts`, `instances`,
// `rules`, and `plans`, plus an optional `include` list of further documents
// (paths relative to the including file). The canonical snapshot sorts every
// id-keyed array by id, except `rules`, which keep definition order because
// that order decides firing order.
namespace techdoc {

using Json = nlohmann::json;

struct Model {
  KnowledgeBase kb;
  PlanLibrary plans;
};

// Parses JSON text; syntax errors carry "source:line:column".
Json parse_json_text(std::string_view text, const std::string& source = "<input>");

KnowledgeBase load_kb(const Json& doc);
Model load_model(const Json& doc);
// Merges several documents into one model. Ids must be unique across them.
Model load_model(const std::vector<Json>& docs);
// Reads a file and everything it includes, each file once.
std::vector<Json> read_documents(const std::filesystem::path& path);
Model load_model_file(const std::filesystem::path& path);

Json snapshot(const KnowledgeBase& kb);
Json snapshot(const Model& model);

// Element conversions, shared with the service layer.
Value value_from_json(const Json& j, const Role& role);
Json value_to_json(const Value& v);
Query query_from_json(const Json& j, const KnowledgeBase& kb);
Json query_to_json(const Query& q);
Assertion assertion_from_json(const Json& j, const KnowledgeBase& kb);
Json assertion_to_json(const Assertion& a);
Plan plan_from_json(const Json& j, const KnowledgeBase& kb);
Json plan_to_json(const Plan& p);
Json delta_to_json(const StateDelta& d);
Json diagnostics_to_json(const std::vector<Diagnostic>& diags);

std::string read_file(const std::filesystem::path& path);

}  // namespace techdoc
