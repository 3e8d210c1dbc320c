#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "techdoc/doc_planner.hpp"
#include "techdoc/emitter.hpp"
#include "techdoc/io.hpp"
#include "techdoc/lexicon.hpp"
#include "techdoc/realizer.hpp"
#include "techdoc/sentence_planner.hpp"
#include "techdoc/simulator.hpp"

namespace techdoc {

enum class Mode { kStatic, kSimulate, kStateFiltered };

std::string_view mode_name(Mode m);
// Throws kInvalidArgument.
Mode parse_mode(std::string_view name);

struct GenerationRequest {
  std::string plan_id;
  std::vector<std::string> languages = kLanguages;
  Format format = Format::kPlain;
  Mode mode = Mode::kStatic;
  // Sensor facts told to a copy of the KB before planning.
  std::vector<Assertion> facts;
};

struct Generation {
  GenerationRequest request;
  SectionSchema schema;
  std::string digest;
  DocSequence sequence;
  std::optional<Trace> trace;
  std::vector<RealizedDocument> documents;  // in request language order

  const RealizedDocument* document(const std::string& language) const;
  std::vector<const RealizedDocument*> document_pointers() const;
};

// Checks languages and plan id before running. Throws kUnknownId for an
// unknown plan and kInvalidArgument for a bad language set.
void validate_request(const GenerationRequest& req, const Model& model);

Generation generate(const Model& model, const LanguageResources& resources,
                    const GenerationRequest& req);

// Language-independent document: same digest for every language set.
SectionSchema plan_schema(const Model& model, const GenerationRequest& req, KnowledgeBase& kb,
                          std::optional<Trace>* trace = nullptr);

// --- authoring menus -----------------------------------------------------------

struct MenuOption {
  std::string id;
  std::string concept_id;  // most specific type, for display
  friend bool operator==(const MenuOption&, const MenuOption&) = default;
};

// Instances that may fill `role` of an action of `process`, found by asking
// the KB for members of every range concept.
std::vector<MenuOption> menu_for_role(const std::string& process, const std::string& role,
                                      const KnowledgeBase& kb);
// Device plans applicable to `device`.
std::vector<MenuOption> menu_for_device(const std::string& device, const PlanLibrary& plans,
                                        const KnowledgeBase& kb);

// --- location queries ----------------------------------------------------------

struct Illustration {
  std::string instance;
  std::string image;
  double x = 0, y = 0, w = 0, h = 0;
  std::string caption;
};

// From the instance's location-illustration filler; nullopt when it has none.
// Throws kUnknownId for an unknown instance.
std::optional<Illustration> location_of(const std::string& instance, const KnowledgeBase& kb);
nlohmann::json illustration_to_json(const Illustration& i);

}  // namespace techdoc
