#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "techdoc/kb.hpp"
#include "techdoc/plan.hpp"
#include "techdoc/simulator.hpp"

namespace techdoc {

enum class RstRelation {
  kSequence,
  kPurpose,
  kCondition,
  kElaboration,
  kMeans,
  kMotivation,
  kPrecondition,
  kResult,
  kUntil,
  kJoint,
  kContrast,
};

std::string_view relation_name(RstRelation r);
bool is_multinuclear(RstRelation r);

enum class SpeechAct { kInstruction, kDescription, kWarning };
enum class Prominence { kMain, kAside };

std::string_view speech_act_name(SpeechAct s);

struct Annotation {
  SpeechAct speech_act = SpeechAct::kDescription;
  Prominence prominence = Prominence::kMain;
  std::set<std::string> hints;
};

// Predicates that are not KB concepts.
inline constexpr const char* kBeLocatedIn = "be-located-in";
inline constexpr const char* kBeLocatedUnder = "be-located-under";
inline constexpr const char* kBeRequired = "be-required";

struct Proposition {
  std::string predicate;                            // action or state concept
  std::map<std::string, std::string> participants;  // semantic role -> instance id
  std::string action_id;                            // set for action-derived propositions
  bool from_query = false;
  bool negated = false;
  Annotation annotation;
};

struct RstNode;
using RstNodePtr = std::shared_ptr<RstNode>;

struct Satellite {
  RstRelation relation;
  RstNodePtr node;
};

struct RstNode {
  enum class Kind { kLeaf, kNucleusSatellite, kMultinuclear };
  Kind kind = Kind::kLeaf;
  Proposition proposition;               // kLeaf
  RstRelation relation = RstRelation::kSequence;  // kMultinuclear
  RstNodePtr nucleus;                    // kNucleusSatellite
  std::vector<Satellite> satellites;     // kNucleusSatellite
  std::vector<RstNodePtr> nuclei;        // kMultinuclear

  static RstNodePtr leaf(Proposition p);
  static RstNodePtr with_satellites(RstNodePtr nucleus, std::vector<Satellite> satellites);
  static RstNodePtr multi(RstRelation r, std::vector<RstNodePtr> nuclei);
};

struct SectionSchema {
  std::string plan_id;
  RstNodePtr location;
  RstNodePtr replacement;
  RstNodePtr activity;
};

SectionSchema build_document(const ExpandedPlan& plan, const PlanLibrary& plans,
                             const KnowledgeBase& kb);
SectionSchema build_document(const Trace& trace, const PlanLibrary& plans,
                             const KnowledgeBase& kb);

// Structural checks. With a KB, participants must also resolve.
std::vector<Diagnostic> check_tree(const RstNodePtr& root, const KnowledgeBase* kb = nullptr);
std::vector<Diagnostic> check_schema(const SectionSchema& schema,
                                     const KnowledgeBase* kb = nullptr);

// Canonical digest of the language-independent structure.
std::string schema_digest(const SectionSchema& schema);

// Leaf propositions in document order.
std::vector<const Proposition*> propositions(const RstNodePtr& root);

nlohmann::json node_to_json(const RstNodePtr& node);
nlohmann::json schema_to_json(const SectionSchema& schema);

// Semantic role used for a plan participant role.
std::string semantic_role(const std::string& participant_role);

}  // namespace techdoc
