#include "techdoc/pipeline.hpp"

#include <algorithm>
#include <set>

#include "techdoc/error.hpp"

namespace techdoc {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::kStatic: return "static";
    case Mode::kSimulate: return "simulate";
    case Mode::kStateFiltered: return "state-filtered";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (auto m : {Mode::kStatic, Mode::kSimulate, Mode::kStateFiltered}) {
    if (mode_name(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + std::string(name) + "'",
              std::string(name));
}

const RealizedDocument* Generation::document(const std::string& language) const {
  for (const auto& d : documents) {
    if (d.language == language) return &d;
  }
  return nullptr;
}

std::vector<const RealizedDocument*> Generation::document_pointers() const {
  std::vector<const RealizedDocument*> out;
  for (const auto& d : documents) out.push_back(&d);
  return out;
}

void validate_request(const GenerationRequest& req, const Model& model) {
  auto plan = model.plans.find(req.plan_id);
  if (plan == model.plans.end()) {
    throw Error(ErrorCode::kUnknownId, "unknown plan '" + req.plan_id + "'", req.plan_id);
  }
  if (plan->second.target_device.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "plan '" + req.plan_id + "' is a refinement, not a device plan", req.plan_id);
  }
  if (req.languages.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no languages requested");
  }
  std::set<std::string> seen;
  for (const auto& l : req.languages) {
    if (std::find(kLanguages.begin(), kLanguages.end(), l) == kLanguages.end()) {
      throw Error(ErrorCode::kInvalidArgument, "unsupported language '" + l + "'", l);
    }
    if (!seen.insert(l).second) {
      throw Error(ErrorCode::kInvalidArgument, "language '" + l + "' requested twice", l);
    }
  }
}

SectionSchema plan_schema(const Model& model, const GenerationRequest& req, KnowledgeBase& kb,
                          std::optional<Trace>* trace) {
  switch (req.mode) {
    case Mode::kStatic:
      return build_document(expand_plan(req.plan_id, model.plans, kb), model.plans, kb);
    case Mode::kStateFiltered:
      return build_document(filter_relevant_steps(req.plan_id, model.plans, kb), model.plans, kb);
    case Mode::kSimulate: {
      KnowledgeBase scratch = kb;
      Trace t = simulate(req.plan_id, model.plans, scratch);
      SectionSchema s = build_document(t, model.plans, kb);
      if (trace) *trace = std::move(t);
      return s;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mode");
}

Generation generate(const Model& model, const LanguageResources& resources,
                    const GenerationRequest& req) {
  validate_request(req, model);
  Generation g;
  g.request = req;
  KnowledgeBase kb = model.kb;
  if (!req.facts.empty()) kb.tell(req.facts);
  g.schema = plan_schema(model, req, kb, &g.trace);
  g.digest = schema_digest(g.schema);
  g.sequence = plan_references(linearize(g.schema, resources.lexicon, req.languages), kb);
  for (const auto& lang : req.languages) {
    RealizedDocument doc = realize_document(g.sequence, lang, resources, kb);
    doc.digest = g.digest;
    g.documents.push_back(std::move(doc));
  }
  return g;
}

namespace {

MenuOption option(const std::string& id, const KnowledgeBase& kb) {
  auto types = kb.most_specific_types(id);
  return MenuOption{id, types.empty() ? std::string(kThing) : *types.begin()};
}

}  // namespace

std::vector<MenuOption> menu_for_role(const std::string& process, const std::string& role,
                                      const KnowledgeBase& kb) {
  if (!kb.has_concept(process)) {
    throw Error(ErrorCode::kUnknownId, "unknown process '" + process + "'", process);
  }
  Query q;
  for (const auto& c : participant_ranges(process, role, kb)) {
    q.atoms.push_back(Atom::type(Term::var("?x"), c));
  }
  std::vector<MenuOption> out;
  if (q.atoms.empty()) {
    for (const auto& [id, inst] : kb.instances()) out.push_back(option(id, kb));
    return out;
  }
  std::set<std::string> ids;
  for (const auto& b : kb.ask(q).bindings) ids.insert(b.at("?x").text);
  for (const auto& id : ids) out.push_back(option(id, kb));
  return out;
}

std::vector<MenuOption> menu_for_device(const std::string& device, const PlanLibrary& plans,
                                        const KnowledgeBase& kb) {
  if (!kb.has_instance(device)) {
    throw Error(ErrorCode::kUnknownId, "unknown device '" + device + "'", device);
  }
  std::vector<MenuOption> out;
  for (const auto& id : applicable_plans(device, plans, kb)) out.push_back(MenuOption{id, "plan"});
  return out;
}

namespace {

const Value* single(const Instance& inst, const char* role) {
  const auto& v = inst.fillers_of(role);
  return v.empty() ? nullptr : &v.front();
}

}  // namespace

std::optional<Illustration> location_of(const std::string& instance, const KnowledgeBase& kb) {
  if (!kb.has_instance(instance)) {
    throw Error(ErrorCode::kUnknownId, "unknown instance '" + instance + "'", instance);
  }
  const Value* ref = single(kb.instance(instance), "location-illustration");
  if (!ref || !ref->is_instance() || !kb.has_instance(ref->text)) return std::nullopt;
  const Instance& ill = kb.instance(ref->text);
  Illustration out;
  out.instance = instance;
  auto text = [&](const char* role) {
    const Value* v = single(ill, role);
    return v ? v->text : std::string();
  };
  auto num = [&](const char* role) {
    const Value* v = single(ill, role);
    return v ? v->number : 0.0;
  };
  out.image = text("image");
  out.caption = text("caption");
  out.x = num("x");
  out.y = num("y");
  out.w = num("w");
  out.h = num("h");
  return out;
}

nlohmann::json illustration_to_json(const Illustration& i) {
  auto n = [](double v) {
    return v == static_cast<double>(static_cast<long long>(v))
               ? nlohmann::json(static_cast<long long>(v))
               : nlohmann::json(v);
  };
  return {{"instance", i.instance},
          {"image", i.image},
          {"rect", {{"x", n(i.x)}, {"y", n(i.y)}, {"w", n(i.w)}, {"h", n(i.h)}}},
          {"caption", i.caption}};
}

}  // namespace techdoc
