#include "techdoc/sentence_planner.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "techdoc/io.hpp"
#include "techdoc/lexicon.hpp"

namespace techdoc {

std::string_view ref_form_name(RefForm f) {
  switch (f) {
    case RefForm::kIndefinite: return "indefinite";
    case RefForm::kDefinite: return "definite";
    case RefForm::kPronoun: return "pronoun";
    case RefForm::kBare: return "bare";
  }
  return "?";
}

std::string_view format_kind_name(FormatInstruction::Kind k) {
  switch (k) {
    case FormatInstruction::Kind::kHeading: return "heading";
    case FormatInstruction::Kind::kParagraphBreak: return "paragraph-break";
    case FormatInstruction::Kind::kListBegin: return "list-begin";
    case FormatInstruction::Kind::kListItem: return "list-item";
    case FormatInstruction::Kind::kListEnd: return "list-end";
    case FormatInstruction::Kind::kEmphasis: return "emphasis";
  }
  return "?";
}

namespace {

constexpr std::size_t kMinListItems = 3;
constexpr int kMaxListDepth = 2;

class Linearizer {
 public:
  DocSequence run(const SectionSchema& schema) {
    out_.push_back(FormatInstruction{FormatInstruction::Kind::kHeading, schema.plan_id, 0});
    bool content = false;
    auto block = [&](const RstNodePtr& node, const char* name, bool activity) {
      if (!node) return;
      if (content) out_.push_back(FormatInstruction{FormatInstruction::Kind::kParagraphBreak, "", 0});
      block_ = name;
      if (activity) {
        steps(node, 1);
      } else {
        sentences(node, std::nullopt);
      }
      content = true;
    };
    block(schema.location, "location", false);
    block(schema.replacement, "replacement", false);
    block(schema.activity, "activity", true);
    return std::move(out_);
  }

 private:
  SentencePlan make_plan(const Proposition& p) {
    SentencePlan sp;
    sp.process = p.predicate;
    sp.mood = p.annotation.speech_act == SpeechAct::kInstruction ? Mood::kImperative
                                                                 : Mood::kDeclarative;
    sp.negated = p.negated;
    sp.action_id = p.action_id;
    sp.block = block_;
    for (const auto& [role, inst] : p.participants) {
      if (role == "actor" && sp.mood == Mood::kImperative) continue;
      sp.participants[role] = ReferringExpression{inst, RefForm::kDefinite, std::nullopt, 0};
    }
    return sp;
  }

  // Emits the sentences of `node`. A pending condition attaches to the first
  // sentence emitted.
  void sentences(const RstNodePtr& node, std::optional<ListContext> list,
                 const Proposition* condition = nullptr) {
    switch (node->kind) {
      case RstNode::Kind::kLeaf: {
        SentencePlan sp = make_plan(node->proposition);
        if (condition) {
          auto c = std::make_shared<SentencePlan>(make_plan(*condition));
          c->id = next_id_++;
          c->list = list;
          sp.condition = std::move(c);
        }
        sp.id = next_id_++;
        sp.list = list;
        out_.push_back(std::move(sp));
        break;
      }
      case RstNode::Kind::kNucleusSatellite: {
        const Proposition* cond = condition;
        for (const auto& s : node->satellites) {
          if (s.relation == RstRelation::kCondition && !cond) cond = &s.node->proposition;
        }
        sentences(node->nucleus, list, cond);
        for (const auto& s : node->satellites) {
          if (s.relation == RstRelation::kCondition && cond == &s.node->proposition) continue;
          if (s.relation == RstRelation::kMeans && list && list->depth < kMaxListDepth &&
              as_list(s.node)) {
            steps(s.node, list->depth + 1);
          } else {
            sentences(s.node, list);
          }
        }
        break;
      }
      case RstNode::Kind::kMultinuclear:
        for (std::size_t i = 0; i < node->nuclei.size(); ++i) {
          sentences(node->nuclei[i], list, i == 0 ? condition : nullptr);
        }
        break;
    }
  }

  bool as_list(const RstNodePtr& node) const {
    return node->kind == RstNode::Kind::kMultinuclear && node->relation == RstRelation::kSequence &&
           node->nuclei.size() >= kMinListItems;
  }

  void steps(const RstNodePtr& node, int depth) {
    if (!as_list(node)) {
      sentences(node, std::nullopt);
      return;
    }
    int id = next_list_++;
    out_.push_back(FormatInstruction{FormatInstruction::Kind::kListBegin, "", id});
    for (std::size_t i = 0; i < node->nuclei.size(); ++i) {
      out_.push_back(FormatInstruction{FormatInstruction::Kind::kListItem, "", id});
      sentences(node->nuclei[i], ListContext{id, static_cast<int>(i + 1), depth});
    }
    out_.push_back(FormatInstruction{FormatInstruction::Kind::kListEnd, "", id});
  }

  DocSequence out_;
  std::string block_;
  int next_id_ = 1;
  int next_list_ = 1;
};

// The concept an instance is named by, used to detect ambiguous mentions.
std::string naming_concept(const std::string& instance, const KnowledgeBase& kb) {
  if (!kb.has_instance(instance)) return instance;
  const auto& types = kb.instance(instance).asserted_types;
  return types.empty() ? std::string(kThing) : *types.begin();
}

bool unique_filler(const std::string& instance, const KnowledgeBase& kb) {
  for (const auto& [id, inst] : kb.instances()) {
    for (const auto& [role, vals] : inst.fillers) {
      if (vals.size() == 1 && vals.front().is_instance() && vals.front().text == instance) {
        return true;
      }
    }
  }
  return false;
}

void each_plan(DocSequence& seq, const std::function<void(SentencePlan&)>& f) {
  for (auto& item : seq) {
    if (auto* sp = std::get_if<SentencePlan>(&item)) {
      if (sp->condition) f(*sp->condition);
      f(*sp);
    }
  }
}

}  // namespace

DocSequence linearize(const SectionSchema& schema) { return Linearizer().run(schema); }

DocSequence linearize(const SectionSchema& schema, const Lexicon& lexicon,
                      const std::vector<std::string>& languages) {
  DocSequence seq = linearize(schema);
  for (const auto* sp : sentence_plans(seq)) {
    for (const auto& lang : languages) {
      if (!lexicon.find(sp->process, lang)) {
        throw Error(ErrorCode::kMissingLexiconEntry,
                    "process '" + sp->process + "' has no " + lang + " lexicon entry",
                    sp->process + "/" + lang);
      }
    }
  }
  return seq;
}

DocSequence plan_references(DocSequence seq, const KnowledgeBase& kb) {
  // Concepts naming more than one referent get ordinals by first mention.
  std::map<std::string, std::vector<std::string>> by_concept;
  each_plan(seq, [&](SentencePlan& sp) {
    for (const auto& role : kSemanticRoles) {
      auto it = sp.participants.find(role);
      if (it == sp.participants.end() || !kb.has_instance(it->second.referent)) continue;
      auto& refs = by_concept[naming_concept(it->second.referent, kb)];
      if (std::find(refs.begin(), refs.end(), it->second.referent) == refs.end()) {
        refs.push_back(it->second.referent);
      }
    }
  });
  std::map<std::string, int> ordinal;
  for (const auto& [concept_id, refs] : by_concept) {
    if (refs.size() < 2) continue;
    for (std::size_t i = 0; i < refs.size(); ++i) ordinal[refs[i]] = static_cast<int>(i + 1);
  }

  std::set<std::string> mentioned;
  std::map<std::string, Antecedent> full_mention;
  std::map<std::string, std::string> previous;  // role -> referent of the previous sentence
  for (auto& item : seq) {
    if (auto* fi = std::get_if<FormatInstruction>(&item)) {
      if (fi->kind == FormatInstruction::Kind::kHeading ||
          fi->kind == FormatInstruction::Kind::kParagraphBreak) {
        previous.clear();
      }
      continue;
    }
    auto& top = std::get<SentencePlan>(item);
    auto assign = [&](SentencePlan& sp) {
      std::map<std::string, std::string> current;
      for (const auto& role : kSemanticRoles) {
        auto it = sp.participants.find(role);
        if (it == sp.participants.end()) continue;
        ReferringExpression& re = it->second;
        re.antecedent.reset();
        re.ordinal = 0;
        if (!kb.has_instance(re.referent)) continue;
        auto ord = ordinal.find(re.referent);
        if (ord != ordinal.end()) re.ordinal = ord->second;
        auto prev = previous.find(role);
        bool same = prev != previous.end() && prev->second == re.referent;
        if (same && re.ordinal == 0 && full_mention.count(re.referent)) {
          re.form = RefForm::kPronoun;
          re.antecedent = full_mention.at(re.referent);
        } else {
          bool known = mentioned.count(re.referent) > 0;
          re.form = known || re.ordinal || unique_filler(re.referent, kb) ? RefForm::kDefinite
                                                            : RefForm::kIndefinite;
          full_mention[re.referent] = Antecedent{sp.id, role};
        }
        mentioned.insert(re.referent);
        current[role] = re.referent;
      }
      previous = std::move(current);
    };
    if (top.condition) assign(*top.condition);
    assign(top);
  }
  return seq;
}

std::vector<const SentencePlan*> sentence_plans(const DocSequence& seq) {
  std::vector<const SentencePlan*> out;
  for (const auto& item : seq) {
    if (const auto* sp = std::get_if<SentencePlan>(&item)) {
      if (sp->condition) out.push_back(sp->condition.get());
      out.push_back(sp);
    }
  }
  return out;
}

namespace {

Json plan_to_json(const SentencePlan& sp) {
  Json j;
  j["id"] = sp.id;
  j["process"] = sp.process;
  j["mood"] = sp.mood == Mood::kImperative ? "imperative" : "declarative";
  j["polarity"] = sp.negated ? "negative" : "positive";
  j["block"] = sp.block;
  if (!sp.action_id.empty()) j["action"] = sp.action_id;
  Json parts = Json::object();
  for (const auto& [role, re] : sp.participants) {
    Json r = {{"referent", re.referent}, {"form", std::string(ref_form_name(re.form))}};
    if (re.antecedent) r["antecedent"] = {{"plan", re.antecedent->plan}, {"role", re.antecedent->role}};
    if (re.ordinal) r["ordinal"] = re.ordinal;
    parts[role] = std::move(r);
  }
  j["participants"] = std::move(parts);
  if (sp.condition) j["condition"] = plan_to_json(*sp.condition);
  if (sp.list) {
    j["list"] = {{"list", sp.list->list}, {"position", sp.list->position}, {"depth", sp.list->depth}};
  }
  return j;
}

}  // namespace

nlohmann::json sequence_to_json(const DocSequence& seq) {
  Json arr = Json::array();
  for (const auto& item : seq) {
    if (const auto* sp = std::get_if<SentencePlan>(&item)) {
      arr.push_back({{"sentence", plan_to_json(*sp)}});
    } else {
      const auto& fi = std::get<FormatInstruction>(item);
      Json f = {{"format", std::string(format_kind_name(fi.kind))}};
      if (!fi.payload.empty()) f["payload"] = fi.payload;
      if (fi.list) f["list"] = fi.list;
      arr.push_back(std::move(f));
    }
  }
  return arr;
}

}  // namespace techdoc
