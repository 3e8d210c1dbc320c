#pragma once

#include <map>
#include <set>
#include <string>

#include "techdoc/kb.hpp"

// Brute-force classification: membership of every instance in every concept,
// recomputed from the definitions by naive passes until nothing changes.
namespace classify_oracle {

using Membership = std::map<std::string, std::set<std::string>>;

inline bool holds(const techdoc::KnowledgeBase& kb, const techdoc::Instance& inst,
                  const techdoc::RoleRestriction& r, const Membership& m) {
  auto it = inst.fillers.find(r.role);
  std::size_t n = it == inst.fillers.end() ? 0 : it->second.size();
  switch (r.kind) {
    case techdoc::RestrictionKind::kAll:
      if (n == 0) return true;
      for (const auto& v : it->second) {
        if (!v.is_instance() || !m.at(v.text).count(r.concept_id)) return false;
      }
      return true;
    case techdoc::RestrictionKind::kFiller:
      if (n == 0) return false;
      for (const auto& v : it->second) {
        if (v == r.filler) return true;
      }
      return false;
    case techdoc::RestrictionKind::kCard:
      return n >= r.min && (!r.max || n <= *r.max);
  }
  (void)kb;
  return false;
}

inline Membership classify(const techdoc::KnowledgeBase& kb) {
  Membership m;
  for (const auto& [id, inst] : kb.instances()) {
    auto& types = m[id];
    types.insert(techdoc::kThing);
    // Asserted types and everything above them, walking parents directly.
    std::set<std::string> frontier = inst.asserted_types;
    while (!frontier.empty()) {
      std::string c = *frontier.begin();
      frontier.erase(frontier.begin());
      if (!types.insert(c).second) continue;
      for (const auto& p : kb.concept_def(c).parents) frontier.insert(p);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto c = kb.concepts().rbegin(); c != kb.concepts().rend(); ++c) {
      const techdoc::Concept& def = c->second;
      if (def.primitive) continue;
      for (const auto& [id, inst] : kb.instances()) {
        auto& types = m[id];
        if (types.count(def.id)) continue;
        bool ok = true;
        for (const auto& p : def.parents) ok = ok && types.count(p) > 0;
        for (const auto& r : def.restrictions) ok = ok && holds(kb, inst, r, m);
        if (ok) {
          types.insert(def.id);
          changed = true;
        }
      }
    }
  }
  return m;
}

inline Membership derived(const techdoc::KnowledgeBase& kb) {
  Membership m;
  for (const auto& [id, inst] : kb.instances()) m[id] = inst.derived_types;
  return m;
}

}  // namespace classify_oracle
