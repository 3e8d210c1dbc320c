#include "techdoc/synth.hpp"

#include <algorithm>
#include <random>

namespace techdoc::synth {

namespace {

using Json = nlohmann::json;

constexpr std::size_t kCoreConcepts = 6;

std::string concept_name(std::size_t i) { return "c" + std::to_string(i); }
std::string role_name(std::size_t i) { return "r" + std::to_string(i); }
std::string instance_name(std::size_t i) { return "i" + std::to_string(i); }

Json core_concepts() {
  return Json::array({
      {{"id", "entity"}, {"parents", Json::array()}, {"primitive", true}},
      {{"id", "connection"}, {"parents", {"entity"}}, {"primitive", true}},
      {{"id", "screw-connection"}, {"parents", {"connection"}}, {"primitive", true}},
      {{"id", "tightly-connected"},
       {"parents", {"connection"}},
       {"primitive", false},
       {"restrictions", {{{"kind", "filler"}, {"role", "connection-state"}, {"value", "tight"}}}}},
      {{"id", "loosely-connected"},
       {"parents", {"connection"}},
       {"primitive", false},
       {"restrictions", {{{"kind", "filler"}, {"role", "connection-state"}, {"value", "loose"}}}}},
      {{"id", "tight-screw-connection"},
       {"parents", {"screw-connection", "tightly-connected"}},
       {"primitive", false},
       {"restrictions", {{{"kind", "filler"}, {"role", "connection-state"}, {"value", "tight"}}}}},
  });
}

}  // namespace

Shape small_shape(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eed);
  Shape s;
  s.concepts = std::uniform_int_distribution<std::size_t>(20, 50)(rng);
  s.instances = std::uniform_int_distribution<std::size_t>(10, 40)(rng);
  s.roles = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  s.defined_fraction = 0.35;
  return s;
}

Json kb_document(std::uint64_t seed, const Shape& shape) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  Json roles = Json::array();
  roles.push_back({{"id", "connection-state"},
                   {"domain", "connection"},
                   {"range", "enum"},
                   {"values", {"tight", "loose"}},
                   {"functional", true}});
  for (std::size_t r = 0; r < shape.roles; ++r) {
    roles.push_back({{"id", role_name(r)}, {"domain", "entity"}, {"range", "entity"}});
  }

  Json concepts = core_concepts();
  std::vector<std::string> ids = {"entity", "connection", "screw-connection"};
  std::vector<std::string> primitives = ids;
  std::size_t extra = shape.concepts > kCoreConcepts ? shape.concepts - kCoreConcepts : 0;
  for (std::size_t i = 0; i < extra; ++i) {
    std::string id = concept_name(i);
    Json c = {{"id", id}};
    Json parents = Json::array({ids[pick(ids.size())]});
    if (ids.size() > 3 && chance(0.2)) {
      const std::string& second = ids[pick(ids.size())];
      if (second != parents[0]) parents.push_back(second);
    }
    c["parents"] = parents;
    bool defined = shape.roles > 0 && chance(shape.defined_fraction);
    c["primitive"] = !defined;
    if (defined) {
      Json rs = Json::array();
      std::size_t n = 1 + pick(2);
      for (std::size_t k = 0; k < n; ++k) {
        std::string role = role_name(pick(shape.roles));
        switch (pick(3)) {
          case 0:
            rs.push_back({{"kind", "all"}, {"role", role}, {"concept", ids[pick(ids.size())]}});
            break;
          case 1:
            rs.push_back({{"kind", "card"}, {"role", role}, {"min", 1 + pick(2)}});
            break;
          default:
            rs.push_back({{"kind", "card"}, {"role", role}, {"min", 0}, {"max", pick(2)}});
            break;
        }
      }
      c["restrictions"] = rs;
    } else {
      primitives.push_back(id);
    }
    concepts.push_back(c);
    ids.push_back(id);
  }

  Json instances = Json::array();
  std::size_t n = std::max<std::size_t>(shape.instances, 2);
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = instance_name(i);
    Json inst = {{"id", id}};
    Json fillers = Json::object();
    if (i < 2 || chance(0.15)) {
      inst["types"] = {"screw-connection"};
      if (i >= 2 && chance(0.5)) fillers["connection-state"] = {chance(0.5) ? "tight" : "loose"};
    } else {
      Json types = Json::array({primitives[pick(primitives.size())]});
      if (chance(0.15)) types.push_back(primitives[pick(primitives.size())]);
      inst["types"] = types;
    }
    for (std::size_t r = 0; r < shape.roles; ++r) {
      if (i == 0 || !chance(0.4)) continue;
      Json vals = Json::array();
      std::size_t k = 1 + pick(2);
      for (std::size_t v = 0; v < k; ++v) vals.push_back(instance_name(pick(i)));
      fillers[role_name(r)] = vals;
    }
    if (!fillers.empty()) inst["fillers"] = fillers;
    instances.push_back(inst);
  }
  // Fillers point at earlier instances; shuffle the document order.
  std::shuffle(instances.begin(), instances.end(), rng);
  return {{"roles", roles}, {"concepts", concepts}, {"instances", instances}};
}

std::vector<std::string> screw_connections(const Json& doc) {
  std::vector<std::string> out;
  for (const auto& inst : doc.at("instances")) {
    const auto& types = inst.at("types");
    if (std::find(types.begin(), types.end(), "screw-connection") != types.end()) {
      out.push_back(inst.at("id").get<std::string>());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Query> ask_workload(const Json& doc, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::vector<std::string> concepts, roles, instances;
  for (const auto& c : doc.at("concepts")) concepts.push_back(c.at("id").get<std::string>());
  for (const auto& r : doc.at("roles")) {
    if (r.at("range") == "entity") roles.push_back(r.at("id").get<std::string>());
  }
  for (const auto& i : doc.at("instances")) instances.push_back(i.at("id").get<std::string>());

  std::vector<Query> out;
  for (std::size_t q = 0; q < count; ++q) {
    Query query;
    Term x = Term::var("?x"), y = Term::var("?y");
    const std::string& c = concepts[pick(concepts.size())];
    switch (roles.empty() ? 0 : q % 4) {
      case 0:
        query.atoms.push_back(Atom::type(x, c));
        break;
      case 1:
        query.atoms.push_back(
            Atom::type(Term::of(Value::instance(instances[pick(instances.size())])), c));
        break;
      case 2:
        query.atoms.push_back(Atom::filler(x, roles[pick(roles.size())], y));
        query.atoms.push_back(Atom::type(y, c));
        break;
      default:
        query.atoms.push_back(Atom::type(x, c));
        query.atoms.push_back(Atom::filler(x, roles[pick(roles.size())], y));
        query.atoms.push_back(Atom::type(y, concepts[pick(concepts.size())]));
        break;
    }
    out.push_back(std::move(query));
  }
  return out;
}

}  // namespace techdoc::synth
