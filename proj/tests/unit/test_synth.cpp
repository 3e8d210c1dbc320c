#include <doctest.h>

#include <chrono>

#include "classify_oracle.hpp"
#include "techdoc/io.hpp"
#include "techdoc/synth.hpp"

using namespace techdoc;

TEST_CASE("synthetic documents are deterministic and loadable") {
  auto a = synth::kb_document(7, synth::small_shape(7));
  auto b = synth::kb_document(7, synth::small_shape(7));
  CHECK(a == b);
  CHECK(a != synth::kb_document(8, synth::small_shape(8)));
  Model m = load_model(a);
  CHECK(m.kb.has_concept("tightly-connected"));
  CHECK(synth::screw_connections(a).size() >= 2);
}

TEST_CASE("small shapes stay within 20 to 50 concepts") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto doc = synth::kb_document(seed, synth::small_shape(seed));
    CHECK(doc["concepts"].size() >= 20);
    CHECK(doc["concepts"].size() <= 50);
  }
}

TEST_CASE("classification matches the brute-force oracle on random KBs") {
  std::size_t recognized = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    CAPTURE(seed);
    Model m = load_model(synth::kb_document(seed, synth::small_shape(seed)));
    auto oracle = classify_oracle::classify(m.kb);
    CHECK(classify_oracle::derived(m.kb) == oracle);
    for (const auto& [id, types] : oracle) {
      for (const auto& t : types) recognized += !m.kb.concept_def(t).primitive;
    }
  }
  MESSAGE("defined-concept memberships: " << recognized);
  CHECK(recognized > 100);
}

TEST_CASE("telling a tight state reclassifies and agrees with a fresh classify") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    CAPTURE(seed);
    auto doc = synth::kb_document(seed, synth::small_shape(seed));
    Model m = load_model(doc);
    const std::string target = synth::screw_connections(doc).front();
    CHECK(!m.kb.instance(target).derived_types.count("tightly-connected"));
    StateDelta d = m.kb.tell(Assertion::filler(target, "connection-state", Value::symbol("tight")));
    CHECK(m.kb.instance(target).derived_types.count("tightly-connected") == 1);
    CHECK(std::count(d.type_gains.begin(), d.type_gains.end(),
                     TypeChange{target, "tightly-connected"}) == 1);

    KnowledgeBase fresh = m.kb;
    fresh.reclassify_all();
    CHECK(classify_oracle::derived(fresh) == classify_oracle::derived(m.kb));
    CHECK(classify_oracle::classify(m.kb) == classify_oracle::derived(m.kb));

    // Loosening flips the state concepts.
    m.kb.tell(Assertion::filler(target, "connection-state", Value::symbol("loose")));
    CHECK(!m.kb.instance(target).derived_types.count("tightly-connected"));
    CHECK(m.kb.instance(target).derived_types.count("loosely-connected") == 1);
    CHECK(classify_oracle::classify(m.kb) == classify_oracle::derived(m.kb));
  }
}

TEST_CASE("ask workload answers agree with the oracle membership") {
  auto doc = synth::kb_document(3, synth::Shape{80, 150, 3, 0.3});
  Model m = load_model(doc);
  auto oracle = classify_oracle::classify(m.kb);
  for (const auto& q : synth::ask_workload(doc, 40, 11)) {
    if (q.atoms.size() != 1 || q.atoms[0].kind != Atom::Kind::kType) continue;
    const Atom& a = q.atoms[0];
    auto r = m.kb.ask(q);
    if (a.subject.is_variable()) {
      std::size_t expected = 0;
      for (const auto& [id, types] : oracle) expected += types.count(a.concept_id);
      CHECK(r.bindings.size() == expected);
    } else {
      CHECK(r.holds == (oracle.at(a.subject.constant.text).count(a.concept_id) == 1));
    }
  }
}
