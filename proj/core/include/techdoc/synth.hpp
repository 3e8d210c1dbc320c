#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "techdoc/kb.hpp"

// Seeded generators for synthetic knowledge-base documents, in the same JSON
// shape the loader reads.
namespace techdoc::synth {

struct Shape {
  std::size_t concepts = 30;   // including the fixed connection core
  std::size_t instances = 40;
  std::size_t roles = 3;       // instance-valued roles besides connection-state
  double defined_fraction = 0.3;
};

// Every generated document contains the root `entity`, the role
// connection-state (functional enum tight/loose), the primitive concepts
// connection and screw-connection, and the defined concepts
// tightly-connected and loosely-connected. At least two screw-connection
// instances without a connection state are included.
nlohmann::json kb_document(std::uint64_t seed, const Shape& shape);

// Shape for randomized small KBs: 20 to 50 concepts.
Shape small_shape(std::uint64_t seed);

// Large fixture: `shape.concepts + shape.instances` elements.
inline Shape scale_shape() { return Shape{400, 800, 6, 0.25}; }

// Instances of screw-connection in a generated document.
std::vector<std::string> screw_connections(const nlohmann::json& doc);

// Mixed ASK queries against a generated document: type atoms, filler atoms
// and two-atom joins, with and without variables.
std::vector<Query> ask_workload(const nlohmann::json& doc, std::size_t count,
                                std::uint64_t seed);

}  // namespace techdoc::synth
