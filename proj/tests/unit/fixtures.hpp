#pragma once

#include <filesystem>
#include <string>

#include "techdoc/io.hpp"

namespace fixtures {

inline std::filesystem::path dir() { return TECHDOC_FIXTURE_DIR; }
inline std::filesystem::path gold_dir() { return TECHDOC_GOLD_DIR; }

inline const techdoc::Model& car_model() {
  static const techdoc::Model m = techdoc::load_model_file(dir() / "car.json");
  return m;
}

inline techdoc::Model car() { return car_model(); }

inline techdoc::Model aircraft() { return techdoc::load_model_file(dir() / "aircraft.json"); }

}  // namespace fixtures

#include "techdoc/lexicon.hpp"

namespace fixtures {

inline const techdoc::LanguageResources& resources() {
  static const techdoc::LanguageResources r = techdoc::LanguageResources::load(dir());
  return r;
}

}  // namespace fixtures
