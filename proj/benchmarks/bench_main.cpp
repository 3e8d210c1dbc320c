#include <benchmark/benchmark.h>

#include "techdoc/io.hpp"
#include "techdoc/pipeline.hpp"
#include "techdoc/synth.hpp"

using namespace techdoc;

namespace {

const std::filesystem::path kFixtures = TECHDOC_FIXTURE_DIR;

const Model& car() {
  static const Model m = load_model_file(kFixtures / "car.json");
  return m;
}

const LanguageResources& resources() {
  static const LanguageResources r = LanguageResources::load(kFixtures);
  return r;
}

void BM_LoadCarFixture(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(load_model_file(kFixtures / "car.json"));
}
BENCHMARK(BM_LoadCarFixture)->Unit(benchmark::kMillisecond);

void BM_GenerateTrilingual(benchmark::State& state) {
  GenerationRequest req;
  req.plan_id = "check-oil-level";
  for (auto _ : state) benchmark::DoNotOptimize(generate(car(), resources(), req));
}
BENCHMARK(BM_GenerateTrilingual)->Unit(benchmark::kMillisecond);

void BM_EmitHtml(benchmark::State& state) {
  GenerationRequest req;
  req.plan_id = "check-oil-level";
  Generation g = generate(car(), resources(), req);
  for (auto _ : state) benchmark::DoNotOptimize(emit(g.documents.front(), Format::kHtml));
}
BENCHMARK(BM_EmitHtml);

void BM_Simulate(benchmark::State& state) {
  for (auto _ : state) {
    KnowledgeBase kb = car().kb;
    benchmark::DoNotOptimize(simulate("check-oil-level", car().plans, kb));
  }
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMicrosecond);

void BM_ClassifyScaled(benchmark::State& state) {
  synth::Shape shape = synth::scale_shape();
  shape.concepts = static_cast<std::size_t>(state.range(0)) / 3;
  shape.instances = static_cast<std::size_t>(state.range(0)) - shape.concepts;
  Model m = load_model(synth::kb_document(2024, shape));
  for (auto _ : state) m.kb.reclassify_all();
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClassifyScaled)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Arg(4000)->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_AskWorkload(benchmark::State& state) {
  auto doc = synth::kb_document(2024, synth::scale_shape());
  Model m = load_model(doc);
  auto queries = synth::ask_workload(doc, 100, 99);
  for (auto _ : state) {
    for (const auto& q : queries) benchmark::DoNotOptimize(m.kb.ask(q));
  }
}
BENCHMARK(BM_AskWorkload)->Unit(benchmark::kMillisecond);

void BM_Tell(benchmark::State& state) {
  Model m = car();
  bool tight = false;
  for (auto _ : state) {
    tight = !tight;
    benchmark::DoNotOptimize(m.kb.tell(Assertion::filler(
        "drain-bolt-1", "connection-state", Value::symbol(tight ? "tight" : "loose"))));
  }
}
BENCHMARK(BM_Tell)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
