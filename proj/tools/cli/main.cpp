#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "techdoc/error.hpp"
#include "techdoc/pipeline.hpp"
#include "techdoc/service.hpp"

namespace fs = std::filesystem;
using namespace techdoc;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUnknownPlan = 2;

struct Common {
  std::string fixtures;
  std::string domain = "car";

  fs::path dir() const { return fixtures.empty() ? fixture_dir_from_env(TECHDOC_DEFAULT_FIXTURES) : fs::path(fixtures); }
  Model model() const {
    auto domains = Service::default_domains();
    auto it = domains.find(domain);
    if (it == domains.end()) {
      throw Error(ErrorCode::kInvalidArgument, "unknown domain '" + domain + "'", domain);
    }
    return load_model_file(dir() / it->second);
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--fixtures", c.fixtures, "Fixture directory (default: $TECHDOC_FIXTURES)");
  cmd->add_option("--domain", c.domain, "Domain model: car or aircraft")->capture_default_str();
}

std::string extension(Format f) {
  switch (f) {
    case Format::kPlain: return "txt";
    case Format::kHtml: return "html";
    case Format::kLatex: return "tex";
    case Format::kAnnotatedJson: return "json";
  }
  return "out";
}

std::vector<Assertion> read_facts(const std::string& path, const KnowledgeBase& kb) {
  std::vector<Assertion> out;
  if (path.empty()) return out;
  Json j = parse_json_text(read_file(path), path);
  for (const auto& a : j) out.push_back(assertion_from_json(a, kb));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilingual maintenance instruction generator"};
  app.require_subcommand(1);

  Common common;
  std::string plan, format = "plain", mode = "static", facts, out = ".", device;
  std::vector<std::string> languages = kLanguages;

  auto* gen = app.add_subcommand("generate", "Generate a document per language");
  add_common(gen, common);
  gen->add_option("plan", plan, "Plan id")->required();
  gen->add_option("-l,--lang", languages, "Languages")->delimiter(',')->capture_default_str();
  gen->add_option("-f,--format", format, "plain, html, latex or annotated-json")
      ->capture_default_str();
  gen->add_option("-m,--mode", mode, "static, simulate or state-filtered")->capture_default_str();
  gen->add_option("--facts", facts, "JSON file with assertions told before planning");
  gen->add_option("-o,--out", out, "Output directory")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Print the execution trace of a plan");
  add_common(sim, common);
  sim->add_option("plan", plan, "Plan id")->required();
  sim->add_option("--facts", facts, "JSON file with assertions told before simulating");

  auto* val = app.add_subcommand("validate", "Check plans and lexicon coverage");
  add_common(val, common);
  val->add_option("plan", plan, "Only this plan");

  auto* list = app.add_subcommand("list-plans", "List device plans");
  add_common(list, common);
  list->add_option("--device", device, "Only plans applicable to this device");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--fixtures", common.fixtures, "Fixture directory");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Model model = common.model();
      LanguageResources resources = LanguageResources::load(common.dir());
      GenerationRequest req;
      req.plan_id = plan;
      req.languages = languages;
      req.format = parse_format(format);
      req.mode = parse_mode(mode);
      req.facts = read_facts(facts, model.kb);
      Generation g = generate(model, resources, req);
      fs::create_directories(out);
      for (const auto& d : g.documents) {
        fs::path file = fs::path(out) / (plan + "." + d.language + "." + extension(req.format));
        std::ofstream(file, std::ios::binary) << emit(d, req.format).body;
        std::cout << file.string() << "\n";
      }
      return 0;
    }
    if (*sim) {
      Model model = common.model();
      if (!model.plans.count(plan)) {
        throw Error(ErrorCode::kUnknownId, "unknown plan '" + plan + "'", plan);
      }
      KnowledgeBase kb = model.kb;
      auto told = read_facts(facts, kb);
      if (!told.empty()) kb.tell(told);
      Trace t = simulate(plan, model.plans, kb);
      std::cout << trace_to_json(t).dump(2) << "\n";
      return t.blocked() ? kExitError : 0;
    }
    if (*val) {
      Model model = common.model();
      LanguageResources resources = LanguageResources::load(common.dir());
      bool failed = false;
      for (const auto& [id, p] : model.plans) {
        if (!plan.empty() && id != plan) continue;
        for (const auto& d : validate_plan(id, model.plans, model.kb)) {
          bool error = d.severity == Diagnostic::Severity::kError;
          failed = failed || error;
          std::cout << id << ": " << (error ? "error" : "warning") << " " << d.code << " "
                    << d.subject << ": " << d.message << "\n";
        }
      }
      if (!plan.empty() && !model.plans.count(plan)) {
        throw Error(ErrorCode::kUnknownId, "unknown plan '" + plan + "'", plan);
      }
      for (const auto& gap : coverage_report(resources.lexicon, model.kb, model.plans)) {
        failed = true;
        std::cout << "lexicon: missing " << gap.concept_id << " in";
        for (const auto& l : gap.missing) std::cout << " " << l;
        std::cout << "\n";
      }
      if (!failed) std::cout << "ok\n";
      return failed ? kExitError : 0;
    }
    if (*list) {
      Model model = common.model();
      if (!device.empty()) {
        for (const auto& o : menu_for_device(device, model.plans, model.kb)) {
          std::cout << o.id << "\n";
        }
      } else {
        for (const auto& [id, p] : model.plans) {
          if (!p.target_device.empty()) std::cout << id << "\t" << p.target_device << "\n";
        }
      }
      return 0;
    }
    if (*serve) {
      Service service(common.dir(), Service::default_domains());
      httplib::Server server;
      service.bind(server);
      std::cerr << "listening on " << host << ":" << port << "\n";
      return server.listen(host, port) ? 0 : kExitError;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    bool unknown_plan = e.code() == ErrorCode::kUnknownId && !plan.empty() && e.subject() == plan;
    return unknown_plan ? kExitUnknownPlan : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
