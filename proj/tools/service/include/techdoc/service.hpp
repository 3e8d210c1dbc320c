#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "techdoc/pipeline.hpp"

namespace httplib {
class Server;
}

namespace techdoc {

// Fixture directory from TECHDOC_FIXTURES, falling back to `fallback`.
std::filesystem::path fixture_dir_from_env(const std::filesystem::path& fallback);

struct Response {
  int status = 200;
  nlohmann::json body;
};

using Params = std::map<std::string, std::string>;

// Per session and domain: a private copy of the model plus the documents
// generated in it. Documents are addressed as "plan/mode/lang".
struct Workspace {
  Model model;
  LanguageResources resources;
  std::map<std::string, Generation> generations;  // "plan/mode"
  std::set<std::string> drafts;
  mutable std::shared_mutex mutex;
};

class Service {
 public:
  // Loads every domain model named in `domains` (domain -> model file).
  Service(const std::filesystem::path& fixture_dir, std::map<std::string, std::string> domains);
  // Domains are the fixture files that define device plans: car, aircraft.
  static std::map<std::string, std::string> default_domains();

  // Transport-independent entry point used by the HTTP binding and tests.
  // Parameters "session" (default "default") and "domain" (default "car")
  // select the workspace.
  Response handle(const std::string& method, const std::string& path, const Params& params,
                  const std::string& body);

  void bind(httplib::Server& server);

 private:
  std::shared_ptr<Workspace> workspace(const Params& params);

  Response plans(Workspace& ws, const Params& p);
  Response menu(Workspace& ws, const Params& p);
  Response draft_plan(Workspace& ws, const nlohmann::json& body);
  Response generate(Workspace& ws, const nlohmann::json& body);
  Response simulate(Workspace& ws, const nlohmann::json& body);
  Response tell(Workspace& ws, const nlohmann::json& body);
  Response antecedent(Workspace& ws, const Params& p);
  Response align_query(Workspace& ws, const Params& p);
  Response location(Workspace& ws, const Params& p);

  std::filesystem::path fixture_dir_;
  std::map<std::string, std::string> domains_;
  std::map<std::string, Model> models_;
  LanguageResources resources_;
  std::mutex workspaces_mutex_;
  std::map<std::string, std::shared_ptr<Workspace>> workspaces_;
};

}  // namespace techdoc
