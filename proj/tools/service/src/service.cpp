#include "techdoc/service.hpp"

#include <cstdlib>
#include <sstream>

#include <httplib.h>

#include "techdoc/error.hpp"
#include "techdoc/text.hpp"

namespace techdoc {

namespace {

using Json = nlohmann::json;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownId:
    case ErrorCode::kUnknownParent:
    case ErrorCode::kUnknownRole:
    case ErrorCode::kUnknownConcept:
      return 404;
    case ErrorCode::kMissingLexiconEntry:
    case ErrorCode::kMorphologyGap:
      return 422;
    case ErrorCode::kDuplicateId:
    case ErrorCode::kDigestMismatch:
      return 409;
    default:
      return 400;
  }
}

Response error_response(int status, const std::string& code, const std::string& message,
                        const std::string& subject = {}) {
  Json j = {{"error", code}, {"message", message}};
  if (!subject.empty()) j["subject"] = subject;
  return Response{status, j};
}

Response from_error(const Error& e) {
  return error_response(status_for(e.code()), std::string(error_code_name(e.code())), e.what(),
                        e.subject());
}

std::string param(const Params& p, const std::string& key, const std::string& fallback = {}) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

const std::string& required(const Params& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end() || it->second.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "missing parameter '" + key + "'", key);
  }
  return it->second;
}

Json menu_json(const std::vector<MenuOption>& options) {
  Json arr = Json::array();
  for (const auto& o : options) arr.push_back({{"id", o.id}, {"concept", o.concept_id}});
  return arr;
}

Json span_json(const SpanRef& s) {
  return {{"span", std::to_string(s.sentence) + ":" + std::to_string(s.begin) + "-" +
                       std::to_string(s.end)},
          {"kb", s.kb_id},
          {"plan", s.plan_id},
          {"role", s.role}};
}

struct SpanAddress {
  int sentence = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

SpanAddress parse_span(const std::string& s) {
  auto colon = s.find(':');
  auto dash = s.find('-', colon == std::string::npos ? 0 : colon);
  if (colon == std::string::npos || dash == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "span must be S:B-E", s);
  }
  try {
    SpanAddress a;
    a.sentence = std::stoi(s.substr(0, colon));
    a.begin = std::stoul(s.substr(colon + 1, dash - colon - 1));
    a.end = std::stoul(s.substr(dash + 1));
    if (a.sentence < 0 || a.end < a.begin) throw std::invalid_argument(s);
    return a;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "span must be S:B-E", s);
  }
}

std::vector<std::string> languages_from(const Json& body) {
  if (!body.contains("languages")) return kLanguages;
  return body.at("languages").get<std::vector<std::string>>();
}

std::vector<Assertion> facts_from(const Json& body, const KnowledgeBase& kb) {
  std::vector<Assertion> out;
  if (!body.contains("facts")) return out;
  for (const auto& f : body.at("facts")) out.push_back(assertion_from_json(f, kb));
  return out;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json j = parse_json_text(body, "request");
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "request body must be a JSON object");
  return j;
}

// A located document: generation, language, and the document itself.
struct DocRef {
  const Generation* generation = nullptr;
  const RealizedDocument* document = nullptr;
};

DocRef find_document(const Workspace& ws, const std::string& doc_id) {
  auto slash = doc_id.rfind('/');
  if (slash == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "document id must be plan/mode/lang", doc_id);
  }
  auto it = ws.generations.find(doc_id.substr(0, slash));
  if (it == ws.generations.end()) {
    throw Error(ErrorCode::kUnknownId, "unknown document '" + doc_id + "'", doc_id);
  }
  const RealizedDocument* d = it->second.document(doc_id.substr(slash + 1));
  if (!d) throw Error(ErrorCode::kUnknownId, "unknown document '" + doc_id + "'", doc_id);
  return DocRef{&it->second, d};
}

const Token& find_token(const RealizedDocument& doc, const SpanAddress& a,
                        const std::string& span_text) {
  auto sentences = doc.sentences();
  if (static_cast<std::size_t>(a.sentence) >= sentences.size()) {
    throw Error(ErrorCode::kUnknownId, "no sentence at span '" + span_text + "'", span_text);
  }
  for (const auto& t : sentences[a.sentence]->tokens) {
    if (t.begin == a.begin && t.end == a.end) return t;
  }
  throw Error(ErrorCode::kUnknownId, "no token at span '" + span_text + "'", span_text);
}

const SentencePlan* find_plan(const DocSequence& seq, int id) {
  for (const SentencePlan* p : sentence_plans(seq)) {
    if (p->id == id) return p;
  }
  return nullptr;
}

std::string doc_id(const Generation& g, const std::string& lang) {
  return g.request.plan_id + "/" + std::string(mode_name(g.request.mode)) + "/" + lang;
}

}  // namespace

std::filesystem::path fixture_dir_from_env(const std::filesystem::path& fallback) {
  const char* env = std::getenv("TECHDOC_FIXTURES");
  return env && *env ? std::filesystem::path(env) : fallback;
}

std::map<std::string, std::string> Service::default_domains() {
  return {{"car", "car.json"}, {"aircraft", "aircraft.json"}};
}

Service::Service(const std::filesystem::path& fixture_dir,
                 std::map<std::string, std::string> domains)
    : fixture_dir_(fixture_dir), domains_(std::move(domains)) {
  for (const auto& [name, file] : domains_) models_[name] = load_model_file(fixture_dir_ / file);
  resources_ = LanguageResources::load(fixture_dir_);
}

std::shared_ptr<Workspace> Service::workspace(const Params& params) {
  std::string domain = param(params, "domain", "car");
  auto model = models_.find(domain);
  if (model == models_.end()) {
    throw Error(ErrorCode::kUnknownId, "unknown domain '" + domain + "'", domain);
  }
  std::string key = param(params, "session", "default") + "\n" + domain;
  std::lock_guard lock(workspaces_mutex_);
  auto& ws = workspaces_[key];
  if (!ws) {
    ws = std::make_shared<Workspace>();
    ws->model = model->second;
    ws->resources = resources_;
  }
  return ws;
}

Response Service::handle(const std::string& method, const std::string& path,
                         const Params& params, const std::string& body) {
  try {
    auto ws = workspace(params);
    if (method == "GET") {
      std::shared_lock lock(ws->mutex);
      if (path == "/plans") return plans(*ws, params);
      if (path == "/menu") return menu(*ws, params);
      if (path == "/query/antecedent") return antecedent(*ws, params);
      if (path == "/query/align") return align_query(*ws, params);
      if (path == "/query/location") return location(*ws, params);
    } else if (method == "POST") {
      Json j = parse_body(body);
      std::unique_lock lock(ws->mutex);
      if (path == "/draft-plan") return draft_plan(*ws, j);
      if (path == "/generate") return generate(*ws, j);
      if (path == "/simulate") return simulate(*ws, j);
      if (path == "/tell") return tell(*ws, j);
    } else {
      return error_response(405, "method-not-allowed", "unsupported method " + method);
    }
    return error_response(404, "not-found", "no endpoint " + method + " " + path, path);
  } catch (const Error& e) {
    return from_error(e);
  } catch (const Json::exception& e) {
    return error_response(400, "parse-error", e.what());
  }
}

Response Service::plans(Workspace& ws, const Params& p) {
  Json out = Json::array();
  std::string device = param(p, "device");
  if (!device.empty()) {
    for (const auto& o : menu_for_device(device, ws.model.plans, ws.model.kb)) {
      out.push_back(o.id);
    }
  } else {
    for (const auto& [id, plan] : ws.model.plans) {
      if (!plan.target_device.empty()) out.push_back(id);
    }
  }
  return Response{200, {{"plans", out}}};
}

Response Service::menu(Workspace& ws, const Params& p) {
  std::string device = param(p, "device");
  if (!device.empty()) {
    return Response{200, {{"options", menu_json(menu_for_device(device, ws.model.plans,
                                                                ws.model.kb))}}};
  }
  const std::string& process = required(p, "process");
  const std::string& role = required(p, "role");
  return Response{200, {{"options", menu_json(menu_for_role(process, role, ws.model.kb))}}};
}

Response Service::draft_plan(Workspace& ws, const Json& body) {
  if (!body.contains("plan")) throw Error(ErrorCode::kInvalidArgument, "missing 'plan'", "plan");
  Plan plan = plan_from_json(body.at("plan"), ws.model.kb);
  if (plan.id.empty()) throw Error(ErrorCode::kInvalidArgument, "plan id is empty", "plan");
  if (ws.model.plans.count(plan.id) && !ws.drafts.count(plan.id)) {
    throw Error(ErrorCode::kDuplicateId, "plan '" + plan.id + "' already exists", plan.id);
  }
  PlanLibrary library = ws.model.plans;
  library[plan.id] = plan;
  auto diags = validate_plan(plan, library, ws.model.kb);
  bool ok = true;
  for (const auto& d : diags) ok = ok && d.severity != Diagnostic::Severity::kError;
  if (!ok) {
    return Response{409, {{"error", "invalid-plan"},
                          {"plan", plan.id},
                          {"diagnostics", diagnostics_to_json(diags)}}};
  }
  if (body.contains("title")) {
    LexEntry entry;
    entry.concept_id = plan.id;
    for (const auto& [lang, title] : body.at("title").items()) {
      LexForm f;
      f.pos = "title";
      f.title = title.get<std::string>();
      entry.forms[lang] = f;
    }
    ws.resources.lexicon.remove(plan.id, "en");
    ws.resources.lexicon.remove(plan.id, "de");
    ws.resources.lexicon.remove(plan.id, "fr");
    ws.resources.lexicon.add(std::move(entry));
  }
  ws.model.plans = std::move(library);
  ws.drafts.insert(plan.id);
  for (auto it = ws.generations.begin(); it != ws.generations.end();) {
    it = it->second.request.plan_id == plan.id ? ws.generations.erase(it) : std::next(it);
  }
  return Response{201, {{"plan", plan.id}, {"diagnostics", diagnostics_to_json(diags)}}};
}

Response Service::generate(Workspace& ws, const Json& body) {
  GenerationRequest req;
  if (!body.contains("plan")) throw Error(ErrorCode::kInvalidArgument, "missing 'plan'", "plan");
  req.plan_id = body.at("plan").get<std::string>();
  req.languages = languages_from(body);
  if (body.contains("format")) req.format = parse_format(body.at("format").get<std::string>());
  if (body.contains("mode")) req.mode = parse_mode(body.at("mode").get<std::string>());
  req.facts = facts_from(body, ws.model.kb);

  Generation g = techdoc::generate(ws.model, ws.resources, req);
  Json docs = Json::object();
  for (const auto& d : g.documents) {
    Document out = emit(d, req.format);
    Json spans = Json::array();
    for (const auto& s : out.span_index) spans.push_back(span_json(s));
    docs[d.language] = {{"id", doc_id(g, d.language)},
                        {"format", std::string(format_name(out.format))},
                        {"body", out.body},
                        {"spans", spans}};
  }
  Json result = {{"plan", req.plan_id},
                 {"mode", std::string(mode_name(req.mode))},
                 {"digest", g.digest},
                 {"documents", docs}};
  if (g.trace) result["trace"] = trace_to_json(*g.trace);
  std::string key = req.plan_id + "/" + std::string(mode_name(req.mode));
  ws.generations.insert_or_assign(key, std::move(g));
  return Response{200, result};
}

Response Service::simulate(Workspace& ws, const Json& body) {
  if (!body.contains("plan")) throw Error(ErrorCode::kInvalidArgument, "missing 'plan'", "plan");
  std::string plan = body.at("plan").get<std::string>();
  if (!ws.model.plans.count(plan)) {
    throw Error(ErrorCode::kUnknownId, "unknown plan '" + plan + "'", plan);
  }
  KnowledgeBase kb = ws.model.kb;
  auto facts = facts_from(body, kb);
  if (!facts.empty()) kb.tell(facts);
  Trace t = techdoc::simulate(plan, ws.model.plans, kb);
  Json events = Json::array();
  for (const auto& e : t.entries) {
    for (const auto& ev : e.delta.events) {
      Json args = Json::array();
      for (const auto& a : ev.args) args.push_back(value_to_json(a));
      events.push_back({{"action", e.action_id}, {"name", ev.name}, {"args", args}});
    }
  }
  return Response{200, {{"trace", trace_to_json(t)}, {"events", events}}};
}

Response Service::tell(Workspace& ws, const Json& body) {
  if (!body.contains("assertions")) {
    throw Error(ErrorCode::kInvalidArgument, "missing 'assertions'", "assertions");
  }
  std::vector<Assertion> batch;
  for (const auto& a : body.at("assertions")) batch.push_back(assertion_from_json(a, ws.model.kb));
  KnowledgeBase kb = ws.model.kb;
  StateDelta delta = kb.tell(batch);
  ws.model.kb = std::move(kb);
  return Response{200, {{"delta", delta_to_json(delta)}}};
}

Response Service::antecedent(Workspace& ws, const Params& p) {
  const std::string& id = required(p, "doc");
  const std::string& span = required(p, "span");
  DocRef ref = find_document(ws, id);
  const Token& tok = find_token(*ref.document, parse_span(span), span);
  const SentencePlan* plan = find_plan(ref.generation->sequence, tok.plan_id);
  const ReferringExpression* re = nullptr;
  if (plan) {
    auto it = plan->participants.find(tok.role);
    if (it != plan->participants.end()) re = &it->second;
  }
  if (!re || re->form != RefForm::kPronoun || !re->antecedent) {
    return error_response(422, "not-a-pronoun", "token at '" + span + "' is not a pronoun", span);
  }
  auto sentences = ref.document->sentences();
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (const auto& m : referent_mentions(*sentences[s])) {
      if (m.plan_id != re->antecedent->plan || m.role != re->antecedent->role) continue;
      const auto& first = sentences[s]->tokens[m.first_token];
      const auto& last = sentences[s]->tokens[m.last_token];
      SpanRef out{static_cast<int>(s), first.begin, last.end, m.referent, m.plan_id, m.role};
      std::string text = sentences[s]->text;
      return Response{200, {{"doc", id},
                            {"span", span},
                            {"referent", re->referent},
                            {"antecedent", span_json(out)},
                            {"text", text::substr_cp(text, first.begin, last.end)}}};
    }
  }
  throw Error(ErrorCode::kUnknownId, "antecedent mention not realized", span);
}

Response Service::align_query(Workspace& ws, const Params& p) {
  const std::string& id = required(p, "doc");
  const std::string& span = required(p, "span");
  DocRef ref = find_document(ws, id);
  SpanAddress a = parse_span(span);
  const Token& tok = find_token(*ref.document, a, span);
  if (!tok.content()) {
    return error_response(422, "not-a-content-token", "token at '" + span + "' has no KB id",
                          span);
  }
  AlignmentMap map = align(ref.generation->document_pointers());
  SpanRef key{a.sentence, tok.begin, tok.end, tok.kb_id, tok.plan_id, tok.role};
  Json out = Json::object();
  for (const auto& d : ref.generation->documents) {
    if (d.language == ref.document->language) continue;
    Json spans = Json::array();
    for (const auto& s : map.counterparts(key, d.language)) spans.push_back(span_json(s));
    out[d.language] = {{"doc", doc_id(*ref.generation, d.language)}, {"spans", spans}};
  }
  return Response{200, {{"doc", id},
                        {"span", span},
                        {"kb", tok.kb_id},
                        {"plan", tok.plan_id},
                        {"counterparts", out}}};
}

Response Service::location(Workspace& ws, const Params& p) {
  const std::string& instance = required(p, "instance");
  auto ill = location_of(instance, ws.model.kb);
  if (!ill) {
    return error_response(404, "no-illustration", "'" + instance + "' has no illustration",
                          instance);
  }
  return Response{200, illustration_to_json(*ill)};
}

void Service::bind(httplib::Server& server) {
  auto adapt = [this](const std::string& method) {
    return [this, method](const httplib::Request& req, httplib::Response& res) {
      Params params;
      for (const auto& [k, v] : req.params) params[k] = v;
      if (!params.count("session") && req.has_header("X-Session")) {
        params["session"] = req.get_header_value("X-Session");
      }
      Response r = handle(method, req.path, params, req.body);
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
  };
  server.Get(R"(/.*)", adapt("GET"));
  server.Post(R"(/.*)", adapt("POST"));
}

}  // namespace techdoc
