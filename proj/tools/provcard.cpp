// provcard: replay captured notebook sessions and serve the sync API.
//
// Exit codes: 0 success, 2 bad input (session, snapshot, query), 3 service
// failure (store, network, LLM gateway).

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "provcard/errors.hpp"
#include "provcard/http_api.hpp"
#include "provcard/json_io.hpp"
#include "provcard/session.hpp"
#include "provcard/svg.hpp"
#include "provcard/sync.hpp"

namespace fs = std::filesystem;
using namespace provcard;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitService = 3;

struct LlmOptions {
  bool use_llm = false;
  std::string gateway_config;
  std::string recorded;
};

std::shared_ptr<llm::Gateway> make_gateway(const LlmOptions& o) {
  if (!o.use_llm) return llm::Gateway::disabled();
  llm::GatewayConfig config;
  if (!o.gateway_config.empty()) config = llm::GatewayConfig::load(o.gateway_config);
  config.apply_env_overrides();
  if (!o.recorded.empty()) {
    config.mode = llm::GatewayMode::live;
    return std::make_shared<llm::Gateway>(config, llm::RecordedTransport::from_file(o.recorded));
  }
  if (config.mode != llm::GatewayMode::live) return llm::Gateway::disabled();
  const char* key = std::getenv(config.credential_env.c_str());
  return std::make_shared<llm::Gateway>(
      config, std::make_shared<llm::HttpTransport>(config.endpoint, key ? key : ""));
}

SyncService::Options service_options(const LlmOptions& o, bool logical_clock) {
  SyncService::Options options;
  options.gateway = make_gateway(o);
  options.backend = o.use_llm ? Backend::llm : Backend::deterministic;
  if (logical_clock) {
    options.clock = std::make_shared<LogicalClock>();
  } else {
    options.clock = std::make_shared<SystemClock>();
  }
  options.poll_seconds = poll_seconds_from_env();
  return options;
}

/// Removes a scratch store on exit unless the user named one.
struct ScratchDir {
  fs::path path;
  bool owned = false;
  ~ScratchDir() {
    if (owned) {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  }
};

ScratchDir store_dir(const std::string& requested) {
  if (!requested.empty()) return {requested, false};
  std::random_device rd;
  fs::path p = fs::temp_directory_path() / ("provcard-" + std::to_string(rd()) + std::to_string(rd()));
  fs::create_directories(p);
  return {p, true};
}

void print_card(std::ostream& out, const DataVersionCard& card) {
  out << card.variable << '#' << card.index << ' ' << to_string(card.operation_kind) << ": "
      << card.summary << '\n';
}

std::vector<DataVersionCard> cards_by_seq(const SyncService& service) {
  std::vector<DataVersionCard> all;
  for (const auto& v : service.variables()) {
    for (auto& c : service.store().cards(v)) all.push_back(std::move(c));
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
  return all;
}

extern "C" void on_signal(int) { stop_server(); }

void serve(SyncService& service, const std::string& host, int port) {
  HttpApi api(service);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving on http://" << host << ':' << port << " (poll every " << service.poll_seconds()
            << " s)\n";
  run_server(api, host, port);
}

struct ReplayOptions {
  std::string session;
  bool deterministic = false;
  LlmOptions llm;
  std::string emit_svg;
  std::string remote;
  int serve_port = 0;
  std::string host = "127.0.0.1";
  std::string store;
  std::string dump;
};

int run_replay(const ReplayOptions& o) {
  const auto steps = read_session(o.session);
  std::vector<IngestEvent> events;
  events.reserve(steps.size());
  for (const auto& s : steps) events.push_back(load_step(s));

  if (!o.remote.empty()) {
    RemoteClient client(o.remote);
    for (const auto& e : events) {
      const auto r = client.post_event(e);
      std::cout << e.variable << '#' << r.value("index", 0) << (r.value("created", false) ? " created" : " unchanged")
                << '\n';
    }
    return 0;
  }

  const ScratchDir dir = store_dir(o.store);
  SyncService service(dir.path, service_options(o.llm, true));
  for (const auto& e : events) service.post_event(e);

  const auto cards = cards_by_seq(service);
  for (const auto& c : cards) print_card(std::cout, c);

  if (!o.emit_svg.empty()) {
    fs::create_directories(o.emit_svg);
    for (const auto& c : cards) {
      const fs::path file = fs::path(o.emit_svg) / (c.variable + "_v" + std::to_string(c.index) + ".svg");
      write_file_atomic(file, render_svg(c.snapgrid, c.variable + " v" + std::to_string(c.index)));
    }
  }
  if (!o.dump.empty()) {
    nlohmann::ordered_json log = nlohmann::ordered_json::array();
    for (const auto& c : cards) log.push_back(json::to_json(c));
    write_file_atomic(o.dump, log.dump(2) + "\n");
  }
  if (o.serve_port > 0) serve(service, o.host, o.serve_port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-operation provenance cards for notebook sessions"};
  app.require_subcommand(1);

  ReplayOptions replay;
  auto* rp = app.add_subcommand("replay", "Replay a scripted session and print one line per card");
  rp->add_option("session", replay.session, "Session script")->required()->check(CLI::ExistingFile);
  auto* det = rp->add_flag("--deterministic", replay.deterministic, "Rule-based analysis only (default)");
  rp->add_flag("--llm", replay.llm.use_llm, "Use the LLM gateway, falling back to rules")->excludes(det);
  rp->add_option("--gateway-config", replay.llm.gateway_config, "Gateway JSON config")->check(CLI::ExistingFile);
  rp->add_option("--recorded", replay.llm.recorded, "Recorded LLM replies (implies a live gateway)")
      ->check(CLI::ExistingFile);
  rp->add_option("--emit-svg", replay.emit_svg, "Write one SnapGrid SVG per card into this directory");
  rp->add_option("--remote", replay.remote, "Post events to a running service instead");
  rp->add_option("--serve", replay.serve_port, "Serve the replayed store on this port afterwards");
  rp->add_option("--host", replay.host, "Bind address for --serve");
  rp->add_option("--store", replay.store, "Store directory (a temporary one by default)");
  rp->add_option("--dump", replay.dump, "Write the full card log as JSON");

  std::string serve_store = "provcard-store";
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  LlmOptions serve_llm;
  auto* sv = app.add_subcommand("serve", "Run the sync service");
  sv->add_option("--store", serve_store, "Store directory");
  sv->add_option("--host", serve_host, "Bind address");
  sv->add_option("--port", serve_port, "Port");
  sv->add_flag("--llm", serve_llm.use_llm, "Use the LLM gateway");
  sv->add_option("--gateway-config", serve_llm.gateway_config, "Gateway JSON config")->check(CLI::ExistingFile);
  sv->add_option("--recorded", serve_llm.recorded, "Recorded LLM replies")->check(CLI::ExistingFile);

  std::string q_store, q_variable, q_text;
  std::size_t q_version = 0;
  auto* qp = app.add_subcommand("query", "Compile a filter query against a stored version");
  qp->add_option("--store", q_store, "Store directory")->required()->check(CLI::ExistingDirectory);
  qp->add_option("variable", q_variable)->required();
  qp->add_option("version", q_version)->required();
  qp->add_option("text", q_text)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*rp) return run_replay(replay);
    if (*sv) {
      fs::create_directories(serve_store);
      SyncService service(serve_store, service_options(serve_llm, false));
      serve(service, serve_host, serve_port);
      return 0;
    }
    if (*qp) {
      SyncService service(q_store, service_options({}, true));
      const QueryOutcome out = service.query(q_variable, q_version, q_text);
      auto j = json::to_json(out.result);
      j["conditions"] = json::to_json(out.conditions);
      std::cout << j.dump(2) << '\n';
      return 0;
    }
  } catch (const UnknownColumn& e) {
    std::cerr << "error: " << e.what();
    if (!e.nearest().empty()) {
      std::cerr << " (did you mean";
      for (const auto& n : e.nearest()) std::cerr << " '" << n << "'";
      std::cerr << "?)";
    }
    std::cerr << '\n';
    return kExitInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const UnknownVariable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const UnknownVersion& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitService;
  }
  return 0;
}
