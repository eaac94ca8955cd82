#include <pthread.h>

#include <csignal>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "hisva/api.hpp"
#include "hisva/notes.hpp"
#include "hisva/pipeline.hpp"

namespace {

void print(const hisva::StageReport& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << r.summary << '\n';
}

int serve(const hisva::Config& cfg, std::optional<int> port) {
  hisva::IndexData data;
  try {
    data = hisva::load_index(cfg.index_path());
  } catch (const hisva::IndexLoadError& e) {
    std::cerr << "error: cannot serve: " << e.what() << "\n"
              << "hint: run the 'index' stage first\n";
    return 1;
  }
  hisva::Engine engine(std::move(data));
  hisva::NoteStore notes(cfg.notes, [&engine](const std::string& id) { return engine.find(id) != nullptr; });
  hisva::Api api(engine, notes);
  // block before the listener threads exist so only sigwait sees them
  sigset_t stop_set;
  sigemptyset(&stop_set);
  sigaddset(&stop_set, SIGINT);
  sigaddset(&stop_set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_set, nullptr);
  hisva::Server server(api);
  int bound = server.start(cfg.host, port.value_or(cfg.port));
  std::cout << "listening on http://" << cfg.host << ':' << bound << std::endl;
  int sig = 0;
  sigwait(&stop_set, &sig);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hisva: historical event corpus pipeline and query service"};
  app.require_subcommand(1);
  std::string config_path;

  auto add = [&](const std::string& name, const std::string& desc) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("-c,--config", config_path, "pipeline config file")->required();
    return sub;
  };
  auto* ingest = add("ingest", "select event articles from the snapshot");
  auto* extract = add("extract", "extract representative dates and locations");
  auto* model = add("model", "fit topic models and keep the most coherent");
  auto* rank = add("rank", "compute clickstream PageRank and importance");
  auto* index = add("index", "build the query index");
  auto* srv = add("serve", "run the HTTP query service");

  hisva::ModelOverrides overrides;
  model->add_option("--k-min", overrides.k_min, "smallest topic count");
  model->add_option("--k-max", overrides.k_max, "largest topic count");
  model->add_option("--seed", overrides.seed, "sampler seed");
  std::optional<int> port;
  srv->add_option("--port", port, "listen port (0 picks a free one)");

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = hisva::Config::load(config_path);
    if (ingest->parsed()) print(hisva::run_ingest(cfg));
    if (extract->parsed()) print(hisva::run_extract(cfg));
    if (model->parsed()) print(hisva::run_model(cfg, overrides));
    if (rank->parsed()) print(hisva::run_rank(cfg));
    if (index->parsed()) print(hisva::run_index(cfg));
    if (srv->parsed()) return serve(cfg, port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
