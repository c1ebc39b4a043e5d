// Command-line entry points: extract, validate, heatmap, query, serve.
//
// Exit codes: 0 success, 1 domain failure, 2 usage or environment failure.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "slidelayout/corpus_io.hpp"
#include "slidelayout/extractor.hpp"
#include "slidelayout/heatmap.hpp"
#include "slidelayout/index.hpp"
#include "slidelayout/service.hpp"

namespace fs = std::filesystem;
using namespace slidelayout;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsageFailure = 2;

struct ExtractArgs {
  std::string frames;
  std::string out;
  ExtractorConfig config;
};

struct CorpusArgs {
  std::string corpus;
  std::string draft;
  std::string mode = "all";
  int k = kDefaultTopK;
  int g = 0;
};

int run_extract(const ExtractArgs& args) {
  try {
    args.config.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "extract: " << e.what() << '\n';
    return kUsageFailure;
  }
  if (!fs::is_directory(args.frames) || list_frames(args.frames).empty()) {
    std::cerr << "extract: no frame images (.png/.ppm) in " << args.frames << '\n';
    return kUsageFailure;
  }
  try {
    const auto slides = extract_directory(args.frames, args.out, args.config);
    std::cout << "extracted " << slides.size() << " slides\n";
  } catch (const std::exception& e) {
    std::cerr << "extract: " << e.what() << '\n';
    return kDomainFailure;
  }
  return kOk;
}

// Loads a corpus or reports why not. Returns the exit code on failure.
std::optional<int> load_or_report(const std::string& path, CorpusFile& out, const char* cmd) {
  if (!fs::is_regular_file(path)) {
    std::cerr << cmd << ": cannot read " << path << '\n';
    return kUsageFailure;
  }
  try {
    out = load_corpus(path);
  } catch (const std::exception& e) {
    std::cerr << cmd << ": " << e.what() << '\n';
    return kUsageFailure;
  }
  if (!out.ok()) {
    for (const auto& err : out.errors) std::cerr << path << ": line " << err.line << ": " << err.message << '\n';
    return kDomainFailure;
  }
  return std::nullopt;
}

int run_validate(const CorpusArgs& args) {
  CorpusFile corpus;
  if (!fs::is_regular_file(args.corpus)) {
    std::cerr << "validate: cannot read " << args.corpus << '\n';
    return kUsageFailure;
  }
  try {
    corpus = load_corpus(args.corpus);
  } catch (const std::exception& e) {
    std::cerr << "validate: " << e.what() << '\n';
    return kUsageFailure;
  }
  for (const auto& err : corpus.errors) std::cout << "line " << err.line << ": " << err.message << '\n';

  const auto counts = count_categories(corpus.layouts);
  std::cout << corpus.layouts.size() << " slides, " << counts.at(Category::Title) << " title, "
            << counts.at(Category::Text) << " text, " << counts.at(Category::Figure) << " figure\n";
  if (!corpus.ok()) {
    std::cout << corpus.errors.size() << " invalid records\n";
    return kDomainFailure;
  }
  return kOk;
}

int run_heatmap(const CorpusArgs& args) {
  CorpusFile corpus;
  if (auto rc = load_or_report(args.corpus, corpus, "heatmap")) return *rc;
  const auto mode = parse_heatmap_mode(args.mode);
  if (!mode) {
    std::cerr << "heatmap: unknown mode " << args.mode << '\n';
    return kUsageFailure;
  }
  if (corpus.layouts.empty()) {
    std::cerr << "heatmap: corpus is empty\n";
    return kDomainFailure;
  }
  const int g = args.g > 0 ? args.g : kDefaultHeatmapGrid;
  std::cout << heatmap_to_json(compute_heatmap(corpus.layouts, *mode, g)).dump() << '\n';
  return kOk;
}

int run_query(const CorpusArgs& args) {
  CorpusFile corpus;
  if (auto rc = load_or_report(args.corpus, corpus, "query")) return *rc;

  std::ifstream in(args.draft);
  if (!in) {
    std::cerr << "query: cannot read " << args.draft << '\n';
    return kUsageFailure;
  }
  SlideLayout draft;
  try {
    std::stringstream text;
    text << in.rdbuf();
    auto raw = nlohmann::json::parse(text.str());
    if (raw.is_object() && !raw.contains("id")) raw["id"] = "draft";
    draft = validate_layout(raw);
  } catch (const std::exception& e) {
    std::cerr << "query: invalid draft: " << e.what() << '\n';
    return kDomainFailure;
  }
  if (draft.elements.empty()) {
    std::cerr << "query: draft has no elements\n";
    return kDomainFailure;
  }

  try {
    const int g = args.g > 0 ? args.g : kDefaultDescriptorGrid;
    const auto index = CorpusIndex::build(corpus.layouts, g);
    if (index.empty()) {
      std::cerr << "query: corpus has no indexable slides\n";
      return kDomainFailure;
    }
    const auto result = index.query(draft, args.k);
    int rank = 1;
    for (const auto& hit : result.ranked) {
      std::printf("%d %s %.6f\n", rank++, hit.id.c_str(), hit.score);
    }
  } catch (const std::exception& e) {
    std::cerr << "query: " << e.what() << '\n';
    return kDomainFailure;
  }
  return kOk;
}

// Config keys fill options not given on the command line. Unknown keys are errors.
void apply_config_file(CLI::App& cmd, const std::string& path) {
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    CLI::Option* opt = item.parents.empty() ? cmd.get_option_no_throw("--" + item.name) : nullptr;
    if (opt == nullptr || item.name == "config") {
      throw CLI::ConfigError("unknown config key \"" + item.fullname() + "\" in " + path);
    }
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

int run_serve(const ServiceConfig& config) {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "serve: invalid config: " << e.what() << '\n';
    return kUsageFailure;
  }

  LayoutService service(config);
  try {
    service.reload();
  } catch (const std::exception& e) {
    std::cerr << "serve: " << e.what() << '\n';
    return kUsageFailure;
  }

  // Signals are consumed by a dedicated thread; workers never see them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGHUP);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpServer server(service, [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); });
  if (!server.bind(config.bind, config.port)) {
    std::cerr << "serve: cannot bind " << config.bind << ":" << config.port << '\n';
    return kUsageFailure;
  }

  std::atomic<bool> stopping{false};
  std::thread watcher([&] {
    while (true) {
      int sig = 0;
      if (sigwait(&signals, &sig) != 0) continue;
      if (sig == SIGHUP) {
        try {
          service.reload();
          std::fprintf(stderr, "reloaded corpus, revision %llu\n",
                       static_cast<unsigned long long>(service.snapshot()->revision));
        } catch (const std::exception& e) {
          std::fprintf(stderr, "reload failed, keeping previous corpus: %s\n", e.what());
        }
        continue;
      }
      stopping = true;
      server.stop();
      return;
    }
  });

  const auto snap = service.snapshot();
  std::fprintf(stderr, "serving %zu slides on %s:%d (revision %llu)\n", snap->corpus.size(),
               config.bind.c_str(), config.port, static_cast<unsigned long long>(snap->revision));
  const bool clean = server.listen();
  if (!clean) std::fprintf(stderr, "serve: listener stopped unexpectedly\n");
  // Wakes the watcher if the listener exited on its own.
  if (!stopping) pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  return clean ? kOk : kUsageFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slide layout retrieval engine"};
  app.require_subcommand(1);

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Extract slides from a directory of decoded frames");
  extract_cmd->add_option("--frames", extract.frames, "Directory of frame images (.png/.ppm)")->required();
  extract_cmd->add_option("--out", extract.out, "Output directory for slides and manifest")->required();
  extract_cmd->add_option("--threshold", extract.config.transition_threshold, "Transition threshold T (bits)")
      ->capture_default_str();
  extract_cmd->add_option("--window", extract.config.stability_window, "Stability window S (frames)")
      ->capture_default_str();
  extract_cmd->add_option("--dedup", extract.config.dedup_threshold, "Dedup threshold D (bits)")
      ->capture_default_str();

  CorpusArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check a corpus annotation file");
  validate_cmd->add_option("--corpus", validate.corpus, "Line-delimited annotation file")->required();

  CorpusArgs heat;
  auto* heatmap_cmd = app.add_subcommand("heatmap", "Print a corpus heatmap record");
  heatmap_cmd->add_option("--corpus", heat.corpus, "Line-delimited annotation file")->required();
  heatmap_cmd->add_option("--mode", heat.mode, "title, text, figure or all")
      ->required()
      ->check(CLI::IsMember({"title", "text", "figure", "all"}));
  heatmap_cmd->add_option("--g", heat.g, "Heatmap grid size")->check(CLI::PositiveNumber);

  CorpusArgs query;
  auto* query_cmd = app.add_subcommand("query", "Rank corpus slides against a draft layout");
  query_cmd->add_option("--corpus", query.corpus, "Line-delimited annotation file")->required();
  query_cmd->add_option("--draft", query.draft, "Draft layout record (JSON)")->required();
  query_cmd->add_option("-k", query.k, "Number of results")->capture_default_str()->check(CLI::PositiveNumber);
  query_cmd->add_option("--g", query.g, "Descriptor grid size")->check(CLI::PositiveNumber);

  ServiceConfig serve;
  std::string corpus_path, images_path, features_path, config_path;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP retrieval service");
  serve_cmd->add_option("--config", config_path, "Flat key = value config file")
      ->required()
      ->check(CLI::ExistingFile);
  serve_cmd->add_option("--bind", serve.bind, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port")->capture_default_str();
  serve_cmd->add_option("--corpus", corpus_path, "Corpus annotation file");
  serve_cmd->add_option("--images", images_path, "Base directory for slide images");
  serve_cmd->add_option("--features", features_path, "External feature records to use instead of grid descriptors");
  serve_cmd->add_option("--descriptor_g", serve.descriptor_g, "Descriptor grid size")->capture_default_str();
  serve_cmd->add_option("--heatmap_g", serve.heatmap_g, "Heatmap grid size")->capture_default_str();
  serve_cmd->add_option("--default_k", serve.default_k, "Default number of results")->capture_default_str();
  serve_cmd->add_option("--cors_origin", serve.cors_origin, "Access-Control-Allow-Origin value");

  try {
    app.parse(argc, argv);
    if (*serve_cmd) apply_config_file(*serve_cmd, config_path);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageFailure;
  }

  if (*extract_cmd) return run_extract(extract);
  if (*validate_cmd) return run_validate(validate);
  if (*heatmap_cmd) return run_heatmap(heat);
  if (*query_cmd) return run_query(query);
  if (*serve_cmd) {
    serve.corpus = corpus_path;
    serve.images = images_path;
    serve.features = features_path;
    return run_serve(serve);
  }
  return kUsageFailure;
}
