#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "slidelayout/heatmap.hpp"
#include "slidelayout/index.hpp"

namespace slidelayout {

struct ServiceConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::filesystem::path corpus;
  /// Base directory for relative image refs; defaults to the corpus file's
  /// directory when empty.
  std::filesystem::path images;
  /// Optional line-delimited feature records replacing grid descriptors.
  std::filesystem::path features;
  int descriptor_g = kDefaultDescriptorGrid;
  int heatmap_g = kDefaultHeatmapGrid;
  int default_k = kDefaultTopK;
  std::string cors_origin;

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

/// Everything a request reads, published as one immutable unit.
struct ServiceSnapshot {
  std::uint64_t revision = 0;
  std::vector<SlideLayout> corpus;
  std::unordered_map<std::string, std::size_t> by_id;
  CorpusIndex index;
  /// Indexed by HeatmapMode; empty when the corpus is empty.
  std::optional<std::array<HeatmapGrid, 4>> heatmaps;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Shared pointer slot with atomic publish semantics. Readers copy the
/// pointer under a short lock and never wait on snapshot construction.
template <typename T>
class SnapshotCell {
 public:
  std::shared_ptr<const T> load() const {
    std::lock_guard lock(mutex_);
    return value_;
  }
  void store(std::shared_ptr<const T> next) {
    std::lock_guard lock(mutex_);
    value_.swap(next);
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const T> value_;
};

/// Request handling for the layout retrieval API, independent of transport.
class LayoutService {
 public:
  explicit LayoutService(ServiceConfig config);

  /// Loads the corpus file and publishes a new snapshot with the next
  /// revision. On failure the previous snapshot stays live and the error is
  /// rethrown.
  void reload();

  /// Publishes a snapshot built from in-memory layouts.
  void publish(std::vector<SlideLayout> corpus, const FeatureTable* external = nullptr);

  std::shared_ptr<const ServiceSnapshot> snapshot() const { return snapshot_.load(); }
  const ServiceConfig& config() const { return config_; }

  Response retrieve(const std::string& body) const;
  Response heatmap(const std::string& mode, bool raw) const;
  Response heatmap_overlay(const std::string& body) const;
  Response slide(const std::string& id) const;
  Response slide_image(const std::string& id) const;
  Response stats() const;

  static Response error(int status, const std::string& code, const std::string& message);

 private:
  std::filesystem::path resolve_image(const std::string& ref) const;

  ServiceConfig config_;
  SnapshotCell<ServiceSnapshot> snapshot_;
  std::mutex reload_mutex_;
  std::uint64_t last_revision_ = 0;
};

/// Builds the snapshot contents; exposed for tests.
std::shared_ptr<ServiceSnapshot> make_snapshot(std::vector<SlideLayout> corpus, int descriptor_g,
                                               int heatmap_g, std::uint64_t revision,
                                               const FeatureTable* external = nullptr);

/// Percent-encodes everything outside the URL unreserved set.
std::string url_encode(const std::string& text);

/// HTTP binding of LayoutService on cpp-httplib.
class HttpServer {
 public:
  using LogSink = std::function<void(const std::string&)>;

  HttpServer(LayoutService& service, LogSink log = {});
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Returns false when the address cannot be bound.
  bool bind(const std::string& host, int port);
  /// Binds an ephemeral port and returns it, or -1.
  int bind_any(const std::string& host);
  /// Serves until stop(); in-flight requests finish first.
  bool listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace slidelayout
