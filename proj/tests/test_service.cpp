#include <doctest.h>
#include <httplib.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "slidelayout/corpus_io.hpp"
#include "slidelayout/image.hpp"
#include "slidelayout/service.hpp"
#include "support/synthetic.hpp"

using namespace slidelayout;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  fs::path dir;
  ServiceConfig config;

  explicit Fixture(std::size_t n = 30, const std::string& name = "slidelayout_service_test") {
    dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir / "img");
    auto corpus = synth::slide_corpus(n, 42);
    for (std::size_t i = 0; i < corpus.size(); i += 2) {
      corpus[i].image_ref = corpus[i].id + ".png";
      write_png(dir / "img" / *corpus[i].image_ref, synth::slide_frame(i));
    }
    write_corpus(corpus);
    config.corpus = dir / "corpus.jsonl";
    config.images = dir / "img";
    config.heatmap_g = 8;
  }
  ~Fixture() { fs::remove_all(dir); }

  void write_corpus(const std::vector<SlideLayout>& corpus) const {
    std::ofstream out(dir / "corpus.jsonl", std::ios::trunc);
    for (const auto& l : corpus) out << layout_to_json(l).dump() << '\n';
  }
};

json parse(const Response& r) { return json::parse(r.body); }

std::string retrieve_body(const SlideLayout& l, int k) {
  json body;
  body["elements"] = json::parse(elements_to_json(l.elements).dump());
  body["k"] = k;
  return body.dump();
}

}  // namespace

TEST_CASE("service before the first load") {
  Fixture fx;
  LayoutService svc(fx.config);
  CHECK(svc.retrieve(R"({"elements":[{"category":"title","bbox":[0,0,1,1]}]})").status == 503);
  CHECK(svc.heatmap("title", false).status == 503);
  CHECK(parse(svc.stats())["slides"] == 0);
}

TEST_CASE("retrieve") {
  Fixture fx;
  LayoutService svc(fx.config);
  svc.reload();
  const auto snap = svc.snapshot();
  const SlideLayout& s7 = snap->corpus.at(snap->by_id.at("s0007"));

  SUBCASE("self retrieval through the handler") {
    const auto r = svc.retrieve(retrieve_body(s7, 3));
    REQUIRE(r.status == 200);
    CHECK(r.content_type == "application/json");
    const auto body = parse(r);
    CHECK(body["revision"] == 1);
    REQUIRE(body["results"].size() == 3);
    CHECK(body["results"][0]["id"] == "s0007");
    CHECK(body["results"][0]["score"] == 1.0);
    CHECK(body["results"][0]["image_url"].is_null());
    CHECK(json::parse(elements_to_json(s7.elements).dump()) == body["results"][0]["elements"]);
    const auto keys = body["results"][0];
    CHECK(keys.contains("id"));
    CHECK(keys.size() == 4);
  }
  SUBCASE("image urls point at the image endpoint") {
    const SlideLayout& s6 = snap->corpus.at(snap->by_id.at("s0006"));
    const auto body = parse(svc.retrieve(retrieve_body(s6, 1)));
    CHECK(body["results"][0]["image_url"] == "/api/slides/s0006/image");
  }
  SUBCASE("default k") {
    const auto body = parse(svc.retrieve(R"({"elements":[{"category":"text","bbox":[0.1,0.2,0.8,0.7]}]})"));
    CHECK(body["results"].size() == static_cast<std::size_t>(kDefaultTopK));
  }
  SUBCASE("errors") {
    auto r = svc.retrieve(R"({"elements": []})");
    CHECK(r.status == 400);
    CHECK(parse(r)["error"] == "empty_query");
    CHECK(parse(r)["message"].is_string());
    CHECK(parse(svc.retrieve("{not json")).at("error") == "malformed_body");
    CHECK(svc.retrieve("[]").status == 400);
    CHECK(svc.retrieve(R"({"k":3})").status == 400);
    CHECK(parse(svc.retrieve(R"({"elements":[{"category":"logo","bbox":[0,0,1,1]}]})"))["error"] ==
          "invalid_element");
    CHECK(parse(svc.retrieve(R"({"elements":[{"category":"text","bbox":[0,0,1,1]}],"k":0})"))["error"] ==
          "invalid_k");
    CHECK(parse(svc.retrieve(R"({"elements":[{"category":"text","bbox":[0,0,1,1]}],"k":"3"})"))["error"] ==
          "invalid_k");
  }
  SUBCASE("scores are non-increasing and rounded to 6 decimals") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 50; ++i) {
      const auto draft = synth::random_layout(rng, "d");
      const auto body = parse(svc.retrieve(retrieve_body(draft, 10)));
      double prev = 2.0;
      for (const auto& hit : body["results"]) {
        const double s = hit["score"].get<double>();
        REQUIRE(s <= prev);
        REQUIRE(std::abs(s * 1e6 - std::round(s * 1e6)) < 1e-6);
        prev = s;
      }
    }
  }
  SUBCASE("identical requests give identical bytes") {
    const auto body = retrieve_body(s7, 8);
    CHECK(svc.retrieve(body).body == svc.retrieve(body).body);
  }
}

TEST_CASE("heatmap endpoints") {
  Fixture fx;
  LayoutService svc(fx.config);
  svc.reload();

  for (const char* mode : {"title", "text", "figure", "all"}) {
    const auto r = svc.heatmap(mode, false);
    REQUIRE(r.status == 200);
    const auto body = parse(r);
    CHECK(body["mode"] == mode);
    CHECK(body["g"] == 8);
    REQUIRE(body["cells"].size() == 8);
    double peak = 0;
    for (const auto& row : body["cells"]) {
      REQUIRE(row.size() == 8);
      for (const auto& v : row) peak = std::max(peak, v.get<double>());
    }
    CHECK(peak == 1.0);
  }
  const auto bad = svc.heatmap("banner", false);
  CHECK(bad.status == 400);
  CHECK(parse(bad)["error"] == "unknown_mode");

  SUBCASE("raw grids add up") {
    const auto all = parse(svc.heatmap("all", true))["cells"];
    const auto t = parse(svc.heatmap("title", true))["cells"];
    const auto x = parse(svc.heatmap("text", true))["cells"];
    const auto f = parse(svc.heatmap("figure", true))["cells"];
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) {
        const double sum = t[r][c].get<double>() + x[r][c].get<double>() + f[r][c].get<double>();
        REQUIRE(std::abs(all[r][c].get<double>() - sum) <= 1e-12);
      }
    }
  }
  SUBCASE("overlay") {
    const auto empty = svc.heatmap_overlay(R"({"mode":"text","elements":[]})");
    CHECK(empty.status == 200);
    CHECK(empty.body == svc.heatmap("text", false).body);
    CHECK(svc.heatmap_overlay(R"({"mode":"text"})").body == svc.heatmap("text", false).body);

    // Corner cell untouched by the corpus's text boxes.
    const auto base = parse(svc.heatmap("figure", false))["cells"];
    REQUIRE(base[7][0] == 0.0);
    const auto over = parse(svc.heatmap_overlay(
        R"({"mode":"figure","elements":[{"category":"figure","bbox":[0,0.875,0.125,0.125]}]})"))["cells"];
    CHECK(over[7][0].get<double>() > 0.0);

    const auto snap = svc.snapshot();
    auto corpus = snap->corpus;
    SlideLayout draft;
    draft.id = "draft";
    draft.elements.push_back({Category::Figure, {0, 0.875, 0.125, 0.125}});
    corpus.push_back(draft);
    const auto scratch = heatmap_to_json(compute_heatmap(corpus, HeatmapMode::Figure, 8));
    CHECK(json::parse(scratch.dump())["cells"] == over);

    CHECK(parse(svc.heatmap_overlay(R"({"mode":"banner","elements":[]})"))["error"] == "unknown_mode");
    CHECK(svc.heatmap_overlay("nope").status == 400);
    CHECK(svc.heatmap_overlay(R"({"mode":"all","elements":[{"category":"text"}]})").status == 400);
  }
}

TEST_CASE("slides and images") {
  Fixture fx;
  LayoutService svc(fx.config);
  svc.reload();
  const auto snap = svc.snapshot();

  const auto r = svc.slide("s0003");
  REQUIRE(r.status == 200);
  const auto body = parse(r);
  CHECK(body["id"] == "s0003");
  CHECK(json::parse(elements_to_json(snap->corpus[3].elements).dump()) == body["elements"]);
  CHECK(body["image_url"].is_null());
  CHECK(svc.slide("nope").status == 404);

  CHECK(svc.slide_image("s0003").status == 404);
  CHECK(svc.slide_image("nope").status == 404);
  const auto img = svc.slide_image("s0004");
  REQUIRE(img.status == 200);
  CHECK(img.content_type == "image/png");
  const auto decoded = decode_png(std::span(reinterpret_cast<const std::uint8_t*>(img.body.data()), img.body.size()));
  CHECK(decoded == synth::slide_frame(4));
}

TEST_CASE("stats and reload") {
  Fixture fx(12);
  LayoutService svc(fx.config);
  svc.reload();
  auto stats = parse(svc.stats());
  CHECK(stats["slides"] == 12);
  CHECK(stats["revision"] == 1);
  CHECK(stats["descriptor_g"] == 16);
  CHECK(stats["heatmap_g"] == 8);

  auto corpus = synth::slide_corpus(13, 1);
  fx.write_corpus(corpus);
  svc.reload();
  stats = parse(svc.stats());
  CHECK(stats["slides"] == 13);
  CHECK(stats["revision"] == 2);

  // A broken corpus keeps the previous snapshot.
  std::ofstream(fx.config.corpus, std::ios::app) << "{broken\n";
  CHECK_THROWS(svc.reload());
  CHECK(parse(svc.stats())["revision"] == 2);

  fx.write_corpus({});
  svc.reload();
  stats = parse(svc.stats());
  CHECK(stats["slides"] == 0);
  CHECK(svc.heatmap("all", false).status == 503);
  CHECK(parse(svc.retrieve(R"({"elements":[{"category":"text","bbox":[0,0,1,1]}]})"))["error"] ==
        "empty_corpus");
}

TEST_CASE("config validation") {
  Fixture fx;
  CHECK_NOTHROW(fx.config.validate());
  auto c = fx.config;
  c.corpus = fx.dir / "missing.jsonl";
  CHECK_THROWS(c.validate());
  c = fx.config;
  c.descriptor_g = 0;
  CHECK_THROWS(c.validate());
  c = fx.config;
  c.images = fx.dir / "nope";
  CHECK_THROWS(c.validate());
}

TEST_CASE("external features through the service") {
  Fixture fx(4);
  std::ofstream(fx.dir / "features.jsonl") << R"({"id":"s0001","g":16,"values":[)" << [] {
    std::string v;
    for (int i = 0; i < 768; ++i) v += (i ? "," : "") + std::string(i == 700 ? "1" : "0");
    return v;
  }() << "]}\n";
  fx.config.features = fx.dir / "features.jsonl";
  LayoutService svc(fx.config);
  svc.reload();
  CHECK(svc.snapshot()->index.find("s0001")->feature.values[700] == 1.0);
}

TEST_CASE("HTTP binding") {
  Fixture fx;
  fx.config.cors_origin = "http://localhost:5173";
  LayoutService svc(fx.config);
  svc.reload();
  std::vector<std::string> log;
  std::mutex log_mutex;
  HttpServer server(svc, [&](const std::string& line) {
    std::lock_guard lock(log_mutex);
    log.push_back(line);
  });
  const int port = server.bind_any("127.0.0.1");
  REQUIRE(port > 0);
  std::thread t([&] { server.listen(); });
  httplib::Client cli("127.0.0.1", port);
  for (int i = 0; i < 100 && !server.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

  const auto snap = svc.snapshot();
  const SlideLayout& s7 = snap->corpus.at(snap->by_id.at("s0007"));

  auto res = cli.Post("/api/retrieve", retrieve_body(s7, 3), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/json");
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
  CHECK(json::parse(res->body)["results"][0]["id"] == "s0007");

  res = cli.Post("/api/retrieve", R"({"elements": []})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["error"] == "empty_query");

  res = cli.Get("/api/heatmap?mode=all&raw=1");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = cli.Get("/api/heatmap?mode=banner");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = cli.Post("/api/heatmap/overlay", R"({"mode":"title","elements":[]})", "application/json");
  REQUIRE(res);
  CHECK(res->body == svc.heatmap("title", false).body);

  res = cli.Get("/api/slides/s0004");
  REQUIRE(res);
  CHECK(json::parse(res->body)["image_url"] == "/api/slides/s0004/image");
  res = cli.Get("/api/slides/s0004/image");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "image/png");
  CHECK_NOTHROW(decode_png(std::span(reinterpret_cast<const std::uint8_t*>(res->body.data()), res->body.size())));
  res = cli.Get("/api/slides/unknown");
  REQUIRE(res);
  CHECK(res->status == 404);
  res = cli.Get("/api/stats");
  REQUIRE(res);
  CHECK(json::parse(res->body)["slides"] == 30);
  res = cli.Get("/api/nothing");
  REQUIRE(res);
  CHECK(res->status == 404);
  CHECK(json::parse(res->body)["error"] == "not_found");
  res = cli.Options("/api/retrieve");
  REQUIRE(res);
  CHECK(res->status == 204);

  server.stop();
  t.join();
  std::lock_guard lock(log_mutex);
  REQUIRE_FALSE(log.empty());
  CHECK(log.front().rfind("POST /api/retrieve 200 ", 0) == 0);
  CHECK(log.front().find("ms") != std::string::npos);
}

TEST_CASE("url_encode") {
  CHECK(url_encode("s0001") == "s0001");
  CHECK(url_encode("talk 1/slide#2") == "talk%201%2Fslide%232");
}
