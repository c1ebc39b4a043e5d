#include <doctest.h>

#include <cmath>
#include <random>

#include "slidelayout/index.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace slidelayout;

namespace {

SlideLayout layout_of(std::string id, std::initializer_list<LayoutElement> elements) {
  SlideLayout l;
  l.id = std::move(id);
  l.elements = elements;
  return l;
}

std::vector<SlideLayout> three() {
  return {layout_of("s3", {{Category::Figure, {0.5, 0.2, 0.4, 0.6}}}),
          layout_of("s1", {{Category::Title, {0.1, 0.05, 0.8, 0.1}}}),
          layout_of("s2", {{Category::Text, {0.1, 0.2, 0.8, 0.7}}})};
}

}  // namespace

TEST_CASE("build_index") {
  SUBCASE("sorted by id") {
    const auto index = CorpusIndex::build(three());
    REQUIRE(index.size() == 3);
    CHECK(index.entries()[0].layout.id == "s1");
    CHECK(index.entries()[2].layout.id == "s3");
    CHECK(index.revision() == 1);
    CHECK(index.skipped() == 0);
    for (const auto& e : index.entries()) CHECK(e.feature.dim() == descriptor_dim(16));
  }
  SUBCASE("empty layouts are skipped") {
    auto corpus = three();
    corpus[1].elements.clear();
    const auto index = CorpusIndex::build(corpus);
    CHECK(index.size() == 2);
    CHECK(index.skipped() == 1);
    CHECK(index.find("s1") == nullptr);
  }
  SUBCASE("duplicate ids") {
    auto corpus = three();
    corpus[2].id = "s1";
    try {
      CorpusIndex::build(corpus);
      FAIL("expected DuplicateIdError");
    } catch (const DuplicateIdError& e) {
      CHECK(e.id() == "s1");
    }
  }
  SUBCASE("external features replace embeddings") {
    FeatureTable table;
    FeatureVector f;
    f.grid = 1;
    f.values = {0, 0, 1};
    table["s1"] = f;
    const auto index = CorpusIndex::build(three(), 1, 1, &table);
    CHECK(index.find("s1")->feature.values == std::vector<double>{0, 0, 1});
    CHECK(index.find("s2")->feature.values == std::vector<double>{0, 1, 0});
    FeatureTable wrong{{"s1", embed(three()[1], 2)}};
    CHECK_THROWS_AS(CorpusIndex::build(three(), 1, 1, &wrong), DimensionMismatchError);
  }
}

TEST_CASE("query") {
  const auto index = CorpusIndex::build(synth::slide_corpus(60, 3));

  SUBCASE("self retrieval") {
    const auto& target = index.find("s0007")->layout;
    const auto r = index.query(target, 5);
    REQUIRE(r.ranked.size() == 5);
    CHECK(r.ranked[0].id == "s0007");
    CHECK(r.ranked[0].score == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.ranked[0].layout == &target);
    CHECK(r.revision == 1);
    CHECK(r.query == target.elements);
  }
  SUBCASE("k larger than the corpus") {
    CHECK(index.query(index.entries()[0].layout, 1000).ranked.size() == 60);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(index.query(SlideLayout{}, 3), EmptyQueryError);
    CHECK_THROWS_AS(CorpusIndex::build({}).query(layout_of("q", {{Category::Title, {0, 0, 1, 1}}}), 3),
                    EmptyCorpusError);
  }
}

TEST_CASE("ties break by ascending id") {
  std::vector<SlideLayout> corpus;
  for (const char* id : {"d", "b", "a", "c"}) corpus.push_back(layout_of(id, {{Category::Text, {0, 0, 1, 1}}}));
  const auto r = CorpusIndex::build(corpus).query(layout_of("q", {{Category::Text, {0, 0, 0.5, 0.5}}}), 4);
  std::vector<std::string> ids;
  for (const auto& hit : r.ranked) ids.push_back(hit.id);
  CHECK(ids == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("partial draft finds its superset") {
  std::vector<SlideLayout> corpus{
      layout_of("s7", {{Category::Title, {0.05, 0.05, 0.4, 0.1}}, {Category::Text, {0.05, 0.2, 0.4, 0.7}}}),
      layout_of("s8", {{Category::Figure, {0.5, 0.0, 0.5, 1.0}}}),
      layout_of("s9", {{Category::Figure, {0.6, 0.1, 0.3, 0.3}}})};
  const auto r = CorpusIndex::build(corpus).query(layout_of("q", {{Category::Title, {0.05, 0.05, 0.4, 0.1}}}), 3);
  CHECK(r.ranked[0].id == "s7");
  CHECK(r.ranked[0].score > 0.0);
  CHECK(r.ranked[1].score == 0.0);
}

TEST_CASE("upsert") {
  const auto index = CorpusIndex::build(three());
  const auto added = index.upsert(layout_of("s4", {{Category::Title, {0.2, 0.4, 0.6, 0.2}}}));
  CHECK(added.size() == 4);
  CHECK(added.revision() == index.revision() + 1);
  CHECK(index.size() == 3);
  const auto r = added.query(added.find("s4")->layout, 1);
  CHECK(r.ranked[0].id == "s4");
  CHECK(r.ranked[0].score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.revision == added.revision());

  const auto changed = added.upsert(layout_of("s1", {{Category::Figure, {0, 0, 1, 1}}}));
  CHECK(changed.size() == 4);
  CHECK(changed.find("s1")->feature != added.find("s1")->feature);
  CHECK_THROWS_AS(changed.upsert(layout_of("s5", {})), EmptyLayoutError);
  CHECK_THROWS_AS(changed.upsert(layout_of("s5", {{Category::Text, {0.5, 0.5, 0.9, 0.9}}})), LayoutError);
}

TEST_CASE("oracle equivalence on randomized corpora") {
  for (std::size_t n : {1u, 17u, 250u, 1000u}) {
    const auto corpus = synth::random_corpus(n, 1000 + n);
    const auto index = CorpusIndex::build(corpus);
    std::mt19937_64 rng(n);
    for (int q = 0; q < 10; ++q) {
      const auto draft = synth::random_layout(rng, "draft");
      for (int k : {1, 5, 10}) {
        const auto got = index.query(draft, k).ranked;
        const auto want = oracle::brute_force_top_k(corpus, draft, 16, k);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
          REQUIRE(got[i].id == want[i].id);
          REQUIRE(std::abs(got[i].score - want[i].score) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("self retrieval across every entry") {
  const auto corpus = synth::slide_corpus(120, 9);
  const auto index = CorpusIndex::build(corpus);
  for (const auto& layout : corpus) {
    const auto r = index.query(layout, 1);
    REQUIRE(r.ranked[0].id == layout.id);
    REQUIRE(std::abs(r.ranked[0].score - 1.0) <= 1e-9);
  }
}
