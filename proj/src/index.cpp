#include "slidelayout/index.hpp"

#include <algorithm>

namespace slidelayout {

namespace {

bool by_id(const IndexEntry& a, const IndexEntry& b) { return a.layout.id < b.layout.id; }

void check_layout(const SlideLayout& layout) {
  if (layout.id.empty()) throw LayoutError(LayoutErrc::MissingId, "layout has no id");
  for (const auto& e : layout.elements) {
    if (!is_valid(e.rect)) {
      throw LayoutError(LayoutErrc::OutOfRange, "layout \"" + layout.id + "\" has an invalid rect");
    }
  }
}

}  // namespace

CorpusIndex CorpusIndex::build(const std::vector<SlideLayout>& corpus, int grid,
                               std::uint64_t revision, const FeatureTable* external) {
  if (grid < 1) throw std::invalid_argument("descriptor grid must be >= 1");
  CorpusIndex index;
  index.grid_ = grid;
  index.revision_ = revision;
  index.entries_.reserve(corpus.size());

  for (const auto& layout : corpus) {
    check_layout(layout);
    if (layout.elements.empty()) {
      ++index.skipped_;
      continue;
    }
    IndexEntry entry{layout, {}};
    const FeatureVector* supplied = nullptr;
    if (external != nullptr) {
      if (auto it = external->find(layout.id); it != external->end()) supplied = &it->second;
    }
    if (supplied != nullptr) {
      if (supplied->grid != grid || supplied->dim() != descriptor_dim(grid)) {
        throw DimensionMismatchError("external feature for \"" + layout.id +
                                     "\" does not match descriptor grid " + std::to_string(grid));
      }
      entry.feature = *supplied;
    } else {
      entry.feature = embed(layout, grid);
    }
    index.entries_.push_back(std::move(entry));
  }

  std::sort(index.entries_.begin(), index.entries_.end(), by_id);
  const auto dup = std::adjacent_find(
      index.entries_.begin(), index.entries_.end(),
      [](const IndexEntry& a, const IndexEntry& b) { return a.layout.id == b.layout.id; });
  if (dup != index.entries_.end()) throw DuplicateIdError(dup->layout.id);
  return index;
}

CorpusIndex CorpusIndex::upsert(const SlideLayout& layout) const {
  check_layout(layout);
  IndexEntry entry{layout, embed(layout, grid_)};

  CorpusIndex next = *this;
  ++next.revision_;
  auto it = std::lower_bound(next.entries_.begin(), next.entries_.end(), entry, by_id);
  if (it != next.entries_.end() && it->layout.id == layout.id) {
    *it = std::move(entry);
  } else {
    next.entries_.insert(it, std::move(entry));
  }
  return next;
}

RetrievalResult CorpusIndex::query(const SlideLayout& draft, int k) const {
  if (draft.elements.empty()) throw EmptyQueryError();
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (entries_.empty()) throw EmptyCorpusError();

  const FeatureVector q = embed(draft, grid_);
  std::vector<RankedSlide> scored;
  scored.reserve(entries_.size());
  for (const auto& entry : entries_) {
    scored.push_back({entry.layout.id, similarity(q, entry.feature), &entry.layout});
  }

  const auto order = [](const RankedSlide& a, const RankedSlide& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  };
  const auto top = std::min(static_cast<std::size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(top),
                    scored.end(), order);
  scored.resize(top);

  return {std::move(scored), draft.elements, revision_};
}

const IndexEntry* CorpusIndex::find(const std::string& id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const IndexEntry& e, const std::string& key) { return e.layout.id < key; });
  if (it == entries_.end() || it->layout.id != id) return nullptr;
  return &*it;
}

}  // namespace slidelayout
