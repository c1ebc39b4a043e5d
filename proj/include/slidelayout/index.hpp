#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "slidelayout/descriptor.hpp"
#include "slidelayout/layout.hpp"

namespace slidelayout {

inline constexpr int kDefaultTopK = 8;

class DuplicateIdError : public std::invalid_argument {
 public:
  explicit DuplicateIdError(std::string id)
      : std::invalid_argument("duplicate id \"" + id + "\""), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class EmptyQueryError : public std::invalid_argument {
 public:
  EmptyQueryError() : std::invalid_argument("query draft has no elements") {}
};

struct IndexEntry {
  SlideLayout layout;
  FeatureVector feature;
};

struct RankedSlide {
  std::string id;
  double score = 0.0;
  const SlideLayout* layout = nullptr;
};

struct RetrievalResult {
  std::vector<RankedSlide> ranked;
  std::vector<LayoutElement> query;
  std::uint64_t revision = 0;
};

/// Immutable snapshot of an embedded corpus. Entries are sorted by id.
///
/// Copies are cheap-ish but the intended use is to hold the index through a
/// shared_ptr<const CorpusIndex> and publish new snapshots on change.
class CorpusIndex {
 public:
  /// Embeds every layout; layouts without elements are skipped and counted.
  /// `external` optionally supplies precomputed vectors by id, which must
  /// match the index dimension. Throws DuplicateIdError.
  static CorpusIndex build(const std::vector<SlideLayout>& corpus,
                           int grid = kDefaultDescriptorGrid, std::uint64_t revision = 1,
                           const FeatureTable* external = nullptr);

  /// New snapshot with `layout` replacing the entry of the same id (or
  /// appended), revision + 1.
  CorpusIndex upsert(const SlideLayout& layout) const;

  /// Exhaustive top-k by score descending, id ascending on ties.
  /// Throws EmptyQueryError or EmptyCorpusError.
  RetrievalResult query(const SlideLayout& draft, int k = kDefaultTopK) const;

  const IndexEntry* find(const std::string& id) const;

  const std::vector<IndexEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int grid() const { return grid_; }
  std::uint64_t revision() const { return revision_; }
  std::size_t skipped() const { return skipped_; }

 private:
  std::vector<IndexEntry> entries_;
  int grid_ = kDefaultDescriptorGrid;
  std::uint64_t revision_ = 0;
  std::size_t skipped_ = 0;
};

}  // namespace slidelayout
