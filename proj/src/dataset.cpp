#include "manialign/dataset.hpp"

#include "manialign/error.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace manialign {

namespace {
constexpr const char* kModule = "alignment";
}

std::size_t DomainDataset::labeled_count() const {
  return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l != kUnlabeled; }));
}

DomainDataset DomainDataset::unlabeled(Matrix features, int domain_id) {
  DomainDataset d;
  const auto n = static_cast<std::size_t>(features.rows());
  d.features = std::move(features);
  d.labels.assign(n, kUnlabeled);
  d.tie_object.assign(n, kNoTie);
  d.domain_id = domain_id;
  return d;
}

DomainDataset DomainDataset::subset(const std::vector<std::size_t>& rows) const {
  DomainDataset out;
  out.features.resize(static_cast<Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  out.tie_object.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw Error(ErrorKind::DimensionMismatch, kModule, "subset row out of range");
    out.features.row(static_cast<Index>(r)) = features.row(static_cast<Index>(rows[r]));
    out.labels.push_back(labels[rows[r]]);
    out.tie_object.push_back(tie_object[rows[r]]);
  }
  out.band_tags = band_tags;
  out.domain_id = domain_id;
  return out;
}

void DomainDataset::validate() const {
  const std::string where = "domain " + std::to_string(domain_id);
  if (features.rows() == 0) throw Error(ErrorKind::EmptyDataset, kModule, where + " has no samples");
  if (labels.size() != size() || tie_object.size() != size()) {
    throw Error(ErrorKind::DimensionMismatch, kModule, where + ": label/tie columns do not match sample count");
  }
  if (!band_tags.empty() && band_tags.size() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, kModule, where + ": band tag count does not match dimension");
  }
  if (!features.allFinite()) throw Error(ErrorKind::NonFinite, kModule, where + " has non-finite features");
  for (int l : labels)
    if (l < kUnlabeled) throw Error(ErrorKind::BadSpec, kModule, where + ": negative class id");
}

std::size_t MultiDomainCollection::total_samples() const {
  std::size_t n = 0;
  for (const auto& d : domains) n += d.size();
  return n;
}

std::size_t MultiDomainCollection::total_features() const {
  std::size_t n = 0;
  for (const auto& d : domains) n += d.dim();
  return n;
}

std::size_t MultiDomainCollection::sample_offset(std::size_t m) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < m; ++i) off += domains[i].size();
  return off;
}

std::size_t MultiDomainCollection::feature_offset(std::size_t m) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < m; ++i) off += domains[i].dim();
  return off;
}

std::vector<int> MultiDomainCollection::labels() const {
  std::vector<int> out;
  for (const auto& d : domains) out.insert(out.end(), d.labels.begin(), d.labels.end());
  return out;
}

std::vector<int> MultiDomainCollection::tie_objects() const {
  std::vector<int> out;
  for (const auto& d : domains) out.insert(out.end(), d.tie_object.begin(), d.tie_object.end());
  return out;
}

std::vector<std::size_t> MultiDomainCollection::domain_of() const {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < domains.size(); ++m) out.insert(out.end(), domains[m].size(), m);
  return out;
}

std::vector<int> MultiDomainCollection::classes() const {
  std::set<int> s;
  for (const auto& d : domains)
    for (int l : d.labels)
      if (l != kUnlabeled) s.insert(l);
  return {s.begin(), s.end()};
}

bool MultiDomainCollection::has_ties() const {
  for (const auto& d : domains)
    for (int o : d.tie_object)
      if (o != kNoTie) return true;
  return false;
}

std::vector<Matrix> MultiDomainCollection::feature_blocks() const {
  std::vector<Matrix> out;
  out.reserve(domains.size());
  for (const auto& d : domains) out.push_back(d.features);
  return out;
}

Matrix MultiDomainCollection::block_data_matrix() const {
  Matrix x = Matrix::Zero(static_cast<Index>(total_features()), static_cast<Index>(total_samples()));
  Index r = 0;
  Index c = 0;
  for (const auto& d : domains) {
    x.block(r, c, d.features.cols(), d.features.rows()) = d.features.transpose();
    r += d.features.cols();
    c += d.features.rows();
  }
  return x;
}

void MultiDomainCollection::validate(std::size_t min_domains) const {
  if (domains.size() < min_domains) {
    throw Error(ErrorKind::EmptyDataset, kModule,
                "need at least " + std::to_string(min_domains) + " domains, got " + std::to_string(domains.size()));
  }
  for (const auto& d : domains) d.validate();
}

}  // namespace manialign
