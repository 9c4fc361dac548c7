#include "protoseg/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>
#include <string>
#include <unordered_set>

#include "protoseg/error.hpp"

namespace protoseg {

CategoryDictionary::CategoryDictionary(std::vector<std::string> labels) {
  labels_.reserve(labels.size());
  for (auto& label : labels) {
    if (index_.count(label) != 0) {
      throw SchemaError("duplicate category label '" + label + "'");
    }
    index_.emplace(label, static_cast<Code>(labels_.size()));
    labels_.push_back(std::move(label));
  }
}

Code CategoryDictionary::add(std::string_view label) {
  auto it = index_.find(std::string(label));
  if (it != index_.end()) return it->second;
  const auto code = static_cast<Code>(labels_.size());
  labels_.emplace_back(label);
  index_.emplace(labels_.back(), code);
  return code;
}

Code CategoryDictionary::encode(std::string_view label) const {
  auto it = index_.find(std::string(label));
  return it == index_.end() ? kUnknownCode : it->second;
}

const std::string& CategoryDictionary::label(Code code) const {
  static const std::string unknown = "<unknown>";
  if (code == kUnknownCode) return unknown;
  if (code < 0 || static_cast<std::size_t>(code) >= labels_.size()) {
    throw SchemaError("category code " + std::to_string(code) + " outside dictionary");
  }
  return labels_[static_cast<std::size_t>(code)];
}

DatasetSchema::DatasetSchema(std::vector<NumericAttribute> numeric,
                             std::vector<CategoricalAttribute> categorical,
                             std::optional<std::vector<Standardization>> standardization)
    : numeric_(std::move(numeric)),
      categorical_(std::move(categorical)),
      standardization_(std::move(standardization)) {
  if (numeric_.empty() && categorical_.empty()) {
    throw SchemaError("schema has no attributes");
  }
  std::set<std::string> names;
  for (const auto& a : numeric_) {
    if (a.name.empty() || !names.insert(a.name).second) {
      throw SchemaError("empty or duplicate attribute name '" + a.name + "'");
    }
  }
  for (const auto& a : categorical_) {
    if (a.name.empty() || !names.insert(a.name).second) {
      throw SchemaError("empty or duplicate attribute name '" + a.name + "'");
    }
    if (a.dictionary.size() == 0) {
      throw SchemaError("categorical attribute '" + a.name + "' has an empty dictionary");
    }
  }
  if (standardization_) {
    if (standardization_->size() != numeric_.size()) {
      throw SchemaError("standardization has " + std::to_string(standardization_->size()) +
                        " entries for " + std::to_string(numeric_.size()) + " numeric attributes");
    }
    for (std::size_t j = 0; j < numeric_.size(); ++j) {
      const auto& s = (*standardization_)[j];
      if (!std::isfinite(s.mean) || !std::isfinite(s.stddev) || !(s.stddev > 0.0)) {
        throw SchemaError("invalid standardization for '" + numeric_[j].name + "'");
      }
    }
  }
}

double DatasetSchema::to_original(std::size_t j, double value) const {
  if (!standardization_) return value;
  const auto& s = (*standardization_)[j];
  return value * s.stddev + s.mean;
}

double DatasetSchema::to_model(std::size_t j, double value) const {
  if (!standardization_) return value;
  const auto& s = (*standardization_)[j];
  return (value - s.mean) / s.stddev;
}

MixedDataset::MixedDataset(DatasetSchema schema, std::vector<double> numeric,
                           std::vector<Code> categorical)
    : schema_(std::move(schema)), numeric_(std::move(numeric)), categorical_(std::move(categorical)) {
  const std::size_t mr = schema_.numeric_count();
  const std::size_t mc = schema_.categorical_count();
  if (mr > 0) {
    if (numeric_.size() % mr != 0) throw SchemaError("numeric matrix is not a whole number of rows");
    n_ = numeric_.size() / mr;
  } else {
    if (!numeric_.empty()) throw SchemaError("numeric values given for a schema without numeric attributes");
  }
  if (mc > 0) {
    if (categorical_.size() % mc != 0) {
      throw SchemaError("categorical matrix is not a whole number of rows");
    }
    const std::size_t rows = categorical_.size() / mc;
    if (mr > 0 && rows != n_) {
      throw SchemaError("numeric and categorical row counts differ (" + std::to_string(n_) + " vs " +
                        std::to_string(rows) + ")");
    }
    n_ = rows;
  } else if (!categorical_.empty()) {
    throw SchemaError("categorical values given for a schema without categorical attributes");
  }
  if (n_ == 0) throw EmptyDatasetError("dataset has no records");

  for (std::size_t i = 0; i < numeric_.size(); ++i) {
    if (!std::isfinite(numeric_[i])) {
      throw SchemaError("non-finite value in record " + std::to_string(i / mr) + ", attribute '" +
                        schema_.numeric()[i % mr].name + "'");
    }
  }
  for (std::size_t i = 0; i < categorical_.size(); ++i) {
    if (!schema_.valid_code(i % mc, categorical_[i])) {
      throw SchemaError("invalid code " + std::to_string(categorical_[i]) + " in record " +
                        std::to_string(i / mc) + ", attribute '" + schema_.categorical()[i % mc].name +
                        "'");
    }
  }
}

MixedDataset MixedDataset::from_records(DatasetSchema schema, std::span<const MixedRecord> records) {
  const std::size_t mr = schema.numeric_count();
  const std::size_t mc = schema.categorical_count();
  std::vector<double> numeric;
  std::vector<Code> categorical;
  numeric.reserve(records.size() * mr);
  categorical.reserve(records.size() * mc);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.numeric.size() != mr || r.categorical.size() != mc) {
      throw SchemaError("record " + std::to_string(i) + " does not match the schema shape");
    }
    numeric.insert(numeric.end(), r.numeric.begin(), r.numeric.end());
    categorical.insert(categorical.end(), r.categorical.begin(), r.categorical.end());
  }
  if (records.empty()) throw EmptyDatasetError("dataset has no records");
  return MixedDataset(std::move(schema), std::move(numeric), std::move(categorical));
}

MixedRecord MixedDataset::materialize(std::size_t i) const {
  const auto v = record(i);
  return {std::vector<double>(v.numeric.begin(), v.numeric.end()),
          std::vector<Code>(v.categorical.begin(), v.categorical.end())};
}

namespace {

// Hashes the bit patterns; -0.0 and 0.0 compare equal but hash differently,
// so zeros are canonicalized first.
std::size_t hash_record(RecordView r) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (double x : r.numeric) {
    if (x == 0.0) x = 0.0;
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    mix(bits);
  }
  for (Code c : r.categorical) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)));
  return static_cast<std::size_t>(h);
}

}  // namespace

std::size_t MixedDataset::distinct_count() const {
  struct Hash {
    const MixedDataset* d;
    std::size_t operator()(std::size_t i) const { return hash_record(d->record(i)); }
  };
  struct Eq {
    const MixedDataset* d;
    bool operator()(std::size_t a, std::size_t b) const {
      const auto ra = d->record(a);
      const auto rb = d->record(b);
      return std::equal(ra.numeric.begin(), ra.numeric.end(), rb.numeric.begin()) &&
             std::equal(ra.categorical.begin(), ra.categorical.end(), rb.categorical.begin());
    }
  };
  std::unordered_set<std::size_t, Hash, Eq> seen(n_, Hash{this}, Eq{this});
  for (std::size_t i = 0; i < n_; ++i) seen.insert(i);
  return seen.size();
}

Prototype Prototype::seed(RecordView record, const DatasetSchema& schema) {
  Prototype p;
  p.numeric_center.assign(record.numeric.begin(), record.numeric.end());
  p.categorical_mode.assign(record.categorical.begin(), record.categorical.end());
  p.category_freq.resize(schema.categorical_count());
  for (std::size_t j = 0; j < schema.categorical_count(); ++j) {
    p.category_freq[j].assign(schema.categorical()[j].dictionary.size(), 0);
  }
  p.unknown_count.assign(schema.categorical_count(), 0);
  return p;
}

double numeric_sqdist(std::span<const double> x, std::span<const double> q) {
  if (x.size() != q.size()) {
    throw DimensionError("numeric vectors of length " + std::to_string(x.size()) + " and " +
                         std::to_string(q.size()));
  }
  return detail::sqdist(x, q);
}

std::size_t categorical_mismatch(std::span<const Code> x, std::span<const Code> q) {
  if (x.size() != q.size()) {
    throw DimensionError("categorical vectors of length " + std::to_string(x.size()) + " and " +
                         std::to_string(q.size()));
  }
  return detail::mismatches(x, q);
}

double mixed_distance(RecordView record, const Prototype& prototype, double gamma) {
  if (!(gamma >= 0.0)) throw ParameterError("gamma must be >= 0, got " + std::to_string(gamma));
  return numeric_sqdist(record.numeric, prototype.numeric_center) +
         gamma * static_cast<double>(categorical_mismatch(record.categorical, prototype.categorical_mode));
}

std::size_t cluster_categorical_mismatches(const Prototype& prototype) {
  std::size_t total = 0;
  for (std::size_t j = 0; j < prototype.categorical_mode.size(); ++j) {
    const Code mode = prototype.categorical_mode[j];
    const std::size_t at_mode =
        mode == kUnknownCode ? 0 : prototype.category_freq[j][static_cast<std::size_t>(mode)];
    total += prototype.member_count - at_mode;
  }
  return total;
}

double cluster_categorical_cost(const Prototype& prototype, double gamma) {
  if (!(gamma >= 0.0)) throw ParameterError("gamma must be >= 0, got " + std::to_string(gamma));
  if (prototype.member_count == 0) throw EmptyClusterError("prototype has no members");
  return gamma * static_cast<double>(cluster_categorical_mismatches(prototype));
}

}  // namespace protoseg
