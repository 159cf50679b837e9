#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "intent_eval/error.hpp"

namespace intent_eval {

enum class EmbeddingKind { token, sentence };

inline std::string_view to_string(EmbeddingKind k) { return k == EmbeddingKind::token ? "token" : "sentence"; }

/// Key -> fixed-width vector map, stored contiguously. Immutable once built.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dim, EmbeddingKind kind) : dim_(dim), kind_(kind) {
    if (dim == 0) fail(errc::dimension_mismatch, "embedding dimension must be >= 1");
  }

  void add(std::string key, std::span<const double> vec) {
    if (vec.size() != dim_) {
      fail(errc::dimension_mismatch, "vector for \"" + key + "\" has " + std::to_string(vec.size()) +
                                         " components, expected " + std::to_string(dim_));
    }
    for (double x : vec) {
      if (!std::isfinite(x)) fail(errc::parse_error, "non-finite component in vector for \"" + key + "\"");
    }
    if (index_.count(key)) fail(errc::duplicate_key, "duplicate embedding key \"" + key + "\"");
    index_.emplace(key, keys_.size());
    keys_.push_back(std::move(key));
    data_.insert(data_.end(), vec.begin(), vec.end());
  }

  const double* find(std::string_view key) const {
    auto it = index_.find(std::string(key));
    return it == index_.end() ? nullptr : data_.data() + it->second * dim_;
  }
  std::span<const double> at(std::size_t row) const { return {data_.data() + row * dim_, dim_}; }

  bool contains(std::string_view key) const { return index_.count(std::string(key)) > 0; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }
  EmbeddingKind kind() const { return kind_; }
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::size_t dim_;
  EmbeddingKind kind_;
  std::vector<std::string> keys_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads the embedding file: a JSON header line {"dim", "kind", "count"}
/// followed by `key<TAB>f1 f2 ... f_dim` lines.
inline EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open embeddings file " + path);
  auto where = [&](std::size_t line) { return path + ":" + std::to_string(line) + ": "; };

  std::string line;
  if (!std::getline(in, line)) fail(errc::parse_error, where(1) + "missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    fail(errc::parse_error, where(1) + "invalid header JSON: " + e.what());
  }
  if (!header.is_object() || !header.contains("dim") || !header["dim"].is_number_integer() ||
      header["dim"].get<long long>() < 1) {
    fail(errc::parse_error, where(1) + "header needs an integer \"dim\" >= 1");
  }
  if (!header.contains("kind") || !header["kind"].is_string() ||
      (header["kind"] != "token" && header["kind"] != "sentence")) {
    fail(errc::parse_error, where(1) + "header \"kind\" must be \"token\" or \"sentence\"");
  }
  if (!header.contains("count") || !header["count"].is_number_integer() || header["count"].get<long long>() < 0) {
    fail(errc::parse_error, where(1) + "header needs an integer \"count\" >= 0");
  }
  const auto dim = header["dim"].get<std::size_t>();
  const auto expected = header["count"].get<std::size_t>();
  EmbeddingTable table(dim, header["kind"] == "token" ? EmbeddingKind::token : EmbeddingKind::sentence);

  std::vector<double> vec;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) fail(errc::parse_error, where(lineno) + "blank line");
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) fail(errc::parse_error, where(lineno) + "expected key<TAB>values");
    std::string key = line.substr(0, tab);
    vec.clear();
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double x = 0.0;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc() || (next < end && *next != ' ')) {
        fail(errc::parse_error, where(lineno) + "bad number in vector for \"" + key + "\"");
      }
      vec.push_back(x);
      p = next;
    }
    if (vec.size() != dim) {
      fail(errc::dimension_mismatch, where(lineno) + "\"" + key + "\" has " + std::to_string(vec.size()) +
                                         " components, header says " + std::to_string(dim));
    }
    if (table.contains(key)) fail(errc::duplicate_key, where(lineno) + "duplicate key \"" + key + "\"");
    try {
      table.add(std::move(key), vec);
    } catch (const Error& e) {
      fail(e.code(), where(lineno) + e.what());
    }
  }
  if (table.size() != expected) {
    fail(errc::parse_error, path + ": header count " + std::to_string(expected) + " but " +
                                std::to_string(table.size()) + " vectors present");
  }
  return table;
}

/// Writes a table in the loader's format, floats in shortest round-trip form.
inline void write_embeddings(const EmbeddingTable& table, std::ostream& out) {
  nlohmann::json header{{"dim", table.dim()}, {"kind", to_string(table.kind())}, {"count", table.size()}};
  out << header.dump() << '\n';
  char buf[64];
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << table.keys()[r] << '\t';
    const auto v = table.at(r);
    for (std::size_t k = 0; k < v.size(); ++k) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v[k]);
      if (k) out << ' ';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

/// u.v / (|u||v|); 0 when either vector is all zeros.
inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) fail(errc::dimension_mismatch, "cosine: vectors differ in dimension");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    nu += u[k] * u[k];
    nv += v[k] * v[k];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0);
}

}  // namespace intent_eval
