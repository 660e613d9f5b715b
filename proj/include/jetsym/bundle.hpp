#pragma once

#include <array>
#include <cctype>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jetsym/errors.hpp"

namespace jetsym {

/// Derivative multi-index (j_z, j_t); (0,0) is the undifferentiated variable.
struct MultiIndex {
  int jz = 0;
  int jt = 0;

  int order() const { return jz + jt; }
  MultiIndex shifted_z(int k = 1) const { return {jz + k, jt}; }
  MultiIndex shifted_t(int k = 1) const { return {jz, jt + k}; }

  /// Componentwise J <= K, i.e. K is a derivative descendant of J.
  bool leq(const MultiIndex& other) const {
    return jz <= other.jz && jt <= other.jt;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.order() <=> b.order(); c != 0) return c;
    return a.jz <=> b.jz;
  }
};

/// A jet-space coordinate x^alpha_J, treated as an independent algebraic
/// symbol everywhere in the library.
struct JetCoordinate {
  int dep = 0;  // index into BundleSpec::dependent_names
  MultiIndex index;

  int order() const { return index.order(); }

  friend bool operator==(const JetCoordinate&, const JetCoordinate&) = default;
  friend auto operator<=>(const JetCoordinate& a, const JetCoordinate& b) {
    if (auto c = a.dep <=> b.dep; c != 0) return c;
    return a.index <=> b.index;
  }
};

/// A symbol of the ambient jet space: one of the two independent variables
/// or a jet coordinate. The total order puts independent variables first,
/// then jet coordinates by (dep, |J|, j_z); all monomial and printing
/// conventions derive from it.
class Sym {
 public:
  Sym() : key_(0) {}

  static Sym indep(int i) {
    Sym s;
    s.key_ = static_cast<std::uint64_t>(i);
    return s;
  }

  static Sym jet(const JetCoordinate& c) {
    return jet(c.dep, c.index.jz, c.index.jt);
  }

  static Sym jet(int dep, int jz, int jt) {
    Sym s;
    s.key_ = kJetBit | (static_cast<std::uint64_t>(dep) << 40) |
             (static_cast<std::uint64_t>(jz + jt) << 20) |
             static_cast<std::uint64_t>(jz);
    return s;
  }

  bool is_independent() const { return (key_ & kJetBit) == 0; }
  bool is_jet() const { return !is_independent(); }

  int indep_index() const { return static_cast<int>(key_); }

  JetCoordinate jet_coordinate() const {
    int jz = static_cast<int>(key_ & 0xFFFFF);
    int order = static_cast<int>((key_ >> 20) & 0xFFFFF);
    int dep = static_cast<int>((key_ >> 40) & 0x7FFFFF);
    return JetCoordinate{dep, MultiIndex{jz, order - jz}};
  }

  int derivative_order() const {
    return is_jet() ? static_cast<int>((key_ >> 20) & 0xFFFFF) : 0;
  }

  friend bool operator==(const Sym&, const Sym&) = default;
  friend auto operator<=>(const Sym&, const Sym&) = default;

 private:
  static constexpr std::uint64_t kJetBit = std::uint64_t(1) << 63;
  std::uint64_t key_;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

/// The bundle (z, t, x^1..x^q) -> (z, t). Owns the variable names; symbol
/// ids in expressions refer back to it for printing and parsing.
class BundleSpec {
 public:
  BundleSpec(std::array<std::string, 2> independent, std::vector<std::string> dependent)
      : independent_(std::move(independent)), dependent_(std::move(dependent)) {
    if (dependent_.empty())
      throw Error("bundle needs at least one dependent variable");
    std::vector<std::string_view> all;
    all.emplace_back(independent_[0]);
    all.emplace_back(independent_[1]);
    for (const auto& d : dependent_) all.emplace_back(d);
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!is_identifier(all[i]))
        throw Error("invalid variable name '" + std::string(all[i]) + "'");
      for (std::size_t j = i + 1; j < all.size(); ++j)
        if (all[i] == all[j])
          throw Error("duplicate variable name '" + std::string(all[i]) + "'");
    }
  }

  const std::string& independent_name(int i) const { return independent_.at(i); }
  const std::string& spatial_name() const { return independent_[0]; }
  const std::string& temporal_name() const { return independent_[1]; }
  const std::vector<std::string>& dependent_names() const { return dependent_; }
  const std::string& dependent_name(int i) const { return dependent_.at(i); }
  int dependent_count() const { return static_cast<int>(dependent_.size()); }

  std::optional<int> independent_index(std::string_view name) const {
    for (int i = 0; i < 2; ++i)
      if (independent_[i] == name) return i;
    return std::nullopt;
  }

  std::optional<int> dependent_index(std::string_view name) const {
    for (int i = 0; i < dependent_count(); ++i)
      if (dependent_[i] == name) return i;
    return std::nullopt;
  }

  /// Canonical rendering: jets as <dep>_<z-suffix><t-suffix>, e.g. x_zzt.
  std::string name_of(const Sym& s) const {
    if (s.is_independent()) return independent_[s.indep_index()];
    JetCoordinate c = s.jet_coordinate();
    std::string out = dependent_.at(c.dep);
    if (c.index.order() == 0) return out;
    out += '_';
    for (int i = 0; i < c.index.jz; ++i) out += independent_[0];
    for (int i = 0; i < c.index.jt; ++i) out += independent_[1];
    return out;
  }

  friend bool operator==(const BundleSpec&, const BundleSpec&) = default;

 private:
  std::array<std::string, 2> independent_;
  std::vector<std::string> dependent_;
};

}  // namespace jetsym
