#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ptalign {

using Activity = std::string;
// A sequence of visible activities. Traces never contain tau.
using Trace = std::vector<Activity>;

// A transition or node label: either a visible task or the silent step tau.
class Label {
 public:
  static Label tau() { return Label(); }
  static Label task(Activity name);

  bool is_tau() const { return !name_.has_value(); }
  // Precondition: !is_tau().
  const Activity& activity() const { return *name_; }
  std::string to_string() const { return is_tau() ? "tau" : *name_; }

  auto operator<=>(const Label&) const = default;

 private:
  Label() = default;
  explicit Label(Activity name) : name_(std::move(name)) {}

  std::optional<Activity> name_;
};

// Fixed, lexicographically ordered activity universe. Embedding blocks are
// laid out in this order: A first, then A x A in row-major order.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<Activity> activities);

  std::size_t size() const { return names_.size(); }
  const std::vector<Activity>& names() const { return names_; }
  const Activity& name(std::size_t index) const { return names_[index]; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

 private:
  std::vector<Activity> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string join_trace(const Trace& trace, std::string_view sep = " ");
Trace split_trace(std::string_view text);

}  // namespace ptalign
