#include "ptalign/alphabet.hpp"

#include <algorithm>
#include <sstream>

#include "ptalign/errors.hpp"

namespace ptalign {

Label Label::task(Activity name) {
  if (name.empty()) throw StructuralError("task labels must be non-empty");
  return Label(std::move(name));
}

Alphabet::Alphabet(std::vector<Activity> activities) : names_(std::move(activities)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  for (std::size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
}

std::optional<std::size_t> Alphabet::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string join_trace(const Trace& trace, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) out += sep;
    out += trace[i];
  }
  return out;
}

Trace split_trace(std::string_view text) {
  Trace out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace ptalign
