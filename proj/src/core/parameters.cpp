#include "urbanembed/core/parameters.hpp"

#include <algorithm>
#include <stdexcept>

namespace urbanembed {

Parameter& ParameterSet::add(std::string name, Matrix value, bool decay) {
  if (contains(name)) throw std::invalid_argument("ParameterSet: duplicate parameter '" + name + "'");
  items_.push_back(Parameter{std::move(name), Tensor(std::move(value), true), decay});
  return items_.back();
}

bool ParameterSet::contains(const std::string& name) const {
  return std::any_of(items_.begin(), items_.end(), [&](const Parameter& p) { return p.name == name; });
}

Parameter& ParameterSet::at(const std::string& name) {
  for (auto& p : items_) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("ParameterSet: no parameter '" + name + "'");
}

const Parameter& ParameterSet::at(const std::string& name) const {
  return const_cast<ParameterSet*>(this)->at(name);
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += p.value.size();
  return n;
}

bool ParameterSet::operator==(const ParameterSet& other) const {
  if (items_.size() != other.items_.size()) return false;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& a = items_[i];
    const auto& b = other.items_[i];
    if (a.name != b.name || a.decay != b.decay) return false;
    if (a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) return false;
    if (a.value.matrix() != b.value.matrix()) return false;
  }
  return true;
}

}  // namespace urbanembed
