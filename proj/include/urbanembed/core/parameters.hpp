#pragma once

#include "urbanembed/core/tensor.hpp"

#include <map>
#include <string>
#include <vector>

namespace urbanembed {

struct Parameter {
  std::string name;
  Tensor value;
  // Receives decoupled weight decay (embedding/projection matrices only).
  bool decay = false;
};

/// Ordered, name-addressable collection of trainable tensors.
class ParameterSet {
 public:
  Parameter& add(std::string name, Matrix value, bool decay = false);

  bool contains(const std::string& name) const;
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  const Matrix& matrix(const std::string& name) const { return at(name).value.matrix(); }

  std::vector<Parameter>& items() { return items_; }
  const std::vector<Parameter>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t scalar_count() const;

  bool operator==(const ParameterSet& other) const;

 private:
  std::vector<Parameter> items_;
};

using GradientMap = std::map<std::string, Matrix>;

}  // namespace urbanembed
