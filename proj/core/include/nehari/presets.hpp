#pragma once

// The five reference experiments, with the values published for them.

#include <optional>
#include <string>
#include <vector>

#include "nehari/config.hpp"

namespace nehari {

struct ReferenceValues {
  std::optional<double> max;
  std::optional<double> min;
  double energy = 0.0;
};

struct Preset {
  std::string name;
  std::string title;
  RunConfig config;
  ReferenceValues gs;
  ReferenceValues lens;
};

/// In reproduce order.
const std::vector<Preset>& presets();

/// nullptr for an unknown name.
const Preset* find_preset(const std::string& name);

}  // namespace nehari
