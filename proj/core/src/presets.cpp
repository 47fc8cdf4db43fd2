#include "nehari/presets.hpp"

namespace nehari {

namespace {

constexpr const char* kRadialLens =
    "cos(pi*(x^2+y^2)^0.5/2)*cos(2*pi*(x^2+y^2)^0.5)*cos(pi*(x^2+y^2)^0.5)";

Preset make(std::string name, std::string title, Domain domain, std::string potential,
            std::string seed_gs, std::string seed_lens, ReferenceValues gs, ReferenceValues lens) {
  Preset p;
  p.name = name;
  p.title = std::move(title);
  p.config.name = name;
  p.config.preset = std::move(name);
  p.config.domain = domain;
  p.config.potential = std::move(potential);
  p.config.seed_gs = std::move(seed_gs);
  p.config.seed_lens = std::move(seed_lens);
  p.config.mode = RunMode::Both;
  p.gs = gs;
  p.lens = lens;
  return p;
}

std::vector<Preset> build() {
  std::vector<Preset> v;
  v.push_back(make("square-negconst", "square, V = -pi^2/4", Rectangle{-1, 1, -1, 1}, "-pi^2/4",
                   "(x-1)*(y-1)*(x+1)*(y+1)", "sin(pi*(x+1))*sin(2*pi*(y+1))",
                   {2.18, std::nullopt, 2.54}, {4.61, -4.61, 33.21}));
  // The step sits on the lattice line x = 1, where the jump is averaged.
  v.push_back(make("rectangle-step10", "rectangle, V = 0 | 10", Rectangle{0, 2, 0, 1},
                   "5*(1+(x-1)/abs(x-1))", "(x-2)*(y-1)*x*y", "sin(pi*(x+1))*sin(2*pi*(y+1))",
                   {5.98, std::nullopt, 30.98}, {6.53, -8.67, 76.23}));
  v.push_back(make("rectangle-step35", "rectangle, V = 0 | 35", Rectangle{0, 2, 0, 1},
                   "17.5*(1+(x-1)/abs(x-1))", "(x-2)*(y-1)*x*y", "sin(pi*(x+1))*sin(2*pi*(y+1))",
                   {6.19, std::nullopt, 33.14}, {9.7, -9.8, 181.09}));
  v.push_back(make("disk-inverse-r", "unit disk, V = 1/r", Disk{0, 0, 1}, "1/sqrt(x^2+y^2)",
                   "cos(pi*(x^2+y^2)^0.5/2)", kRadialLens, {4.15, std::nullopt, 29.9},
                   {6.36, -6.36, 76.04}));
  v.push_back(make("disk-shifted-singularity", "unit disk, V = 1/|(x,y) - (0.5,0)|", Disk{0, 0, 1},
                   "1/sqrt((x-0.5)^2+y^2)", "cos(pi*(x^2+y^2)^0.5/2)", kRadialLens,
                   {4.41, std::nullopt, 18.74}, {6.25, -6.25, 76.23}));
  return v;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace nehari
