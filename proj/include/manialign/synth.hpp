#pragma once

// Seeded synthetic multi-domain data sets:
//   multiview_manifold  - interleaved 2-D arcs seen through rotations, scalings
//                         and a nonlinear 4-D lift (domains differ in d_m)
//   shadow_attenuation  - per-class spectra and a shadowed copy with
//                         band-dependent attenuation, optional gamma distortion
//                         and a different class mix
//   colocated_ties      - an RGB-like source and NIR-R-G-like target sharing
//                         tie objects; target labels are hidden

#include "manialign/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace manialign::synth {

enum class Archetype { MultiviewManifold, ShadowAttenuation, ColocatedTies };

std::string to_string(Archetype a);
Archetype archetype_from_string(const std::string& s);

struct SynthSpec {
  Archetype archetype = Archetype::MultiviewManifold;
  std::size_t classes = 3;
  std::size_t domains = 3;
  std::size_t samples_per_domain = 300;
  std::vector<double> priors;         // empty: uniform
  double noise = 0.05;
  std::uint64_t seed = 0;

  // multiview
  std::vector<double> rotation_deg;   // per domain; empty: defaults
  std::vector<double> scale;          // per domain; empty: defaults
  bool lift = true;                   // embed domains 2, 4, ... in 4-D

  // shadow
  std::size_t bands = 4;
  double attenuation = 0.5;           // mean multiplicative factor in (0, 1]
  double attenuation_spread = 0.2;    // band-to-band variation of the factor
  bool gamma_distortion = true;
  double gamma = 2.2;
  /// Per-sample shadow depth: factors are scaled by s ~ U(1 - depth_spread, 1).
  double depth_spread = 0.0;
  /// Additive noise of the shadowed copy as a fraction of `noise`.
  double shadow_noise_ratio = 0.1;
  /// true: domain 2 is the attenuated copy of domain 1's samples. false: an
  /// independent draw with `shadow_priors`, so per-band marginals differ.
  bool paired = false;
  std::vector<double> shadow_priors;  // empty: skewed default (unpaired only)

  // ties
  std::size_t objects = 40;
  std::size_t object_min_pixels = 4;
  std::size_t object_max_pixels = 10;

  /// Throws BadSpec on inconsistent settings.
  void validate() const;
};

SynthSpec default_spec(Archetype a);

struct SynthOutput {
  MultiDomainCollection data;                 // visible labels (-1 where hidden)
  std::vector<std::vector<int>> truth;        // full labels per domain
  std::vector<bool> labels_hidden;            // per domain
  std::size_t tie_objects = 0;
};

/// Per-class counts for n samples: floor(n * prior), remainder to the first classes.
std::vector<std::size_t> class_counts(std::size_t n, const std::vector<double>& priors);

SynthOutput gen_multiview(const SynthSpec& spec);
SynthOutput gen_shadow(const SynthSpec& spec);
SynthOutput gen_ties(const SynthSpec& spec);
SynthOutput generate(const SynthSpec& spec);

}  // namespace manialign::synth
