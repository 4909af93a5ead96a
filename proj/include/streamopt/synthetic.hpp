// Copyright 2026 The streamopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STREAMOPT_SYNTHETIC_HPP
#define STREAMOPT_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>

#include "streamopt/model.hpp"

namespace streamopt {

/// Planted-cluster instance generator parameters. Module m belongs to
/// latent cluster m % n_clusters; each event is drawn from one cluster.
struct SyntheticSpec {
  std::size_t n_events = 10000;
  std::size_t n_modules = 20;
  std::size_t lines_per_module_min = 1;
  std::size_t lines_per_module_max = 4;
  std::size_t n_clusters = 5;
  double intra_cluster_pass_rate = 0.3;
  double cross_cluster_pass_rate = 0.01;
  double prescaled_fraction = 0.0;  // share of lines with prescale < 1
  double prescale_min = 0.1;        // prescaled lines draw from [min, 1)
  double turbo_fraction = 1.0;
  double persist_reco_fraction = 0.2;
  std::uint64_t seed = 1;

  /// Throws Error(usage) when a rate is outside [0,1] or a count is 0.
  void validate() const;
};

struct SyntheticInstance {
  EventLineIncidence incidence;
  LineCatalog catalog;
  /// Modules grouped by their latent cluster.
  Scheme planted;
};

/// Deterministic in the seed. An event that passes no line is redrawn.
SyntheticInstance gen_synthetic(const SyntheticSpec& spec);

}  // namespace streamopt

#endif  // STREAMOPT_SYNTHETIC_HPP
