// Copyright 2026 The rwrs-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RWRS_SCENERY_H_
#define RWRS_SCENERY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rwrs/graph.h"
#include "rwrs/rng.h"
#include "rwrs/walk.h"

namespace rwrs {

enum class SceneryKind { kGaussian, kRademacher, kSymmetricPareto, kUniformCentered };

// Thrown when a moment that does not exist is requested.
class MomentError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Moments {
  double second = 0;
  std::optional<double> third;
  std::optional<double> fourth;
  std::optional<double> abs_third;
};

struct Atom {
  double value;
  double probability;
};

// Centred, symmetric scenery laws. Every kind carries an extra multiplicative
// scale (1 unless the distribution was standardized or rescaled).
//   gaussian(sigma):        N(0, sigma^2)
//   rademacher:             +-1 with probability 1/2
//   symmetric_pareto(alpha): density alpha/2 (1 + |t|)^(-1-alpha)
//   uniform_centered(a):    uniform on [-a, a]
class SceneryDistribution {
 public:
  // Standard gaussian.
  SceneryDistribution() = default;

  static SceneryDistribution gaussian(double sigma = 1.0);
  static SceneryDistribution rademacher();
  static SceneryDistribution symmetric_pareto(double alpha);
  static SceneryDistribution uniform_centered(double a);

  SceneryKind kind() const { return kind_; }
  // sigma, alpha or a; unused for rademacher.
  double parameter() const { return parameter_; }
  double scale() const { return scale_; }
  std::string name() const;

  // Copy with E xi^2 = 1.
  SceneryDistribution standardized() const;
  SceneryDistribution scaled(double factor) const;

  double sample(Philox& rng) const;

  // E|xi|^m < infinity.
  bool has_finite_moment(double m) const;
  // E|xi|^m in closed form; throws MomentError when infinite.
  double abs_moment(double m) const;
  // E xi^k; odd orders vanish by symmetry when E|xi|^k is finite.
  double moment(int k) const;
  Moments moments() const;

  // Density of a continuous kind; throws for rademacher.
  double density(double x) const;
  // Atoms when the support is finite.
  std::optional<std::vector<Atom>> finite_support() const;

  // Exponential tilting: the law with density proportional to e^{t x} f(x).
  // Defined for every kind except symmetric_pareto, which has no MGF.
  bool has_mgf() const { return kind_ != SceneryKind::kSymmetricPareto; }
  double log_mgf(double t) const;
  // Consumes the generator exactly like sample(); at t = 0 both agree.
  double sample_tilted(double t, Philox& rng) const;

  friend bool operator==(const SceneryDistribution&, const SceneryDistribution&) = default;

 private:
  SceneryDistribution(SceneryKind kind, double parameter)
      : kind_(kind), parameter_(parameter) {}

  SceneryKind kind_ = SceneryKind::kGaussian;
  double parameter_ = 1.0;
  double scale_ = 1.0;
};

// {"kind": ..., "params": {...}}. Params: sigma, alpha or a, plus optional
// "scale" and "standardize".
void to_json(nlohmann::json& j, const SceneryDistribution& d);
void from_json(const nlohmann::json& j, SceneryDistribution& d);

// Inverse CDF of |xi| for the symmetric Pareto law: sign * (u^{-1/alpha} - 1).
double symmetric_pareto_sample(double alpha, double u, int sign);

// E f(xi), by adaptive quadrature (exact for rademacher). `breakpoints` are
// points where f has kinks. Relative tolerance about 1e-10.
double expectation(const SceneryDistribution& dist,
                   const std::function<double(double)>& f,
                   std::span<const double> breakpoints = {});

// xi(v) from the keyed stream (seed, vertex_key): independent across
// vertices, identical for the same vertex whatever the walk.
double scenery_value(const SceneryDistribution& dist, std::uint64_t seed,
                     std::uint64_t vertex_key);

// Scenery over the sites of one trace, indexed by SiteId.
struct SceneryAssignment {
  SceneryDistribution distribution = SceneryDistribution::gaussian();
  std::uint64_t seed = 0;
  std::vector<double> values;
};

SceneryAssignment sample_assignment(const SceneryDistribution& dist,
                                    const WalkTrace& trace, std::uint64_t seed);
void sample_assignment(const SceneryDistribution& dist, const WalkTrace& trace,
                       std::uint64_t seed, std::vector<double>& values);
// One value per vertex, aligned with `vertices`.
std::vector<double> sample_assignment(const SceneryDistribution& dist,
                                      std::span<const VertexId> vertices,
                                      std::uint64_t seed);

}  // namespace rwrs

#endif  // RWRS_SCENERY_H_
