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

#include "rwrs/scenery.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace rwrs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadratureTol = 1e-11;

// log cosh(y) without overflow.
double log_cosh(double y) {
  const double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// log(sinh(y) / y) without overflow or cancellation.
double log_sinhc(double y) {
  const double a = std::abs(y);
  if (a < 1e-4) {
    const double y2 = a * a;
    return y2 / 6.0 - y2 * y2 / 180.0;
  }
  return a + std::log1p(-std::exp(-2.0 * a)) - std::numbers::ln2 - std::log(a);
}

// Inverse CDF of uniform[-A, A] tilted by e^{t x}.
double tilted_uniform(double half_width, double t, double u) {
  if (t == 0.0) return -half_width + 2.0 * half_width * u;
  const double e = std::exp(-2.0 * std::abs(t) * half_width);
  if (t > 0) return half_width + std::log(u + (1.0 - u) * e) / t;
  return -half_width + std::log((1.0 - u) + u * e) / t;
}

double gk(const std::function<double(double)>& f, double a, double b) {
  if (a >= b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 20, kQuadratureTol);
}

std::vector<double> sorted_points(std::span<const double> points, double lo,
                                  double hi) {
  std::vector<double> out{lo};
  for (double p : points) {
    if (p > lo && p < hi) out.push_back(p);
  }
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

SceneryDistribution SceneryDistribution::gaussian(double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("gaussian sigma must be > 0");
  return {SceneryKind::kGaussian, sigma};
}

SceneryDistribution SceneryDistribution::rademacher() {
  return {SceneryKind::kRademacher, 1.0};
}

SceneryDistribution SceneryDistribution::symmetric_pareto(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("pareto alpha must be > 0");
  return {SceneryKind::kSymmetricPareto, alpha};
}

SceneryDistribution SceneryDistribution::uniform_centered(double a) {
  if (!(a > 0)) throw std::invalid_argument("uniform half-width must be > 0");
  return {SceneryKind::kUniformCentered, a};
}

std::string SceneryDistribution::name() const {
  std::string base;
  switch (kind_) {
    case SceneryKind::kGaussian: base = "gaussian"; break;
    case SceneryKind::kRademacher: base = "rademacher"; break;
    case SceneryKind::kSymmetricPareto: base = "symmetric_pareto"; break;
    case SceneryKind::kUniformCentered: base = "uniform_centered"; break;
  }
  return base;
}

SceneryDistribution SceneryDistribution::scaled(double factor) const {
  if (!(factor > 0)) throw std::invalid_argument("scale factor must be > 0");
  SceneryDistribution out = *this;
  out.scale_ *= factor;
  return out;
}

SceneryDistribution SceneryDistribution::standardized() const {
  const double second = abs_moment(2.0);
  return scaled(1.0 / std::sqrt(second));
}

double SceneryDistribution::sample(Philox& rng) const {
  switch (kind_) {
    case SceneryKind::kSymmetricPareto: {
      const int sign = rng.uniform() < 0.5 ? 1 : -1;
      return scale_ * symmetric_pareto_sample(parameter_, rng.uniform_open(), sign);
    }
    default:
      return sample_tilted(0.0, rng);
  }
}

double SceneryDistribution::sample_tilted(double t, Philox& rng) const {
  switch (kind_) {
    case SceneryKind::kGaussian: {
      const double s = scale_ * parameter_;
      return t * s * s + s * rng.normal();
    }
    case SceneryKind::kRademacher: {
      const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * t * scale_));
      return rng.uniform() < p_plus ? scale_ : -scale_;
    }
    case SceneryKind::kUniformCentered:
      return tilted_uniform(scale_ * parameter_, t, rng.uniform());
    case SceneryKind::kSymmetricPareto:
      if (t == 0.0) return sample(rng);
      throw MomentError("symmetric_pareto has no moment generating function");
  }
  return 0;
}

double SceneryDistribution::log_mgf(double t) const {
  switch (kind_) {
    case SceneryKind::kGaussian: {
      const double s = scale_ * parameter_;
      return 0.5 * s * s * t * t;
    }
    case SceneryKind::kRademacher:
      return log_cosh(t * scale_);
    case SceneryKind::kUniformCentered:
      return log_sinhc(t * scale_ * parameter_);
    case SceneryKind::kSymmetricPareto:
      if (t == 0.0) return 0.0;
      throw MomentError("symmetric_pareto has no moment generating function");
  }
  return 0;
}

bool SceneryDistribution::has_finite_moment(double m) const {
  if (kind_ == SceneryKind::kSymmetricPareto) return m < parameter_;
  return true;
}

double SceneryDistribution::abs_moment(double m) const {
  if (m < 0) throw std::invalid_argument("moment order must be >= 0");
  const double sm = std::pow(scale_, m);
  switch (kind_) {
    case SceneryKind::kGaussian:
      return sm * std::pow(parameter_, m) * std::pow(2.0, m / 2.0) *
             std::tgamma((m + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
    case SceneryKind::kRademacher:
      return sm;
    case SceneryKind::kUniformCentered:
      return sm * std::pow(parameter_, m) / (m + 1.0);
    case SceneryKind::kSymmetricPareto: {
      const double alpha = parameter_;
      if (!(m < alpha)) {
        throw MomentError("symmetric_pareto(" + std::to_string(alpha) +
                          ") has E|xi|^" + std::to_string(m) + " = infinity");
      }
      // alpha * B(m + 1, alpha - m)
      return sm * alpha *
             std::exp(std::lgamma(m + 1.0) + std::lgamma(alpha - m) -
                      std::lgamma(alpha + 1.0));
    }
  }
  return 0;
}

double SceneryDistribution::moment(int k) const {
  const double a = abs_moment(k);
  return k % 2 == 0 ? a : 0.0;
}

Moments SceneryDistribution::moments() const {
  Moments out;
  out.second = moment(2);
  if (has_finite_moment(3)) {
    out.third = moment(3);
    out.abs_third = abs_moment(3);
  }
  if (has_finite_moment(4)) out.fourth = moment(4);
  return out;
}

double SceneryDistribution::density(double x) const {
  switch (kind_) {
    case SceneryKind::kGaussian: {
      const double s = scale_ * parameter_;
      return std::exp(-0.5 * (x / s) * (x / s)) / (s * std::sqrt(2.0 * std::numbers::pi));
    }
    case SceneryKind::kUniformCentered: {
      const double half = scale_ * parameter_;
      return std::abs(x) <= half ? 0.5 / half : 0.0;
    }
    case SceneryKind::kSymmetricPareto: {
      const double alpha = parameter_;
      return 0.5 * alpha * std::pow(1.0 + std::abs(x) / scale_, -1.0 - alpha) / scale_;
    }
    case SceneryKind::kRademacher:
      break;
  }
  throw std::domain_error("rademacher has no density");
}

std::optional<std::vector<Atom>> SceneryDistribution::finite_support() const {
  if (kind_ != SceneryKind::kRademacher) return std::nullopt;
  return std::vector<Atom>{{-scale_, 0.5}, {scale_, 0.5}};
}

double symmetric_pareto_sample(double alpha, double u, int sign) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("u must lie in (0, 1)");
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be > 0");
  const double magnitude = std::pow(u, -1.0 / alpha) - 1.0;
  return sign >= 0 ? magnitude : -magnitude;
}

double expectation(const SceneryDistribution& dist,
                   const std::function<double(double)>& f,
                   std::span<const double> breakpoints) {
  const double scale = dist.scale();
  switch (dist.kind()) {
    case SceneryKind::kRademacher:
      return 0.5 * (f(scale) + f(-scale));
    case SceneryKind::kUniformCentered: {
      const double half = scale * dist.parameter();
      const auto pts = sorted_points(breakpoints, -half, half);
      double total = 0;
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += gk(f, pts[i], pts[i + 1]);
      return total / (2.0 * half);
    }
    case SceneryKind::kGaussian: {
      const double s = scale * dist.parameter();
      std::vector<double> z;
      for (double b : breakpoints) z.push_back(b / s);
      const auto pts = sorted_points(z, -kInf, kInf);
      const std::function<double(double)> g = [&](double x) {
        return f(s * x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      };
      double total = 0;
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += gk(g, pts[i], pts[i + 1]);
      return total;
    }
    case SceneryKind::kSymmetricPareto: {
      // Substitute |xi| = scale (u^{-1/alpha} - 1), u uniform on (0, 1).
      const double alpha = dist.parameter();
      std::vector<double> u_points;
      for (double b : breakpoints) {
        u_points.push_back(std::pow(1.0 + std::abs(b) / scale, -alpha));
      }
      const auto pts = sorted_points(u_points, 0.0, 1.0);
      const auto g = [&](double u) {
        const double r = scale * (std::pow(u, -1.0 / alpha) - 1.0);
        return 0.5 * (f(r) + f(-r));
      };
      boost::math::quadrature::tanh_sinh<double> integrator;
      double total = 0;
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        total += integrator.integrate(g, pts[i], pts[i + 1], kQuadratureTol);
      }
      return total;
    }
  }
  return 0;
}

double scenery_value(const SceneryDistribution& dist, std::uint64_t seed,
                     std::uint64_t vertex_key) {
  Philox rng(seed, vertex_key);
  return dist.sample(rng);
}

void sample_assignment(const SceneryDistribution& dist, const WalkTrace& trace,
                       std::uint64_t seed, std::vector<double>& values) {
  const std::size_t sites = trace.site_count();
  values.resize(sites);
  for (std::size_t s = 0; s < sites; ++s) {
    values[s] = scenery_value(dist, seed, trace.site_key(static_cast<SiteId>(s)));
  }
}

SceneryAssignment sample_assignment(const SceneryDistribution& dist,
                                    const WalkTrace& trace, std::uint64_t seed) {
  SceneryAssignment out{dist, seed, {}};
  sample_assignment(dist, trace, seed, out.values);
  return out;
}

std::vector<double> sample_assignment(const SceneryDistribution& dist,
                                      std::span<const VertexId> vertices,
                                      std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) out.push_back(scenery_value(dist, seed, vertex_key(v)));
  return out;
}

void to_json(nlohmann::json& j, const SceneryDistribution& d) {
  nlohmann::json params = nlohmann::json::object();
  switch (d.kind()) {
    case SceneryKind::kGaussian: params["sigma"] = d.parameter(); break;
    case SceneryKind::kSymmetricPareto: params["alpha"] = d.parameter(); break;
    case SceneryKind::kUniformCentered: params["a"] = d.parameter(); break;
    case SceneryKind::kRademacher: break;
  }
  if (d.scale() != 1.0) params["scale"] = d.scale();
  j = nlohmann::json{{"kind", d.name()}, {"params", params}};
}

void from_json(const nlohmann::json& j, SceneryDistribution& d) {
  const auto kind = j.at("kind").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (kind == "gaussian") {
    d = SceneryDistribution::gaussian(params.value("sigma", 1.0));
  } else if (kind == "rademacher") {
    d = SceneryDistribution::rademacher();
  } else if (kind == "symmetric_pareto") {
    d = SceneryDistribution::symmetric_pareto(params.at("alpha").get<double>());
  } else if (kind == "uniform_centered") {
    d = SceneryDistribution::uniform_centered(params.at("a").get<double>());
  } else {
    throw std::invalid_argument("unknown scenery kind '" + kind + "'");
  }
  if (params.contains("scale")) d = d.scaled(params.at("scale").get<double>());
  if (params.value("standardize", false)) d = d.standardized();
}

}  // namespace rwrs
