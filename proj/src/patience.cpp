#include "httq/patience.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace httq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PatienceSpec PatienceSpec::no_scaling(DistributionSpec law) {
  // Every constructible family has F(0) = 0; the limit slope is analytic.
  ScalarFunction f = ScalarFunction::linear(law.density_at_zero());
  return PatienceSpec(Mode::no_scaling, std::move(law), std::move(f));
}

PatienceSpec PatienceSpec::hazard_rate(ScalarFunction h) {
  const ShapeReport shape = probe_shape(h);
  if (!shape.nonnegative)
    throw std::invalid_argument("hazard rate must be finite and nonnegative (fails near x=" +
                                std::to_string(shape.first_bad_x) + ")");
  return PatienceSpec(Mode::hazard_rate, DistributionSpec::exponential(1.0), std::move(h));
}

PatienceSpec PatienceSpec::direct_f(ScalarFunction f) {
  const ShapeReport shape = probe_shape(f);
  if (!shape.starts_at_zero) throw std::invalid_argument("direct_f requires f(0) = 0");
  if (!shape.nondecreasing || !shape.nonnegative)
    throw std::invalid_argument("direct_f requires a nondecreasing f (fails near x=" +
                                std::to_string(shape.first_bad_x) + ")");
  if (!(shape.max_slope < 1e6))
    throw std::invalid_argument("direct_f is not Lipschitz on the probe grid");
  return PatienceSpec(Mode::direct_f, DistributionSpec::exponential(1.0), std::move(f));
}

const DistributionSpec& PatienceSpec::law() const {
  if (mode_ != Mode::no_scaling) throw std::logic_error("patience law only defined in no_scaling mode");
  return law_;
}

std::string PatienceSpec::describe() const {
  switch (mode_) {
    case Mode::no_scaling: return "no_scaling(" + law_.describe() + ")";
    case Mode::hazard_rate: return "hazard_rate(" + fn_.describe() + ")";
    case Mode::direct_f: return "direct_f(" + fn_.describe() + ")";
  }
  return "";
}

PatienceLaw PatienceSpec::at(double n) const {
  if (!(n >= 1.0)) throw std::invalid_argument("patience law needs n >= 1");
  return PatienceLaw(*this, n);
}

ScalarFunction PatienceSpec::limit_f() const {
  if (mode_ == Mode::hazard_rate) return fn_.antiderivative();
  return fn_;
}

double PatienceLaw::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  switch (spec_.mode()) {
    case PatienceSpec::Mode::no_scaling: return spec_.law().cdf(x);
    case PatienceSpec::Mode::hazard_rate:
      return -std::expm1(-spec_.function().integral(root_n_ * x) / root_n_);
    case PatienceSpec::Mode::direct_f: return std::min(1.0, spec_.function()(root_n_ * x) / root_n_);
  }
  return 0.0;
}

double PatienceLaw::sample(RandomStream& stream) const {
  switch (spec_.mode()) {
    case PatienceSpec::Mode::no_scaling: return spec_.law().sample(stream);
    case PatienceSpec::Mode::hazard_rate: {
      // integral(sqrt(n) x) / sqrt(n) = E with E ~ Exp(1)
      const double e = stream.exponential();
      return spec_.function().inverse_integral(root_n_ * e) / root_n_;
    }
    case PatienceSpec::Mode::direct_f: {
      const double u = stream.uniform();
      const double z = spec_.function().inverse_value(root_n_ * u);
      return std::isinf(z) ? kInf : z / root_n_;
    }
  }
  return kInf;
}

ArrivalSpec::ArrivalSpec(DistributionSpec base) : base_(std::move(base)) {
  if (std::abs(base_.mean() - 1.0) > 1e-9)
    throw std::invalid_argument("base interarrival law must have mean 1 (got " + std::to_string(base_.mean()) + ")");
}

double ArrivalSpec::rate(double n, double mu, double beta) {
  const double lambda = n * mu * (1.0 + beta / std::sqrt(n));
  if (!(lambda > 0.0)) throw std::invalid_argument("arrival rate n mu (1 + beta/sqrt(n)) must be positive");
  return lambda;
}

}  // namespace httq
