#pragma once

#include "xbed/common.hpp"
#include "xbed/stats/bounds.hpp"

#include <memory>
#include <string>

namespace xbed::systems {

/// A black-box map from a standardized parameter vector to a scalar QoI.
class System {
public:
    virtual ~System() = default;

    virtual std::string name() const = 0;
    virtual Eigen::Index dimension() const = 0;
    virtual const stats::Bounds& bounds() const = 0;

    virtual double evaluate(const Eigen::Ref<const Vector>& x) const = 0;

    /// Inputs to the operator network: the physical input function sampled on
    /// its sensors, one row per point. Systems without a basis return xs.
    virtual Matrix features(const Matrix& xs) const = 0;

    /// Stable text identifying every parameter that affects evaluate().
    virtual std::string fingerprint() const = 0;

    /// For systems that can only be queried at stored inputs.
    virtual const Matrix* candidate_pool() const { return nullptr; }
};

using SystemPtr = std::shared_ptr<const System>;

}  // namespace xbed::systems
