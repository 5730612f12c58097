#pragma once

#include "xbed/common.hpp"

namespace xbed {

struct Prediction {
    Vector mean;
    Vector variance;
};

/// Anything exposing a predictive mean and variance over the parameter space.
class Surrogate {
public:
    virtual ~Surrogate() = default;

    virtual Prediction predict(const Matrix& xs) const = 0;

    /// The map whose output density enters the danger score: the posterior
    /// mean for a GP, the first ensemble member for an operator ensemble.
    virtual Vector density_map(const Matrix& xs) const = 0;

    struct Evaluation {
        Prediction prediction;
        Vector density_map;
    };

    /// Both of the above in one pass; override when they share work.
    virtual Evaluation evaluate(const Matrix& xs) const { return {predict(xs), density_map(xs)}; }
};

}  // namespace xbed
