#pragma once

#include <functional>
#include <string>

namespace walkbsde {

/// Oracle for the limiting solution: u(t,x) and its spatial gradient,
/// with a tag for how it was obtained and an accuracy estimate used by the
/// rate harness to keep oracle noise out of fitted slopes.
struct ContinuousSolution {
    enum class Method { ClosedForm, HeatQuadrature, Manufactured, Picard, SelfRefined };

    std::function<double(double, double)> u;       // (t,x)
    std::function<double(double, double)> grad_u;  // (t,x), t < T
    Method method = Method::ClosedForm;
    double accuracy = 0.0;
};

inline std::string method_name(ContinuousSolution::Method m) {
    switch (m) {
        case ContinuousSolution::Method::ClosedForm: return "closed-form";
        case ContinuousSolution::Method::HeatQuadrature: return "heat-quadrature";
        case ContinuousSolution::Method::Manufactured: return "manufactured";
        case ContinuousSolution::Method::Picard: return "picard";
        case ContinuousSolution::Method::SelfRefined: return "self-refined";
    }
    return "unknown";
}

}  // namespace walkbsde
