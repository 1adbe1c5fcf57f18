#pragma once

#include <string>

#include "brw/model.hpp"

namespace brw::fixtures {

/// Mean-zero model: one child in place w.p. 1/2, or children at -1 and +1.
/// m = 3/2, phi(beta) = log(1/2 + cosh beta), sigma^2(0) = 2/3, kappa_3(0) = 0.
inline ModelSpec symmetric_model() {
    return parse_model(R"({"outcomes":[
        {"prob":"1/2","displacements":[0]},
        {"prob":"1/2","displacements":[-1,1]}]})");
}

/// Drift-1/4 model: one child in place w.p. 1/2, or children at -1, +1, +1.
/// m = 2, intensity {-1: 1/2, 0: 1/2, +1: 1}, phi'(0) = 1/4.
inline ModelSpec quarter_drift_model() {
    return parse_model(R"({"outcomes":[
        {"prob":"1/2","displacements":[0]},
        {"prob":"1/2","displacements":[-1,1,1]}]})");
}

/// Deterministic binary split: children at 0 and +1. L_n(k) = C(n, k), W == 1.
inline ModelSpec pascal_model() {
    return parse_model(R"({"outcomes":[{"prob":1,"displacements":[0,1]}]})");
}

/// Deterministic doubling in place shifted by +1: L_n = {n: 2^n}.
inline ModelSpec doubling_model() {
    return parse_model(R"({"outcomes":[{"prob":1,"displacements":[1,1]}]})");
}

/// Span-2 support {-1, +1}: violates the span-1 lattice assumption.
inline ModelSpec span_two_model() {
    return parse_model(R"({"outcomes":[
        {"prob":"1/2","displacements":[-1]},
        {"prob":"1/2","displacements":[1,1]}]})");
}

/// Same outcome structure with double probabilities only (inexact mode).
inline ModelSpec symmetric_model_inexact() {
    return parse_model(R"({"outcomes":[
        {"prob":0.5,"displacements":[0]},
        {"prob":0.5,"displacements":[-1,1]}]})");
}

}  // namespace brw::fixtures
