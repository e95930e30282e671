#pragma once

#include "invset/errors.hpp"
#include "invset/lti.hpp"

namespace invset {

// Coupled-spring-experiment chain: ell masses coupled through springs and
// dampers, two external forces at the chain ends. State is positions then
// velocities (n = 2*ell), inputs m = 2.
struct CSEParams {
    int ell = 2;          // mass count (>= 2)
    double mu = 4.0;      // mass
    double delta = 1.0;   // damping
    double k = 1.0;       // stiffness
    double Ts = 1.0;      // forward-Euler sampling time (seconds)
    // stiffness-matrix variant: false reproduces the benchmark's printed
    // sign pattern (interior diagonal -2), true uses the conventional
    // spring-chain tridiagonal with interior diagonal +2
    bool conventional_stiffness = false;
};

// Continuous model
//   xdot = [0 I; -Kc/mu  -(delta/mu) I] x + [0; Dc/mu] u
// discretized as A = I + Ts*Ac, B = Ts*Bc. Throws InvalidParams.
LTISystem cse_generate(const CSEParams& params);

}  // namespace invset
