// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
//
// Umbrella header: pulls in the whole library.
#ifndef TORUSQC_TORUSQC_HPP
#define TORUSQC_TORUSQC_HPP

#include <torusqc/density.hpp>
#include <torusqc/dynamics.hpp>
#include <torusqc/hilbert.hpp>
#include <torusqc/propagator.hpp>
#include <torusqc/qcf.hpp>
#include <torusqc/runner.hpp>
#include <torusqc/version.hpp>
#include <torusqc/wigner.hpp>

#endif  // TORUSQC_TORUSQC_HPP
