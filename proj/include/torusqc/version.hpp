// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
//
// Library version constant, echoed into run metadata for provenance.
#ifndef TORUSQC_VERSION_HPP
#define TORUSQC_VERSION_HPP

namespace torusqc {

inline constexpr const char* version_string = "0.1.0";

}  // namespace torusqc

#endif  // TORUSQC_VERSION_HPP
