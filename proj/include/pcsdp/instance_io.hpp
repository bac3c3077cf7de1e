#pragma once

#include <string>

#include "pcsdp/instance.hpp"

namespace pcsdp {

// Certificate summary embedded in a solution document.
struct SolutionCertSummary {
  double max_violation = 0.0;
  double dual_extreme_eig = 0.0;
  double gap = 0.0;
};

// Parses and validates an instance document (dense row-major matrices).
// Raises ParseError for malformed JSON and ValidationError (naming the
// offending constraint) for invariant violations. The right-hand side is
// normalized to b = 1 on the way in; the original b is kept on the instance.
PackCoverInstance load_instance(const std::string& text);

// Serializes a solution document. Doubles are written with shortest
// round-trip precision, so parse(save(pair)) reproduces every field.
std::string save_solution(const PrimalDualPair& pair,
                          const SolutionCertSummary& certs);

// Reads a solution document back. certs, when non-null, receives the
// certificate block.
PrimalDualPair parse_solution(const std::string& text,
                              SolutionCertSummary* certs = nullptr);

}  // namespace pcsdp
