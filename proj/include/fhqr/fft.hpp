#pragma once

#include <span>
#include <vector>

#include "fhqr/iq_matrix.hpp"

namespace fhqr {

enum class FftDirection { kForward, kInverse };

// Unitary DFT (1/sqrt(n) in both directions). Plans are cached per
// (size, direction); execution is thread-safe.
std::vector<cplx> unitary_dft(std::span<const cplx> in, FftDirection dir);

}  // namespace fhqr
