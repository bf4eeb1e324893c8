#pragma once

// Internal kernel shared by the echo-model and FIM assembly: the raw
// index-weighted phase sums
//
//   R_w[l,k] = sum_{n,i} w(n,i) * X[n,i] * e^{j phi(n,i,l,k)}
//
// with no alpha*beta/sqrt(MN) prefactor. Accumulation order is fixed
// (n outer, i inner, one accumulator per cell) so results are
// reproducible run to run.

#include <vector>

#include "ddcrb/types.hpp"

namespace ddcrb::detail {

enum class IndexWeight { unit, doppler, delay };

struct PhaseSums {
    std::vector<Complex> unit;     // w = 1
    std::vector<Complex> doppler;  // w = n
    std::vector<Complex> delay;    // w = i
};

// One weighted sum over the whole DD grid.
std::vector<Complex> weighted_phase_sums(const TfSymbols& x, double nu, double tau,
                                         const OtfsGrid& grid, IndexWeight weight);

// All three weightings in one pass over the same twiddle tables.
PhaseSums all_phase_sums(const TfSymbols& x, double nu, double tau, const OtfsGrid& grid);

}  // namespace ddcrb::detail
