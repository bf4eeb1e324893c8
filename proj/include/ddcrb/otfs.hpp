#pragma once

#include "ddcrb/types.hpp"

namespace ddcrb {

/**
 * Phase term coupling TF cell (n,i) with DD cell (l,k) under a Doppler
 * shift nu [Hz] and delay tau [s]:
 *
 *   phi = 2*pi * [ n*(nu*T - l/N) - i*(tau*df - k/M) ]
 *
 * e^{j*phi} is the kernel of the mean-signal and derivative sums.
 */
double dd_phase(int n, int i, int l, int k, double nu, double tau, const OtfsGrid& grid);

/**
 * Symplectic Finite Fourier Transform, TF -> DD:
 *
 *   Y[l,k] = (1/sqrt(MN)) * sum_{n,i} X[n,i] * e^{-j2pi(nl/N - ik/M)}
 *
 * Unitary under the 1/sqrt(MN) normalization. Computed as the direct
 * double sum (n outer, i inner) with cached unit-modulus twiddles.
 */
DdVector sfft(const TfSymbols& x, const OtfsGrid& grid);

/**
 * Inverse SFFT, DD -> TF:
 *
 *   X[n,i] = (1/sqrt(MN)) * sum_{l,k} Y[l,k] * e^{+j2pi(nl/N - ik/M)}
 *
 * Exact inverse (adjoint) of sfft.
 */
TfSymbols isfft(const DdVector& y, const OtfsGrid& grid);

}  // namespace ddcrb
