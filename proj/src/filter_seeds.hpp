#pragma once

// Embedded low-pass filter coefficient vectors for the two supported
// (order, first-moment) pairs.  These are converged solutions of the full
// constraint system (moment normalization, shift orthogonality, alternating
// moments, odd moments), refined in extended precision; the solver uses them
// as initial guesses and always re-validates every constraint family.

namespace wtk::seeds {

// (N=6, M1=7): max scaled constraint residual 1.3e-19
inline constexpr long double kSeedP6[] = {
    -2.39263865728461711003e-03L,
    -4.93260185397508189044e-03L,
    2.71403997114181222475e-02L,
    3.06475559462891022654e-02L,
    -1.39310237070824476463e-01L,
    -8.06065307178545023496e-02L,
    6.45994543293104857230e-01L,
    1.11626621325766046543e+00L,
    5.38189055707131785273e-01L,
    -9.96154338623476291994e-02L,
    -7.99231394347819016675e-02L,
    5.14914629323619207347e-02L,
    1.23886956570622812780e-02L,
    -1.58317803925559593224e-02L,
    -2.71717860053334440749e-03L,
    2.88694866401829965283e-03L,
    6.30499394707293692238e-04L,
    -3.05833973596615316423e-04L,
};

// (N=4, M1=7): max scaled constraint residual 7.9e-20
inline constexpr long double kSeedP4[] = {
    -1.01901079821528828967e-03L,
    -2.57840671228131884824e-03L,
    7.93576722592402380916e-03L,
    3.34888203265590117262e-02L,
    -8.40529609215432125163e-02L,
    -1.08171214183422858868e-01L,
    5.89734387391238377779e-01L,
    1.14936478771372769506e+00L,
    5.46042093069533228378e-01L,
    -9.52791806220162659606e-02L,
    -5.86402759669371291467e-02L,
    2.31751934774337369278e-02L,
};

}  // namespace wtk::seeds
