// Frozen reference values for the test suites.
// Generated by tests/oracle/gen_reference_values.py (mpmath, 50-digit arithmetic;
// Philox vectors from an independent integer-arithmetic implementation).
#pragma once
#include <cstdint>

namespace refvals {

// --- modified Bessel I0/I1 reference values (mpmath, 50 digits) ---
inline constexpr double kBesselZ[] = {
    0.25, 1.0, 2.0, 5.0, 10.0, 14.5, 15.0, 20.0, 29.5, 30.0, 30.5, 60.0, 100.0, 250.0, 500.0, 700.0};
inline constexpr double kLogI0[] = {
    0.015564385313381064,
    0.23591435850717865,
    0.82399354148295628,
    3.3046817758225334,
    7.9429720831186956,
    12.252929150728977,
    12.735669109476906,
    17.589610428244274,
    26.893178122058439,
    27.384701433171936,
    27.876366092542707,
    57.035990189655143,
    96.779732689942584,
    246.32083201205709,
    495.9740076681067,
    695.80569999844345};
inline constexpr double kLogI1[] = {
    -2.0716391877974293,
    -0.57064798749083128,
    0.46413447354615974,
    3.1919420305456755,
    7.8902038341042123,
    12.217173997937606,
    12.701149674522912,
    17.563954622519344,
    26.875932328217153,
    27.367748089282408,
    27.859695442913486,
    57.027586326030331,
    96.774707457591448,
    246.31882799730982,
    495.97300666626834,
    695.80498520185565};
// I0/I1 at small z as direct values
inline constexpr double kI0At1 = 1.2660658777520083;
inline constexpr double kI1At1 = 0.56515910399248503;
inline constexpr double kI0AtQuarter = 1.0156861412236079;
inline constexpr double kI1AtQuarter = 0.12597910894546793;
inline constexpr double kI0At12 = 18948.925349296309;
inline constexpr double kI1At12 = 18141.348781638832;
// I1/I0 ratios (posterior-mean shrinkage factors)
inline constexpr double kRatioI1I0At1p5 = 0.59613323883129071;
inline constexpr double kRatioI1I0At5 = 0.89338313704408522;
inline constexpr double kRatioI1I0At6 = 0.91235930435291526;
inline constexpr double kRatioI1I0At8 = 0.93523549352943861;
inline constexpr double kRatioI1I0At20 = 0.97467050788980713;
inline constexpr double kRatioI1I0At100 = 0.99498737300516877;

// --- KL( N(0,2I5) || N(0,I5) ) = (10 - 5 - 5 ln 2)/2 ---
inline constexpr double kKlTwoI5VsI5 = 0.76713204860013673;

// --- circle Bayesian-predictive KL, frozen cases ---
// case A: n=25, xbar=(0.98,0.1), sigma2=1.0, omega_true=0.0 (2-D and radial routes agree to 7.6e-32)
inline constexpr double kCircleBayesKlA = 0.0054489645691941417;
// case B: n=25, xbar=(1.1,-0.2), sigma2=4.0, omega_true=0.3 (2-D and radial routes agree to 7.0e-32)
inline constexpr double kCircleBayesKlB = 0.026234470855663548;
// case C: n=5, xbar=(0.4,0.2), sigma2=1.0, omega_true=1.0 (2-D and radial routes agree to 4.4e-31)
inline constexpr double kCircleBayesKlC = 0.12777746163933361;

// --- circle Bayesian-predictive log density, frozen points ---
inline constexpr double kCirclePredLogDensityP = -2.1996414281346106;
inline constexpr double kCirclePredLogDensityQ = -3.5084053844390123;

// --- spiked-model KL between two rank-one-update covariances ---
inline constexpr double kSpikedKlDense = 0.18459121209464647;  // l=5, (1.3,u0) vs (0.7,u1), u0~(1..5), u1~(5..1)

// --- Philox 4x32-10 known-answer vectors (independent Python impl) ---
// ctr=['0x0', '0x0', '0x0', '0x0'] key=['0x0', '0x0']
inline constexpr uint32_t kPhiloxKat0[4] = {0x6627E8D5u, 0xE169C58Du, 0xBC57AC4Cu, 0x9B00DBD8u};
// ctr=['0xffffffff', '0xffffffff', '0xffffffff', '0xffffffff'] key=['0xffffffff', '0xffffffff']
inline constexpr uint32_t kPhiloxKat1[4] = {0x408F276Du, 0x41C83B0Eu, 0xA20BC7C6u, 0x6D5451FDu};
// ctr=['0x243f6a88', '0x85a308d3', '0x13198a2e', '0x3707344'] key=['0xa4093822', '0x299f31d0']
inline constexpr uint32_t kPhiloxKat2[4] = {0xD16CFE09u, 0x94FDCCEBu, 0x5001E420u, 0x24126EA1u};

}  // namespace refvals
