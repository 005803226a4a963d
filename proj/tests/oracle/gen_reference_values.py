#!/usr/bin/env python3
"""Generate frozen reference values for the C++ test suites.

Everything here is computed with mpmath at 50 significant digits (or exact
integer arithmetic for the Philox vectors) and printed as C++ double literals
with 17 significant digits.  Paste the output into tests/reference_values.hpp.

Routes used here are deliberately independent of the C++ implementation:
  - Bessel values come from mpmath.besseli, not from a series we also ship.
  - The circle-model KL values are computed from the *defining* 2-D integral
    (in polar form) and cross-checked against the 1-D radial reduction.
  - The spiked-model KL uses exact dense matrix algebra at high precision.
  - Philox vectors come from an independent Python reimplementation of the
    published 4x32-10 round function.
"""

import mpmath as mp

mp.mp.dps = 50


def cpp(x, name, comment=""):
    s = mp.nstr(mp.mpf(x), 17, strip_zeros=False)
    tail = f"  // {comment}" if comment else ""
    print(f"inline constexpr double {name} = {s};{tail}")


# ---------------------------------------------------------------- Bessel I0/I1
print("// --- modified Bessel I0/I1 reference values (mpmath, 50 digits) ---")
bessel_z = [0.25, 1.0, 2.0, 5.0, 10.0, 14.5, 15.0, 20.0, 29.5, 30.0, 30.5,
            60.0, 100.0, 250.0, 500.0, 700.0]
print("inline constexpr double kBesselZ[] = {")
print("    " + ", ".join(mp.nstr(mp.mpf(z), 17) for z in bessel_z) + "};")
for fn, name in [(lambda z: mp.besseli(0, z), "kLogI0"),
                 (lambda z: mp.besseli(1, z), "kLogI1")]:
    vals = [mp.log(fn(z)) if z > 0 else mp.mpf(0) for z in bessel_z]
    print(f"inline constexpr double {name}[] = {{")
    print("    " + ",\n    ".join(mp.nstr(v, 17) for v in vals) + "};")
print("// I0/I1 at small z as direct values")
cpp(mp.besseli(0, 1), "kI0At1")
cpp(mp.besseli(1, 1), "kI1At1")
cpp(mp.besseli(0, 0.25), "kI0AtQuarter")
cpp(mp.besseli(1, 0.25), "kI1AtQuarter")
cpp(mp.besseli(0, 12.0), "kI0At12")
cpp(mp.besseli(1, 12.0), "kI1At12")

print("// I1/I0 ratios (posterior-mean shrinkage factors)")
for z in [1.5, 5.0, 6.0, 8.0, 20.0, 100.0]:
    r = mp.besseli(1, z) / mp.besseli(0, z)
    cpp(r, f"kRatioI1I0At{str(z).replace('.0','').replace('.','p')}")


# ------------------------------------------------- zero-mean Gaussian KL value
print("\n// --- KL( N(0,2I5) || N(0,I5) ) = (10 - 5 - 5 ln 2)/2 ---")
cpp((mp.mpf(10) - 5 - 5 * mp.log(2)) / 2, "kKlTwoI5VsI5")


# ------------------------------------- circle model: Bayesian-predictive KL
# True density N(mu(om), s2*I2); predictive p(y|xbar) with Bessel closed form.
# 2-D defining integral in polar coordinates around mu(om), plus the 1-D
# radial (Rice-density) reduction; both printed so the agreement is visible.
def circle_kl_2d(n, xbar, s2, om):
    s = mp.sqrt(s2)
    mu = mp.matrix([mp.cos(om), mp.sin(om)])
    v = mp.matrix([n * xbar[0], n * xbar[1]])
    nr = mp.sqrt(v[0] ** 2 + v[1] ** 2)
    logI0nr = mp.log(mp.besseli(0, nr / s2))

    def integrand(rad, tau):
        y0 = mu[0] + s * rad * mp.cos(tau)
        y1 = mu[1] + s * rad * mp.sin(tau)
        rho = mp.sqrt((y0 + v[0]) ** 2 + (y1 + v[1]) ** 2)
        diff = (-rad ** 2 / 2 + (y0 ** 2 + y1 ** 2 + 1) / (2 * s2)
                + logI0nr - mp.log(mp.besseli(0, rho / s2)))
        return rad * mp.exp(-rad ** 2 / 2) * diff / (2 * mp.pi)

    return mp.quad(integrand, [0, 12], [0, 2 * mp.pi])


def circle_kl_radial(n, xbar, s2, om):
    s = mp.sqrt(s2)
    mu = mp.matrix([mp.cos(om), mp.sin(om)])
    v0, v1 = n * xbar[0], n * xbar[1]
    nr = mp.sqrt(v0 ** 2 + v1 ** 2)
    nu = mp.sqrt((mu[0] + v0) ** 2 + (mu[1] + v1) ** 2)

    def rice(rho):
        return (rho / s2) * mp.exp(-(rho ** 2 + nu ** 2) / (2 * s2)) \
            * mp.besseli(0, rho * nu / s2)

    lo, hi = max(mp.mpf(0), nu - 14 * s), nu + 14 * s
    z = mp.quad(rice, [lo, hi])
    ev = mp.quad(lambda rho: rice(rho) * mp.log(mp.besseli(0, rho / s2)),
                 [lo, hi]) / z
    return 1 / s2 + mp.log(mp.besseli(0, nr / s2)) - ev


print("\n// --- circle Bayesian-predictive KL, frozen cases ---")
cases = [(25, (mp.mpf('0.98'), mp.mpf('0.10')), mp.mpf(1), mp.mpf(0), "A"),
         (25, (mp.mpf('1.10'), mp.mpf('-0.20')), mp.mpf(4), mp.mpf('0.3'), "B"),
         (5, (mp.mpf('0.40'), mp.mpf('0.20')), mp.mpf(1), mp.mpf('1.0'), "C")]
for n, xbar, s2, om, tag in cases:
    k2 = circle_kl_2d(n, xbar, s2, om)
    k1 = circle_kl_radial(n, xbar, s2, om)
    assert abs(k2 - k1) < mp.mpf('1e-25'), (tag, k2, k1)
    print(f"// case {tag}: n={n}, xbar=({mp.nstr(xbar[0],3)},{mp.nstr(xbar[1],3)}), "
          f"sigma2={mp.nstr(s2,2)}, omega_true={mp.nstr(om,3)} "
          f"(2-D and radial routes agree to {mp.nstr(abs(k2-k1),2)})")
    cpp(k1, f"kCircleBayesKl{tag}")

print("\n// --- circle Bayesian-predictive log density, frozen points ---")
# log p(y|xbar) = log I0(|y+n xbar|/s2) - log I0(n r/s2) - (|y|^2+1)/(2 s2) - log(2 pi s2)
for (n, xbar, s2, y, tag) in [
        (10, (mp.mpf('0.9'), mp.mpf('0.3')), mp.mpf(1),
         (mp.mpf('0.5'), mp.mpf('-0.4')), "P"),
        (25, (mp.mpf('1.05'), mp.mpf('0.0')), mp.mpf(4),
         (mp.mpf('2.0'), mp.mpf('1.0')), "Q")]:
    v0, v1 = n * xbar[0], n * xbar[1]
    nr = mp.sqrt(v0 ** 2 + v1 ** 2)
    rho = mp.sqrt((y[0] + v0) ** 2 + (y[1] + v1) ** 2)
    val = (mp.log(mp.besseli(0, rho / s2)) - mp.log(mp.besseli(0, nr / s2))
           - (y[0] ** 2 + y[1] ** 2 + 1) / (2 * s2) - mp.log(2 * mp.pi * s2))
    cpp(val, f"kCirclePredLogDensity{tag}")

# ----------------------------------------------------- spiked-model dense KL
print("\n// --- spiked-model KL between two rank-one-update covariances ---")
l = 5
u0 = mp.matrix([1, 2, 3, 4, 5]); u0 = u0 / mp.norm(u0)
u1 = mp.matrix([5, 4, 3, 2, 1]); u1 = u1 / mp.norm(u1)
lam0, lam1 = mp.mpf('1.3'), mp.mpf('0.7')
S0 = mp.eye(l) + lam0 * (u0 * u0.T)
S1 = mp.eye(l) + lam1 * (u1 * u1.T)
S1inv = mp.inverse(S1)
kl = (mp.fsum((S1inv * S0)[i, i] for i in range(l)) - l
      + mp.log(mp.det(S1)) - mp.log(mp.det(S0))) / 2
cpp(kl, "kSpikedKlDense", "l=5, (1.3,u0) vs (0.7,u1), u0~(1..5), u1~(5..1)")

# --------------------------------------------------------- Philox-4x32-10 KAT
print("\n// --- Philox 4x32-10 known-answer vectors (independent Python impl) ---")
M0, M1 = 0xD2511F53, 0xCD9E8D57
W0, W1 = 0x9E3779B9, 0xBB67AE85
MASK = 0xFFFFFFFF


def philox4x32(ctr, key, rounds=10):
    c = list(ctr); k = list(key)
    for _ in range(rounds):
        p0 = M0 * c[0]; p1 = M1 * c[2]
        lo0, hi0 = p0 & MASK, (p0 >> 32) & MASK
        lo1, hi1 = p1 & MASK, (p1 >> 32) & MASK
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0]
        k = [(k[0] + W0) & MASK, (k[1] + W1) & MASK]
    return c


kats = [((0, 0, 0, 0), (0, 0)),
        ((MASK, MASK, MASK, MASK), (MASK, MASK)),
        ((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
         (0xA4093822, 0x299F31D0))]
for i, (ctr, key) in enumerate(kats):
    out = philox4x32(ctr, key)
    print(f"// ctr={[hex(c) for c in ctr]} key={[hex(k) for k in key]}")
    print(f"inline constexpr uint32_t kPhiloxKat{i}[4] = "
          f"{{{', '.join(f'0x{o:08X}u' for o in out)}}};")
