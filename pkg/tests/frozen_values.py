"""Independently computed reference values, frozen for the test suite.

Every number below was produced by gen_frozen_values.py, which builds on
plain cmath/scipy primitives only (normal-CDF closed forms, scalar adaptive
quadrature, nquad, a high-order ODE integrator) and shares no code with the
package. Regenerate with

    python3 tests/gen_frozen_values.py

and refresh the constants from its output if they ever need recomputing.
The point of freezing is that the slow quadrature/ODE oracles run once,
offline; the suite then compares against plain numbers.
"""

# ---------------------------------------------------------------------------
# Black-Scholes closed forms (normal CDF), S0 = K = 1, sigma = 0.2, T = 1, r = 0
BS_CALL_ATM = 0.07965567455405798
BS_DIGITAL_ATM = 0.460172162722971
# same parameters at scale 100: European put, K = S0 = 100
BS_PUT_ATM_100 = 7.965567455405804

# ---------------------------------------------------------------------------
# Log-price characteristic functions at T = 1, r = 0 (drift-adjusted so that
# cf(-i) = 1). Keys are the evaluation points z.

# Black-Scholes, sigma = 0.2
CF_BS_Z1 = complex(0.9800026401066646, -0.01960266656070908)
CF_BS_Z1_MOD = 0.9801986733067553

# Merton jump-diffusion: sigma = 0.15, alpha = -0.04, beta = 0.02, lam = 3
CF_MERTON = {
    complex(1, 0): complex(0.9857533605043983, -0.013938357692941716),
    complex(1, -2): complex(1.0134411513854007, 0.04280209552437929),
    complex(5, -1): complex(0.701410517267723, 0.054294511590279086),
    complex(20, 0): complex(0.003776401221571821, 0.0004917717299895356),
    complex(0, -2): complex(1.0285763969015187, 0.0),
}

# CGMY: C = 0.6, G = 10, M = 28, Y = 1.1
GAMMA_MINUS_1_1 = 9.714806382902896
CF_CGMY = {
    complex(1, 0): complex(0.9438831690871716, -0.05132080304379399),
    complex(1, -2): complex(1.0440067372947666, 0.16835631429100398),
    complex(5, -1): complex(0.25128422049284205, 0.09720869329700306),
    complex(20, 0): complex(-1.666296080588743e-08, 4.171075879969264e-10),
    complex(0, -2): complex(1.1131524277258327, 0.0),
}

# Univariate Heston via a Riccati ODE integration (DOP853, rtol 1e-12):
# kappa = 1.5, theta = 0.04, vol-of-vol = 0.25, rho = 0.1, T = 2, r = 0.
# Keyed (v0, z).
CF_HESTON1 = {
    (0.01, complex(1, 0)):
        complex(0.9698186124571805, -0.029704324225448154),
    (0.01, complex(1, -2)):
        complex(1.0251193348719774, 0.09704123583321139),
    (0.01, complex(5, -1)):
        complex(0.48399623480244275, 0.04827881172438355),
    (0.01, complex(20, 0)):
        complex(0.0007000646240394004, -0.0007951355294241189),
    (0.01, complex(50, -2)):
        complex(6.277833778873479e-11, -2.9131585937726374e-10),
    (0.0625, complex(1, 0)):
        complex(0.9534256068060258, -0.04514047363311994),
    (0.0625, complex(1, -2)):
        complex(1.0346977876828922, 0.1526192995398891),
    (0.0625, complex(5, -1)):
        complex(0.32934888260546125, 0.0478512645415119),
    (0.0625, complex(20, 0)):
        complex(1.5039397170108787e-05, -4.5059192128659204e-05),
    (0.0625, complex(50, -2)):
        complex(-1.0604479645508966e-14, -2.4949683666660694e-14),
    (0.16, complex(1, 0)):
        complex(0.9230286431840619, -0.07242856906202574),
    (0.16, complex(1, -2)):
        complex(1.044974093362684, 0.25919668958176517),
    (0.16, complex(5, -1)):
        complex(0.16024690192231608, 0.03711382796518169),
    (0.16, complex(20, 0)):
        complex(-6.071770980380702e-08, -1.3586850192705922e-07),
    (0.16, complex(50, -2)):
        complex(-8.473479692020462e-22, -2.400842473742696e-23),
}

# Two-asset Heston, the 2-D efficiency setup at T = 1, r = 0:
# v0 = 0.05, kappa = 0.4963, theta = 0.2286,
# sigma1 = 0.15, sigma2 = 0.2, sigma3 = 0.1,
# rho12 = 0, rho13 = 0.01, rho23 = 0.02.  Keyed (z1, z2).
CF_HESTON2 = {
    (complex(1, 0), complex(1, 0)):
        complex(0.9972563815828934, -0.0027370681477334696),
    (complex(1, -2), complex(-1, -2)):
        complex(1.0027462327361614, -0.0023128022552662),
    (complex(5, 0), complex(3, -1)):
        complex(0.9603160695273266, 0.00028758588092411727),
    (complex(20, -2), complex(10, -2)):
        complex(0.5663788979400061, 0.062089995465844434),
}

# ---------------------------------------------------------------------------
# Damped transform of the min-of-two-assets call, K = 1, eta = (-2, -2),
# by direct 2-D quadrature of e^{i z.x + eta.x} (min(e^x1, e^x2) - K)^+.
# Quadrature tolerance 1e-12 per wedge; the z = (0, 0) entry sits 1.9e-11
# from the exact 1/12.
MIN_CALL_FT_Z0 = complex(0.0833333333144578, 0.0)
MIN_CALL_FT_GRID_Z = (-10.0, -5.0, 0.0, 5.0, 10.0)
_MIN_CALL_ROWS = {
    -10.0: (
        complex(-0.0002459455158435603, 0.000406895154801668),
        complex(-0.0008331633000104731, 0.0008501666325906449),
        complex(-0.0041460832735892945, -0.0022053634421531926),
        complex(0.0010922140738603993, -0.0029255734125283265),
        complex(0.0032051282050806346, -1.734723475976807e-17),
    ),
    -5.0: (
        complex(-0.0008331633000104649, 0.0008501666325906447),
        complex(-0.0028690178798533566, 0.0016363219849381935),
        complex(-0.009634888437310262, -0.012677484790139052),
        complex(0.011494252873811207, -3.469446951953614e-18),
        complex(0.001092214073860401, 0.0029255734125282996),
    ),
    0.0: (
        complex(-0.004146083273589299, -0.0022053634421531987),
        complex(-0.009634888437310252, -0.012677484790139058),
        complex(0.0833333333144578, 0.0),
        complex(-0.009634888437310252, 0.012677484790139058),
        complex(-0.004146083273589299, 0.0022053634421531987),
    ),
}
# The quadrature returned the z1 > 0 rows as exact conjugate mirrors of the
# z1 < 0 rows (real payoff, so f_hat(-z) = conj(f_hat(z))); reconstruct the
# full 5 x 5 dict keyed (z1, z2) from the stored half.
MIN_CALL_FT_QUAD = {}
for _z1 in MIN_CALL_FT_GRID_Z:
    for _j, _z2 in enumerate(MIN_CALL_FT_GRID_Z):
        if _z1 <= 0.0:
            MIN_CALL_FT_QUAD[(_z1, _z2)] = _MIN_CALL_ROWS[_z1][_j]
        else:
            _mirror = _MIN_CALL_ROWS[-_z1][len(MIN_CALL_FT_GRID_Z) - 1 - _j]
            MIN_CALL_FT_QUAD[(_z1, _z2)] = _mirror.conjugate()
del _z1, _z2, _j, _mirror

# ---------------------------------------------------------------------------
# 1-D Fourier prices by scalar adaptive quadrature (three panels up to
# z = 800, epsabs 1e-14), K = 1, r = 0.  Values are (call, digital) pairs.
# bs / merton / cgmy share the model parameters listed above and are keyed
# (moneyness S0/K, maturity T); heston uses the univariate parameters above
# with T = 2 fixed and is keyed (moneyness, v0).
FOURIER_1D = {
    ("bs", 1.0, 1.0): (0.079655674554058, 0.46017216272297096),
    ("bs", 0.8, 0.5): (0.0030911447589051623, 0.04961748368614727),
    ("bs", 1.2, 2.0): (0.24830635378173777, 0.6925820829452707),
    ("merton", 1.0, 1.0): (0.06701852059632006, 0.47097997430738486),
    ("merton", 0.8, 0.5): (0.0010672820814620395, 0.02422763983344306),
    ("merton", 1.2, 2.0): (0.23359584708775555, 0.7422147745873996),
    ("cgmy", 1.0, 1.0): (0.13113378569013606, 0.44423832024939836),
    ("cgmy", 0.8, 0.5): (0.017195740933339945, 0.14115040608746574),
    ("cgmy", 1.2, 2.0): (0.3196494630775591, 0.5676033317667755),
    ("heston", 1.0, 0.0625): (0.1199213531724959, 0.43269978047753904),
    ("heston", 0.8, 0.01): (0.022808397045361726, 0.14087357068940892),
    ("heston", 1.2, 0.16): (0.2876241809407735, 0.6070288120559202),
}

# ---------------------------------------------------------------------------
# 2-D Fourier min-call prices by nquad over [-60, 60] x [0, 60]
# (epsabs 1e-11): two-asset Black-Scholes with S0 = (1, 1.2),
# covariance [[0.04, 0.01], [0.01, 0.0625]], r = 0, eta = (-2, -2).
# Keyed (K, T).
MIN_CALL_2D_PRICES = {
    (1.0, 1.0): 0.05037168301895857,
    (0.8, 0.5): 0.18130357988790352,
    (1.2, 2.0): 0.019614507901540915,
}
