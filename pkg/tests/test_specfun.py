"""Special-function layer: Gamma, erf, Bessel K, quadrature, Meijer-G.

Oracle values marked with their provenance were computed once with an
independent high-precision evaluation (Mellin-Barnes contour quadrature at
40+ digits for the G-functions, arbitrary-precision series for the rest)
and frozen here as literals.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risqnet.specfun import (
    NumericalFailure,
    QuadratureSpec,
    bessel_k,
    erf,
    erfc,
    gamma_fn,
    gg_cdf,
    gg_pdf_kernel,
    gg_sf,
    integrate,
    meijer_g_3_0_1_3,
    meijer_g_3_1_2_4,
)
from risqnet.specfun._gamma import digamma
from risqnet.specfun._meijer import _contour_cdf, _contour_pdf, _series_eval


class TestGamma:
    def test_integer_factorial(self):
        assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)

    def test_half_integer(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    def test_pointwise_frozen(self):
        # oracle: 30-digit arbitrary-precision evaluation
        assert gamma_fn(3.7) == pytest.approx(4.1706517837966031654, rel=1e-12)

    def test_pole_rejected(self):
        for x in (0.0, -1.0, -7.0):
            with pytest.raises(ValueError):
                gamma_fn(x)

    def test_reflection_negative(self):
        # Gamma(-0.5) = -2 sqrt(pi)
        assert gamma_fn(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-12)

    @given(st.floats(min_value=0.1, max_value=20.0))
    @settings(max_examples=200)
    def test_recurrence(self, x: float):
        assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-11)

    def test_recurrence_grid(self):
        rng = np.random.default_rng(20260401)
        for x in rng.uniform(0.1, 20.0, size=1000):
            assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-11)

    def test_large_argument_no_overflow_surprise(self):
        # Gamma(170) is representable; naive Lanczos intermediates are not
        v = gamma_fn(170.0)
        assert math.isfinite(v)
        assert v == pytest.approx(math.factorial(169), rel=1e-11)


class TestErf:
    def test_zero(self):
        assert erf(0.0) == 0.0

    def test_asymptote(self):
        for x in (6.0, 8.0, 30.0):
            assert abs(erf(x) - 1.0) <= 1e-12
            assert abs(erf(-x) + 1.0) <= 1e-12

    def test_pointwise_frozen(self):
        # oracle: Taylor series at 30 digits
        assert erf(0.5) == pytest.approx(0.52049987781304653768, abs=1e-13)

    def test_odd_and_monotone(self):
        xs = np.linspace(-5.0, 5.0, 1001)
        vals = [erf(float(x)) for x in xs]
        for x, v in zip(xs, vals):
            assert erf(float(-x)) == pytest.approx(-v, abs=1e-15)
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_complement_consistency(self):
        for x in (0.3, 1.7, 4.2, 9.0):
            assert erf(x) + erfc(x) == pytest.approx(1.0, abs=1e-14)

    @given(st.floats(min_value=-6.0, max_value=6.0))
    @settings(max_examples=200)
    def test_bounded(self, x: float):
        assert -1.0 <= erf(x) <= 1.0


class TestBesselK:
    def test_half_order_closed_form(self):
        assert bessel_k(0.5, 1.0) == pytest.approx(
            math.sqrt(math.pi / 2.0) * math.exp(-1.0), rel=1e-12
        )

    def test_order_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            nu = float(rng.uniform(0.0, 9.5))
            x = float(rng.uniform(0.05, 40.0))
            assert bessel_k(-nu, x) == pytest.approx(bessel_k(nu, x), rel=1e-13)

    def test_pointwise_frozen(self):
        # oracle: adaptive quadrature of int_0^inf e^{-x cosh t} cosh(nu t) dt
        assert bessel_k(2.3, 4.1) == pytest.approx(0.017693209993698658316, rel=1e-12)

    def test_integral_representation_live(self):
        spec = QuadratureSpec(abs_tol=1e-280, rel_tol=1e-11, max_subdivisions=2000)
        for nu, x in ((1.7, 0.8), (4.4, 7.0), (0.0, 2.5)):
            def integrand(t: float) -> float:
                if t > 60.0:
                    return 0.0
                a = -x * math.cosh(t)
                return 0.5 * (math.exp(a + nu * t) + math.exp(a - nu * t))

            ref, _ = integrate(integrand, 0.0, math.inf, spec)
            assert bessel_k(nu, x) == pytest.approx(ref, rel=1e-10)

    def test_positive_and_decreasing_in_x(self):
        for nu in (0.0, 0.5, 2.3, 7.8):
            xs = np.linspace(0.05, 30.0, 200)
            vals = [bessel_k(nu, float(x)) for x in xs]
            assert all(v > 0.0 for v in vals)
            assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            bessel_k(1.0, 0.0)
        with pytest.raises(ValueError):
            bessel_k(1.0, -2.0)


class TestQuadrature:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=-1e-8)
        with pytest.raises(ValueError):
            QuadratureSpec(max_subdivisions=0)

    def test_exponential_tail(self):
        v, _ = integrate(lambda t: math.exp(-t), 0.0, math.inf)
        assert v == pytest.approx(1.0, abs=1e-12)

    def test_endpoint_singularity(self):
        v, _ = integrate(lambda t: 1.0 / math.sqrt(t), 0.0, 1.0)
        assert v == pytest.approx(2.0, rel=1e-8)

    def test_gamma_gamma_density_normalization(self):
        # unit-mean Gamma-Gamma density via Bessel K
        alpha, beta = 4.2, 1.9
        pref = (
            2.0
            * (alpha * beta) ** (0.5 * (alpha + beta))
            / (gamma_fn(alpha) * gamma_fn(beta))
        )

        def density(h: float) -> float:
            if h <= 0.0 or h > 1e4:
                return 0.0
            return (
                pref
                * h ** (0.5 * (alpha + beta) - 1.0)
                * bessel_k(alpha - beta, 2.0 * math.sqrt(alpha * beta * h))
            )

        v, _ = integrate(density, 0.0, math.inf)
        assert v == pytest.approx(1.0, abs=1e-8)

    def test_failure_carries_estimate(self):
        spec = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=4)
        with pytest.raises(NumericalFailure) as exc:
            integrate(lambda t: math.sin(40.0 * t) ** 2, 0.0, 10.0, spec)
        assert math.isfinite(exc.value.estimate)
        assert exc.value.estimate == pytest.approx(5.0, rel=0.3)

    def test_error_estimate_honest(self):
        v, err = integrate(lambda t: t * t, 0.0, 3.0)
        assert abs(v - 9.0) <= max(err, 1e-12)


# 5x5x5 oracle grids (alpha outer, beta middle, vartheta inner) at x = 2.5,
# computed by independent Mellin-Barnes contour quadrature at 30 digits.
# Parameter spacings deliberately include integer gaps (7.9 - 2.9, 12.5 - 5.5,
# 2.3 - 1.3, 5.2 - 4.2) so both evaluation paths are exercised.
_GRID_ALPHAS = (1.3, 2.6, 4.2, 7.9, 12.5)
_GRID_BETAS = (0.8, 1.4, 2.9, 5.5, 9.1)
_GRID_VTS = (0.7, 1.1, 2.3, 5.2, 11.0)
_GRID_X = 2.5

_GRID_CDF_ORACLE = (
    1.4442145872039835, 0.9077394892829932, 0.4243143238963041,
    0.18358004204553544, 0.08566088836156353, 1.0562919575064,
    0.6539448610497425, 0.2975098539565057, 0.12561211043846543,
    0.05783667623855772, 1.909584228236881, 1.1268959812450534,
    0.47178782414903475, 0.18599219587855134, 0.08281738887699912,
    43.75949510963084, 23.751223257106606, 8.65632874046034,
    3.095396968698467, 1.3257060430268885, 32851.67471829234,
    16257.799320315158, 5131.074096769922, 1692.3012129164622,
    707.1781416431756, 2.1676013946449135, 1.333643640856944,
    0.6006988963122083, 0.2517677434500608, 0.11556016685391471,
    1.4903495865747898, 0.8822219681562123, 0.371143182861549,
    0.1467760827209442, 0.06542820133775556, 2.3068970081308833,
    1.2142010828289904, 0.4120303740298703, 0.1367727420930027,
    0.056372940193717025, 44.089302552787004, 19.129296048973046,
    4.4157414171260045, 1.0885469262481242, 0.4036724386698752,
    29247.318810395664, 10462.173398826631, 1586.9767392724186,
    291.22292303638585, 100.44630839492451, 10.827480105514532,
    6.473309216307701, 2.7819358800568197, 1.1254116920059727,
    0.5083652101614017, 6.921375522396816, 3.863394652557532,
    1.470924547847286, 0.5398811274957844, 0.23314000179997846,
    9.272432973162198, 4.231442700322168, 1.0785711089631256,
    0.2841820673877618, 0.10723452340543758, 160.0797493602651,
    54.60264574923145, 6.643849397526446, 0.8415480414565343,
    0.2487793021516441, 102795.29641525297, 27536.39721771331,
    1619.537907343073, 83.21233359510089, 19.628532007652677,
    4847.863814709991, 2737.2070020773253, 1080.1108245843488,
    414.55263463226066, 183.65370104739674, 2742.4501661624263,
    1364.5940481470363, 431.0467408043528, 140.98517164049653,
    58.588011761908625, 3099.7437370874895, 1102.3010283467866,
    159.84593552290687, 27.01623385309503, 9.001229963975906,
    50827.35443141271, 12534.524610536833, 528.8430647546089,
    11.633457341388267, 1.9416140943030296, 32501974.03711636,
    6234240.932773191, 109340.16618581698, 170.44935282691262,
    5.6664222672992155, 136695904.85693437, 73262057.97287151,
    26977601.79554558, 10018019.418951482, 4395339.437262724,
    70440363.76666915, 31595609.08075944, 8516738.033794703,
    2583228.2966671344, 1053886.4295657657, 73047639.79116397,
    21374280.28269016, 1912066.9048559382, 226715.48754987583,
    71003.91229236462, 1187270430.8969321, 236469683.0879682,
    4941822.177372542, 23305.411062471452, 2443.996498719046,
    759166631564.9974, 117582160369.67728, 1013447088.6779555,
    151795.80290165724, 223.8463908591493,
)

_GRID_PDF_ORACLE = (
    0.03274321811620211, 0.02776850898360372, 0.018732311683686446,
    0.010209621153800393, 0.0052710424899662265, 0.048173462263046786,
    0.04014745302314148, 0.026120779801240012, 0.013684903873262867,
    0.006893089610908741, 0.19080284813242016, 0.15195349597391705,
    0.0901640624432055, 0.042983031653480344, 0.020515775284889636,
    6.912011680116261, 5.109891282546532, 2.6231754906431384,
    1.0977787443124367, 0.49245963873793513, 6395.391816525697,
    4350.35459634251, 1917.511064432169, 716.9094182700821,
    308.5067186338135, 0.11345885527092386, 0.09333366674740352,
    0.05917344937757973, 0.030207371146474565, 0.01499519892757283,
    0.1454276740164651, 0.1163074557642574, 0.06958151800814905,
    0.033424041835087875, 0.01601387566164848, 0.4264594489543525,
    0.31477676312246095, 0.15959623078518584, 0.06501559023115079,
    0.028569223530060077, 10.881385089098158, 6.953270635865937,
    2.5988624780737206, 0.8005579809138943, 0.31253910446524674,
    7838.372154670177, 4252.479183243109, 1109.1414878900164,
    254.8665676750739, 91.08664469705916, 0.8905825969383687,
    0.7071442225696882, 0.41826917704657374, 0.19974448676672285,
    0.09569509210446717, 0.9938593775035539, 0.7557678783577595,
    0.40912481525194866, 0.17882697642367712, 0.08169023915235066,
    2.2040795256631807, 1.4696330813195193, 0.6000837134238409,
    0.1988969933443099, 0.07963019616169077, 44.03103737828213,
    23.23387168706973, 5.321049003132225, 0.9591274836374859,
    0.3033364868751285, 28725.348106209894, 12058.679885732916,
    1432.6399846946865, 115.74676381686932, 29.030650772731242,
    595.2158490364559, 442.1850618316815, 231.51593953525935,
    100.08346095276049, 45.890265526203976, 536.8323866229109,
    369.3677212821276, 165.50934163743614, 62.195497109664345,
    26.733591849829523, 837.1711450356642, 454.25535112375303,
    116.3011593322413, 25.43666506560465, 8.848310492660968,
    14226.671559565266, 5510.203147405914, 481.5479383439474,
    19.20991003979478, 3.5554207846405186, 9100542.605019754,
    2743055.885047376, 100582.82751812381, 344.4092810521681,
    14.80688514830643, 20153094.139489, 14113546.287610844,
    6697634.431449311, 2715721.170966458, 1217734.3035033648,
    15612198.529599523, 9790964.670466313, 3724295.6660232847,
    1262011.5319997983, 525996.9650215278, 20216656.57521627,
    9168000.758074034, 1522418.9861578257, 234885.64779410438,
    75734.64777676696, 332429964.3139647, 104040904.22152975,
    4540720.066006479, 42718.917833681044, 4997.247418104221,
    212566656586.9494, 51736150311.408104, 932371070.333824,
    315484.0201404684, 733.6742248015765,
)


class TestMeijerG:
    def test_pointwise_frozen_cdf_form(self):
        # oracle: Mellin-Barnes contour quadrature at 40 digits
        v = meijer_g_3_1_2_4((1.0, 2.1), (1.1, 4.2, 1.4, 0.0), 0.05)
        assert v == pytest.approx(0.16148246917215209259, rel=1e-10)

    def test_pointwise_frozen_pdf_form(self):
        v = meijer_g_3_0_1_3(1.1, (0.1, 3.2, 0.4), 0.05)
        assert v == pytest.approx(3.1970555914778750514, rel=1e-10)

    def test_zero_argument_gives_certain_success(self):
        assert meijer_g_3_1_2_4((1.0, 2.1), (1.1, 4.2, 1.4, 0.0), 0.0) == 0.0
        assert gg_cdf(4.2, 1.4, 1.1, 0.0) == 0.0
        assert gg_sf(4.2, 1.4, 1.1, 0.0) == 1.0

    def test_structure_validation(self):
        with pytest.raises(ValueError):
            meijer_g_3_1_2_4((0.9, 2.1), (1.1, 4.2, 1.4, 0.0), 1.0)
        with pytest.raises(ValueError):
            meijer_g_3_1_2_4((1.0, 2.5), (1.1, 4.2, 1.4, 0.0), 1.0)
        with pytest.raises(ValueError):
            meijer_g_3_1_2_4((1.0, 2.1), (1.1, 4.2, 1.4, 0.3), 1.0)
        with pytest.raises(ValueError):
            meijer_g_3_0_1_3(1.1, (0.3, 3.2, 0.4), 1.0)
        with pytest.raises(ValueError):
            meijer_g_3_0_1_3(1.1, (0.1, 3.2, 0.4), -1.0)

    def test_oracle_grid_cdf_form(self):
        i = 0
        for al in _GRID_ALPHAS:
            for be in _GRID_BETAS:
                for vt in _GRID_VTS:
                    got = meijer_g_3_1_2_4((1.0, vt + 1.0), (vt, al, be, 0.0), _GRID_X)
                    assert got == pytest.approx(_GRID_CDF_ORACLE[i], rel=1e-6), (
                        al, be, vt,
                    )
                    i += 1

    def test_oracle_grid_pdf_form(self):
        i = 0
        for al in _GRID_ALPHAS:
            for be in _GRID_BETAS:
                for vt in _GRID_VTS:
                    got = meijer_g_3_0_1_3(vt, (vt - 1.0, al - 1.0, be - 1.0), _GRID_X)
                    assert got == pytest.approx(_GRID_PDF_ORACLE[i], rel=1e-6), (
                        al, be, vt,
                    )
                    i += 1

    def test_series_and_contour_agree(self):
        # same inputs, both internal paths, well inside the series regime
        for (al, be, vt, z) in ((4.2, 1.4, 1.1, 2.5), (2.5, 1.8, 6.0, 0.7), (10.0, 8.5, 3.3, 12.0)):
            lg_s, sign_s, _ = _series_eval(al, be, vt, z, "cdf")
            lg_c, sign_c = _contour_cdf(al, be, vt, z, complement=False)
            assert sign_s == sign_c
            assert lg_s == pytest.approx(lg_c, abs=1e-10)
            lg_s, sign_s, _ = _series_eval(al, be, vt, z, "pdf")
            lg_c, sign_c = _contour_pdf(al, be, vt, z)
            assert sign_s == sign_c
            assert lg_s == pytest.approx(lg_c, abs=1e-10)

    def test_dispatch_continuity_at_series_boundary(self):
        # no jump where routing switches from series to contour
        lo = gg_cdf(4.2, 1.4, 1.1, 39.999999)
        hi = gg_cdf(4.2, 1.4, 1.1, 40.000001)
        assert hi == pytest.approx(lo, rel=1e-7)

    def test_near_degenerate_spacing_routes_to_contour(self):
        # integer alpha-beta gap breaks the residue series; value must still
        # match the analytically perturbed neighbourhood
        exact = gg_cdf(4.0, 2.0, 1.3, 5.0)
        for eps in (1e-7, -1e-7):
            assert gg_cdf(4.0 + eps, 2.0, 1.3, 5.0) == pytest.approx(exact, rel=1e-5)


class TestCompositeGainDistribution:
    def test_cdf_pointwise_frozen(self):
        assert gg_cdf(4.2, 1.4, 1.1, 2.5) == pytest.approx(0.617493768318145123, rel=1e-10)
        assert gg_cdf(4.2, 1.4, 1.1, 0.05) == pytest.approx(
            0.025810052395351545926, rel=1e-10
        )

    def test_pdf_pointwise_frozen(self):
        assert gg_pdf_kernel(4.2, 1.4, 1.1, 2.5) == pytest.approx(
            0.120795827801853799, rel=1e-10
        )

    def test_large_shape_parameters_log_space(self):
        # short-link weak-turbulence regime: huge Gamma prefactors
        assert gg_cdf(139.5, 134.1, 39.5, 1024.0) == pytest.approx(
            6.720225994710103119e-45, rel=1e-9
        )

    def test_survival_deep_tail_relative_precision(self):
        assert gg_sf(4.2, 1.4, 1.1, 500.0) == pytest.approx(
            1.98022911540179594e-16, rel=1e-9
        )
        assert gg_sf(7.3, 6.7, 39.5, 300.0) == pytest.approx(
            1.0964137785941051266e-05, rel=1e-9
        )

    def test_cdf_sf_complementarity(self):
        for z in (0.1, 1.0, 5.0, 20.0, 60.0):
            c = gg_cdf(7.3, 6.7, 39.5, z)
            s = gg_sf(7.3, 6.7, 39.5, z)
            assert c + s == pytest.approx(1.0, abs=1e-12)

    def test_sf_monotone_nonincreasing(self):
        zs = np.geomspace(1e-3, 400.0, 80)
        vals = [gg_sf(4.2, 1.4, 1.1, float(z)) for z in zs]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    @given(
        st.floats(min_value=1.1, max_value=12.0),
        st.floats(min_value=0.8, max_value=9.0),
        st.floats(min_value=0.6, max_value=8.0),
        st.floats(min_value=1e-3, max_value=60.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_cdf_in_unit_interval(self, al, be, vt, z):
        c = gg_cdf(al, be, vt, z)
        assert -1e-12 <= c <= 1.0 + 1e-12
        assert gg_pdf_kernel(al, be, vt, max(z, 1e-3)) >= 0.0

    def test_pdf_normalization_all_regimes(self):
        spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=2000)

        def trigamma(x: float) -> float:
            h = 1e-5
            return (digamma(x + h) - digamma(x - h)) / (2.0 * h)

        for (al, be, vt) in ((4.2, 1.4, 1.1), (18.3, 17.5, 39.5), (139.5, 134.1, 39.5)):
            # integrate in log space, sliced around the distribution of ln Z
            # so the needle-shaped large-parameter density cannot be missed
            mu = digamma(al) + digamma(be) - 1.0 / vt
            sig = math.sqrt(trigamma(al) + trigamma(be) + 1.0 / vt**2)
            lo, hi = mu - 45.0 * sig - 5.0, mu + 45.0 * sig + 5.0
            edges = np.linspace(lo, hi, 41)

            def f(x: float) -> float:
                if abs(x) > 700.0:
                    return 0.0
                z = math.exp(x)
                return gg_pdf_kernel(al, be, vt, z) * z

            total = sum(integrate(f, float(a), float(b), spec)[0] for a, b in zip(edges, edges[1:]))
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_pdf_integral_matches_cdf(self):
        spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=2000)
        for (al, be, vt, z) in ((7.3, 6.7, 39.5, 10.0), (10.0, 8.5, 3.3, 4.0)):
            part, _ = integrate(lambda t: gg_pdf_kernel(al, be, vt, t), 0.0, z, spec)
            assert part == pytest.approx(gg_cdf(al, be, vt, z), rel=1e-8)

    def test_mean_matches_moment_formula(self):
        # E[Z] = alpha beta vt / (vt + 1) from the Mellin transform
        spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=2000)
        al, be, vt = 7.3, 6.7, 39.5

        def m1(x: float) -> float:
            if abs(x) > 700.0:
                return 0.0
            z = math.exp(x)
            return gg_pdf_kernel(al, be, vt, z) * z * z

        total, _ = integrate(m1, -math.inf, math.inf, spec)
        assert total == pytest.approx(al * be * vt / (vt + 1.0), rel=1e-9)

    def test_degenerate_concentration_and_histogram(self):
        # nearly-deterministic fading: mass concentrates at z = alpha*beta
        al, be, vt = 500.0, 500.3, 800.0
        lo, hi = 0.8 * al * be, 1.2 * al * be
        mass = gg_cdf(al, be, vt, hi) - gg_cdf(al, be, vt, lo)
        assert mass > 0.99

        rng = np.random.default_rng(31415)
        n = 200_000
        z = (
            rng.gamma(al, 1.0, size=n)
            * rng.gamma(be, 1.0, size=n)
            * rng.uniform(0.0, 1.0, size=n) ** (1.0 / vt)
        )
        mc_mass = float(np.mean((z >= lo) & (z <= hi)))
        assert mc_mass == pytest.approx(mass, abs=4.0 * math.sqrt(0.01 / n) + 1e-4)

        # histogram shape agreement on a coarse grid around the peak
        edges = np.linspace(0.9 * al * be, 1.1 * al * be, 9)
        mc_hist = np.histogram(z, bins=edges)[0] / n
        for k in range(len(edges) - 1):
            analytic = gg_cdf(al, be, vt, float(edges[k + 1])) - gg_cdf(
                al, be, vt, float(edges[k])
            )
            se = math.sqrt(max(analytic * (1.0 - analytic), 1e-6) / n)
            assert abs(mc_hist[k] - analytic) < 5.0 * se + 2e-4

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            gg_cdf(-1.0, 2.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            gg_cdf(4.2, 1.4, 1.1, -0.5)
        with pytest.raises(ValueError):
            gg_pdf_kernel(4.2, 1.4, 1.1, 0.0)
