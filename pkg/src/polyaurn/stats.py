"""Confidence intervals and goodness-of-fit decisions for the test suites.

Self-contained on purpose: the z-values for common confidence levels and
the chi-square quantiles for the supported significance levels are frozen
tables, other quantiles come from closed-form approximations accurate far
beyond decision-making needs (inverse normal via Acklam's rational
approximation, |error| < 1e-8; chi-square beyond the table via
Wilson-Hilferty).
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import UrnModelError

# Phi^-1((1 + confidence) / 2) for the standard confidence levels.
_Z_TABLE = {
    0.9: 1.6448536269514722,
    0.95: 1.959963984540054,
    0.99: 2.5758293035489004,
    0.999: 3.2905267314919255,
}

# Upper chi-square quantiles chi2_{1-alpha}(df) for df = 1..40.
_CHI2_TABLE = {
    0.05: (
        3.841458820694124, 5.991464547107979, 7.814727903251179, 9.487729036781154,
        11.070497693516351, 12.591587243743977, 14.067140449340169, 15.50731305586545,
        16.918977604620448, 18.307038053275146, 19.67513757268249, 21.02606981748307,
        22.362032494826934, 23.684791304840576, 24.995790139728616, 26.29622760486423,
        27.58711163827534, 28.869299430392623, 30.14352720564616, 31.410432844230918,
        32.670573340917315, 33.92443847144381, 35.17246162690806, 36.41502850180731,
        37.65248413348277, 38.885138659830055, 40.113272069413625, 41.33713815142739,
        42.55696780429269, 43.77297182574219, 44.98534328036513, 46.19425952027847,
        47.39988391908093, 48.602367367294164, 49.80184956820181, 50.99846016571065,
        52.192319730102895, 53.383540622969356, 54.572227758941736, 55.75847927888702,
    ),
    0.01: (
        6.6348966010212145, 9.21034037197618, 11.344866730144373, 13.276704135987622,
        15.08627246938899, 16.811893829770927, 18.475306906582357, 20.090235029663233,
        21.665994333461924, 23.209251158954356, 24.724970311318277, 26.216967305535853,
        27.68824961045705, 29.141237740672796, 30.57791416689249, 31.999926908815176,
        33.40866360500461, 34.805305734705065, 36.19086912927004, 37.56623478662507,
        38.93217268351607, 40.289360437593864, 41.638398118858476, 42.97982013935165,
        44.31410489621915, 45.64168266628317, 46.962942124751436, 48.27823577031548,
        49.58788447289881, 50.89218131151707, 52.19139483319193, 53.48577183623535,
        54.77553976011035, 56.06090874778906, 57.3420734338592, 58.61921450168706,
        59.89250004508689, 61.1620867636897, 62.4281210161849, 63.690739751564465,
    ),
    0.001: (
        10.827566170662733, 13.815510557964274, 16.26623619623813, 18.46682695290317,
        20.515005652432873, 22.457744484825323, 24.321886347856854, 26.12448155837614,
        27.877164871256568, 29.58829844507442, 31.264133620239985, 32.90949040736021,
        34.52817897487089, 36.12327368039813, 37.69729821835383, 39.252354790768464,
        40.79021670690253, 42.31239633167996, 43.82019596451753, 45.31474661812586,
        46.797038041561315, 48.26794229083518, 49.7282324664315, 51.17859777737739,
        52.619655776172834, 54.05196238857664, 55.47602020574521, 56.892285393353625,
        58.301173489794905, 59.70306430442994, 61.098306081058126, 62.487219057088474,
        63.870098522344946, 65.24721746094244, 66.61882884370104, 67.98516762602424,
        69.3464524962412, 70.70288741150503, 72.0546629519878, 73.40195751899103,
    ),
}

# Acklam's inverse-normal coefficients.
_ACK_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ACK_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_ACK_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ACK_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)

_MIN_EXPECTED = 5.0


class GofResult(NamedTuple):
    """Decision record of one goodness-of-fit test.

    ``df`` is the degrees of freedom for chi-square tests and the sample
    size for KS tests.
    """

    statistic: float
    df: int
    significance: float
    threshold: float
    passed: bool


def inverse_normal_cdf(p: float) -> float:
    """Standard normal quantile, accurate to better than 1e-8 absolute."""
    if not 0.0 < p < 1.0:
        raise UrnModelError("p must be strictly between 0 and 1")
    a, b, c, d = _ACK_A, _ACK_B, _ACK_C, _ACK_D
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    if p > 1.0 - p_low:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    q = p - 0.5
    r = q * q
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / (
        ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
    )


def _z_value(confidence: float) -> float:
    z = _Z_TABLE.get(confidence)
    if z is None:
        z = inverse_normal_cdf((1.0 + confidence) / 2.0)
    return z


def wilson_interval(
    successes: int, trials: int, confidence: float = 0.95
) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion, clamped to [0, 1]."""
    if trials < 1:
        raise UrnModelError("trials must be at least 1")
    if not 0 <= successes <= trials:
        raise UrnModelError("successes must lie in [0, trials]")
    if not 0.0 < confidence < 1.0:
        raise UrnModelError("confidence must be strictly between 0 and 1")
    z = _z_value(confidence)
    n = float(trials)
    phat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom
    lo = max(0.0, center - half)
    hi = min(1.0, center + half)
    # the score bound is exactly 0 (resp. 1) at the boundary counts; pin it
    # so rounding cannot pull it inside
    if successes == 0:
        lo = 0.0
    if successes == trials:
        hi = 1.0
    return lo, hi


def _chi2_quantile(significance: float, df: int) -> float:
    table = _CHI2_TABLE.get(significance)
    if table is not None and df <= len(table):
        return table[df - 1]
    # Wilson-Hilferty approximation for off-table requests.
    z = inverse_normal_cdf(1.0 - significance)
    a = 2.0 / (9.0 * df)
    return df * (1.0 - a + z * math.sqrt(a)) ** 3


def _pool_cells(
    observed: Sequence[int], expected: Sequence[float]
) -> Tuple[list, list]:
    """Pool cells whose expected count is below 5.

    All undersized cells are merged into one bucket; if the bucket itself
    is still undersized it absorbs the smallest remaining cells (all ties
    at once, so the result is independent of input order).
    """
    kept = [(float(e), int(o)) for o, e in zip(observed, expected) if e >= _MIN_EXPECTED]
    small = [(float(e), int(o)) for o, e in zip(observed, expected) if e < _MIN_EXPECTED]
    bucket_e = sum(e for e, _ in small)
    bucket_o = sum(o for _, o in small)
    while small and bucket_e < _MIN_EXPECTED and kept:
        low = min(e for e, _ in kept)
        absorbed = [cell for cell in kept if cell[0] == low]
        kept = [cell for cell in kept if cell[0] != low]
        bucket_e += sum(e for e, _ in absorbed)
        bucket_o += sum(o for _, o in absorbed)
    obs = [o for _, o in kept]
    exp = [e for e, _ in kept]
    if small:
        obs.append(bucket_o)
        exp.append(bucket_e)
    return obs, exp


def chi_square_gof(
    observed: Sequence[int],
    expected: Sequence[float],
    significance: float = 1e-3,
) -> GofResult:
    """Pearson goodness-of-fit test of observed counts against a known law.

    ``expected`` are cell probabilities summing to 1.  Cells with expected
    count below 5 are pooled before the statistic is formed.  The decision
    compares the statistic against the frozen quantile table.
    """
    observed = list(observed)
    expected = list(expected)
    if len(observed) != len(expected) or not observed:
        raise UrnModelError("observed and expected must be equal-length, non-empty")
    total = sum(observed)
    if total < 1:
        raise UrnModelError("all-zero observed counts")
    if any(o < 0 for o in observed):
        raise UrnModelError("observed counts must be non-negative")
    if any(e < 0 for e in expected):
        raise UrnModelError("expected probabilities must be non-negative")
    if abs(sum(expected) - 1.0) > 1e-9:
        raise UrnModelError("expected probabilities must sum to 1")
    if not 0.0 < significance < 1.0:
        raise UrnModelError("significance must be strictly between 0 and 1")

    exp_counts = [e * total for e in expected]
    obs, exp = _pool_cells(observed, exp_counts)
    if len(obs) < 2:
        raise UrnModelError("insufficient degrees of freedom after pooling")
    stat = sum((o - e) ** 2 / e for o, e in zip(obs, exp))
    df = len(obs) - 1
    threshold = _chi2_quantile(significance, df)
    return GofResult(float(stat), df, significance, threshold, stat <= threshold)


def ks_distance(
    sample: Sequence[float],
    cdf: Callable[[float], float],
    significance: float = 1e-3,
) -> GofResult:
    """Sup-norm distance between the empirical CDF and a reference CDF.

    The lower envelope is evaluated one ulp below each sample point, so
    references with atoms (step CDFs on a lattice) get their true left
    limits and tied samples are handled exactly; for continuous
    references the perturbation is far below the decision resolution.
    The decision uses the asymptotic threshold ``c(alpha) / sqrt(n)``
    with ``c(alpha) = sqrt(-ln(alpha / 2) / 2)``, conservative for
    discrete references.  ``df`` in the result is the sample size.
    """
    xs = np.sort(np.asarray(sample, dtype=np.float64))
    n = len(xs)
    if n == 0:
        raise UrnModelError("sample must be non-empty")
    if not 0.0 < significance < 1.0:
        raise UrnModelError("significance must be strictly between 0 and 1")
    f = np.array([float(cdf(float(x))) for x in xs])
    f_left = np.array(
        [float(cdf(float(np.nextafter(x, -np.inf)))) for x in xs]
    )
    grid = np.arange(1, n + 1, dtype=np.float64) / n
    d_plus = float(np.max(grid - f))
    d_minus = float(np.max(f_left - (grid - 1.0 / n)))
    stat = max(d_plus, d_minus, 0.0)
    c_alpha = math.sqrt(-0.5 * math.log(significance / 2.0))
    threshold = c_alpha / math.sqrt(n)
    return GofResult(stat, n, significance, threshold, stat <= threshold)
