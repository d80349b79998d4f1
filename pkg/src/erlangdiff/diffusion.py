"""Stationary law of the piecewise Ornstein-Uhlenbeck diffusion model.

The density is ``nu(x) = kappa * exp((1/mu) * int_0^x b)`` for the piecewise
linear drift b of the model, which works out to two pieces glued at the drift
kink ``-zeta``:

  Erlang-C            N(0,1) shape left of -zeta, exponential(|zeta|) right
  Erlang-A, R <= n    N(0,1) shape left, N((mu/alpha-1)*zeta, mu/alpha) right
  Erlang-A, R >= n    N((alpha/mu-1)*zeta, 1) left, N(0, mu/alpha) right

Piece amplitudes are carried in log form: in heavily staffed systems the
right-piece amplitude is exp(zeta^2/2)-sized and overflows a double even
though the density itself is tame.  Every amplitude-times-integral product is
therefore assembled from log quantities, and all tail arithmetic goes through
the scaled complementary error function -- never through 1 - CDF subtraction.

The density is unimodal with its mode at 0 in every regime (the left piece
rises toward the junction or peaks at 0, the right piece falls), a fact the
Poisson-equation machinery relies on when choosing integral representations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .model import DerivedQuantities

__all__ = [
    "DiffusionDensity",
    "build_density",
    "pdf",
    "cdf",
    "moment",
    "density_sup_check",
    "zeta_scaling_limit",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_HALF_PI = math.sqrt(math.pi / 2.0)


def _log_phi_diff(a, b):
    """log(Phi(b) - Phi(a)) for a <= b, stable in both tails."""
    a_arr, b_arr = np.broadcast_arrays(
        np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    )
    use_sf = (a_arr + b_arr) > 0.0
    hi = np.where(use_sf, -a_arr, b_arr)
    lo = np.where(use_sf, -b_arr, a_arr)
    log_hi = special.log_ndtr(hi)
    log_lo = special.log_ndtr(lo)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = log_hi + np.log1p(-np.exp(np.minimum(log_lo - log_hi, 0.0)))
    return np.where(lo == hi, -np.inf, out)


# ---------------------------------------------------------------------------
# Piece primitives: unit-amplitude shapes.  "Ratios" are integrals of the
# shape divided by the shape value at an evaluation point; they stay finite
# where a naive 1/nu(x) prefactor would overflow.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _GaussPiece:
    """Shape exp(-(x - mean)^2 / (2 var)) restricted to [lo, hi]."""

    mean: float
    var: float
    lo: float
    hi: float

    @property
    def std(self) -> float:
        return math.sqrt(self.var)

    def log_shape(self, x):
        return -((np.asarray(x, dtype=float) - self.mean) ** 2) / (2.0 * self.var)

    def log_mass(self, u, v):
        s = self.std
        a = (np.asarray(u, dtype=float) - self.mean) / s
        b = (np.asarray(v, dtype=float) - self.mean) / s
        return math.log(s * _SQRT_2PI) + _log_phi_diff(a, b)

    def ratio_right(self, x, v=np.inf):
        """int_x^v shape(y) dy / shape(x).

        Tail-side form (difference of falling erfcx terms) when the interval
        reaches the falling side of the shape; when [x, v] lies entirely on
        the rising side the difference would cancel catastrophically, so the
        dominant endpoint is factored out instead.
        """
        s = self.std
        z = (np.asarray(x, dtype=float) - self.mean) / (s * _SQRT2)
        v_arr = np.asarray(v, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = s * _SQRT_HALF_PI * special.erfcx(z)
            finite = np.isfinite(v_arr)
            if np.any(finite):
                zv = (np.where(finite, v_arr, 0.0) - self.mean) / (s * _SQRT2)
                corr = s * _SQRT_HALF_PI * special.erfcx(zv) * np.exp(z * z - zv * zv)
                out = out - np.where(finite, corr, 0.0)
                rising = finite & (zv < 0.0)
                if np.any(rising):
                    grow = s * _SQRT_HALF_PI * (
                        special.erfcx(-zv) * np.exp(z * z - zv * zv)
                        - special.erfcx(-z)
                    )
                    out = np.where(rising, grow, out)
        return out

    def ratio_left(self, x, u=-np.inf):
        """int_u^x shape(y) dy / shape(x); mirror of ratio_right."""
        s = self.std
        z = (np.asarray(x, dtype=float) - self.mean) / (s * _SQRT2)
        u_arr = np.asarray(u, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = s * _SQRT_HALF_PI * special.erfcx(-z)
            finite = np.isfinite(u_arr)
            if np.any(finite):
                zu = (np.where(finite, u_arr, 0.0) - self.mean) / (s * _SQRT2)
                corr = s * _SQRT_HALF_PI * special.erfcx(-zu) * np.exp(z * z - zu * zu)
                out = out - np.where(finite, corr, 0.0)
                falling = finite & (zu > 0.0)
                if np.any(falling):
                    grow = s * _SQRT_HALF_PI * (
                        special.erfcx(zu) * np.exp(z * z - zu * zu)
                        - special.erfcx(z)
                    )
                    out = np.where(falling, grow, out)
        return out

    def mode_in(self, u: float, v: float) -> float:
        return min(max(self.mean, u), v)


@dataclass(frozen=True)
class _ExpPiece:
    """Shape exp(-rate * x) on [lo, hi] with rate > 0."""

    rate: float
    lo: float
    hi: float

    def log_shape(self, x):
        return -self.rate * np.asarray(x, dtype=float)

    def log_mass(self, u, v):
        u_arr = np.asarray(u, dtype=float)
        v_arr = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(
                np.isfinite(v_arr),
                np.log1p(-np.exp(-self.rate * np.maximum(v_arr - u_arr, 0.0))),
                0.0,
            )
        out = -self.rate * u_arr + tail - math.log(self.rate)
        return np.where(v_arr <= u_arr, -np.inf, out)

    def ratio_right(self, x, v=np.inf):
        x_arr = np.asarray(x, dtype=float)
        v_arr = np.asarray(v, dtype=float)
        span = np.where(np.isfinite(v_arr), v_arr - x_arr, np.inf)
        return -np.expm1(-self.rate * span) / self.rate

    def ratio_left(self, x, u):
        x_arr = np.asarray(x, dtype=float)
        u_arr = np.asarray(u, dtype=float)
        with np.errstate(over="ignore"):
            out = np.expm1(self.rate * (x_arr - u_arr)) / self.rate
        return out

    def mode_in(self, u: float, v: float) -> float:
        return u


# ---------------------------------------------------------------------------
# The two-piece stationary density.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiffusionDensity:
    """Stationary density of the diffusion model, in closed two-piece form.

    ``regime`` is one of ``erlangC``, ``erlangA_under``, ``erlangA_over``
    (critical load R = n is filed under the underloaded branch; the two
    formulas coincide there).  ``switch_point`` is the gluing point -zeta.
    """

    derived: DerivedQuantities
    regime: str
    mu: float
    alpha: float
    zeta: float
    log_a_minus: float
    log_a_plus: float
    left: _GaussPiece
    right: _GaussPiece | _ExpPiece

    @property
    def switch_point(self) -> float:
        return -self.zeta

    @property
    def a_minus(self) -> float:
        return math.exp(self.log_a_minus)

    @property
    def a_plus(self) -> float:
        with np.errstate(over="ignore"):
            return float(np.exp(self.log_a_plus))

    def _piece(self, which: int):
        return self.left if which == 0 else self.right

    def _log_amp(self, which: int) -> float:
        return self.log_a_minus if which == 0 else self.log_a_plus

    # -- pointwise evaluation -------------------------------------------------

    def log_pdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.where(
            x_arr <= self.switch_point,
            self.log_a_minus + self.left.log_shape(x_arr),
            self.log_a_plus + self.right.log_shape(x_arr),
        )
        return out if x_arr.ndim else float(out)

    def pdf(self, x):
        out = np.exp(self.log_pdf(x))
        return out if np.ndim(x) else float(out)

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        j = self.switch_point
        left_mass = np.exp(
            self.log_a_minus + self.left.log_mass(-np.inf, np.minimum(x_arr, j))
        )
        right_mass = np.exp(
            self.log_a_plus + self.right.log_mass(j, np.maximum(x_arr, j))
        )
        out = np.clip(left_mass + right_mass, 0.0, 1.0)
        return out if x_arr.ndim else float(out)

    def sf(self, x):
        """Upper-tail probability, computed tail-first (no 1 - cdf)."""
        x_arr = np.asarray(x, dtype=float)
        j = self.switch_point
        right_mass = np.exp(
            self.log_a_plus + self.right.log_mass(np.maximum(x_arr, j), np.inf)
        )
        left_mass = np.exp(
            self.log_a_minus + self.left.log_mass(np.minimum(x_arr, j), j)
        )
        out = np.clip(right_mass + left_mass, 0.0, 1.0)
        return out if x_arr.ndim else float(out)

    # -- amplitude-weighted cell integrals (u, v within a single piece) ------

    def _cell_piece_index(self, u, v):
        mid = 0.5 * (np.asarray(u, dtype=float) + np.asarray(v, dtype=float))
        return (mid > self.switch_point).astype(int)

    def cell_mass(self, u, v):
        """int_u^v nu, for cell arrays that do not straddle the junction."""
        which = self._cell_piece_index(u, v)
        out = np.empty_like(np.asarray(u, dtype=float))
        for w in (0, 1):
            mask = which == w
            if np.any(mask):
                piece = self._piece(w)
                out[mask] = np.exp(
                    self._log_amp(w)
                    + piece.log_mass(np.asarray(u)[mask], np.asarray(v)[mask])
                )
        return out

    def cell_first_moment(self, u, v):
        """int_u^v y nu(y) dy for non-straddling cell arrays."""
        which = self._cell_piece_index(u, v)
        u_arr = np.asarray(u, dtype=float)
        v_arr = np.asarray(v, dtype=float)
        out = np.empty_like(u_arr)
        for w in (0, 1):
            mask = which == w
            if not np.any(mask):
                continue
            piece = self._piece(w)
            uu, vv = u_arr[mask], v_arr[mask]
            m0 = np.exp(self._log_amp(w) + piece.log_mass(uu, vv))
            nu_u = self._nu_or_zero(w, uu)
            nu_v = self._nu_or_zero(w, vv)
            if isinstance(piece, _GaussPiece):
                out[mask] = piece.mean * m0 + piece.var * (nu_u - nu_v)
            else:
                r = piece.rate
                out[mask] = nu_u * (uu / r + 1.0 / (r * r)) - nu_v * (
                    vv / r + 1.0 / (r * r)
                )
        return out

    def _nu_or_zero(self, which: int, t):
        t_arr = np.asarray(t, dtype=float)
        piece = self._piece(which)
        with np.errstate(invalid="ignore"):
            val = np.exp(self._log_amp(which) + piece.log_shape(t_arr))
        return np.where(np.isfinite(t_arr), val, 0.0)

    # -- partial raw moments ---------------------------------------------------

    def _piece_moments(self, which: int, m: int, u: float, v: float) -> list[float]:
        """[M_0..M_m] with M_j = int_u^v y^j nu(y) dy restricted to one piece.

        Density-scaled recurrences: every term is a probability-weighted
        quantity, so nothing overflows even when the raw amplitude would.
        """
        piece = self._piece(which)
        u = max(u, piece.lo)
        v = min(v, piece.hi)
        if not v > u:
            return [0.0] * (m + 1)
        log_amp = self._log_amp(which)
        mass = math.exp(log_amp + float(piece.log_mass(u, v)))
        nu_u = float(self._nu_or_zero(which, u))
        nu_v = float(self._nu_or_zero(which, v))
        mom = [mass]
        if isinstance(piece, _GaussPiece):
            mean, var = piece.mean, piece.var
            for jj in range(1, m + 1):
                bu = u ** (jj - 1) * nu_u if math.isfinite(u) else 0.0
                bv = v ** (jj - 1) * nu_v if math.isfinite(v) else 0.0
                prev2 = mom[jj - 2] if jj >= 2 else 0.0
                mom.append(mean * mom[jj - 1] + var * (jj - 1) * prev2 + var * (bu - bv))
        else:
            r = piece.rate
            for jj in range(1, m + 1):
                bu = u**jj * nu_u if math.isfinite(u) else 0.0
                bv = v**jj * nu_v if math.isfinite(v) else 0.0
                mom.append((jj / r) * mom[jj - 1] + (bu - bv) / r)
        return mom

    def partial_raw_moment(self, m: int, lo: float, hi: float) -> float:
        """int_lo^hi y^m nu(y) dy, exact per piece."""
        return (
            self._piece_moments(0, m, lo, hi)[m] + self._piece_moments(1, m, lo, hi)[m]
        )

    def mean(self) -> float:
        return self.partial_raw_moment(1, -np.inf, np.inf)

    # -- tail ratio machinery for the Poisson-equation solutions --------------

    def ratio_below(self, x, cutoff: float = np.inf, first: bool = False):
        """(1/nu(x)) * int_{-inf}^{min(x, cutoff)} w(y) nu(y) dy, w = 1 or y.

        Stable for x at or left of the mode (0); usable, with possibly huge
        but finite values, between the mode and the junction.  Cross-piece
        contributions are assembled from log quantities so that a negligible
        piece under a large 1/nu never produces 0 * inf.
        """
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        t_arr = np.minimum(x_arr, cutoff)
        j = self.switch_point
        log_nu_x = np.atleast_1d(self.log_pdf(x_arr))
        out = np.zeros_like(x_arr)

        # contribution of the piece containing t, up from the piece floor
        for w in (0, 1):
            piece = self._piece(w)
            in_piece = (t_arr <= j) if w == 0 else (t_arr > j)
            if not np.any(in_piece):
                continue
            t_in = t_arr[in_piece]
            floor = piece.lo
            if first:
                base = self._first_ratio_left(w, t_in, floor)
            else:
                base = piece.ratio_left(t_in, floor)
            scale = np.exp(
                self._log_amp(w) + piece.log_shape(t_in) - log_nu_x[in_piece]
            )
            out[in_piece] += base * scale

        # full left piece when t sits in the right piece
        right_side = t_arr > j
        if np.any(right_side):
            out[right_side] += self._full_piece_over_nu(
                0, first, log_nu_x[right_side]
            )
        return out if np.ndim(x) else float(out[0])

    def ratio_above(self, x, cutoff: float = -np.inf, first: bool = False):
        """(1/nu(x)) * int_{max(x, cutoff)}^{inf} w(y) nu(y) dy, w = 1 or y."""
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        t_arr = np.maximum(x_arr, cutoff)
        j = self.switch_point
        log_nu_x = np.atleast_1d(self.log_pdf(x_arr))
        out = np.zeros_like(x_arr)

        for w in (0, 1):
            piece = self._piece(w)
            in_piece = (t_arr <= j) if w == 0 else (t_arr > j)
            if not np.any(in_piece):
                continue
            t_in = t_arr[in_piece]
            ceil_ = piece.hi
            if first:
                base = self._first_ratio_right(w, t_in, ceil_)
            else:
                base = piece.ratio_right(t_in, ceil_)
            scale = np.exp(
                self._log_amp(w) + piece.log_shape(t_in) - log_nu_x[in_piece]
            )
            out[in_piece] += base * scale

        left_side = t_arr <= j
        if np.any(left_side):
            out[left_side] += self._full_piece_over_nu(1, first, log_nu_x[left_side])
        return out if np.ndim(x) else float(out[0])

    def _full_piece_over_nu(self, which: int, first: bool, log_nu_x):
        """int over one whole piece of w(y) nu(y) dy, divided by nu(x).

        Every term is exp(log difference) so extreme amplitude splits stay
        finite: a no-mass piece contributes 0, never nan.
        """
        piece = self._piece(which)
        log_amp = self._log_amp(which)
        j = self.switch_point
        lo = piece.lo if which == 0 else j
        hi = j if which == 0 else piece.hi
        log_mass = log_amp + float(piece.log_mass(lo, hi))
        m0 = np.exp(log_mass - log_nu_x)
        if not first:
            return m0
        nu_lo = (
            np.exp(log_amp + float(piece.log_shape(lo)) - log_nu_x)
            if math.isfinite(lo)
            else 0.0
        )
        nu_hi = (
            np.exp(log_amp + float(piece.log_shape(hi)) - log_nu_x)
            if math.isfinite(hi)
            else 0.0
        )
        if isinstance(piece, _GaussPiece):
            return piece.mean * m0 + piece.var * (nu_lo - nu_hi)
        r = piece.rate
        lo_term = nu_lo * (lo / r + 1.0 / (r * r)) if math.isfinite(lo) else 0.0
        hi_term = nu_hi * (hi / r + 1.0 / (r * r)) if math.isfinite(hi) else 0.0
        return lo_term - hi_term

    def _first_ratio_left(self, which: int, t, floor: float):
        """int_floor^t y shape / shape(t) within one piece."""
        piece = self._piece(which)
        t_arr = np.asarray(t, dtype=float)
        if isinstance(piece, _GaussPiece):
            r0 = piece.ratio_left(t_arr, floor)
            shape_floor = (
                np.exp(piece.log_shape(floor) - piece.log_shape(t_arr))
                if math.isfinite(floor)
                else 0.0
            )
            return piece.mean * r0 + piece.var * (shape_floor - 1.0)
        r = piece.rate
        shape_floor = np.exp(piece.log_shape(floor) - piece.log_shape(t_arr))
        return shape_floor * (floor / r + 1.0 / (r * r)) - (
            t_arr / r + 1.0 / (r * r)
        )

    def _first_ratio_right(self, which: int, t, ceil_: float):
        """int_t^ceil y shape / shape(t) within one piece."""
        piece = self._piece(which)
        t_arr = np.asarray(t, dtype=float)
        if isinstance(piece, _GaussPiece):
            r0 = piece.ratio_right(t_arr, ceil_)
            shape_ceil = (
                np.exp(piece.log_shape(ceil_) - piece.log_shape(t_arr))
                if math.isfinite(ceil_)
                else 0.0
            )
            return piece.mean * r0 + piece.var * (1.0 - shape_ceil)
        r = piece.rate
        shape_ceil = (
            np.exp(piece.log_shape(ceil_) - piece.log_shape(t_arr))
            if math.isfinite(ceil_)
            else 0.0
        )
        ceil_term = shape_ceil * (ceil_ / r + 1.0 / (r * r)) if math.isfinite(ceil_) else 0.0
        return (t_arr / r + 1.0 / (r * r)) - ceil_term

    # -- quantiles -------------------------------------------------------------

    def tail_points(self, eps: float) -> tuple[float, float]:
        """Points bracketing all but ~eps of the mass (coarse closed forms).

        Each side solves the eps-quantile within its own piece through the
        log-domain inverse normal CDF; a piece holding less than eps of mass
        contributes its junction instead.
        """
        j = self.switch_point
        log_eps = math.log(eps)
        lp = self.left
        if self.log_a_minus + float(lp.log_mass(-np.inf, j)) > log_eps:
            log_target = log_eps - self.log_a_minus - math.log(lp.std * _SQRT_2PI)
            z = float(special.ndtri_exp(min(log_target, math.log(0.5))))
            x_lo = lp.mean + lp.std * min(z, -1.0)
        else:
            x_lo = j
        rp = self.right
        if self.log_a_plus + float(rp.log_mass(j, np.inf)) > log_eps:
            if isinstance(rp, _ExpPiece):
                x_hi = (self.log_a_plus - math.log(rp.rate) - log_eps) / rp.rate
            else:
                log_target = log_eps - self.log_a_plus - math.log(rp.std * _SQRT_2PI)
                z = float(special.ndtri_exp(min(log_target, math.log(0.5))))
                x_hi = rp.mean - rp.std * min(z, -1.0)
        else:
            x_hi = j
        return min(x_lo, j) - 1.0, max(x_hi, j) + 1.0


def build_density(derived: DerivedQuantities) -> DiffusionDensity:
    """Solve the piece amplitudes from continuity at -zeta and unit mass.

    Closed-form piece integrals only; no quadrature.
    """
    mu, alpha, zeta = derived.mu, derived.alpha, derived.zeta
    j = -zeta
    if derived.is_erlang_c:
        if zeta >= 0.0:
            raise ValueError("Erlang-C density requires zeta < 0")
        regime = "erlangC"
        left = _GaussPiece(mean=0.0, var=1.0, lo=-np.inf, hi=j)
        right: _GaussPiece | _ExpPiece = _ExpPiece(rate=abs(zeta), lo=j, hi=np.inf)
    elif derived.R <= derived.n:
        regime = "erlangA_under"
        left = _GaussPiece(mean=0.0, var=1.0, lo=-np.inf, hi=j)
        right = _GaussPiece(
            mean=(mu / alpha - 1.0) * zeta, var=mu / alpha, lo=j, hi=np.inf
        )
    else:
        regime = "erlangA_over"
        left = _GaussPiece(mean=(alpha / mu - 1.0) * zeta, var=1.0, lo=-np.inf, hi=j)
        right = _GaussPiece(mean=0.0, var=mu / alpha, lo=j, hi=np.inf)

    log_mass_left = float(left.log_mass(-np.inf, j))
    log_mass_right = float(right.log_mass(j, np.inf))
    # continuity at the junction: a_minus * shapeL(j) = a_plus * shapeR(j)
    log_ratio = float(left.log_shape(j)) - float(right.log_shape(j))
    log_a_minus = -np.logaddexp(log_mass_left, log_ratio + log_mass_right)
    return DiffusionDensity(
        derived=derived,
        regime=regime,
        mu=mu,
        alpha=alpha,
        zeta=zeta,
        log_a_minus=float(log_a_minus),
        log_a_plus=float(log_a_minus + log_ratio),
        left=left,
        right=right,
    )


def pdf(d: DiffusionDensity, x):
    return d.pdf(x)


def cdf(d: DiffusionDensity, x):
    return d.cdf(x)


def moment(
    d: DiffusionDensity,
    m: int,
    region: str = "all",
    shift: float = 0.0,
    absolute: bool = False,
) -> float:
    """E[g(Y)^m 1(region)] with g(y) = y + shift.

    region: "all", "below" (Y <= -zeta) or "above" (Y >= -zeta).  With
    ``absolute=True`` the integrand is |g|^m (split at the zero of g).
    Exact piecewise evaluation through moment recurrences; no quadrature.
    """
    if m < 0 or m > 20:
        raise ValueError("moment order must be in 0..20")
    j = d.switch_point
    if region == "all":
        lo, hi = -np.inf, np.inf
    elif region == "below":
        lo, hi = -np.inf, j
    elif region == "above":
        lo, hi = j, np.inf
    else:
        raise ValueError(f"unknown region {region!r}")

    def shifted_partial(u: float, v: float) -> float:
        if not v > u:
            return 0.0
        total = 0.0
        left_moms = d._piece_moments(0, m, u, v)
        right_moms = d._piece_moments(1, m, u, v)
        for i in range(m + 1):
            raw = left_moms[i] + right_moms[i]
            total += math.comb(m, i) * shift ** (m - i) * raw
        return total

    if not absolute:
        return shifted_partial(lo, hi)
    cut = -shift
    below_part = (-1.0) ** m * shifted_partial(lo, min(hi, cut))
    above_part = shifted_partial(max(lo, cut), hi)
    return below_part + above_part


def density_sup_check(d: DiffusionDensity) -> dict:
    """Supremum of the density against its regime bound.

    sqrt(2/pi) for Erlang-C and underloaded Erlang-A; an extra factor
    sqrt(alpha/mu) for the overloaded case.  The sup is attained at a piece
    mode or the junction, so no search is needed.
    """
    j = d.switch_point
    candidates = [j, d.left.mode_in(-np.inf, j), d.right.mode_in(j, np.inf)]
    sup = float(np.max(d.pdf(np.asarray(candidates))))
    if d.regime == "erlangA_over":
        bound = math.sqrt(2.0 / math.pi) * math.sqrt(d.alpha / d.mu)
    else:
        bound = math.sqrt(2.0 / math.pi)
    return {"sup": sup, "bound": bound, "satisfied": bool(sup <= bound * (1.0 + 1e-12))}


def zeta_scaling_limit(mu: float, n: int, m: int, zeta_sequence) -> list[float]:
    """|zeta|^m * E Y^m along an Erlang-C family parametrized by zeta.

    Converges to m! as zeta -> 0-.  Each zeta maps back to the arrival rate
    through sqrt(R) = (zeta + sqrt(zeta^2 + 4n)) / 2.
    """
    from .model import ModelParams, derive

    out = []
    for zeta in zeta_sequence:
        if zeta >= 0.0:
            raise ValueError("Erlang-C scaling limit needs zeta < 0")
        sqrt_r = (zeta + math.sqrt(zeta * zeta + 4.0 * n)) / 2.0
        params = ModelParams(lam=mu * sqrt_r * sqrt_r, mu=mu, n=n, alpha=0.0)
        d = build_density(derive(params))
        out.append(abs(zeta) ** m * moment(d, m))
    return out
