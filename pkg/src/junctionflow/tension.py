"""Misorientation-dependent surface tension models.

A model evaluates a base profile on the canonical misorientation in
[0, pi]; the symmetry/periodicity axioms (even, mirror about pi, 2*pi
periodic) hold exactly by construction of the reduction.  Three profiles
are provided: constant, quadratic (theta^2 + c) and Read-Shockley
(A*theta*(B - ln theta), linearly extended below a small clamp angle
where its slope blows up).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import KinkPoint, NonFiniteInput

TWO_PI = 2.0 * math.pi

#: below this distance (radians) from a corner of the extended profile,
#: sigma_prime refuses to pick a one-sided slope
TOL_KINK = 1e-9


def canonical_misorientation(dtheta: float) -> float:
    """Reduce an angle difference to the canonical misorientation in [0, pi].

    m = min(r, 2*pi - r) with r = dtheta mod 2*pi.  Reducing |dtheta| makes
    evenness bit-exact; mirror symmetry and periodicity hold to rounding.
    """
    if not math.isfinite(dtheta):
        raise NonFiniteInput(f"misorientation argument is not finite: {dtheta!r}")
    r = math.fmod(abs(dtheta), TWO_PI)
    return min(r, TWO_PI - r)


def _reduction_sign(dtheta: float) -> float:
    """d(canonical)/d(dtheta) on the smooth branches: +1 or -1."""
    r = math.fmod(abs(dtheta), TWO_PI)
    s = 1.0 if r <= math.pi else -1.0
    return s if dtheta >= 0.0 else -s


@dataclass(frozen=True)
class TensionModel:
    """Surface tension sigma(dtheta) with derivative, kink-aware.

    kind is one of "constant", "quadratic", "read_shockley".  Parameters:
      constant       -> value
      quadratic      -> c            (profile theta^2 + c on [0, pi], c > 0)
      read_shockley  -> A, B, theta_min  (profile A*theta*(B - ln theta))
    """

    kind: str
    value: float = 0.0
    c: float = 0.0
    A: float = 0.0
    B: float = 0.0
    theta_min: float = 1e-3

    def __post_init__(self):
        if self.kind == "constant":
            if not (self.value >= 0.0):
                raise ValueError("constant tension must be >= 0")
        elif self.kind == "quadratic":
            if not (self.c > 0.0):
                raise ValueError("quadratic tension needs c > 0")
        elif self.kind == "read_shockley":
            if not (self.A > 0.0):
                raise ValueError("Read-Shockley needs A > 0")
            if not (0.0 < self.theta_min < math.pi):
                raise ValueError("theta_min must lie in (0, pi)")
            # concave profile: positivity on [theta_min, pi] follows from the
            # endpoint values; the linear extension keeps sigma(0) = A*theta_min > 0
            if self._profile(math.pi) <= 0.0:
                raise ValueError(
                    "Read-Shockley profile is nonpositive at pi; need B > ln(pi)"
                )
            if self._profile(self.theta_min) <= 0.0:
                raise ValueError("Read-Shockley profile is nonpositive at theta_min")
        else:
            raise ValueError(f"unknown tension kind {self.kind!r}")

    # -- base profile on [0, pi] ------------------------------------------

    def _profile(self, m: float) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "quadratic":
            return m * m + self.c
        # read_shockley with linear extension below the clamp
        tm = self.theta_min
        if m >= tm:
            return self.A * m * (self.B - math.log(m))
        return self._profile(tm) + self._profile_prime(tm) * (m - tm)

    def _profile_prime(self, m: float) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "quadratic":
            return 2.0 * m
        tm = self.theta_min
        if m >= tm:
            return self.A * (self.B - math.log(m) - 1.0)
        return self.A * (self.B - math.log(tm) - 1.0)

    def _profile_second(self, m: float) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "quadratic":
            return 2.0
        if m >= self.theta_min:
            return -self.A / m
        return 0.0

    def _check_kink(self, m: float, what: str) -> None:
        if self.kind == "constant":
            return
        if m < TOL_KINK or (math.pi - m) < TOL_KINK:
            raise KinkPoint(
                f"{what} at canonical misorientation {m!r}: within {TOL_KINK} of a "
                "corner of the periodic extension"
            )

    # -- public evaluation -------------------------------------------------

    def sigma(self, dtheta: float) -> float:
        """Surface tension at angle difference dtheta (any real)."""
        return self._profile(canonical_misorientation(dtheta))

    def sigma_prime(self, dtheta: float) -> float:
        """d sigma / d dtheta, odd in dtheta; KinkPoint near corners."""
        m = canonical_misorientation(dtheta)
        self._check_kink(m, "sigma_prime")
        return self._profile_prime(m) * _reduction_sign(dtheta)

    def sigma_double_prime(self, dtheta: float) -> float:
        """Second derivative of the extended sigma (sign squares away)."""
        m = canonical_misorientation(dtheta)
        self._check_kink(m, "sigma_double_prime")
        return self._profile_second(m)

    def metadata(self) -> dict:
        """Parameters, clamps and thresholds for output manifests."""
        meta: dict = {"kind": self.kind}
        if self.kind == "constant":
            meta["value"] = self.value
        elif self.kind == "quadratic":
            meta["c"] = self.c
        else:
            meta.update({"A": self.A, "B": self.B, "theta_min": self.theta_min})
        meta["tol_kink"] = TOL_KINK
        return meta


def constant(value: float) -> TensionModel:
    return TensionModel(kind="constant", value=value)


def quadratic(c: float) -> TensionModel:
    return TensionModel(kind="quadratic", c=c)


def read_shockley(A: float, B: float, theta_min: float = 1e-3) -> TensionModel:
    return TensionModel(kind="read_shockley", A=A, B=B, theta_min=theta_min)


def from_config(spec: dict) -> TensionModel:
    """Build a model from its JSON description (see package README)."""
    kind = spec.get("kind")
    if kind == "constant":
        return constant(float(spec["value"]))
    if kind == "quadratic":
        return quadratic(float(spec["c"]))
    if kind == "read_shockley":
        return read_shockley(
            float(spec["A"]), float(spec["B"]), float(spec.get("theta_min", 1e-3))
        )
    raise ValueError(f"unknown tension kind {kind!r}")


def interface_sigmas(model: TensionModel, theta) -> list[float]:
    """sigma_{j-1,j} for the three interfaces, cyclic (theta_0 == theta_3).

    Curve j separates grain j-1 from grain j, so its tension is
    sigma(theta_{j-1} - theta_j).
    """
    t1, t2, t3 = theta
    return [model.sigma(t3 - t1), model.sigma(t1 - t2), model.sigma(t2 - t3)]


def triangle_ok(model: TensionModel, theta) -> tuple[bool, float]:
    """Check sigma_ij + sigma_jk >= sigma_ik over all distinct triples.

    Returns (ok, worst margin); margin is min over triples of
    sigma_ij + sigma_jk - sigma_ik.
    """
    t = list(theta)
    sig = {}
    for i in range(3):
        for j in range(3):
            if i != j:
                sig[(i, j)] = model.sigma(t[i] - t[j])
    worst = math.inf
    for i in range(3):
        for j in range(3):
            for k in range(3):
                if len({i, j, k}) == 3:
                    worst = min(worst, sig[(i, j)] + sig[(j, k)] - sig[(i, k)])
    return worst >= 0.0, worst
