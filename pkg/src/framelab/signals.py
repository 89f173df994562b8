"""One-dimensional signals, windows and wavelets.

A :class:`Signal` is either a closed-form descriptor (``gaussian``,
``hermite``, ``box``, ``mexican-hat``, ``power``) or uniform samples, with an
affine modifier applied on top::

    f(t) = scale * exp(2*pi*i*freq*t) * dilation**-0.5 * base((t - shift) / dilation)

All integrals are composite quadratures on uniform grids.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

GAUSS_T = 8.0
MEXICAN_HAT_C = math.sqrt(4.0 * math.sqrt(2.0) / 3.0)
POWER_TAIL = 1e-6


@dataclass(frozen=True)
class QuadratureSpec:
    """Numerical parameters shared by every integral in the package.

    ``R``/``h`` describe the phase-space box (plane) or the x-extent of the
    strip (half-plane); ``dt`` is the 1-D step, refined to ``dt_scale * a`` for
    atoms dilated by ``a < 1``.
    """

    R: float = 4.0
    h: float = 0.05
    dt: float = 0.02
    dt_scale: float = 0.1
    scheme: str = "midpoint"
    y_min: float = 2.0**-4
    y_max: float = 2.0**4
    n_scales: int = 97

    def __post_init__(self):
        if self.h <= 0 or self.dt <= 0 or self.dt_scale <= 0:
            raise ValueError("quadrature steps must be positive")
        if self.R < 1:
            raise ValueError("truncation radius R must be >= 1")
        if not (0 < self.y_min < 1 < self.y_max):
            raise ValueError("need 0 < y_min < 1 < y_max")
        if self.scheme not in ("midpoint", "trapezoid"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.n_scales < 3:
            raise ValueError("n_scales must be >= 3")

    def with_(self, **kw) -> "QuadratureSpec":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return {
            "R": self.R,
            "h": self.h,
            "dt": self.dt,
            "dt_scale": self.dt_scale,
            "scheme": self.scheme,
            "y_min": self.y_min,
            "y_max": self.y_max,
            "n_scales": self.n_scales,
        }


DEFAULT_Q = QuadratureSpec()


@dataclass(frozen=True, eq=False)
class Signal:
    kind: str
    params: tuple = ()
    scale: complex = 1.0
    shift: float = 0.0
    freq: float = 0.0
    dilation: float = 1.0
    samples: Optional[np.ndarray] = field(default=None, repr=False)
    t0: float = 0.0
    step: float = 0.0
    label: str = ""

    # -- construction helpers -------------------------------------------------

    @property
    def base_radius(self) -> float:
        k = self.kind
        if k in ("gaussian", "mexican-hat"):
            return GAUSS_T
        if k == "hermite":
            n = self.params[0]
            return max(GAUSS_T, math.sqrt((2 * n + 1) / (2 * math.pi)) + 6.0)
        if k == "box":
            return self.params[0] / 2.0
        if k == "power":
            return POWER_TAIL ** (1.0 / self.params[0])
        if k == "sampled":
            return max(abs(self.t0), abs(self.t0 + self.step * (len(self.samples) - 1)))
        raise ValueError(f"unknown signal kind {k!r}")

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "sampled":
            lo = self.t0
            hi = self.t0 + self.step * (len(self.samples) - 1)
            return self.shift + self.dilation * lo, self.shift + self.dilation * hi
        T = self.base_radius
        return self.shift - self.dilation * T, self.shift + self.dilation * T

    @property
    def slow_decay(self) -> bool:
        return self.kind == "power"

    def resolution(self, q: QuadratureSpec) -> float:
        """Largest 1-D step that resolves this signal."""
        dt = min(q.dt, q.dt_scale * self.dilation)
        if self.kind == "sampled":
            dt = min(dt, self.step * self.dilation)
        if self.freq:
            dt = min(dt, 0.125 / abs(self.freq))
        return dt

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.kind == "power":
            p, part = self.params
            return f"power({p:g},{part})"
        if self.params:
            out = f"{self.kind}({','.join(f'{p:g}' for p in self.params)})"
        elif self.kind == "sampled":
            out = f"sampled(n={len(self.samples)},t0={self.t0:g},step={self.step:g})"
        else:
            out = self.kind
        mods = []
        if self.dilation != 1.0:
            mods.append(f"dil={self.dilation:.12g}")
        if self.shift:
            mods.append(f"shift={self.shift:.12g}")
        if self.freq:
            mods.append(f"freq={self.freq:.12g}")
        if self.scale != 1.0:
            c = complex(self.scale)
            mods.append(f"scale={c.real:.12g}{c.imag:+.12g}j")
        return out + (f"[{';'.join(mods)}]" if mods else "")

    # -- evaluation -----------------------------------------------------------

    def base(self, s):
        s = np.asarray(s, dtype=float)
        k = self.kind
        if k == "gaussian":
            return 2.0**0.25 * np.exp(-math.pi * s * s)
        if k == "hermite":
            return hermite_function(self.params[0], s)
        if k == "box":
            w = self.params[0]
            return np.where(np.abs(s) < w / 2.0, 1.0 / math.sqrt(w), 0.0)
        if k == "mexican-hat":
            return MEXICAN_HAT_C * (1.0 - 2.0 * math.pi * s * s) * np.exp(-math.pi * s * s)
        if k == "power":
            p, part = self.params
            v = np.power(s + 1j, p)
            if part == "real":
                return v.real
            if part == "imag":
                return v.imag
            return v
        if k == "sampled":
            n = len(self.samples)
            grid = self.t0 + self.step * np.arange(n)
            re = np.interp(s, grid, self.samples.real, left=0.0, right=0.0)
            im = np.interp(s, grid, self.samples.imag, left=0.0, right=0.0)
            return re + 1j * im
        raise ValueError(f"unknown signal kind {k!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        v = self.base((t - self.shift) / self.dilation) / math.sqrt(self.dilation)
        if self.freq:
            v = v * np.exp(2j * math.pi * self.freq * t)
        if self.scale != 1.0:
            v = self.scale * v
        return v

    # -- affine modifiers -----------------------------------------------------

    def scaled(self, c) -> "Signal":
        return replace(self, scale=self.scale * c)

    def __rmul__(self, c) -> "Signal":
        return self.scaled(c)

    def translate(self, x: float) -> "Signal":
        """t -> f(t - x)."""
        phase = np.exp(-2j * math.pi * self.freq * x) if self.freq else 1.0
        return replace(self, shift=self.shift + x, scale=self.scale * phase)

    def modulate(self, xi: float) -> "Signal":
        """t -> exp(2*pi*i*xi*t) f(t)."""
        return replace(self, freq=self.freq + xi)

    def dilate(self, a: float) -> "Signal":
        """t -> a**-0.5 f(t / a)."""
        if a <= 0:
            raise ValueError("dilation must be positive")
        return replace(self, shift=self.shift * a, dilation=self.dilation * a, freq=self.freq / a)

    def tf_shift(self, x: float, y: float) -> "Signal":
        """Gabor atom: exp(-2*pi*i*y*t) f(t - x)."""
        return self.translate(x).modulate(-y)

    def affine_shift(self, x: float, y: float) -> "Signal":
        """Wavelet atom: y**-0.5 f((t - x) / y)."""
        return self.dilate(y).translate(x)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def hermite_function(n: int, t):
    """L2-normalised Hermite function of order n in the exp(-pi t^2) scaling."""
    u = math.sqrt(2.0 * math.pi) * np.asarray(t, dtype=float)
    prev = np.zeros_like(u)
    cur = math.pi**-0.25 * np.exp(-0.5 * u * u)
    for k in range(n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * u * cur - math.sqrt(k / (k + 1)) * prev
    return (2.0 * math.pi) ** 0.25 * cur


def gaussian() -> Signal:
    return Signal("gaussian")


def hermite(n: int) -> Signal:
    if n < 0:
        raise ValueError("hermite order must be >= 0")
    return Signal("hermite", (int(n),))


def box(width: float = 1.0) -> Signal:
    if width <= 0:
        raise ValueError("box width must be positive")
    return Signal("box", (float(width),))


def mexican_hat() -> Signal:
    return Signal("mexican-hat")


def power_wavelet(exponent: float, part: str = "real") -> Signal:
    """(t + i)**exponent on the principal branch; ``part`` in real/imag/complex."""
    if part not in ("real", "imag", "complex"):
        raise ValueError(f"unknown part {part!r}")
    if exponent >= -0.5:
        raise ValueError("(t+i)**p is square integrable only for p < -1/2")
    return Signal("power", (float(exponent), part))


def poisson(alpha: float, part: str = "complex") -> Signal:
    """Poisson wavelet (t + i)**(-(alpha + 1) / 2), alpha > 1, unnormalised."""
    if alpha <= 1:
        raise ValueError("Poisson wavelets need alpha > 1")
    return power_wavelet(-(alpha + 1.0) / 2.0, part)


def harmonic_wavelet(alpha: float, part: str = "real") -> Signal:
    """(t + i)**alpha with the raw exponent alpha < -1 (harmonicity convention)."""
    if alpha >= -1:
        raise ValueError("the harmonic family needs alpha < -1")
    return power_wavelet(alpha, part)


def sampled(t, values) -> Signal:
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=complex)
    if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
        raise ValueError("samples need matching 1-D t and value arrays")
    steps = np.diff(t)
    step = float(steps.mean())
    if step <= 0 or not np.allclose(steps, step, rtol=1e-6, atol=1e-12):
        raise ValueError("samples must lie on a uniform increasing grid")
    return Signal("sampled", samples=v, t0=float(t[0]), step=step)


_DESCRIPTORS = {
    "gaussian": lambda args: gaussian(),
    "mexican-hat": lambda args: mexican_hat(),
    "hermite": lambda args: hermite(int(args[0])),
    "box": lambda args: box(float(args[0]) if args else 1.0),
    "poisson-real": lambda args: poisson(float(args[0]), "real"),
    "poisson-imag": lambda args: poisson(float(args[0]), "imag"),
    "poisson-complex": lambda args: poisson(float(args[0]), "complex"),
    "harmonic-real": lambda args: harmonic_wavelet(float(args[0]), "real"),
    "harmonic-imag": lambda args: harmonic_wavelet(float(args[0]), "imag"),
}


_MODIFIERS = {
    "dilate": (1, lambda s, a: s.dilate(a[0])),
    "modulate": (1, lambda s, a: s.modulate(a[0])),
    "translate": (1, lambda s, a: s.translate(a[0])),
    "scale": (1, lambda s, a: s.scaled(a[0])),
    "tf": (2, lambda s, a: s.tf_shift(a[0], a[1])),
    "affine": (2, lambda s, a: s.affine_shift(a[0], a[1])),
}


def from_descriptor(desc: str) -> Signal:
    """Parse strings like ``gaussian``, ``hermite:3``, ``box:1``, ``poisson-real:3``.

    Modifiers follow after ``|`` and apply left to right, e.g.
    ``gaussian|dilate=4|modulate=0.25`` or ``gaussian|tf=0.3,0.7``.
    """
    head, *mods = [part.strip() for part in desc.strip().split("|")]
    name, _, rest = head.partition(":")
    args = [a for a in rest.split(",") if a] if rest else []
    try:
        make = _DESCRIPTORS[name]
    except KeyError:
        raise ValueError(f"unknown signal descriptor {desc!r}") from None
    try:
        s = make(args)
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad arguments in signal descriptor {desc!r}: {exc}") from None
    for m in mods:
        key, _, val = m.partition("=")
        if key not in _MODIFIERS:
            raise ValueError(f"unknown modifier {key!r} in {desc!r}")
        n, fn = _MODIFIERS[key]
        vals = [float(v) for v in val.split(",") if v]
        if len(vals) != n:
            raise ValueError(f"modifier {key!r} takes {n} value(s)")
        s = fn(s, vals)
    return s


def read_csv(path) -> Signal:
    """Load a sampled signal from CSV with header ``t,re,im``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["t", "re", "im"]:
        raise ValueError(f"{path}: expected header 't,re,im'")
    data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    return sampled(data[:, 0], data[:, 1] + 1j * data[:, 2])


def write_csv(path, t, values) -> None:
    values = np.asarray(values, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re", "im"])
        for ti, v in zip(np.asarray(t, dtype=float), values):
            w.writerow([repr(float(ti)), repr(float(v.real)), repr(float(v.imag))])


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def nodes(lo: float, hi: float, dt: float, scheme: str = "midpoint"):
    """Quadrature nodes and weights on [lo, hi] snapped outward to multiples of dt."""
    a = math.floor(lo / dt + 1e-9) * dt
    b = math.ceil(hi / dt - 1e-9) * dt
    n = max(1, int(round((b - a) / dt)))
    if scheme == "midpoint":
        t = a + (np.arange(n) + 0.5) * dt
        w = np.full(n, dt)
    else:
        t = a + np.arange(n + 1) * dt
        w = np.full(n + 1, dt)
        w[0] = w[-1] = dt / 2
    return t, w


def _overlap(f: Signal, g: Signal):
    flo, fhi = f.support
    glo, ghi = g.support
    return max(flo, glo), min(fhi, ghi)


def inner_product(f: Signal, g: Signal, q: QuadratureSpec = DEFAULT_Q) -> complex:
    """Quadrature value of the integral of f * conj(g)."""
    lo, hi = _overlap(f, g)
    if hi <= lo:
        raise ValueError("signals have non-overlapping quadrature domains")
    dt = min(f.resolution(q), g.resolution(q))
    t, w = nodes(lo, hi, dt, q.scheme)
    return complex(np.sum(w * f(t) * np.conj(g(t))))


def l2_norm(f: Signal, q: QuadratureSpec = DEFAULT_Q) -> float:
    return math.sqrt(max(inner_product(f, f, q).real, 0.0))


def fourier(f: Signal, xi, q: QuadratureSpec = DEFAULT_Q) -> Signal:
    """Continuous Fourier transform  integral f(t) exp(-2 pi i t xi) dt  sampled on a uniform xi grid."""
    xi = np.asarray(xi, dtype=float)
    return sampled(xi, fourier_values(f, xi, q))


def fourier_values(f: Signal, xi, q: QuadratureSpec = DEFAULT_Q, chunk: int = 2_000_000):
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    lo, hi = f.support
    dt = f.resolution(q)
    if xi.size:
        dt = min(dt, 0.25 / max(np.abs(xi).max(), 1e-12))
    t, w = nodes(lo, hi, dt, q.scheme)
    fw = f(t) * w
    out = np.empty(xi.shape, dtype=complex)
    step = max(1, chunk // len(t))
    for s in range(0, len(xi), step):
        out[s:s + step] = np.exp(-2j * math.pi * np.outer(xi[s:s + step], t)) @ fw
    return out


@dataclass(frozen=True)
class Admissibility:
    value: float
    admissible: bool
    low_tail: float
    high_tail: float
    decay_exponent: float
    xi_min: float
    xi_max: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def admissibility(psi: Signal, q: QuadratureSpec = DEFAULT_Q, n_xi: int = 480) -> Admissibility:
    """Integral over xi > 0 of |psi_hat(xi)|^2 / xi, on a log-uniform xi grid.

    Non-admissibility (|psi_hat|^2 / xi not decaying at 0) is reported through
    ``admissible=False`` and ``value=inf`` instead of an exception.
    """
    a = psi.dilation
    lo, hi = psi.support
    xi_min = 1e-3 / a
    if psi.slow_decay:
        xi_min = max(xi_min, 10.0 / (hi - lo))
    xi_max = 16.0 / a + abs(psi.freq)
    s = np.linspace(math.log(xi_min), math.log(xi_max), n_xi + 1)
    s_mid = 0.5 * (s[1:] + s[:-1])
    ds = s[1] - s[0]
    xi = np.exp(s_mid)
    power = np.abs(fourier_values(psi, xi, q)) ** 2

    k = max(4, n_xi // 16)
    head = power[:k]
    if np.all(head > 0):
        slope = np.polyfit(s_mid[:k], np.log(head), 1)[0]
    else:
        slope = float("inf")
    peak = power.max() if power.size else 0.0
    if peak == 0.0 or slope < 0.5:
        return Admissibility(float("inf"), False, float("inf"), 0.0, float(slope), xi_min, xi_max)
    body = float(np.sum(power) * ds)
    low_tail = float(power[0] / slope)
    high_tail = float(power[-1])
    return Admissibility(body + low_tail, True, low_tail, high_tail, float(slope), xi_min, xi_max)


def normalize_wavelet(psi: Signal, q: QuadratureSpec = DEFAULT_Q, report: bool = False):
    """Rescale to unit L2 norm, then dilate so the admissibility integral is 1.

    Dilation by ``a`` keeps the norm and multiplies the admissibility integral by
    ``a``, so both normalisations hold at once.
    """
    norm = l2_norm(psi, q)
    if norm == 0:
        raise ValueError("zero signal cannot be normalised")
    unit = psi.scaled(1.0 / norm)
    adm = admissibility(unit, q)
    if not adm.admissible:
        raise ValueError(f"{psi.describe()} is not admissible")
    out = unit.dilate(1.0 / adm.value)
    out = replace(out, label=f"normalized({psi.describe()})[dil={out.dilation:.12g}]")
    if report:
        final = admissibility(out, q)
        return out, {
            "input_norm": norm,
            "input_admissibility": adm.value * norm**2,
            "dilation": 1.0 / adm.value,
            "norm": l2_norm(out, q),
            "admissibility": final.value,
        }
    return out


def analytic_part(f: Signal, q: QuadratureSpec = DEFAULT_Q, pad: float = 4.0) -> Signal:
    """Positive-frequency part of f, returned as uniform samples."""
    lo, hi = f.support
    width = hi - lo
    dt = f.resolution(q)
    n = int(2 ** math.ceil(math.log2(pad * width / dt)))
    t = lo - (pad - 1) * width / 2 + dt * np.arange(n)
    spec = np.fft.fft(f(t))
    freqs = np.fft.fftfreq(n, dt)
    spec[freqs < 0] = 0.0
    spec[freqs == 0] *= 0.5
    return sampled(t, np.fft.ifft(spec))
