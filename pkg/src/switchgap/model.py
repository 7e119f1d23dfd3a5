"""System parameters, derived coefficients, validation, and named presets.

All rates are expressed in a single common frequency unit chosen per run
(default: kappa2 if kappa2 > 0, else kappa1).  The unit name is carried in
the parameter record so emitted tables stay unambiguous.

The two-photon dissipator can be specified in two equivalent ways: either a
plain two-photon drive ``lambda2`` together with ``kappa2 * D[a^2]``, or a
displaced dissipator ``kappa2 * D[a^2 - alpha0_sq]``.  The representations
are related by ``lambda2 = 1j * kappa2 * alpha0_sq / 2`` and must round-trip
exactly; a parameter set stores at most one of the two.
"""

from __future__ import annotations

import cmath
import configparser
import hashlib
import math
import warnings
from dataclasses import dataclass, replace

from .errors import ValidationError

PRESET_NAMES = ("kerr_oscillator", "dissipative_cat", "dephased_cat")

# exact config/CLI keys for complex entries: <name>_re / <name>_im
_COMPLEX_KEYS = ("lambda1", "lambda2", "lambda3", "alpha0_sq")
_REAL_KEYS = ("delta", "kerr", "kappa1", "kappa2", "kappa_phi")


def complex_from_polar(modulus, phase):
    """Build a complex number from (modulus, phase-in-radians)."""
    return cmath.rect(float(modulus), float(phase))


@dataclass(frozen=True)
class SystemParams:
    """Microscopic Lindbladian parameters, all in the run frequency unit.

    ``alpha0_sq`` is the square of the dissipator displacement (alpha_0^2,
    may be complex); when set, ``lambda2`` must be zero.
    """

    delta: float = 0.0
    kerr: float = 0.0
    kappa1: float = 0.0
    kappa2: float = 0.0
    lambda1: complex = 0j
    lambda2: complex = 0j
    lambda3: complex = 0j
    kappa_phi: float = 0.0
    alpha0_sq: complex | None = None
    unit: str = ""

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "kappa_phi"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be nonnegative, got {getattr(self, name)}")
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "kerr", float(self.kerr))
        object.__setattr__(self, "kappa1", float(self.kappa1))
        object.__setattr__(self, "kappa2", float(self.kappa2))
        object.__setattr__(self, "kappa_phi", float(self.kappa_phi))
        object.__setattr__(self, "lambda1", complex(self.lambda1))
        object.__setattr__(self, "lambda2", complex(self.lambda2))
        object.__setattr__(self, "lambda3", complex(self.lambda3))
        if self.alpha0_sq is not None:
            object.__setattr__(self, "alpha0_sq", complex(self.alpha0_sq))
            if self.lambda2 != 0:
                raise ValidationError(
                    "lambda2 and alpha0_sq are two representations of the same drive; "
                    "set only one of them"
                )
            if self.kappa2 == 0:
                raise ValidationError("alpha0_sq requires kappa2 > 0")
        if not self.unit:
            object.__setattr__(self, "unit", "kappa2" if self.kappa2 > 0 else "kappa1")

    # -- representation round-trip ------------------------------------------

    def effective_lambda2(self) -> complex:
        """Two-photon drive amplitude including the alpha0_sq contribution."""
        if self.alpha0_sq is None:
            return self.lambda2
        return 1j * self.kappa2 * self.alpha0_sq / 2

    def as_lambda2_form(self) -> "SystemParams":
        """Equivalent parameter set with the plain-drive representation."""
        if self.alpha0_sq is None:
            return self
        return replace(self, lambda2=self.effective_lambda2(), alpha0_sq=None)

    def as_alpha0_form(self) -> "SystemParams":
        """Equivalent parameter set with the displaced-dissipator representation."""
        if self.alpha0_sq is not None:
            return self
        if self.kappa2 <= 0:
            raise ValidationError("alpha0_sq representation requires kappa2 > 0")
        a0sq = -2j * self.lambda2 / self.kappa2
        return replace(self, lambda2=0j, alpha0_sq=a0sq)

    def is_htrs(self) -> bool:
        """True when the set lies in the hidden-TRS family (no dephasing)."""
        return self.kappa_phi == 0.0

    def require_htrs(self, operation: str):
        if not self.is_htrs():
            raise ValidationError(
                f"{operation} assumes the hidden time-reversal-symmetric family "
                f"and rejects kappa_phi > 0 (got kappa_phi={self.kappa_phi})"
            )

    def hash(self, n_fock: int | None = None) -> str:
        """Provenance token over all parameters (and optionally the truncation)."""
        fields = (
            self.delta, self.kerr, self.kappa1, self.kappa2,
            self.lambda1, self.lambda2, self.lambda3, self.kappa_phi,
            self.alpha0_sq, self.unit, n_fock,
        )
        return hashlib.sha256(repr(fields).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class DerivedCoeffs:
    """Linear and cubic mean-field coefficients K1 = delta - i*kappa1/2, K2 = kerr + i*kappa2."""

    k1: complex
    k2: complex


def derive_coeffs(params: SystemParams, require_k2: bool = False) -> DerivedCoeffs:
    """Derived coefficients of the mean-field equation.

    Set ``require_k2`` when the caller intends to evaluate the potential
    (which divides by K2); kerr = kappa2 = 0 is then rejected.
    """
    k1 = complex(params.delta, -params.kappa1 / 2)
    k2 = complex(params.kerr, params.kappa2)
    if require_k2 and k2 == 0:
        raise ValidationError("potential-function operations need K2 = kerr + i*kappa2 != 0")
    return DerivedCoeffs(k1=k1, k2=k2)


# -- presets -----------------------------------------------------------------


def kerr_oscillator(kappa1: float = 1.0, lambda1_phase: float = 0.0,
                    detuning_ratio: float = 6.33) -> SystemParams:
    """Driven dissipative Kerr oscillator regime of the bistability study.

    Ratios: K/kappa1 = 0.1, 2*delta/kappa1 = detuning_ratio (default 6.33),
    2*|lambda1|/kappa1 = 10; kappa2 = lambda2 = lambda3 = 0.  The drive-ratio
    convention reads the published "2|Lambda1| kappa1 = 10" as 2|Lambda1|/kappa1
    (the dimensionally consistent choice); see README.
    """
    if kappa1 <= 0:
        raise ValidationError("kerr_oscillator preset needs kappa1 > 0")
    return SystemParams(
        delta=detuning_ratio / 2 * kappa1,
        kerr=0.1 * kappa1,
        kappa1=kappa1,
        lambda1=complex_from_polar(5.0 * kappa1, lambda1_phase),
        unit="kappa1",
    )


def dissipative_cat(alpha0: float | None = None, alpha0_sq: complex | None = None,
                    kappa2: float = 1.0, kappa1_ratio: float = 0.01,
                    delta: float = 0.0, kerr: float = 0.0,
                    lambda3: complex = 0j) -> SystemParams:
    """Two-photon-stabilized cat with an optional single imperfection.

    Exactly one of ``alpha0`` / ``alpha0_sq`` fixes the dissipator
    displacement; at most one of {delta, kerr, lambda3} may be nonzero.
    """
    if (alpha0 is None) == (alpha0_sq is None):
        raise ValidationError("give exactly one of alpha0 / alpha0_sq")
    if alpha0 is not None:
        alpha0_sq = complex(alpha0) ** 2
    n_imperfections = sum(1 for v in (delta, kerr, complex(lambda3)) if v != 0)
    if n_imperfections > 1:
        raise ValidationError("dissipative_cat takes at most one imperfection among "
                              "{delta, kerr, lambda3}")
    return SystemParams(
        delta=delta, kerr=kerr,
        kappa1=kappa1_ratio * kappa2, kappa2=kappa2,
        lambda3=lambda3, alpha0_sq=alpha0_sq, unit="kappa2",
    )


def dephased_cat(alpha0_sq: complex, kappa_phi: float, kappa2: float = 1.0,
                 kappa1_ratio: float = 0.01) -> SystemParams:
    """Two-photon-stabilized cat with a dephasing imperfection."""
    return SystemParams(
        kappa1=kappa1_ratio * kappa2, kappa2=kappa2,
        kappa_phi=kappa_phi, alpha0_sq=alpha0_sq, unit="kappa2",
    )


def preset(name: str, **kwargs) -> SystemParams:
    """Named preset dispatch; raises on unknown names."""
    try:
        fn = {"kerr_oscillator": kerr_oscillator,
              "dissipative_cat": dissipative_cat,
              "dephased_cat": dephased_cat}[name]
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose from {PRESET_NAMES}") from None
    return fn(**kwargs)


# -- config file I/O -----------------------------------------------------------

def params_to_dict(params: SystemParams) -> dict:
    """Flat key-value form using the documented exact keys."""
    out = {k: getattr(params, k) for k in _REAL_KEYS}
    for k in _COMPLEX_KEYS:
        v = getattr(params, k)
        if v is None:
            continue
        out[f"{k}_re"] = v.real
        out[f"{k}_im"] = v.imag
    out["unit"] = params.unit
    return out


def params_from_dict(values: dict, base: SystemParams | None = None) -> SystemParams:
    """Build parameters from flat keys, optionally overriding a base set."""
    kw = {}
    if base is not None:
        kw = {k: getattr(base, k) for k in _REAL_KEYS}
        kw.update({k: getattr(base, k) for k in _COMPLEX_KEYS if getattr(base, k) is not None})
        kw["unit"] = base.unit
    known = set(_REAL_KEYS) | {"unit"} | {f"{k}_{p}" for k in _COMPLEX_KEYS for p in ("re", "im")}
    unknown = set(values) - known
    if unknown:
        raise ValidationError(f"unknown parameter keys: {sorted(unknown)}")
    for k in _REAL_KEYS:
        if k in values:
            kw[k] = float(values[k])
    if "unit" in values:
        kw["unit"] = str(values["unit"])
    for k in _COMPLEX_KEYS:
        re_k, im_k = f"{k}_re", f"{k}_im"
        if re_k in values or im_k in values:
            old = kw.get(k) or 0j
            kw[k] = complex(float(values.get(re_k, old.real)), float(values.get(im_k, old.imag)))
    if kw.get("alpha0_sq") == 0j and "alpha0_sq_re" not in values and "alpha0_sq_im" not in values:
        kw.pop("alpha0_sq")
    return SystemParams(**kw)


def load_config(path, section: str | None = None) -> SystemParams:
    """Read parameters from a key-value config file.

    Each section is either ``[params]`` (standalone values) or a preset name,
    in which case the keys override that preset.  With several sections
    present, ``section`` selects one.
    """
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh)
    sections = cp.sections()
    if not sections:
        raise ValidationError(f"no sections in config file {path}")
    if section is None:
        if len(sections) > 1:
            raise ValidationError(f"config has several sections {sections}; pick one")
        section = sections[0]
    if section not in sections:
        raise ValidationError(f"section {section!r} not in config (has {sections})")
    values = dict(cp[section])
    base = None
    if section in PRESET_NAMES:
        preset_args = {}
        if section == "dissipative_cat" or section == "dephased_cat":
            # preset construction needs the displacement up front
            a0re = float(values.pop("alpha0_sq_re", 4.0))
            a0im = float(values.pop("alpha0_sq_im", 0.0))
            if section == "dissipative_cat":
                base = dissipative_cat(alpha0_sq=complex(a0re, a0im))
            else:
                kphi = float(values.pop("kappa_phi", 0.0))
                base = dephased_cat(alpha0_sq=complex(a0re, a0im), kappa_phi=kphi)
        else:
            base = kerr_oscillator(**preset_args)
    return params_from_dict(values, base=base)


def warn_if(condition: bool, message: str):
    if condition:
        warnings.warn(message, stacklevel=3)
