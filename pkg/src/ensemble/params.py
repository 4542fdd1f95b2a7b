"""
Ensemble Parameters
===================

``EnsembleParams`` is the generative description of one spatially "Mt. Fuji"
coupled LDPC ensemble: variable degree d_v, check degree d_c, half chain
length L, growth factor alpha and base section size M.

alpha is held as an exact ``fractions.Fraction``. Decimal strings ("1.1"),
ratio strings ("11/10"), ints and floats are all accepted and converted
exactly (floats through their shortest repr, so 1.1 becomes 11/10 and not
the binary double closest to it).
"""

import math
from fractions import Fraction
from typing import Any, Dict, Literal, Mapping

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from ..utils.exceptions import ValidationError

# Sizing conventions for ceil(alpha^(L-|i|) M).
Sizing = Literal["exact", "float64"]


def parse_alpha(value: Any) -> Fraction:
    """Convert a config value to an exact rational growth factor."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("alpha must be a number, not a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("alpha must be finite")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot interpret {type(value).__name__} as a rational number")


class EnsembleParams(BaseModel):
    """
    Parameters (d_v, d_c, L, alpha, M) of one SFC-LDPC ensemble.

    Attributes:
        d_v: Variable node degree (config key ``dv``)
        d_c: Check node degree (config key ``dc``)
        L: Half chain length; variable positions are [-L, L]
        alpha: Exact growth factor >= 1
        M: Base section size
        sizing: 'exact' evaluates ceil(alpha^(L-|i|) M) rationally,
            'float64' evaluates the product in double precision first
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True,
                              arbitrary_types_allowed=True, extra="forbid")

    d_v: int = Field(alias="dv")
    d_c: int = Field(alias="dc")
    L: int
    alpha: Fraction
    M: int
    sizing: Sizing = "exact"

    @field_validator("alpha", mode="before")
    @classmethod
    def _exact_alpha(cls, value: Any) -> Fraction:
        return parse_alpha(value)

    @model_validator(mode="after")
    def _check_invariants(self) -> "EnsembleParams":
        if self.d_v < 2:
            raise ValueError(f"d_v must be >= 2, got {self.d_v}")
        if self.d_c < self.d_v:
            raise ValueError(f"d_c must be >= d_v, got d_c={self.d_c}, d_v={self.d_v}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        return self

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "EnsembleParams":
        """
        Build parameters from a config mapping, reporting problems as
        ``ValidationError`` instead of pydantic's own exception type.
        """
        try:
            return cls.model_validate(dict(data))
        except PydanticValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first.get("loc", ())) or None
            raise ValidationError(first.get("msg", str(e)), field=field,
                                  value=first.get("input"), original_error=e) from e

    # ------------------------------------------------------------------
    # Positions
    # ------------------------------------------------------------------

    @property
    def variable_positions(self) -> range:
        """Positions [-L, L] holding real variable nodes."""
        return range(-self.L, self.L + 1)

    @property
    def check_positions(self) -> range:
        """Positions [-L, L+d_v-1] holding check nodes."""
        return range(-self.L, self.L + self.d_v)

    @property
    def dummy_positions(self) -> list:
        """Positions [-L-d_v+1, -L-1] and [L+1, L+d_v-1] holding dummies."""
        left = list(range(-self.L - self.d_v + 1, -self.L))
        right = list(range(self.L + 1, self.L + self.d_v))
        return left + right

    @property
    def num_check_positions(self) -> int:
        return 2 * self.L + self.d_v

    def position_index(self, u: int) -> int:
        """Zero-based array index of check/variable position ``u``."""
        return u + self.L

    def is_interior(self, i: int) -> bool:
        """Whether check position ``i`` sees no dummy node at all."""
        return -self.L + self.d_v - 1 <= i <= self.L

    # ------------------------------------------------------------------
    # Convenience
    # ------------------------------------------------------------------

    @property
    def alpha_float(self) -> float:
        return float(self.alpha)

    def weight(self, k: int) -> float:
        """alpha^(L-|k|) as a float; the analytic section mass at position k."""
        return self.alpha_float ** (self.L - abs(k))

    def with_updates(self, **changes: Any) -> "EnsembleParams":
        """Return a copy with some fields replaced (validated again)."""
        data: Dict[str, Any] = self.model_dump()
        data.update(changes)
        return EnsembleParams.model_validate(data)

    def label(self) -> str:
        """Short label in the (d_v, d_c, L, alpha) notation."""
        return f"({self.d_v},{self.d_c},{self.L},{float(self.alpha):g})"

    def to_config(self) -> Dict[str, Any]:
        """Plain mapping suitable for YAML/JSON dumps."""
        return {
            "dv": self.d_v,
            "dc": self.d_c,
            "L": self.L,
            "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
            "M": self.M,
            "sizing": self.sizing,
        }

    def __str__(self) -> str:
        return f"EnsembleParams{self.label()} M={self.M} sizing={self.sizing}"
