from dataclasses import dataclass
from typing import Sequence, Tuple

PROVENANCES = ('unit', 'appendix_A')

# (representative coefficient magnitude c*, spatial order, temporal order)
Coefficient = Tuple[float, int, int]


@dataclass(frozen=True)
class ScaleSet:
    s_omega: float = 1.0
    s_d: float = 1.0
    s_n: float = 1.0
    provenance: str = 'unit'

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f'provenance must be one of {PROVENANCES}, got {self.provenance!r}')
        if min(self.s_omega, self.s_d, self.s_n) <= 0:
            raise ValueError(f'scale factors must be positive, got {self}')
        if self.provenance == 'unit' and (self.s_omega, self.s_d, self.s_n) != (1.0, 1.0, 1.0):
            raise ValueError('unit provenance requires all scale factors to be 1')


UNIT_SCALES = ScaleSet()


def compute_scales(l_ref: float,
                   t_ref: float,
                   u_ref: float,
                   k_star: float,
                   coefficients: Sequence[Coefficient]) -> ScaleSet:
    """Residual scale factors from reference length, time and field magnitudes.

    s_omega = u_ref * sum(c * l_ref**-ax * t_ref**-at), s_d = u_ref and
    s_n = k_star * u_ref / l_ref, where k_star is a representative magnitude
    of the principal-part coefficients.
    """
    for name, value in (('l_ref', l_ref), ('t_ref', t_ref), ('u_ref', u_ref), ('k_star', k_star)):
        if value <= 0:
            raise ValueError(f'{name} must be positive, got {value}')
    if not coefficients:
        raise ValueError('at least one principal-part coefficient is needed')

    s_omega = u_ref * sum(abs(c) * l_ref ** (-ax) * t_ref ** (-at) for c, ax, at in coefficients)
    return ScaleSet(s_omega=s_omega,
                    s_d=u_ref,
                    s_n=k_star * u_ref / l_ref,
                    provenance='appendix_A')
