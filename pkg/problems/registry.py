from typing import Callable, Dict

from . import ProblemDef
from .advection import advection_reaction
from .beam import poisson_beam
from .heat import disk_heat
from .laplace import laplace_mixed

PROBLEMS: Dict[str, Callable[..., ProblemDef]] = {
    'advection': advection_reaction,
    'laplace': laplace_mixed,
    'heat': disk_heat,
    'beam': poisson_beam,
}


def get_problem(name: str, **kwargs) -> ProblemDef:
    try:
        constructor = PROBLEMS[name]
    except KeyError:
        raise ValueError(f'unknown problem {name!r}; choose among {sorted(PROBLEMS)}') from None
    return constructor(**kwargs)
