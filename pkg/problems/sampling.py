import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import torch
from torch import Tensor

REGIONS = ('rectangle', 'segment', 'disk', 'circle')


@dataclass(frozen=True)
class Sampler:
    """Seeded i.i.d. uniform sampler over a region.

    rectangle: `lo`/`hi` corners; segment: `lo`/`hi` are the end points;
    disk/circle: `radius` around `center`. `stream` separates the random
    streams of several samplers that share one run seed.
    """
    region: str
    count: int
    seed: int = 0
    stream: int = 0
    lo: Optional[Tuple[float, ...]] = None
    hi: Optional[Tuple[float, ...]] = None
    radius: float = 1.0
    center: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.region not in REGIONS:
            raise ValueError(f'region must be one of {REGIONS}, got {self.region!r}')
        if self.count < 1:
            raise ValueError(f'sample count must be positive, got {self.count}')
        if self.region in ('rectangle', 'segment') and (self.lo is None or self.hi is None):
            raise ValueError(f'{self.region} sampler needs lo and hi')
        if self.region in ('disk', 'circle') and self.radius <= 0:
            raise ValueError(f'radius must be positive, got {self.radius}')


@dataclass
class SampleSet:
    points: Tensor
    normals: Optional[Tensor] = None


def sample(sampler: Sampler) -> SampleSet:
    rng = np.random.default_rng([sampler.seed, sampler.stream])
    n = sampler.count
    normals = None

    if sampler.region == 'rectangle':
        lo, hi = np.asarray(sampler.lo, dtype=np.float64), np.asarray(sampler.hi, dtype=np.float64)
        points = lo + (hi - lo) * rng.random((n, lo.size))
    elif sampler.region == 'segment':
        start, end = np.asarray(sampler.lo, dtype=np.float64), np.asarray(sampler.hi, dtype=np.float64)
        s = rng.random((n, 1))
        points = start + s * (end - start)
        # keep the fixed coordinate exact rather than start + s * 0
        fixed = start == end
        points[:, fixed] = start[fixed]
    elif sampler.region == 'disk':
        u = rng.random((2, n))
        # area-uniform: radius follows sqrt of a uniform draw
        r = sampler.radius * np.sqrt(u[0])
        angle = 2.0 * math.pi * u[1]
        points = np.stack([r * np.cos(angle), r * np.sin(angle)], axis=1) + np.asarray(sampler.center)
    else:
        angle = 2.0 * math.pi * rng.random(n)
        unit = np.stack([np.cos(angle), np.sin(angle)], axis=1)
        points = sampler.radius * unit + np.asarray(sampler.center)
        normals = torch.from_numpy(unit)

    return SampleSet(points=torch.from_numpy(np.ascontiguousarray(points)), normals=normals)
