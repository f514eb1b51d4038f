"""Gaussian-niche community generator.

Each species responds to two environmental gradients through bell-shaped
response curves. Per site, the two noisy response factors are floored at
zero and multiplied, the products are normalised across species, and the
result is scaled to a fixed carrying capacity and rounded up to integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, ValidationError
from .rng import ROLE_NICHE, ROLE_SITE, stream
from .tables import CommunityTable, PredictorBlock

# Bound on per-site noise redraws when every species lands at zero.
_MAX_SITE_REDRAWS = 100


@dataclass(frozen=True)
class SpeciesNiche:
    """Optimum of one species' response surface on the two gradients."""

    x_opt: float
    y_opt: float

    def __post_init__(self):
        if not (math.isfinite(self.x_opt) and math.isfinite(self.y_opt)):
            raise ValidationError("niche optima must be finite")


@dataclass(frozen=True)
class SiteEnvironment:
    """Position of one site on the two gradients."""

    x: float
    y: float


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete parameterisation of one synthetic scenario.

    ``seed`` is mandatory: every draw in the pipeline is keyed off it, so a
    config fully determines its datasets.

    The default community has two species with distinct mid-range optima on
    the first gradient (0.25 and 0.75) and a separation of 0.5 on the
    second. Distinct first-gradient optima matter: with identical ones the
    per-site normalisation cancels the first gradient out of the table
    entirely, the second gradient's contribution saturates near 1, and the
    sweep studies lose their dynamic range.
    """

    seed: int
    n_sites: int = 100
    niches: tuple[SpeciesNiche, ...] = (
        SpeciesNiche(0.25, 0.0),
        SpeciesNiche(0.75, 0.5),
    )
    sigma_niche: float = 0.5
    sigma_noise: float = 0.01
    y_max: float = 1.0
    carrying_capacity: int = 10_000
    replicates: int = 200

    def __post_init__(self):
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        if self.n_sites < 3:
            raise ValidationError("need at least 3 sites")
        niches = tuple(self.niches)
        if len(niches) < 2:
            raise ValidationError("need at least 2 species")
        object.__setattr__(self, "niches", niches)
        if not (math.isfinite(self.sigma_niche) and self.sigma_niche > 0):
            raise ValidationError("sigma_niche must be positive")
        if not (math.isfinite(self.sigma_noise) and self.sigma_noise >= 0):
            raise ValidationError("sigma_noise must be non-negative")
        if not (0.0 < self.y_max <= 1.0):
            raise ValidationError("y_max must lie in (0, 1]")
        if self.carrying_capacity < 1:
            raise ValidationError("carrying_capacity must be at least 1")
        if self.replicates < 1:
            raise ValidationError("replicates must be at least 1")

    @property
    def n_species(self) -> int:
        return len(self.niches)


def gaussian_response(value: float, optimum: float, sigma: float) -> float:
    """Normal density with mean ``optimum`` and standard deviation ``sigma``."""
    if not (math.isfinite(sigma) and sigma > 0):
        raise ValidationError("sigma must be positive")
    z = (value - optimum) / sigma
    return math.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))


def relative_abundance(site: SiteEnvironment, niche: SpeciesNiche,
                       sigma_niche: float, sigma_noise: float,
                       rng: np.random.Generator) -> float:
    """Noisy product response of one species at one site.

    Gaussian noise is added to each gradient's response factor separately;
    each factor is floored at zero before the two are multiplied, so the
    result is never negative. With ``sigma_noise`` 0 no random numbers are
    consumed and the value is the exact product of the two densities.
    """
    fx = gaussian_response(site.x, niche.x_opt, sigma_niche)
    fy = gaussian_response(site.y, niche.y_opt, sigma_niche)
    if sigma_noise > 0.0:
        fx += rng.normal(0.0, sigma_noise)
        fy += rng.normal(0.0, sigma_noise)
    return max(fx, 0.0) * max(fy, 0.0)


def site_abundances(alphas, carrying_capacity: int) -> list[int]:
    """Integer abundances: each share of the total, scaled and rounded up.

    Zero shares stay exactly zero; every positive share yields at least one
    individual. The row total therefore lands in
    ``[carrying_capacity, carrying_capacity + n_species)``.
    """
    values = [float(a) for a in alphas]
    if any(not math.isfinite(v) or v < 0.0 for v in values):
        raise ValidationError("relative abundances must be finite and non-negative")
    total = math.fsum(values)
    if total <= 0.0:
        raise DegenerateDataError("all species have zero relative abundance")
    return [math.ceil(v / total * carrying_capacity) if v > 0.0 else 0
            for v in values]


def _site_row(config: ScenarioConfig, rng: np.random.Generator,
              site_index: int) -> tuple[SiteEnvironment, list[int]]:
    x = rng.uniform(0.0, 1.0)
    y = rng.uniform(0.0, config.y_max)
    site = SiteEnvironment(x, y)
    for _ in range(_MAX_SITE_REDRAWS):
        alphas = [relative_abundance(site, niche, config.sigma_niche,
                                     config.sigma_noise, rng)
                  for niche in config.niches]
        if math.fsum(alphas) > 0.0:
            return site, site_abundances(alphas, config.carrying_capacity)
        if config.sigma_noise == 0.0:
            break  # redraws cannot change a noise-free zero
    raise DegenerateDataError(
        f"site {site_index}: every species response stayed zero "
        f"(noise redraw budget of {_MAX_SITE_REDRAWS} exhausted)")


def generate_dataset(config: ScenarioConfig,
                     replicate: int = 0) -> tuple[CommunityTable, PredictorBlock]:
    """One community table plus its two-column environmental block.

    Each site draws from its own random stream keyed by
    ``(config.seed, replicate, site)``, so the same pair always produces the
    same dataset no matter what else has been generated.
    """
    if replicate < 0:
        raise ValidationError("replicate index must be non-negative")
    n = config.n_sites
    counts = np.zeros((n, config.n_species))
    env = np.zeros((n, 2))
    for i in range(n):
        rng = stream(config.seed, ROLE_SITE, replicate, i)
        site, row = _site_row(config, rng, i)
        counts[i] = row
        env[i, 0] = site.x
        env[i, 1] = site.y
    site_ids = tuple(f"site{i + 1}" for i in range(n))
    species_ids = tuple(f"sp{j + 1}" for j in range(config.n_species))
    table = CommunityTable(site_ids, species_ids, counts)
    block = PredictorBlock("env", site_ids, env)
    return table, block


def generate_complex_dataset(n_sites: int, n_species: int = 5,
                             sigma_noise: float = 0.0, seed: int = 0,
                             replicate: int = 0,
                             sigma_niche: float = 0.5
                             ) -> tuple[CommunityTable, PredictorBlock]:
    """Dataset whose niche optima are drawn uniformly on the unit square.

    The optima depend on ``seed`` only, not on ``replicate``, so repeated
    replicates probe the same underlying community.
    """
    if n_sites < 5:
        raise ValidationError("need at least 5 sites")
    if n_species < 2:
        raise ValidationError("need at least 2 species")
    rng = stream(seed, ROLE_NICHE)
    niches = tuple(
        SpeciesNiche(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0))
        for _ in range(n_species))
    config = ScenarioConfig(
        seed=seed, n_sites=n_sites, niches=niches, sigma_niche=sigma_niche,
        sigma_noise=sigma_noise, y_max=1.0)
    return generate_dataset(config, replicate=replicate)
