"""Turn a validated RunConfig into the model objects the commands work with."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from services.covers import CoverSequence, make_cover_sequence
from services.dynamics import SmaleSpaceModel
from services.fredholm import IsometryFamily
from services.groupoid import BasisWindow, Bisection, Orientation, bisection_pairs, build_window
from services.homoclinic import HomoclinicSource, make_source
from services.sampling import SampleBuilder
from services.sft import make_sft
from services.torus import make_torus
from utils.config import RunConfig, SftModelConfig

logger = logging.getLogger(__name__)


def build_source(config: RunConfig) -> HomoclinicSource:
    settings = config.model
    if isinstance(settings, SftModelConfig):
        backend = make_sft(settings.adjacency, metric_base=settings.metric_base)
        P = backend.periodic_orbit(settings.p_word)
        Q = backend.periodic_orbit(settings.q_word)
    else:
        backend = make_torus(settings.matrix)
        P = tuple(sorted(backend.make_point(x, y) for x, y in settings.p_rationals()))
        Q = backend.rational_orbit(settings.q_rational())
    return make_source(SmaleSpaceModel.from_backend(backend), P, Q)


@dataclass
class Lab:
    """Everything a run needs, built lazily from one config."""

    config: RunConfig
    source: HomoclinicSource

    @property
    def model(self) -> SmaleSpaceModel:
        return self.source.model

    @property
    def kind(self) -> str:
        return self.model.backend.kind

    @cached_property
    def covers(self) -> CoverSequence:
        return make_cover_sequence(self.model, self.config.delta_exact())

    @cached_property
    def seed_points(self) -> list:
        caps = self.config.caps
        size = max(1, caps.window // (2 * caps.window_depth + 1))
        points = []
        for x in self.source.global_order(caps.homoclinic):
            points.append(x)
            if len(points) == size:
                break
        return points

    def bisections(self, orientation: Orientation) -> list[Bisection]:
        count = self.config.suite("rank-one").pairs
        return bisection_pairs(self.model, self.seed_points, orientation, count)

    @cached_property
    def stable(self) -> list[Bisection]:
        return self.bisections(Orientation.STABLE)

    @cached_property
    def unstable(self) -> list[Bisection]:
        return self.bisections(Orientation.UNSTABLE)

    @cached_property
    def window(self) -> BasisWindow:
        caps = self.config.caps
        registered = self.stable[:1] + self.unstable[:1]
        return build_window(
            self.model, self.seed_points, cap=caps.window, depth=caps.window_depth, bisections=registered
        )

    def new_sampler(self, reserve_window: bool = True) -> SampleBuilder:
        caps = self.config.caps
        return SampleBuilder(
            self.covers,
            self.source,
            horizon=caps.orbit_horizon,
            effort=caps.cell_extension,
            reserved=self.window.points if reserve_window else (),
        )

    @cached_property
    def sampler(self) -> SampleBuilder:
        return self.new_sampler()

    @cached_property
    def family(self) -> IsometryFamily:
        return IsometryFamily(self.covers, self.sampler, slowdown=self.config.slowdown)

    def domain(self, limit: Optional[int] = None) -> list:
        points = list(self.window.points)
        return points if limit is None else points[:limit]


def build_lab(config: RunConfig) -> Lab:
    lab = Lab(config, build_source(config))
    logger.info("lab ready: %s backend, seed %d", lab.kind, config.seed)
    return lab


__all__ = ["Lab", "build_lab", "build_source"]
