"""Shared result types and exceptions.

Exit codes are part of the CLI contract: config/schema problems exit with 2,
pricing failures with 3, out-of-domain evaluation with 4.
"""
from __future__ import annotations

from dataclasses import dataclass


class ChebpopError(Exception):
    """Base class for package errors."""

    exit_code = 1


class ConfigError(ChebpopError):
    """Malformed or inconsistent configuration input."""

    exit_code = 2


class PricingError(ChebpopError):
    """A reference pricer failed to produce a value within its budget."""

    exit_code = 3


class DomainError(ChebpopError):
    """A point lies outside the domain it is evaluated on."""

    exit_code = 4


@dataclass(frozen=True)
class PriceResult:
    """Price plus optional accuracy metadata.

    conf_half_width is the 95% confidence half-width for Monte-Carlo prices,
    None for deterministic pricers. n_evals counts integrand, path, or grid
    evaluations where the pricer tracks them. meta records solver choices
    that are not part of the inputs (grids, domains, scheme names).
    """

    price: float
    conf_half_width: float | None = None
    n_evals: int | None = None
    meta: dict | None = None
