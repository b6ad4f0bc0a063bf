"""Attracting laminations of free group automorphisms.

Each analysis takes the text of an automorphism file (the format the
``lamina`` command reads) and returns a ``Result``.
"""

import json
from dataclasses import dataclass

from . import _lamina
from ._lamina import InputError, LaminaError, NotPreserved, ParseError

__all__ = [
    "Result",
    "analyze",
    "poset",
    "torus",
    "pair",
    "restrict",
    "default_config",
    "LaminaError",
    "InputError",
    "ParseError",
    "NotPreserved",
]


@dataclass(frozen=True)
class Result:
    report: dict
    dot: str
    exit_code: int  # 0 ok, 2 undetermined

    @property
    def undetermined(self) -> bool:
        return self.exit_code == 2


def _config(config):
    return "" if config is None else json.dumps(config)


def _wrap(raw):
    report, dot, code = raw
    return Result(json.loads(report), dot, code)


def analyze(text: str, config: dict | None = None) -> Result:
    return _wrap(_lamina.analyze(text, _config(config)))


def poset(text: str, config: dict | None = None) -> Result:
    return _wrap(_lamina.poset(text, _config(config)))


def torus(text: str, config: dict | None = None) -> Result:
    return _wrap(_lamina.torus(text, _config(config)))


def pair(text: str, config: dict | None = None) -> Result:
    return _wrap(_lamina.pair(text, _config(config)))


def restrict(text: str, cover: str, config: dict | None = None, max_power: int = 12) -> Result:
    return _wrap(_lamina.restrict(text, cover, _config(config), max_power))


def default_config() -> dict:
    return json.loads(_lamina.default_config())
