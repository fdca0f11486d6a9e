"""
Run configuration files.

A run file is TOML with the sections ``[code]``, ``[decoder]``,
``[channel]``, ``[sweep]`` and ``[output]``.  An optional ``[[series]]``
array describes several code/decoder combinations sharing one sweep; each
entry's ``code``, ``decoder`` and ``channel`` tables are merged over the
top-level ones.  Command-line flags are applied on top of the file.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import tomli

from .codes import CodeSpec
from .grand import Abandonment
from .sim import SimPointConfig

SECTIONS = ("code", "decoder", "channel", "sweep", "output", "series")
DECODER_KEYS = {"name", "max_weight", "max_queries"}
CHANNEL_KEYS = {"kind"}
SWEEP_KEYS = {"ebno_db", "p", "seed", "min_block_errors", "max_trials", "workers", "zero_message"}
OUTPUT_KEYS = {"csv", "meta"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Fully resolved run description."""

    code: dict = field(default_factory=dict)
    decoder: dict = field(default_factory=lambda: {"name": "grand_sos"})
    channel: dict = field(default_factory=lambda: {"kind": "bsc"})
    sweep: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    series: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, raw: dict) -> RunConfig:
        unknown = set(raw) - set(SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        cfg = cls()
        for name in ("code", "decoder", "channel", "sweep", "output"):
            if name in raw:
                getattr(cfg, name).update(copy.deepcopy(raw[name]))
        cfg.series = copy.deepcopy(raw.get("series", []))
        cfg._check_keys()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        try:
            with open(path, "rb") as fh:
                raw = tomli.load(fh)
        except (OSError, tomli.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)

    def _check_keys(self) -> None:
        for name, allowed in (("decoder", DECODER_KEYS), ("channel", CHANNEL_KEYS),
                              ("sweep", SWEEP_KEYS), ("output", OUTPUT_KEYS)):
            extra = set(getattr(self, name)) - allowed
            if extra:
                raise ConfigError(f"unknown [{name}] keys: {sorted(extra)}")
        for s in self.series:
            extra = set(s) - {"name", "code", "decoder", "channel"}
            if extra:
                raise ConfigError(f"unknown [[series]] keys: {sorted(extra)}")

    def override(self, section: str, **values: Any) -> None:
        getattr(self, section).update({k: v for k, v in values.items() if v is not None})

    def to_dict(self) -> dict:
        d = {s: copy.deepcopy(getattr(self, s)) for s in ("code", "decoder", "channel", "sweep", "output")}
        if self.series:
            d["series"] = copy.deepcopy(self.series)
        return d

    def combos(self) -> list[tuple[str, dict, dict, dict]]:
        if not self.series:
            return [("", self.code, self.decoder, self.channel)]
        out = []
        for s in self.series:
            out.append((
                s.get("name", ""),
                {**self.code, **s.get("code", {})},
                {**self.decoder, **s.get("decoder", {})},
                {**self.channel, **s.get("channel", {})},
            ))
        return out

    def points(self) -> list[SimPointConfig]:
        """Expand into simulation points, series-major, in sweep order."""
        sw = self.sweep
        ebnos = _as_list(sw.get("ebno_db"))
        ps = _as_list(sw.get("p"))
        if ebnos and ps:
            raise ConfigError("[sweep] takes either ebno_db or p, not both")
        if not ebnos and not ps:
            raise ConfigError("[sweep] needs ebno_db or p")
        pts = []
        for _, code_d, dec_d, ch_d in self.combos():
            spec = code_spec(code_d)
            dec = dec_d.get("name", "grand_sos")
            ab = abandonment(dec_d, spec)
            kind = ch_d.get("kind", "bsc")
            for v in ebnos or ps:
                pt = SimPointConfig(
                    code=spec,
                    decoder=dec,
                    abandonment=ab,
                    channel=kind,
                    ebno_db=float(v) if ebnos else None,
                    p=float(v) if ps else None,
                    master_seed=int(sw.get("seed", 0)),
                    min_block_errors=int(sw.get("min_block_errors", 100)),
                    max_trials=int(float(sw.get("max_trials", 10**8))),
                    zero_message=bool(sw.get("zero_message", False)),
                )
                try:
                    pt.validate()
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc
                pts.append(pt)
        return pts


def _as_list(v) -> list:
    if v is None:
        return []
    return list(v) if isinstance(v, (list, tuple)) else [v]


def code_spec(d: dict) -> CodeSpec:
    try:
        return CodeSpec.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid [code]: {exc}") from exc


def abandonment(dec: dict, spec: CodeSpec) -> Abandonment:
    extra = set(dec) - DECODER_KEYS
    if extra:
        raise ConfigError(f"unknown [decoder] keys: {sorted(extra)}")
    mw = dec.get("max_weight")
    if mw == "t":
        if spec.family != "bch":
            raise ConfigError("max_weight = \"t\" is only defined for BCH codes; give a number")
        mw = spec.t
    mq = dec.get("max_queries")
    try:
        return Abandonment(
            max_weight=None if mw is None else int(mw),
            max_queries=None if mq is None else int(float(mq)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
