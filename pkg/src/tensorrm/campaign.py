"""Simulation campaigns: a grid of (profile, decoder, noise point) runs."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Union

from . import __version__
from .channel import RM_DECODERS, TRM_DECODERS, NoiseSpec, run_trials
from .rm import RmCode
from .trm import DecodeConfig, TrmCode

CSV_FIELDS = [
    "profile", "decoder", "noise", "trials", "block_errors",
    "error_rate", "ci_low", "ci_high", "base_seed", "artifact_version",
]


def parse_code(profile: str) -> Union[RmCode, TrmCode]:
    """A one-layer profile is a plain RM code; longer ones are tensor codes."""
    code = TrmCode.parse(profile)
    return code.layers[0] if code.t == 1 else code


@dataclass
class CampaignConfig:
    profiles: List[str]
    decoders: List[str]
    noise_kind: str
    grid: List[float]
    trials: int
    base_seed: int = 0
    output: Optional[str] = None
    csv: Optional[str] = None
    placement: str = "uniform"
    inner_decoder: str = "highrate"
    counter_threshold: Optional[int] = None
    record_timings: bool = False

    @classmethod
    def from_dict(cls, raw: dict) -> "CampaignConfig":
        profiles = raw.get("profiles") or ([raw["profile"]] if "profile" in raw else [])
        decoders = raw.get("decoders") or ([raw["decoder"]] if "decoder" in raw else [])
        noise = raw.get("noise", {})
        kind = noise.get("kind", "bsc")
        grid = noise.get("weights" if kind == "adversarial" else "grid", noise.get("grid", []))
        cfg = cls(
            profiles=[str(p) for p in profiles],
            decoders=[str(d) for d in decoders],
            noise_kind=kind,
            grid=list(grid),
            trials=int(raw.get("trials", 0)),
            base_seed=int(raw.get("base_seed", 0)),
            output=raw.get("output"),
            csv=raw.get("csv"),
            placement=noise.get("placement", "uniform"),
            inner_decoder=raw.get("inner_decoder", "highrate"),
            counter_threshold=raw.get("counter_threshold"),
            record_timings=bool(raw.get("record_timings", False)),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CampaignConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def validate(self) -> None:
        if not self.profiles:
            raise ValueError("config needs at least one profile")
        if not self.decoders:
            raise ValueError("config needs at least one decoder")
        if not self.grid:
            raise ValueError("noise grid must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for profile in self.profiles:
            code = parse_code(profile)
            allowed = RM_DECODERS if isinstance(code, RmCode) else TRM_DECODERS
            for dec in self.decoders:
                if dec not in allowed:
                    raise ValueError(f"decoder {dec!r} does not apply to profile {profile!r}")
                if dec == "full" and code.layers[0].length > 16:
                    raise ValueError(f"decoder 'full' needs a layer-1 length of at most 16 in {profile!r}")
        for point in self.grid:
            self.noise_spec(point)

    def noise_spec(self, point) -> NoiseSpec:
        if self.noise_kind == "adversarial":
            return NoiseSpec("adversarial", weight=int(point), placement=self.placement)
        return NoiseSpec(self.noise_kind, p=float(point))


def run_campaign(cfg: CampaignConfig, jobs: int = 1) -> Iterator[dict]:
    decode_cfg = DecodeConfig(counter_threshold=cfg.counter_threshold, inner_decoder=cfg.inner_decoder)
    for profile in cfg.profiles:
        code = parse_code(profile)
        for decoder in cfg.decoders:
            for point in cfg.grid:
                spec = cfg.noise_spec(point)
                stats = run_trials(code, decoder, spec, cfg.trials, cfg.base_seed, jobs, decode_cfg)
                yield {
                    "profile": profile,
                    "decoder": decoder,
                    "noise": spec.label(),
                    "trials": stats.trials,
                    "block_errors": stats.block_errors,
                    "error_rate": stats.error_rate,
                    "ci": [stats.ci_low, stats.ci_high],
                    "timings": dict(sorted(stats.elapsed.items())) if cfg.record_timings else None,
                    "base_seed": cfg.base_seed,
                    "artifact_version": __version__,
                }


def write_jsonl(records: List[dict], path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def write_csv(records: List[dict], path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for rec in records:
            row = {k: rec[k] for k in CSV_FIELDS if k in rec}
            row["ci_low"], row["ci_high"] = rec["ci"]
            writer.writerow(row)
