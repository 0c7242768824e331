"""File formats: detection logs and structured configuration documents.

The detection log is the integration boundary of the package: one JSON
object per line, first line a schema header, then one record per
(scenario, model, distance).  Logs are written and read streaming, with
records for a scenario stored contiguously.

Configuration documents (safety parameters, manifests, scenario lists,
profile packs, campaigns) are JSON files with a ``schema``/``version``
envelope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

from .ensemble import DetectionRecord, EnsembleFrame, EnsembleTrace, build_trace
from .ensemble import filter_confidence
from .errors import (
    DocumentError,
    DuplicateRecordError,
    LogFormatError,
    ValidationError,
)
from .kinematics import stopping_profile
from .safety import SafetyParams
from .scenarios import (
    AdversaryKind,
    CampaignManifest,
    DistanceGrid,
    ScenarioConfig,
    VehicleParams,
    WeatherConfig,
    WEATHER_PARAMS,
    baseline_manifest,
    set1_manifest,
)
from .synth import ModelProfile, default_profiles
from .scenarios import OcclusionLevel

LOG_SCHEMA = "detlog"
LOG_VERSION = 1

_RECORD_KEYS = {"scenario_id", "model", "distance_m", "confidence"}


# --------------------------------------------------------------------------
# detection logs


def write_log(
    path: str | Path,
    records: Iterable[DetectionRecord],
    models: Sequence[str] | None = None,
) -> int:
    """Stream records to a log file; returns the number of records written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        _write_header(fh, models)
        for rec in records:
            fh.write(_record_line(rec))
            count += 1
    return count


def _write_header(fh: IO[str], models: Sequence[str] | None) -> None:
    header: dict[str, object] = {"schema": LOG_SCHEMA, "version": LOG_VERSION}
    if models is not None:
        header["models"] = list(models)
    fh.write(json.dumps(header, ensure_ascii=False) + "\n")


def _record_line(rec: DetectionRecord) -> str:
    return (
        json.dumps(
            {
                "scenario_id": rec.scenario_id,
                "model": rec.model,
                "distance_m": rec.distance_m,
                "confidence": rec.confidence,
            },
            ensure_ascii=False,
        )
        + "\n"
    )


class LogWriter:
    """Incremental log writer for per-scenario streaming."""

    def __init__(self, path: str | Path, models: Sequence[str] | None = None):
        self._fh = open(path, "w", encoding="utf-8")
        _write_header(self._fh, models)
        self.count = 0

    def write_records(self, records: Iterable[DetectionRecord]) -> None:
        for rec in records:
            self._fh.write(_record_line(rec))
            self.count += 1

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "LogWriter":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


@dataclass(frozen=True)
class DetectionLog:
    """Lazy handle on a detection log file."""

    path: Path
    models: tuple[str, ...] | None

    def groups(self) -> Iterator[tuple[str, list[DetectionRecord]]]:
        """Yield (scenario_id, records) per contiguous scenario block."""
        seen: set[str] = set()
        current_id: str | None = None
        current: list[DetectionRecord] = []
        keys: set[tuple[str, float]] = set()
        with open(self.path, "r", encoding="utf-8") as fh:
            next(fh)  # header, validated in open_log
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                rec = _parse_record(line, lineno)
                if rec.scenario_id != current_id:
                    if current_id is not None:
                        yield current_id, current
                        seen.add(current_id)
                    if rec.scenario_id in seen:
                        raise LogFormatError(
                            f"line {lineno}: scenario {rec.scenario_id!r} "
                            "reappears after other scenarios; log lines for a "
                            "scenario must be contiguous"
                        )
                    current_id = rec.scenario_id
                    current = []
                    keys = set()
                key = (rec.model, rec.distance_m)
                if key in keys:
                    raise DuplicateRecordError(
                        f"line {lineno}: duplicate record for model "
                        f"{rec.model!r} at distance {rec.distance_m} "
                        f"in scenario {rec.scenario_id!r}"
                    )
                keys.add(key)
                current.append(rec)
        if current_id is not None:
            yield current_id, current

    def records(self) -> Iterator[DetectionRecord]:
        for _, records in self.groups():
            yield from records


def open_log(path: str | Path) -> DetectionLog:
    """Validate the header line and return a lazy log handle."""
    p = Path(path)
    with open(p, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if not first:
        raise LogFormatError(f"{p}: empty file, expected a header line")
    try:
        header = json.loads(first)
    except json.JSONDecodeError as exc:
        raise LogFormatError(f"{p}: line 1: invalid header: {exc}") from None
    if not isinstance(header, dict) or header.get("schema") != LOG_SCHEMA:
        raise LogFormatError(
            f"{p}: line 1: expected header with schema {LOG_SCHEMA!r}"
        )
    if header.get("version") != LOG_VERSION:
        raise LogFormatError(
            f"{p}: line 1: unsupported log version {header.get('version')!r}"
        )
    models = header.get("models")
    if models is not None:
        if (
            not isinstance(models, list)
            or not all(isinstance(m, str) and m for m in models)
            or len(set(models)) != len(models)
        ):
            raise LogFormatError(
                f"{p}: line 1: 'models' must be a list of unique non-empty strings"
            )
        models = tuple(models)
    return DetectionLog(path=p, models=models)


def _parse_record(line: str, lineno: int) -> DetectionRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LogFormatError(f"line {lineno}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise LogFormatError(f"line {lineno}: expected an object")
    extra = set(obj) - _RECORD_KEYS
    missing = _RECORD_KEYS - set(obj)
    if extra or missing:
        parts = []
        if missing:
            parts.append(f"missing fields {sorted(missing)}")
        if extra:
            parts.append(f"unknown fields {sorted(extra)}")
        raise LogFormatError(f"line {lineno}: {'; '.join(parts)}")
    if not isinstance(obj["scenario_id"], str) or not isinstance(obj["model"], str):
        raise LogFormatError(f"line {lineno}: scenario_id and model must be strings")
    if isinstance(obj["distance_m"], bool) or not isinstance(
        obj["distance_m"], (int, float)
    ):
        raise LogFormatError(f"line {lineno}: distance_m must be a number")
    if isinstance(obj["confidence"], bool) or not isinstance(
        obj["confidence"], (int, float)
    ):
        raise LogFormatError(f"line {lineno}: confidence must be a number")
    try:
        return DetectionRecord(
            scenario_id=obj["scenario_id"],
            model=obj["model"],
            distance_m=obj["distance_m"],
            confidence=obj["confidence"],
        )
    except ValidationError as exc:
        raise LogFormatError(f"line {lineno}: {exc}") from None


def _single_model_trace(
    scenario_id: str, records: Sequence[DetectionRecord], theta_check: float
) -> EnsembleTrace:
    # Descriptive single-model view: mu is the model's filtered confidence,
    # sigma is zero.  The >=2-member rule applies to the ensemble reduction,
    # not to this per-model convenience.
    frames = []
    for rec in sorted(records, key=lambda r: -r.distance_m):
        p = filter_confidence(rec.confidence, theta_check)
        frames.append(
            EnsembleFrame(
                distance_m=rec.distance_m,
                filtered={rec.model: p},
                mu=p,
                sigma=0.0,
            )
        )
    return EnsembleTrace(scenario_id=scenario_id, frames=tuple(frames))


def iter_traces(
    log: DetectionLog,
    theta_check: float,
    model: str | None = None,
) -> Iterator[EnsembleTrace]:
    """Build one ensemble trace per scenario group of the log.

    The ensemble membership is the header's model list when present,
    otherwise the models seen in each group.  With ``model``, the log is
    restricted to that single model and per-model traces are produced.
    """
    for scenario_id, records in log.groups():
        if model is not None:
            selected = [r for r in records if r.model == model]
            if not selected:
                raise ValidationError(
                    f"scenario {scenario_id!r} has no records for model {model!r}"
                )
            yield _single_model_trace(scenario_id, selected, theta_check)
            continue
        members = (
            log.models
            if log.models is not None
            else tuple(sorted({r.model for r in records}))
        )
        yield build_trace(records, members, theta_check)


# --------------------------------------------------------------------------
# structured documents


def _load_document(path: str | Path, schema: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise DocumentError(f"{p}: file does not exist")
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{p}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or obj.get("schema") != schema:
        raise DocumentError(f"{p}: expected a document with schema {schema!r}")
    if obj.get("version") != 1:
        raise DocumentError(f"{p}: unsupported version {obj.get('version')!r}")
    return obj


def _dump_document(path: str | Path, obj: Mapping[str, object]) -> None:
    Path(path).write_text(
        json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )


# -- safety parameters


def safety_to_dict(params: SafetyParams) -> dict:
    return {
        "schema": "safety",
        "version": 1,
        "sd_m": params.sd_m,
        "theta": params.theta,
        "theta_check": params.theta_check,
        "reversal_delta": params.reversal_delta,
        "systemic_mu_max": params.systemic_mu_max,
        "systemic_sigma_max": params.systemic_sigma_max,
        "systemic_window_m": params.systemic_window_m,
        "consistency_epsilon": params.consistency_epsilon,
    }


def safety_from_dict(obj: Mapping[str, object], context: str = "safety") -> SafetyParams:
    data = {k: v for k, v in obj.items() if k not in ("schema", "version")}
    vehicle = data.pop("vehicle", None)
    if (vehicle is None) == (data.get("sd_m") is None):
        raise DocumentError(
            f"{context}: give exactly one of 'sd_m' or 'vehicle' "
            "(speed_kmph/reaction_s/friction) to fix the stopping distance"
        )
    if vehicle is not None:
        try:
            v = VehicleParams(**vehicle)  # type: ignore[arg-type]
        except (TypeError, ValidationError) as exc:
            raise DocumentError(f"{context}: invalid vehicle: {exc}") from None
        data["sd_m"] = stopping_profile(
            v.speed_kmph, v.reaction_s, v.friction
        ).stopping_distance_m
    try:
        return SafetyParams(**data)  # type: ignore[arg-type]
    except (TypeError, ValidationError) as exc:
        raise DocumentError(f"{context}: {exc}") from None


def load_safety(path: str | Path) -> SafetyParams:
    return safety_from_dict(_load_document(path, "safety"), context=str(path))


def save_safety(path: str | Path, params: SafetyParams) -> None:
    _dump_document(path, safety_to_dict(params))


# -- manifests


def manifest_to_dict(manifest: CampaignManifest) -> dict:
    return {
        "schema": "manifest",
        "version": 1,
        "name": manifest.name,
        "levels": {p: list(manifest.levels[p]) for p in WEATHER_PARAMS},
        "adversaries": [
            {"kind": a.name.value, "occlusion": a.occlusion.value}
            for a in manifest.adversaries
        ],
        "vehicle": {
            "speed_kmph": manifest.vehicle.speed_kmph,
            "reaction_s": manifest.vehicle.reaction_s,
            "friction": manifest.vehicle.friction,
        },
        "grid": {
            "start_m": manifest.grid.start_m,
            "step_m": manifest.grid.step_m,
            "end_m": manifest.grid.end_m,
        },
    }


def _adversary_from(obj: object, context: str) -> AdversaryKind:
    try:
        if isinstance(obj, str):
            return AdversaryKind.of(obj)
        if isinstance(obj, dict):
            return AdversaryKind.of(obj["kind"], obj.get("occlusion"))
    except (ValidationError, KeyError) as exc:
        raise DocumentError(f"{context}: invalid adversary {obj!r}: {exc}") from None
    raise DocumentError(f"{context}: invalid adversary entry {obj!r}")


def manifest_from_dict(obj: Mapping[str, object], context: str = "manifest") -> CampaignManifest:
    try:
        levels = {
            param: tuple(values)
            for param, values in dict(obj["levels"]).items()  # type: ignore[arg-type]
        }
        adversaries = tuple(
            _adversary_from(a, context) for a in obj["adversaries"]  # type: ignore[union-attr]
        )
        vehicle = VehicleParams(**obj["vehicle"])  # type: ignore[arg-type]
        grid = DistanceGrid(**obj["grid"])  # type: ignore[arg-type]
        return CampaignManifest(
            name=str(obj["name"]),
            levels=levels,
            adversaries=adversaries,
            vehicle=vehicle,
            grid=grid,
        )
    except DocumentError:
        raise
    except (KeyError, TypeError, ValidationError) as exc:
        raise DocumentError(f"{context}: invalid manifest: {exc}") from None


#: Manifests that ship with the package, addressable by name.
BUILTIN_MANIFESTS = {
    "set1": set1_manifest,
    "baseline": baseline_manifest,
}


def resolve_manifest(ref: object, base_dir: Path | None = None) -> CampaignManifest:
    """Resolve a manifest reference: builtin name, file path, or inline object."""
    if isinstance(ref, dict):
        return manifest_from_dict(ref)
    if isinstance(ref, str):
        builtin = BUILTIN_MANIFESTS.get(ref)
        if builtin is not None:
            return builtin()
        path = Path(ref)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_manifest(path)
    raise DocumentError(f"invalid manifest reference {ref!r}")


def load_manifest(path: str | Path) -> CampaignManifest:
    return manifest_from_dict(_load_document(path, "manifest"), context=str(path))


def save_manifest(path: str | Path, manifest: CampaignManifest) -> None:
    _dump_document(path, manifest_to_dict(manifest))


# -- scenario lists


def scenarios_to_dict(scenarios: Sequence[ScenarioConfig]) -> dict:
    return {
        "schema": "scenarios",
        "version": 1,
        "scenarios": [
            {
                "scenario_id": sc.scenario_id,
                "weather": {p: sc.weather.level(p) for p in WEATHER_PARAMS},
                "adversary": {
                    "kind": sc.adversary.name.value,
                    "occlusion": sc.adversary.occlusion.value,
                },
                "vehicle": {
                    "speed_kmph": sc.vehicle.speed_kmph,
                    "reaction_s": sc.vehicle.reaction_s,
                    "friction": sc.vehicle.friction,
                },
                "distances_m": list(sc.distances_m),
            }
            for sc in scenarios
        ],
    }


def scenarios_from_dict(obj: Mapping[str, object], context: str = "scenarios") -> list[ScenarioConfig]:
    items = obj.get("scenarios")
    if not isinstance(items, list):
        raise DocumentError(f"{context}: 'scenarios' must be a list")
    result = []
    for i, item in enumerate(items):
        try:
            result.append(
                ScenarioConfig(
                    scenario_id=item["scenario_id"],
                    weather=WeatherConfig(**item["weather"]),
                    adversary=_adversary_from(item["adversary"], context),
                    vehicle=VehicleParams(**item["vehicle"]),
                    distances_m=tuple(item["distances_m"]),
                )
            )
        except DocumentError:
            raise
        except (KeyError, TypeError, ValidationError) as exc:
            raise DocumentError(
                f"{context}: scenario entry {i}: {exc}"
            ) from None
    return result


def load_scenarios(path: str | Path) -> list[ScenarioConfig]:
    return scenarios_from_dict(_load_document(path, "scenarios"), context=str(path))


def save_scenarios(path: str | Path, scenarios: Sequence[ScenarioConfig]) -> None:
    _dump_document(path, scenarios_to_dict(scenarios))


# -- profile packs


def profiles_to_dict(profiles: Sequence[ModelProfile]) -> dict:
    return {
        "schema": "profiles",
        "version": 1,
        "profiles": [
            {
                "model": p.model,
                "p_max": p.p_max,
                "d50_m": p.d50_m,
                "slope_per_m": p.slope_per_m,
                "fog_sensitivity": p.fog_sensitivity,
                "precip_sensitivity": p.precip_sensitivity,
                "cloud_sensitivity": p.cloud_sensitivity,
                "lowlight_sensitivity": p.lowlight_sensitivity,
                "glare_sensitivity": p.glare_sensitivity,
                "occlusion_penalty": {
                    level.value: p.occlusion_penalty[level] for level in OcclusionLevel
                },
                "noise_sigma": p.noise_sigma,
            }
            for p in profiles
        ],
    }


def profiles_from_dict(obj: Mapping[str, object], context: str = "profiles") -> tuple[ModelProfile, ...]:
    items = obj.get("profiles")
    if not isinstance(items, list):
        raise DocumentError(f"{context}: 'profiles' must be a list")
    result = []
    for i, item in enumerate(items):
        try:
            data = dict(item)
            data["occlusion_penalty"] = {
                OcclusionLevel(level): value
                for level, value in dict(data["occlusion_penalty"]).items()
            }
            result.append(ModelProfile(**data))
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise DocumentError(f"{context}: profile entry {i}: {exc}") from None
    return tuple(result)


def load_profiles(path: str | Path) -> tuple[ModelProfile, ...]:
    return profiles_from_dict(_load_document(path, "profiles"), context=str(path))


def save_profiles(path: str | Path, profiles: Sequence[ModelProfile]) -> None:
    _dump_document(path, profiles_to_dict(profiles))


# -- campaign documents


@dataclass(frozen=True)
class Campaign:
    """A fully resolved campaign: what to run, with what, and how to judge it."""

    manifest: CampaignManifest
    safety: SafetyParams
    profiles: tuple[ModelProfile, ...]
    seed: int


def load_campaign(path: str | Path) -> Campaign:
    """Load a campaign document, resolving file references relative to it.

    ``manifest`` may be a builtin name, a file path, or an inline manifest.
    ``profiles`` may be a file path, an inline list, or omitted for the
    default pack.  ``safety`` may be a file path, an inline object, or
    omitted to derive the stopping distance from the manifest vehicle.
    """
    p = Path(path)
    obj = _load_document(p, "campaign")
    base = p.parent

    manifest = resolve_manifest(obj.get("manifest"), base_dir=base)

    profiles_ref = obj.get("profiles")
    if profiles_ref is None:
        profiles = default_profiles()
    elif isinstance(profiles_ref, str):
        ref_path = Path(profiles_ref)
        if not ref_path.is_absolute():
            ref_path = base / ref_path
        profiles = load_profiles(ref_path)
    elif isinstance(profiles_ref, list):
        profiles = profiles_from_dict(
            {"schema": "profiles", "version": 1, "profiles": profiles_ref},
            context=str(p),
        )
    else:
        raise DocumentError(f"{p}: invalid profiles reference {profiles_ref!r}")

    safety_ref = obj.get("safety")
    if safety_ref is None:
        v = manifest.vehicle
        sd = stopping_profile(v.speed_kmph, v.reaction_s, v.friction)
        safety = SafetyParams(sd_m=sd.stopping_distance_m)
    elif isinstance(safety_ref, str):
        ref_path = Path(safety_ref)
        if not ref_path.is_absolute():
            ref_path = base / ref_path
        safety = load_safety(ref_path)
    elif isinstance(safety_ref, dict):
        safety = safety_from_dict(safety_ref, context=str(p))
    else:
        raise DocumentError(f"{p}: invalid safety reference {safety_ref!r}")

    seed = obj.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise DocumentError(f"{p}: seed must be an integer, got {seed!r}")
    return Campaign(manifest=manifest, safety=safety, profiles=profiles, seed=seed)
