"""
场景文件读取：YAML 文本 → pydantic 校验 → 不可变的 Scenario

文件格式（所有 phy 字段均可选，覆盖 profile 中的同名值）::

    access_mode: basic            # basic | rts_cts
    station_mode: heterogeneous   # heterogeneous | multi_ac
    phy:
      profile: 80211g
      prop_delay: 1.0e-6
    acs:                          # 按优先级从低到高排列
      - name: AC1
        aifsn: 3
        cw_min: 15
        m: 3
        retry_limit: 7
        txop_limit: 0.0           # 秒
        queue_size: 10
        payload_bytes: 1034       # 或 payload_bits
        flows: 5
        offered_load_bps: 2.0e6   # 或 lambda_pps
        traffic: {kind: poisson}  # poisson | cbr | on_off (on_mean, off_mean)
"""
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from edca_markov.core.exceptions import ConfigError, ConfigParseError
from edca_markov.core.logger import logger
from edca_markov.core.model_config.profiles import PHY_PROFILES, DEFAULT_PROFILE
from edca_markov.core.model_config.types import (
    AcConfig, Scenario, AccessMode, StationMode, TrafficKind,
)


class PhySchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    profile: str = DEFAULT_PROFILE
    t_slot: Optional[float] = None
    sifs: Optional[float] = None
    prop_delay: Optional[float] = None
    data_rate: Optional[float] = None
    basic_rate: Optional[float] = None
    phy_overhead: Optional[float] = None
    mac_header_bits: Optional[int] = None
    t_ack: Optional[float] = None
    t_rts: Optional[float] = None
    t_cts: Optional[float] = None
    ack_timeout: Optional[float] = None
    cts_timeout: Optional[float] = None


class TrafficSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: TrafficKind = TrafficKind.POISSON
    on_mean: float = Field(default=1.5, gt=0)
    off_mean: float = Field(default=1.5, gt=0)


class AcSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = ""
    aifsn: int
    cw_min: int
    m: int
    retry_limit: int
    txop_limit: float = 0.0
    queue_size: int
    payload_bytes: Optional[int] = None
    payload_bits: Optional[int] = None
    flows: int
    offered_load_bps: Optional[float] = None
    lambda_pps: Optional[float] = None
    traffic: TrafficSchema = Field(default_factory=TrafficSchema)

    @model_validator(mode="after")
    def _check_alternatives(self):
        if (self.payload_bytes is None) == (self.payload_bits is None):
            raise ValueError("exactly one of payload_bytes / payload_bits is required")
        if self.offered_load_bps is not None and self.lambda_pps is not None:
            raise ValueError("give either offered_load_bps or lambda_pps, not both")
        return self

    def to_config(self, index: int) -> AcConfig:
        bits = self.payload_bits if self.payload_bits is not None else self.payload_bytes * 8
        if self.lambda_pps is not None:
            lam = self.lambda_pps
        elif self.offered_load_bps is not None:
            lam = self.offered_load_bps / bits if bits > 0 else 0.0
        else:
            lam = 0.0
        return AcConfig(
            name=self.name or f"AC{index}",
            aifsn=self.aifsn,
            cw_min=self.cw_min,
            m=self.m,
            retry_limit=self.retry_limit,
            txop_limit=self.txop_limit,
            queue_size=self.queue_size,
            payload_bits=bits,
            lam=lam,
            flows=self.flows,
            traffic=self.traffic.kind,
            on_mean=self.traffic.on_mean,
            off_mean=self.traffic.off_mean,
        )


class ScenarioSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = ""
    access_mode: AccessMode = AccessMode.BASIC
    station_mode: StationMode = StationMode.HETEROGENEOUS
    phy: PhySchema = Field(default_factory=PhySchema)
    acs: list[AcSchema] = Field(min_length=1)

    def to_scenario(self) -> Scenario:
        if self.phy.profile not in PHY_PROFILES:
            raise ConfigParseError(f"unknown PHY profile '{self.phy.profile}'", key="phy.profile")
        overrides = self.phy.model_dump(exclude={"profile"}, exclude_none=True)
        phy = replace(PHY_PROFILES[self.phy.profile], **overrides)
        return Scenario(
            acs=tuple(ac.to_config(i) for i, ac in enumerate(self.acs)),
            phy=phy,
            access_mode=self.access_mode,
            station_mode=self.station_mode,
            name=self.name,
        )


def _format_loc(loc: tuple[Any, ...]) -> str:
    parts = []
    for item in loc:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(("." if parts else "") + str(item))
    return "".join(parts)


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """解析 YAML 文本，错误信息带出错的键名或行号"""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigParseError(f"{source}: malformed YAML: {getattr(e, 'problem', e)}", line=line) from e

    if not isinstance(data, dict):
        raise ConfigParseError(f"{source}: top level must be a mapping")

    try:
        schema = ScenarioSchema.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = _format_loc(first["loc"])
        raise ConfigParseError(f"{source}: {first['msg']}", key=key) from e

    try:
        scenario = schema.to_scenario()
    except ConfigParseError:
        raise
    except ConfigError as e:
        raise ConfigParseError(f"{source}: {e}") from e

    if not scenario.name:
        scenario = replace(scenario, name=Path(source).stem if source != "<string>" else "")
    return scenario


def load_scenario(path: Path | str) -> Scenario:
    """读取场景文件"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigParseError(f"cannot read scenario file {path}: {e}") from e
    scenario = parse_scenario(text, source=str(path))
    logger.debug(f"已加载场景 {path.name}: {len(scenario.acs)} 个 AC, 接入方式 {scenario.access_mode.value}")
    return scenario
