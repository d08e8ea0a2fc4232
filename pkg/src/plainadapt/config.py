"""Flat INI configuration; credentials stay in environment variables.

Only the env-var *names* live in the file. Every CLI subcommand accepts
flags that override these values; --seed always wins over the file.
"""

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import DEFAULT_SEED
from .errors import ConfigError


@dataclass
class Config:
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    retry_cap: int = 3
    requests_per_minute: int = 0
    model_ids: list[str] = field(default_factory=lambda: ["gpt-4o-mini-2024-07-18", "gpt-4o-2024-08-06"])
    ft_model_map: dict[str, str] = field(default_factory=dict)
    approaches: list[str] = field(default_factory=lambda: ["baseline", "two_agents", "ft"])
    max_rounds: int = 1
    split_ratio: float = 0.8
    seed: int = DEFAULT_SEED
    out_dir: str = "runs"
    baseline_system_path: str | None = None
    baseline_user_path: str | None = None
    persona_path: str | None = None
    listen: str = "127.0.0.1:8000"
    store_path: str = "annotations.jsonl"
    cors_origins: list[str] = field(default_factory=lambda: ["*"])

    def validate(self) -> None:
        if not 0 < self.split_ratio < 1:
            raise ConfigError(f"split ratio {self.split_ratio} outside (0,1)")
        for path in (self.baseline_system_path, self.baseline_user_path, self.persona_path):
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"asset file not found: {path}")


def _split_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def load_config(path: str | Path | None) -> Config:
    config = Config()
    if path is None:
        return config
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    if parser.has_section("provider"):
        sec = parser["provider"]
        config.base_url = sec.get("base_url", config.base_url)
        config.api_key_env = sec.get("api_key_env", config.api_key_env)
        config.retry_cap = sec.getint("retry_cap", config.retry_cap)
        config.requests_per_minute = sec.getint(
            "requests_per_minute", config.requests_per_minute
        )
    if parser.has_section("models"):
        sec = parser["models"]
        if "ids" in sec:
            config.model_ids = _split_list(sec["ids"])
        if "ft_map" in sec:
            config.ft_model_map = dict(
                pair.split(":", 1) for pair in _split_list(sec["ft_map"])
            )
    if parser.has_section("run"):
        sec = parser["run"]
        if "approaches" in sec:
            config.approaches = _split_list(sec["approaches"])
        config.max_rounds = sec.getint("max_rounds", config.max_rounds)
        config.out_dir = sec.get("out_dir", config.out_dir)
    if parser.has_section("split"):
        sec = parser["split"]
        config.split_ratio = sec.getfloat("ratio", config.split_ratio)
        config.seed = sec.getint("seed", config.seed)
    if parser.has_section("assets"):
        sec = parser["assets"]
        config.baseline_system_path = sec.get("baseline_system", None)
        config.baseline_user_path = sec.get("baseline_user", None)
        config.persona_path = sec.get("persona", None)
    if parser.has_section("serve"):
        sec = parser["serve"]
        config.listen = sec.get("listen", config.listen)
        config.store_path = sec.get("store", config.store_path)
        if "cors_origins" in sec:
            config.cors_origins = _split_list(sec["cors_origins"])
    config.validate()
    return config
