"""Loading of versioned prompt and rubric text assets shipped with the package."""

from importlib import resources

_ASSETS = resources.files("plainadapt") / "assets"


def load_prompt(name: str) -> str:
    return (_ASSETS / "prompts" / f"{name}.txt").read_text(encoding="utf-8").strip()


def load_rubric_text(criterion: str) -> str:
    return (_ASSETS / "rubric" / f"{criterion}.txt").read_text(encoding="utf-8").strip()
