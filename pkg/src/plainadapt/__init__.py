"""Plain-language adaptation of biomedical abstracts: pipelines and evaluation."""

__version__ = "0.1.0"
