"""Character trait analytics for fiction.

Thin wrapper over the C++ engine. View methods return parsed JSON unless a
CSV format is requested.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Optional

from . import _core
from ._core import TraitlensError

__all__ = ["Project", "TraitlensError"]


class Project:
    """A story with its annotations, curated characters and analysis results."""

    def __init__(self, text: str, config: Optional[dict] = None, *, _core_project=None):
        if _core_project is not None:
            self._p = _core_project
        else:
            self._p = _core.Project(text, json.dumps(config) if config else "")

    @classmethod
    def load(cls, path: str) -> "Project":
        return cls("", _core_project=_core.Project.load(str(path)))

    @classmethod
    def loads(cls, content: str) -> "Project":
        return cls("", _core_project=_core.Project.loads(content))

    def save(self, path: str) -> None:
        self._p.save(str(path))

    def dumps(self) -> str:
        return self._p.dumps()

    @property
    def revision(self) -> int:
        return self._p.revision

    @property
    def state(self) -> str:
        return self._p.state()

    def load_resources(self, sentiment_lexicon=None, emotion_lexicon=None, embeddings=None) -> list[str]:
        s = lambda v: None if v is None else str(v)
        return self._p.load_resources(s(sentiment_lexicon), s(emotion_lexicon), s(embeddings))

    def import_annotations(self, payload: str | dict) -> None:
        self._p.import_annotations(payload if isinstance(payload, str) else json.dumps(payload))

    def merge(self, source: str, target: str) -> None:
        self._p.merge(source, target)

    def label(self, cluster_id: str, label: str) -> None:
        self._p.label(cluster_id, label)

    def name(self, cluster_id: str, name: Optional[str]) -> None:
        self._p.name(cluster_id, name)

    def analyze(self) -> None:
        self._p.analyze()

    def text(self, start: Optional[int] = None, end: Optional[int] = None) -> str:
        return self._p.text(start, end)

    def summary(self) -> dict:
        return json.loads(self._p.summary_json())

    def clusters(self) -> dict:
        return json.loads(self._p.clusters_json())

    def matrix(self, kind: str, level: str = "chapter", chapter: Optional[int] = None,
               characters: Iterable[str] = (), smooth: bool = True, format: str = "json") -> Any:
        body = self._p.matrix(kind, level, chapter, list(characters), smooth, format)
        return json.loads(body) if format == "json" else body

    def wordzone(self, character: str, kind: str = "actions", format: str = "json") -> Any:
        body = self._p.wordzone(character, kind, format)
        return json.loads(body) if format == "json" else body

    def cooccurrence(self, character: str, chapter: int) -> list[str]:
        return json.loads(self._p.cooccurrence(character, chapter))["characters"]

    def contexts(self, max_rows: int = 3, format: str = "json") -> Any:
        body = self._p.contexts(max_rows, format)
        return json.loads(body) if format == "json" else body
