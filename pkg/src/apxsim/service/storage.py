"""Project storage: a directory of .apx.json documents plus page PNGs."""

from __future__ import annotations

import itertools
from pathlib import Path

from ..errors import UnknownEntity
from ..scene.model import Project
from ..scene.persist import load_project, save_project
from ..vision.raster import RasterImage


class ProjectStore:
    def __init__(self, data_dir):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, Project] = {}
        self._ids = itertools.count(1)

    def _fresh_id(self) -> str:
        while True:
            pid = f"p{next(self._ids)}"
            if pid not in self._cache and not (self.root / f"{pid}.apx.json").exists():
                return pid

    def create(self, page: RasterImage, project_id: str | None = None) -> Project:
        pid = project_id or self._fresh_id()
        project = Project(id=pid, page=page)
        self._cache[pid] = project
        self.save(project)
        return project

    def adopt(self, project: Project) -> Project:
        self._cache[project.id] = project
        self.save(project)
        return project

    def save(self, project: Project):
        (self.root / f"{project.id}.apx.json").write_bytes(save_project(project))
        (self.root / f"{project.id}.page.png").write_bytes(project.page.to_png())

    def get(self, project_id: str) -> Project:
        if project_id in self._cache:
            return self._cache[project_id]
        path = self.root / f"{project_id}.apx.json"
        if not path.exists():
            raise UnknownEntity(f"no project {project_id!r}")
        project = load_project(path.read_bytes())
        self._cache[project_id] = project
        return project

    def list_ids(self) -> list[str]:
        ids = set(self._cache)
        ids.update(p.name[: -len(".apx.json")] for p in self.root.glob("*.apx.json"))
        return sorted(ids)
