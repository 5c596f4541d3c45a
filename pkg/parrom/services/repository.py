"""Repositorio de artefactos en disco: JSON de sistemas y ejecuciones, tablas CSV."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterable, Sequence

from pydantic import BaseModel, ValidationError

from parrom.core.errors import ConfigError
from parrom.schemas.reports import EvaluationSummary, RunDocument
from parrom.schemas.systems import SystemDocument
from parrom.services.interfaces import ArtifactRepositoryProtocol
from parrom.services.psys import ParametricSystem, system_from_document, system_to_document

logger = logging.getLogger(__name__)


class ArtifactRepository(ArtifactRepositoryProtocol):
    """Implementa la persistencia sobre un directorio de salida."""

    def __init__(self, output_dir: str | Path):
        """
        Inicializa el repositorio; el directorio se crea al escribir.

        Args:
            output_dir (str | Path): Carpeta donde se guardan los artefactos.
        """
        self.output_dir = Path(output_dir)

    def _path(self, filename: str) -> Path:
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"No se pudo crear el directorio {self.output_dir}") from exc
        return self.output_dir / filename

    def _write_model(self, filename: str, model: BaseModel) -> str:
        path = self._path(filename)
        try:
            path.write_text(model.model_dump_json(indent=2), encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"No se pudo escribir {path}") from exc
        logger.info("Artefacto guardado en %s", path)
        return str(path)

    def save_system(self, name: str, system: ParametricSystem) -> str:
        """
        Guarda un sistema como `<name>.json`.

        Args:
            name (str): Nombre base del archivo.
            system (ParametricSystem): Sistema a serializar.

        Returns:
            str: Ruta del archivo escrito.
        """
        return self._write_model(f"{name}.json", system_to_document(system))

    def load_system(self, path: str | Path) -> ParametricSystem:
        try:
            raw = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"No se pudo leer el sistema {path}") from exc
        try:
            document = SystemDocument.model_validate_json(raw)
        except ValidationError as exc:
            raise ConfigError(f"Documento de sistema inválido en {path}: {exc.error_count()} errores") from exc
        return system_from_document(document)

    def save_run(self, run: RunDocument) -> str:
        return self._write_model("run.json", run)

    def save_summary(self, summary: EvaluationSummary) -> str:
        return self._write_model("summary.json", summary)

    def save_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
        """Escribe una tabla en formato largo como `<name>.csv`."""
        path = self._path(f"{name}.csv")
        try:
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle)
                writer.writerow(header)
                writer.writerows(rows)
        except OSError as exc:
            raise ConfigError(f"No se pudo escribir {path}") from exc
        return str(path)
