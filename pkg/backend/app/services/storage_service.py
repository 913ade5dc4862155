"""Storage service for body files, experiment configs and CSV artifacts."""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import GeometryError
from app.models.geometry import Body, HPolytope, VPolytope
from app.schemas.body_schema import BodyDocument, BodyKind
from app.schemas.estimate_schema import REPORT_COLUMNS, VerificationReport
from app.schemas.experiment_schema import ExperimentConfig
from app.services.body_service import body_service
from app.utils.file_utils import ensure_directory, format_float

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class StorageService:
    """Service for reading and writing experiment files."""

    @property
    def output_dir(self) -> Path:
        return Path(settings.OUTPUT_DIR)

    # ------------------------------------------------------------------
    # Bodies
    # ------------------------------------------------------------------

    def body_to_document(self, body: Body, body_id: Optional[str] = None) -> BodyDocument:
        """Serializable form of a body; geometric-mean and custom oracles have none."""
        if isinstance(body, HPolytope):
            return BodyDocument(
                dim=body.dim,
                kind=BodyKind.HPOLY,
                rows=body.normals.tolist(),
                offsets=None if body.normalized else body.offsets.tolist(),
                symmetric=body.symmetric,
                body_id=body_id
            )
        if isinstance(body, VPolytope):
            return BodyDocument(
                dim=body.dim,
                kind=BodyKind.VPOLY,
                rows=body.vertices.tolist(),
                symmetric=body.symmetric,
                body_id=body_id
            )
        if body.kind == "ball":
            return BodyDocument(dim=body.dim, kind=BodyKind.BALL, radius=body.radius, body_id=body_id)
        if body.kind == "oracle-composite":
            return BodyDocument(
                dim=body.dim,
                kind=BodyKind.COMPOSITE,
                parts=[self.body_to_document(part) for part in body.parts],
                body_id=body_id
            )
        raise GeometryError(f"{body.kind} bodies cannot be written to a body file")

    def body_from_document(self, document: Union[BodyDocument, Dict[str, Any]]) -> Body:
        """Canonical body from a document; canonicalization is idempotent, so round trips are exact."""
        doc = document if isinstance(document, BodyDocument) else BodyDocument.model_validate(document)
        if doc.kind == BodyKind.HPOLY:
            return body_service.make_hpolytope(doc.rows, doc.offsets, symmetric=doc.symmetric)
        if doc.kind == BodyKind.VPOLY:
            return body_service.make_vpolytope(doc.rows, symmetric=doc.symmetric)
        if doc.kind == BodyKind.BALL:
            return body_service.make_ball(doc.dim, doc.radius)
        return body_service.intersect_oracle([self.body_from_document(part) for part in doc.parts])

    def save_body(self, body: Body, path: PathLike, body_id: Optional[str] = None) -> Path:
        """Write one body document as JSON."""
        file_path = Path(path)
        ensure_directory(file_path.parent)
        document = self.body_to_document(body, body_id)
        file_path.write_text(
            json.dumps(document.model_dump(mode="json", exclude_none=True), indent=2),
            encoding="utf-8"
        )
        logger.info(f"Saved {document.kind.value} body to {file_path}")
        return file_path

    def load_body_document(self, path: PathLike) -> BodyDocument:
        file_path = Path(path)
        return BodyDocument.model_validate(json.loads(file_path.read_text(encoding="utf-8")))

    def load_body(self, path: PathLike) -> Body:
        """Read and canonicalize a body file."""
        return self.body_from_document(self.load_body_document(path))

    def body_id_for(self, path: PathLike) -> str:
        """Stored body_id, or the file stem."""
        document = self.load_body_document(path)
        return document.body_id or Path(path).stem

    # ------------------------------------------------------------------
    # Configs and reports
    # ------------------------------------------------------------------

    def load_config(self, path: PathLike) -> ExperimentConfig:
        """Parse and validate an experiment document."""
        file_path = Path(path)
        config = ExperimentConfig.model_validate(json.loads(file_path.read_text(encoding="utf-8")))
        logger.info(f"Loaded experiment config {file_path} (dim={config.dim}, checks={len(config.checks)})")
        return config

    def write_reports(
        self,
        reports: Iterable[VerificationReport],
        out_dir: Optional[PathLike] = None,
        name: str = "reports.csv"
    ) -> Path:
        """Write a report CSV sorted by (body_id, measure_id, inequality_id)."""
        directory = ensure_directory(out_dir or self.output_dir)
        file_path = directory / name
        ordered = sorted(reports, key=lambda report: report.sort_key())
        with file_path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=REPORT_COLUMNS)
            writer.writeheader()
            for report in ordered:
                writer.writerow(report.csv_row())
        logger.info(f"Wrote {len(ordered)} reports to {file_path}")
        return file_path

    def read_reports(self, path: PathLike) -> List[Dict[str, str]]:
        with Path(path).open(newline="", encoding="utf-8") as handle:
            return list(csv.DictReader(handle))

    def write_sweep(
        self,
        rows: Sequence[Dict[str, float]],
        columns: Sequence[str],
        out_dir: Optional[PathLike] = None,
        name: str = "sweep.csv"
    ) -> Path:
        """Plot-ready CSV, one row per grid point."""
        directory = ensure_directory(out_dir or self.output_dir)
        file_path = directory / name
        with file_path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=list(columns))
            writer.writeheader()
            for row in rows:
                writer.writerow({
                    key: format_float(value) if isinstance(value, (float, np.floating)) else value
                    for key, value in row.items()
                })
        logger.info(f"Wrote sweep with {len(rows)} rows to {file_path}")
        return file_path

    def plot_sweep(
        self,
        rows: Sequence[Dict[str, float]],
        x_key: str,
        y_key: str,
        path: PathLike,
        title: str = ""
    ) -> Optional[Path]:
        """Line chart of a sweep; skipped when matplotlib is unavailable."""
        try:
            import matplotlib
            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            logger.warning("matplotlib is not installed; skipping plot")
            return None
        file_path = Path(path)
        ensure_directory(file_path.parent)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot([row[x_key] for row in rows], [row[y_key] for row in rows], marker="o")
        ax.set_xlabel(x_key)
        ax.set_ylabel(y_key)
        if title:
            ax.set_title(title)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(file_path, dpi=120)
        plt.close(fig)
        logger.info(f"Saved plot to {file_path}")
        return file_path


storage_service = StorageService()
