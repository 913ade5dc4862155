"""Service for body corpora and the work items of an experiment."""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.core.exceptions import ConfigError
from app.models.geometry import Body
from app.schemas.experiment_schema import BODY_ONLY_CHECKS, CheckName, ExperimentConfig
from app.services.body_service import body_service
from app.services.storage_service import storage_service
from app.utils.random_utils import derive_seed

logger = logging.getLogger(__name__)


@dataclass
class CorpusEntry:
    body_id: str
    body: Body


class CorpusService:
    """Service for generating corpora and expanding configs into items."""

    def standard_bodies(self, n: int) -> List[CorpusEntry]:
        """Cube and cross-polytope, plus the sheared square in the plane."""
        entries = [
            CorpusEntry(f"cube{n}d", body_service.make_cube(n)),
            CorpusEntry(f"cross{n}d", body_service.make_cross_polytope(n)),
        ]
        if n == 2:
            entries.append(CorpusEntry("sheared_square", self.sheared_square()))
        return entries

    def sheared_square(self):
        """{|x2| <= 1, |x1 - x2| <= 1}."""
        return body_service.make_hpolytope([[0.0, 1.0], [0.0, -1.0], [1.0, -1.0], [-1.0, 1.0]], symmetric=True)

    def generate(self, n: int, count: int, vertex_pairs: Optional[int] = None, seed: int = 0) -> List[CorpusEntry]:
        """Random symmetric polytopes, one derived seed per body."""
        pairs = vertex_pairs or n + 2
        return [
            CorpusEntry(
                f"rand{n}d_s{seed}_{index:03d}",
                body_service.random_symmetric_polytope(n, pairs, derive_seed(seed, index))
            )
            for index in range(count)
        ]

    def write_corpus(self, entries: List[CorpusEntry], out_dir) -> List[Path]:
        """One body file per entry, named after its body_id."""
        return [
            storage_service.save_body(entry.body, Path(out_dir) / f"{entry.body_id}.json", entry.body_id)
            for entry in entries
        ]

    def build_corpus(self, config: ExperimentConfig) -> List[CorpusEntry]:
        """Generated, standard and file bodies of an experiment."""
        spec = config.corpus
        entries: List[CorpusEntry] = []
        if spec.standard:
            entries.extend(self.standard_bodies(config.dim))
        if spec.count:
            entries.extend(self.generate(config.dim, spec.count, spec.vertex_pairs, spec.seed))
        for path in spec.files:
            body = storage_service.load_body(path)
            if body.dim != config.dim:
                raise ConfigError(f"body file {path} has dimension {body.dim}, expected {config.dim}")
            entries.append(CorpusEntry(storage_service.body_id_for(path), body))
        if not entries:
            raise ConfigError("empty corpus")
        ids = [entry.body_id for entry in entries]
        if len(set(ids)) != len(ids):
            raise ConfigError("body ids in the corpus must be unique")
        logger.info(f"Corpus of {len(entries)} bodies in dimension {config.dim}")
        return entries

    def build_items(self, config: ExperimentConfig, entries: List[CorpusEntry]) -> List[Dict[str, Any]]:
        """
        JSON payloads, one per (check, body, measure).

        Body-only checks run once per body, ball log-concavity once per
        measure, prop8 pairs each body with the next one in the corpus.
        """
        documents = [
            storage_service.body_to_document(entry.body, entry.body_id).model_dump(mode="json", exclude_none=True)
            for entry in entries
        ]
        measures = [spec.model_dump(mode="json", exclude_none=True) for spec in config.measures]
        shared = {
            "dim": config.dim,
            "options": config.options.model_dump(mode="json"),
            "tolerances": config.tolerances.model_dump(mode="json"),
        }
        items = []
        for check in config.checks:
            if check == CheckName.BALL_LOGCONCAVITY:
                items.extend({"check": check.value, "body_id": "ball", "measure": m} for m in measures)
                continue
            for index, (entry, document) in enumerate(zip(entries, documents)):
                base = {"check": check.value, "body_id": entry.body_id, "body": document}
                if check == CheckName.PROP8:
                    base["body2"] = documents[(index + 1) % len(documents)]
                if check in BODY_ONLY_CHECKS:
                    items.append(base)
                else:
                    items.extend({**base, "measure": m} for m in measures)
        for index, item in enumerate(items):
            item.update(shared)
            item["seed"] = derive_seed(config.seed, index)
        return items


corpus_service = CorpusService()
